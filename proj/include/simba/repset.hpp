#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "simba/benchio.hpp"
#include "simba/simmeasure.hpp"

namespace simba {

enum class SelectionMethod { kGreedy, kBeam, kRandom, kGreedyMin, kGreedyMax };

std::string_view method_name(SelectionMethod m);

struct SelectionTrace {
  SelectionMethod method = SelectionMethod::kGreedy;
  std::vector<std::size_t> order;  // dataset indices in pick order
  std::vector<double> deltas;      // proxy coverage after each pick; empty for benchmark-only baselines
  std::size_t beam_width = 1;
  std::uint64_t seed = 0;
};

struct CoverageCurve {
  std::vector<double> etas;        // eta for prefix sizes 1..n
  std::vector<bool> undefined;     // eta was undefined (zero-variance win rates) and recorded as 0
  SelectionTrace trace;
};

/// Proxy coverage of `subset`: mean over datasets of 1 for members, else the
/// best similarity to any member. The empty set has coverage 0.
double proxy_coverage(std::span<const std::size_t> subset, const SimilarityMatrix& sim);

/// proxy_coverage(subset + {candidate}) - proxy_coverage(subset); 0 if already a member.
double coverage_gain(std::span<const std::size_t> subset, std::size_t candidate, const SimilarityMatrix& sim);

/// Greedy (beam_width == 1) or beam discovery. Stops once proxy coverage
/// reaches gamma; gamma >= 1 always runs to the full benchmark.
SelectionTrace discover_representative(const SimilarityMatrix& sim, double gamma = 1.0, std::size_t beam_width = 1);

/// kRandom, kGreedyMin, or kGreedyMax. Column means use present cells.
SelectionTrace baseline_order(const Benchmark& bench, SelectionMethod kind, std::uint64_t seed = 0);

/// Per model: the fraction of other models it strictly beats, averaged over
/// columns. Requires a complete grid with at least 2 rows.
std::vector<double> mean_win_rate(const Grid& scores);

struct CoverageValue {
  double value = 0.0;
  bool defined = true;
};

/// Pearson correlation between full-benchmark and subset mean win rates.
CoverageValue coverage(const Benchmark& bench, std::span<const std::size_t> subset);

/// Per-dataset strict win counts, so prefix win rates cost O(m) per step.
class WinTable {
 public:
  explicit WinTable(const Benchmark& bench);

  std::size_t models() const noexcept { return wins_.rows(); }
  std::size_t datasets() const noexcept { return wins_.cols(); }
  double wins(std::size_t model, std::size_t dataset) const { return wins_(model, dataset); }
  const std::vector<double>& full_mwr() const noexcept { return full_mwr_; }

 private:
  Grid wins_;
  std::vector<double> full_mwr_;
};

CoverageCurve coverage_curve(const Benchmark& bench, const SelectionTrace& trace);
CoverageCurve coverage_curve(const WinTable& table, const SelectionTrace& trace);

/// Signed trapezoidal area with size k at x = k/n, held constant down to x = 0.
double sc_auc(std::span<const double> etas);
double sc_auc(const CoverageCurve& curve);

/// Least k with eta_k >= threshold; n when no prefix qualifies.
std::size_t smallest_covering_prefix(const CoverageCurve& curve, double threshold);

/// Runs the random baseline; run r uses seed base_seed + r.
std::vector<CoverageCurve> random_curves(const Benchmark& bench, std::size_t runs, std::uint64_t base_seed);

/// Pointwise mean of equally long curves.
std::vector<double> mean_etas(std::span<const CoverageCurve> curves);

struct RandomComparison {
  double auc_prop = 0.0;
  double max2_prop = 0.0;
  std::size_t window = 0;  // prefix sizes used for max2
};

/// Fraction of random runs the system matches or beats, over the whole curve
/// and over sizes 1..max(|S*|, 2).
RandomComparison proportion_vs_random(const CoverageCurve& system, std::span<const CoverageCurve> randoms,
                                      double threshold);

}  // namespace simba
