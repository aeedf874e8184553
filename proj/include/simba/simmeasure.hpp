#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simba/benchio.hpp"
#include "simba/grid.hpp"

namespace simba {

enum class Measure {
  kPearson,
  kSpearman,
  kKendallTau,
  kCosine,
  kManhattan,
  kEuclidean,
  kMinkowskiP3,
  kWasserstein,
  kJensenShannon,
};

inline constexpr std::array<Measure, 9> kAllMeasures = {
    Measure::kPearson,   Measure::kSpearman,    Measure::kKendallTau,  Measure::kCosine,        Measure::kManhattan,
    Measure::kEuclidean, Measure::kMinkowskiP3, Measure::kWasserstein, Measure::kJensenShannon,
};

std::string_view measure_name(Measure m);
/// Accepts the canonical lower-case names ("pearson", "minkowski_p3", ...).
std::optional<Measure> parse_measure(std::string_view name);
bool is_correlation(Measure m);

struct SimilarityValue {
  double value = 0.0;
  /// Set when the value was defined by convention (zero variance, zero norm, too few rows).
  bool degenerate = false;
};

/// Similarity of two equally long columns. `max_w1` (largest pairwise
/// 1-Wasserstein distance across the benchmark) is required for kWasserstein.
SimilarityValue column_similarity(std::span<const double> x, std::span<const double> y, Measure measure,
                                  std::optional<double> max_w1 = std::nullopt);

/// d x d matrix; symmetric with unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  /// Validates shape, symmetry, and the unit diagonal; throws SchemaError.
  SimilarityMatrix(Measure measure, Grid values);

  Measure measure() const noexcept { return measure_; }
  std::size_t size() const noexcept { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Grid& values() const noexcept { return values_; }
  /// Column j, contiguous (the matrix is symmetric, so this is row j).
  std::span<const double> column(std::size_t j) const { return values_.row(j); }

 private:
  Measure measure_ = Measure::kPearson;
  Grid values_;
};

struct SimilarityDiagnostic {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string reason;
};

struct SimilarityReport {
  SimilarityMatrix matrix;
  std::vector<SimilarityDiagnostic> diagnostics;
  std::optional<double> max_w1;  // set for kWasserstein
};

SimilarityReport similarity_matrix_report(const Benchmark& bench, Measure measure);
SimilarityMatrix similarity_matrix(const Benchmark& bench, Measure measure);

/// Equal-weight 1-Wasserstein distance between two samples of the same size.
double wasserstein1(std::span<const double> x, std::span<const double> y);

/// Fractional (average) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

void write_similarity_matrix(std::ostream& out, const SimilarityMatrix& matrix,
                             const std::vector<std::string>& dataset_ids);
/// Reads the square format written above; the header must match `dataset_ids`.
SimilarityMatrix read_similarity_matrix(std::istream& in, Measure measure,
                                        const std::vector<std::string>& dataset_ids);

}  // namespace simba
