#include "simba/repset.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "parallel.hpp"
#include "simba/kernels.hpp"
#include "simba/rng.hpp"

namespace simba {
namespace {

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double pearson_or_undefined(std::span<const double> x, std::span<const double> y, bool& defined) {
  if (is_constant(x) || is_constant(y)) {
    defined = false;
    return 0.0;
  }
  const double n = static_cast<double>(x.size());
  const double mx = kernels::sum(x) / n;
  const double my = kernels::sum(y) / n;
  const auto mom = kernels::centered_moments(x, y, mx, my);
  if (mom.xx <= 0.0 || mom.yy <= 0.0) {
    defined = false;
    return 0.0;
  }
  defined = true;
  return std::clamp(mom.xy / std::sqrt(mom.xx * mom.yy), -1.0, 1.0);
}

// Coverage levels of each dataset for a fixed subset.
struct CoverState {
  std::vector<double> lambda;
  std::vector<bool> member;
  std::vector<std::size_t> order;
  double delta = 0.0;
  double path_sum = 0.0;  // sum of deltas along the pick order, used to rank beam ties

  explicit CoverState(std::size_t d) : lambda(d, 0.0), member(d, false) {}

  double gain(std::size_t c, const SimilarityMatrix& sim) const {
    const std::size_t d = lambda.size();
    if (member[c]) return 0.0;
    if (order.empty()) return kernels::sum(sim.column(c)) / static_cast<double>(d);
    return kernels::gain_sum(lambda, sim.column(c)) / static_cast<double>(d);
  }

  void add(std::size_t c, const SimilarityMatrix& sim) {
    const auto col = sim.column(c);
    const bool first = order.empty();
    for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = first ? col[i] : std::max(lambda[i], col[i]);
    lambda[c] = 1.0;
    member[c] = true;
    order.push_back(c);
    delta = kernels::sum(lambda) / static_cast<double>(lambda.size());
    path_sum += delta;
  }
};

bool keep_going(double delta, std::size_t picked, std::size_t d, double gamma) {
  if (picked >= d) return false;
  return gamma >= 1.0 || delta < gamma;
}

SelectionTrace trace_of(const CoverState& s, SelectionMethod method, std::size_t beam_width) {
  SelectionTrace t;
  t.method = method;
  t.order = s.order;
  t.beam_width = beam_width;
  return t;
}

SelectionTrace greedy(const SimilarityMatrix& sim, double gamma) {
  const std::size_t d = sim.size();
  CoverState state(d);
  std::vector<double> deltas;
  while (keep_going(state.delta, state.order.size(), d, gamma)) {
    std::size_t best = d;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < d; ++c) {
      if (state.member[c]) continue;
      const double g = state.gain(c, sim);
      if (g > best_gain) {  // strict: lowest index wins ties
        best_gain = g;
        best = c;
      }
    }
    state.add(best, sim);
    deltas.push_back(state.delta);
  }
  auto t = trace_of(state, SelectionMethod::kGreedy, 1);
  t.deltas = std::move(deltas);
  return t;
}

struct BeamEntry {
  CoverState state;
  std::vector<double> deltas;
};

// Higher coverage first, then higher accumulated coverage, then the
// lexicographically smaller pick order.
bool beam_before(const BeamEntry& a, const BeamEntry& b) {
  if (a.state.delta != b.state.delta) return a.state.delta > b.state.delta;
  if (a.state.path_sum != b.state.path_sum) return a.state.path_sum > b.state.path_sum;
  return a.state.order < b.state.order;
}

SelectionTrace beam(const SimilarityMatrix& sim, double gamma, std::size_t width) {
  const std::size_t d = sim.size();
  std::vector<BeamEntry> frontier{{CoverState(d), {}}};
  while (keep_going(frontier.front().state.delta, frontier.front().state.order.size(), d, gamma)) {
    std::vector<BeamEntry> next;
    std::set<std::vector<bool>> seen;
    for (const auto& entry : frontier) {
      for (std::size_t c = 0; c < d; ++c) {
        if (entry.state.member[c]) continue;
        auto members = entry.state.member;
        members[c] = true;
        BeamEntry child = entry;
        child.state.add(c, sim);
        child.deltas.push_back(child.state.delta);
        // Equal sets reached through different orders: keep the better path.
        if (!seen.insert(members).second) {
          auto it = std::find_if(next.begin(), next.end(), [&](const BeamEntry& e) { return e.state.member == members; });
          if (beam_before(child, *it)) *it = std::move(child);
          continue;
        }
        next.push_back(std::move(child));
      }
    }
    std::stable_sort(next.begin(), next.end(), beam_before);
    if (next.size() > width) next.erase(next.begin() + static_cast<std::ptrdiff_t>(width), next.end());
    frontier = std::move(next);
  }
  auto t = trace_of(frontier.front().state, SelectionMethod::kBeam, width);
  t.deltas = frontier.front().deltas;
  return t;
}

}  // namespace

std::string_view method_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kGreedy:
      return "greedy";
    case SelectionMethod::kBeam:
      return "beam";
    case SelectionMethod::kRandom:
      return "random";
    case SelectionMethod::kGreedyMin:
      return "greedy_min";
    case SelectionMethod::kGreedyMax:
      return "greedy_max";
  }
  return "?";
}

double proxy_coverage(std::span<const std::size_t> subset, const SimilarityMatrix& sim) {
  const std::size_t d = sim.size();
  if (subset.empty() || d == 0) return 0.0;
  std::vector<bool> member(d, false);
  for (auto j : subset) member.at(j) = true;
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (member[i]) {
      total += 1.0;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (auto j : subset) best = std::max(best, sim(i, j));
    total += best;
  }
  return total / static_cast<double>(d);
}

double coverage_gain(std::span<const std::size_t> subset, std::size_t candidate, const SimilarityMatrix& sim) {
  if (std::find(subset.begin(), subset.end(), candidate) != subset.end()) return 0.0;
  std::vector<std::size_t> grown(subset.begin(), subset.end());
  grown.push_back(candidate);
  return proxy_coverage(grown, sim) - proxy_coverage(subset, sim);
}

SelectionTrace discover_representative(const SimilarityMatrix& sim, double gamma, std::size_t beam_width) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (sim.size() == 0) return {};
  return beam_width == 1 ? greedy(sim, gamma) : beam(sim, gamma, beam_width);
}

SelectionTrace baseline_order(const Benchmark& bench, SelectionMethod kind, std::uint64_t seed) {
  const std::size_t d = bench.datasets();
  SelectionTrace t;
  t.method = kind;
  t.seed = seed;
  if (kind == SelectionMethod::kRandom) {
    Rng rng(seed);
    t.order = rng.permutation(d);
    return t;
  }
  if (kind != SelectionMethod::kGreedyMin && kind != SelectionMethod::kGreedyMax)
    throw ConfigError("baseline_order takes random, greedy_min, or greedy_max");

  std::vector<double> means(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < bench.models(); ++r)
      if (auto v = bench.cell(r, c)) {
        s += *v;
        ++n;
      }
    means[c] = n ? s / static_cast<double>(n) : 0.0;
  }
  t.order.resize(d);
  std::iota(t.order.begin(), t.order.end(), std::size_t{0});
  const bool ascending = kind == SelectionMethod::kGreedyMin;
  std::stable_sort(t.order.begin(), t.order.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? means[a] < means[b] : means[a] > means[b];
  });
  return t;
}

std::vector<double> mean_win_rate(const Grid& scores) {
  const std::size_t m = scores.rows();
  const std::size_t n = scores.cols();
  if (m < 2) throw InsufficientDataError("mean win rate needs at least 2 models");
  if (n < 1) throw InsufficientDataError("mean win rate needs at least 1 dataset");
  for (double v : scores.values())
    if (std::isnan(v)) throw IncompleteDataError("mean win rate needs a complete grid");

  std::vector<double> mwr(m, 0.0);
  for (std::size_t mu = 0; mu < m; ++mu) {
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t wins = 0;
      for (std::size_t other = 0; other < m; ++other)
        if (other != mu && scores(mu, c) > scores(other, c)) ++wins;
      total += static_cast<double>(wins) / static_cast<double>(m - 1);
    }
    mwr[mu] = total / static_cast<double>(n);
  }
  return mwr;
}

CoverageValue coverage(const Benchmark& bench, std::span<const std::size_t> subset) {
  if (subset.empty()) throw ConfigError("coverage of the empty set is undefined");
  std::set<std::size_t> unique(subset.begin(), subset.end());
  if (*unique.rbegin() >= bench.datasets()) throw ShapeError("subset index out of range");
  if (unique.size() == bench.datasets()) return {1.0, true};

  const auto full = mean_win_rate(bench.scores());
  const std::vector<std::size_t> cols(unique.begin(), unique.end());
  const auto sub = mean_win_rate(bench.scores().select_columns(cols));
  CoverageValue out;
  out.value = pearson_or_undefined(full, sub, out.defined);
  return out;
}

WinTable::WinTable(const Benchmark& bench) : wins_(bench.models(), bench.datasets(), 0.0) {
  const std::size_t m = bench.models();
  const std::size_t d = bench.datasets();
  if (m < 2) throw InsufficientDataError("win rates need at least 2 models");
  bench.require_complete("coverage evaluation");
  const auto& s = bench.scores();
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t mu = 0; mu < m; ++mu) {
      std::size_t w = 0;
      for (std::size_t other = 0; other < m; ++other)
        if (s(mu, c) > s(other, c)) ++w;
      wins_(mu, c) = static_cast<double>(w);
    }
  full_mwr_.assign(m, 0.0);
  const double scale = 1.0 / (static_cast<double>(m - 1) * static_cast<double>(d));
  for (std::size_t mu = 0; mu < m; ++mu) full_mwr_[mu] = kernels::sum(wins_.row(mu)) * scale;
}

CoverageCurve coverage_curve(const WinTable& table, const SelectionTrace& trace) {
  const std::size_t m = table.models();
  const std::size_t d = table.datasets();
  std::vector<bool> seen(d, false);
  for (auto c : trace.order) {
    if (c >= d || seen[c]) throw ShapeError("trace is not a selection of distinct dataset indices");
    seen[c] = true;
  }

  CoverageCurve curve;
  curve.trace = trace;
  std::vector<double> accum(m, 0.0), mwr(m, 0.0);
  for (std::size_t k = 0; k < trace.order.size(); ++k) {
    const std::size_t c = trace.order[k];
    for (std::size_t mu = 0; mu < m; ++mu) accum[mu] += table.wins(mu, c);
    if (k + 1 == d) {
      curve.etas.push_back(1.0);
      curve.undefined.push_back(false);
      continue;
    }
    const double scale = 1.0 / (static_cast<double>(m - 1) * static_cast<double>(k + 1));
    for (std::size_t mu = 0; mu < m; ++mu) mwr[mu] = accum[mu] * scale;
    bool defined = true;
    curve.etas.push_back(pearson_or_undefined(table.full_mwr(), mwr, defined));
    curve.undefined.push_back(!defined);
  }
  return curve;
}

CoverageCurve coverage_curve(const Benchmark& bench, const SelectionTrace& trace) {
  return coverage_curve(WinTable(bench), trace);
}

double sc_auc(std::span<const double> etas) {
  const std::size_t n = etas.size();
  if (n == 0) return 0.0;
  const double width = 1.0 / static_cast<double>(n);
  double area = etas[0] * width;
  for (std::size_t k = 1; k < n; ++k) area += 0.5 * (etas[k - 1] + etas[k]) * width;
  return area;
}

double sc_auc(const CoverageCurve& curve) { return sc_auc(curve.etas); }

std::size_t smallest_covering_prefix(const CoverageCurve& curve, double threshold) {
  for (std::size_t k = 0; k < curve.etas.size(); ++k)
    if (curve.etas[k] >= threshold) return k + 1;
  return curve.etas.size();
}

std::vector<CoverageCurve> random_curves(const Benchmark& bench, std::size_t runs, std::uint64_t base_seed) {
  const WinTable table(bench);
  std::vector<CoverageCurve> out(runs);
  detail::parallel_for(runs, [&](std::size_t r) {
    out[r] = coverage_curve(table, baseline_order(bench, SelectionMethod::kRandom, base_seed + r));
  });
  return out;
}

std::vector<double> mean_etas(std::span<const CoverageCurve> curves) {
  if (curves.empty()) return {};
  std::vector<double> mean(curves.front().etas.size(), 0.0);
  for (const auto& c : curves) {
    if (c.etas.size() != mean.size()) throw ShapeError("curves differ in length");
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += c.etas[k];
  }
  for (auto& v : mean) v /= static_cast<double>(curves.size());
  return mean;
}

RandomComparison proportion_vs_random(const CoverageCurve& system, std::span<const CoverageCurve> randoms,
                                      double threshold) {
  RandomComparison out;
  const std::size_t n = system.etas.size();
  out.window = std::min(std::max<std::size_t>(smallest_covering_prefix(system, threshold), 2), n);
  if (randoms.empty()) return out;

  const double sys_auc = sc_auc(system.etas);
  const double sys_window = sc_auc(std::span<const double>(system.etas).first(out.window));
  std::size_t auc_hits = 0, window_hits = 0;
  for (const auto& r : randoms) {
    if (r.etas.size() != n) throw ShapeError("random curve length differs from the system curve");
    if (sc_auc(r.etas) <= sys_auc) ++auc_hits;
    if (sc_auc(std::span<const double>(r.etas).first(out.window)) <= sys_window) ++window_hits;
  }
  out.auc_prop = static_cast<double>(auc_hits) / static_cast<double>(randoms.size());
  out.max2_prop = static_cast<double>(window_hits) / static_cast<double>(randoms.size());
  return out;
}

}  // namespace simba
