#include "simba/relate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace simba {
namespace {

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double transform(double v, bool log_space, double offset) {
  if (!log_space) return v;
  const double shifted = v + offset;
  if (!(shifted > 0.0)) throw DegenerateFitError("value outside the log domain");
  return std::log(shifted);
}

// Pairwise-complete rows of two vectors that may carry NaN for missing.
struct CommonRows {
  std::vector<double> x;
  std::vector<double> y;
};

CommonRows common_rows(std::span<const double> x, std::span<const double> y) {
  CommonRows out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    out.x.push_back(x[i]);
    out.y.push_back(y[i]);
  }
  return out;
}

RelationshipCensus run_census(Axis axis, std::size_t n, auto&& vector_of, double threshold, double offset) {
  RelationshipCensus census;
  census.axis = axis;
  census.verdicts.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    const auto va = vector_of(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto vb = vector_of(b);
      auto verdict = classify_relationship(va, vb, threshold, offset);
      ++census.counts[static_cast<std::size_t>(verdict.klass)];
      census.verdicts.push_back({a, b, std::move(verdict)});
    }
  }
  return census;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kLinear:
      return "LINEAR";
    case Family::kExponential:
      return "EXPONENTIAL";
    case Family::kPowerLaw:
      return "POWER_LAW";
  }
  return "?";
}

std::string_view class_name(RelationClass k) {
  switch (k) {
    case RelationClass::kLinear:
      return "LINEAR";
    case RelationClass::kExponential:
      return "EXPONENTIAL";
    case RelationClass::kPowerLaw:
      return "POWER_LAW";
    case RelationClass::kNone:
      return "NONE";
  }
  return "?";
}

std::string_view direction_name(Direction d) { return d == Direction::kForward ? "a->b" : "b->a"; }

std::string_view axis_name(Axis a) { return a == Axis::kDatasets ? "datasets" : "models"; }

RelationClass class_of(Family f) {
  switch (f) {
    case Family::kLinear:
      return RelationClass::kLinear;
    case Family::kExponential:
      return RelationClass::kExponential;
    case Family::kPowerLaw:
      return RelationClass::kPowerLaw;
  }
  return RelationClass::kNone;
}

std::size_t RelationshipCensus::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

FitResult fit_pair_regression(std::span<const double> x, std::span<const double> y, Family family,
                              double log_offset) {
  if (x.size() != y.size()) throw ShapeError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < kMinCommonObservations) throw InsufficientDataError("fewer than 3 common observations");

  const bool log_x = family == Family::kPowerLaw;
  const bool log_y = family != Family::kLinear;
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = transform(x[i], log_x, log_offset);
    v[i] = transform(y[i], log_y, log_offset);
  }

  if (is_constant(u)) throw DegenerateFitError("predictor has zero variance");
  if (is_constant(v)) throw DegenerateFitError("target has zero variance");

  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    svv += (v[i] - mv) * (v[i] - mv);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  if (suu <= 0.0) throw DegenerateFitError("predictor has zero variance");
  if (svv <= 0.0) throw DegenerateFitError("target has zero variance");

  FitResult fit;
  fit.family = family;
  fit.slope = suv / suu;
  fit.intercept = mv - fit.slope * mu;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (fit.slope * u[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = 1.0 - ss_res / svv;
  return fit;
}

RelationshipVerdict classify_relationship(std::span<const double> x, std::span<const double> y, double threshold,
                                          double log_offset) {
  const auto rows = common_rows(x, y);
  RelationshipVerdict verdict;
  verdict.n_common = rows.x.size();
  if (verdict.n_common < kMinCommonObservations) {
    verdict.diagnostic = "insufficient common observations";
    return verdict;
  }

  constexpr Family kOrder[] = {Family::kLinear, Family::kExponential, Family::kPowerLaw};
  for (Family family : kOrder) {
    for (Direction dir : {Direction::kForward, Direction::kBackward}) {
      const auto& pred = dir == Direction::kForward ? rows.x : rows.y;
      const auto& target = dir == Direction::kForward ? rows.y : rows.x;
      FitResult fit;
      try {
        fit = fit_pair_regression(pred, target, family, log_offset);
      } catch (const DegenerateFitError&) {
        continue;
      }
      fit.direction = dir;
      if (!verdict.best_fit || fit.r_squared > verdict.best_fit->r_squared) verdict.best_fit = fit;
    }
  }

  if (!verdict.best_fit) {
    verdict.diagnostic = "no feasible fit";
    return verdict;
  }
  verdict.klass = verdict.best_fit->r_squared < threshold ? RelationClass::kNone : class_of(verdict.best_fit->family);
  return verdict;
}

RelationshipCensus compare_all_datasets(const Benchmark& bench, double threshold, double log_offset) {
  if (bench.datasets() < 2) throw SchemaError("dataset census needs at least 2 datasets");
  return run_census(
      Axis::kDatasets, bench.datasets(), [&](std::size_t c) { return bench.scores().column(c); }, threshold,
      log_offset);
}

RelationshipCensus compare_all_models(const Benchmark& bench, double threshold, double log_offset) {
  if (bench.models() < 2) throw SchemaError("model census needs at least 2 models");
  return run_census(
      Axis::kModels, bench.models(),
      [&](std::size_t r) {
        const auto row = bench.scores().row(r);
        return std::vector<double>(row.begin(), row.end());
      },
      threshold, log_offset);
}

}  // namespace simba
