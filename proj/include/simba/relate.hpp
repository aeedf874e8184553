#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simba/benchio.hpp"

namespace simba {

enum class Family { kLinear, kExponential, kPowerLaw };
enum class RelationClass { kLinear, kExponential, kPowerLaw, kNone };
enum class Direction { kForward, kBackward };  // forward: first vector predicts the second
enum class Axis { kDatasets, kModels };

inline constexpr double kLogOffset = 1e-6;
inline constexpr double kDefaultR2Threshold = 0.5;
inline constexpr std::size_t kMinCommonObservations = 3;

std::string_view family_name(Family f);
std::string_view class_name(RelationClass k);
std::string_view direction_name(Direction d);
std::string_view axis_name(Axis a);
RelationClass class_of(Family f);

struct FitResult {
  Family family = Family::kLinear;
  Direction direction = Direction::kForward;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RelationshipVerdict {
  RelationClass klass = RelationClass::kNone;
  std::optional<FitResult> best_fit;
  std::size_t n_common = 0;
  /// Set when the pair could not be fitted at all (too few rows, every fit degenerate).
  std::string diagnostic;
};

struct PairVerdict {
  std::size_t a = 0;
  std::size_t b = 0;
  RelationshipVerdict verdict;
};

struct RelationshipCensus {
  Axis axis = Axis::kDatasets;
  std::array<std::size_t, 4> counts{};  // indexed by RelationClass
  std::vector<PairVerdict> verdicts;    // (a, b) with a < b, lexicographic

  std::size_t count(RelationClass k) const { return counts[static_cast<std::size_t>(k)]; }
  std::size_t total() const;
};

/// OLS of the transformed `y` on the transformed `x`; r^2 is measured in the
/// transformed space. Log transforms use ln(v + kLogOffset).
/// Throws InsufficientDataError (< 3 points) or DegenerateFitError (a constant
/// side, or a value outside the log domain).
FitResult fit_pair_regression(std::span<const double> x, std::span<const double> y, Family family,
                              double log_offset = kLogOffset);

/// Best of the six fits (three families, both directions). Ties resolve
/// LINEAR > EXPONENTIAL > POWER_LAW, then forward before backward.
RelationshipVerdict classify_relationship(std::span<const double> x, std::span<const double> y,
                                          double threshold = kDefaultR2Threshold, double log_offset = kLogOffset);

RelationshipCensus compare_all_datasets(const Benchmark& bench, double threshold = kDefaultR2Threshold,
                                        double log_offset = kLogOffset);
RelationshipCensus compare_all_models(const Benchmark& bench, double threshold = kDefaultR2Threshold,
                                      double log_offset = kLogOffset);

}  // namespace simba
