#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simba/perfpredict.hpp"
#include "simba/simmeasure.hpp"

namespace simba {

enum class Phase { kStalk, kProwl, kPounce };

std::string_view phase_name(Phase p);

struct RunConfig {
  std::string matrix_path;
  std::string chance_path;
  std::string benchmark_name;  // defaults to the matrix file stem
  std::vector<Phase> phases{Phase::kStalk, Phase::kProwl, Phase::kPounce};

  // stalk
  double r2_threshold = 0.5;
  double log_offset = 1e-6;

  // prowl
  std::vector<Measure> measures{kAllMeasures.begin(), kAllMeasures.end()};
  double gamma = 1.0;
  double coverage_threshold = 0.95;
  std::size_t beam_width = 1;
  std::size_t random_runs = 1000;
  std::string similarity_dir;  // reuse saved similarity_<measure>.csv files when set

  // pounce
  double split_ratio = 0.8;
  std::vector<PredictorKind> predictors{PredictorKind::kRidge, PredictorKind::kKnn, PredictorKind::kMlp1,
                                        PredictorKind::kMlp2};
  double ridge_lambda = 1.0;
  std::size_t knn_k = 5;
  std::vector<double> noise_sigmas{0.0, 0.05, 0.1};
  double noise_mean = 0.0;
  std::size_t k_folds = 5;
  Measure pounce_measure = Measure::kMinkowskiP3;
  double pounce_gamma = 0.8;

  std::optional<std::uint64_t> seed;
  std::string output_dir = "simba_out";
};

/// Every key accepted by config files and `--<key>` flags (dashes allowed on the command line).
const std::vector<std::string>& config_keys();

/// Applies one `key = value` setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text, '#' starts a comment.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Range checks that depend on more than one field.
void validate_config(const RunConfig& config);

/// Canonical `key = value` rendering, stable across runs.
std::string render_config(const RunConfig& config);

}  // namespace simba
