#include "simba/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace simba {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = v.find(',');
    const auto item = trim(v.substr(0, pos));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    v.remove_prefix(pos + 1);
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "': expected " +
                    std::string(expected));
}

double to_real(std::string_view key, std::string_view v) {
  std::istringstream ss{std::string(v)};
  ss.imbue(std::locale::classic());
  double out;
  ss >> out;
  if (ss.fail() || !ss.eof() || !std::isfinite(out)) bad_value(key, v, "a real number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::string join(const auto& items, auto&& render) {
  std::string out;
  for (const auto& it : items) {
    if (!out.empty()) out += ',';
    out += render(it);
  }
  return out;
}

}  // namespace

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kStalk:
      return "stalk";
    case Phase::kProwl:
      return "prowl";
    case Phase::kPounce:
      return "pounce";
  }
  return "?";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "matrix",       "chance",         "benchmark_name", "phases",         "r2_threshold", "log_offset",
      "measures",     "gamma",          "coverage_threshold", "beam_width", "random_runs",  "similarity_dir",
      "split_ratio",  "predictors",     "ridge_lambda",   "knn_k",          "noise_sigmas", "noise_mean",
      "k_folds",      "pounce_measure", "pounce_gamma",   "seed",           "output_dir",
  };
  return keys;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "matrix") {
    c.matrix_path = value;
  } else if (key == "chance") {
    c.chance_path = value;
  } else if (key == "benchmark_name") {
    c.benchmark_name = value;
  } else if (key == "phases") {
    c.phases.clear();
    for (auto item : split_list(value)) {
      if (item == "stalk")
        c.phases.push_back(Phase::kStalk);
      else if (item == "prowl")
        c.phases.push_back(Phase::kProwl);
      else if (item == "pounce")
        c.phases.push_back(Phase::kPounce);
      else
        bad_value(key, item, "stalk, prowl, or pounce");
    }
  } else if (key == "r2_threshold") {
    c.r2_threshold = to_real(key, value);
  } else if (key == "log_offset") {
    c.log_offset = to_real(key, value);
  } else if (key == "measures") {
    c.measures.clear();
    for (auto item : split_list(value)) {
      if (item == "all") {
        c.measures.assign(kAllMeasures.begin(), kAllMeasures.end());
        continue;
      }
      const auto m = parse_measure(item);
      if (!m) bad_value(key, item, "a similarity measure name");
      c.measures.push_back(*m);
    }
  } else if (key == "gamma") {
    c.gamma = to_real(key, value);
  } else if (key == "coverage_threshold") {
    c.coverage_threshold = to_real(key, value);
  } else if (key == "beam_width") {
    c.beam_width = to_uint(key, value);
  } else if (key == "random_runs") {
    c.random_runs = to_uint(key, value);
  } else if (key == "similarity_dir") {
    c.similarity_dir = value;
  } else if (key == "split_ratio") {
    c.split_ratio = to_real(key, value);
  } else if (key == "predictors") {
    c.predictors.clear();
    for (auto item : split_list(value)) {
      const auto p = parse_predictor(item);
      if (!p) bad_value(key, item, "ridge, knn, mlp1, or mlp2");
      c.predictors.push_back(*p);
    }
  } else if (key == "ridge_lambda") {
    c.ridge_lambda = to_real(key, value);
  } else if (key == "knn_k") {
    c.knn_k = to_uint(key, value);
  } else if (key == "noise_sigmas") {
    c.noise_sigmas.clear();
    for (auto item : split_list(value)) c.noise_sigmas.push_back(to_real(key, item));
  } else if (key == "noise_mean") {
    c.noise_mean = to_real(key, value);
  } else if (key == "k_folds") {
    c.k_folds = to_uint(key, value);
  } else if (key == "pounce_measure") {
    const auto m = parse_measure(value);
    if (!m) bad_value(key, value, "a similarity measure name");
    c.pounce_measure = *m;
  } else if (key == "pounce_gamma") {
    c.pounce_gamma = to_real(key, value);
  } else if (key == "seed") {
    c.seed = to_uint(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not 'key = value'");
    apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  auto config = parse_config(in, std::move(base));
  // Relative input paths resolve against the config file's directory.
  const auto dir = std::filesystem::path(path).parent_path();
  for (auto* p : {&config.matrix_path, &config.chance_path, &config.similarity_dir}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative() && !dir.empty()) *p = (dir / *p).string();
  }
  return config;
}

void validate_config(const RunConfig& c) {
  if (c.matrix_path.empty()) throw ConfigError("'matrix' is required");
  if (c.chance_path.empty()) throw ConfigError("'chance' is required");
  if (c.phases.empty()) throw ConfigError("'phases' must name at least one phase");
  if (!(c.r2_threshold >= 0.0 && c.r2_threshold <= 1.0)) throw ConfigError("'r2_threshold' must lie in [0, 1]");
  if (!(c.log_offset > 0.0)) throw ConfigError("'log_offset' must be positive");
  if (c.measures.empty()) throw ConfigError("'measures' must name at least one measure");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("'gamma' must lie in (0, 1]");
  if (!(c.coverage_threshold > 0.0 && c.coverage_threshold <= 1.0))
    throw ConfigError("'coverage_threshold' must lie in (0, 1]");
  if (c.beam_width < 1) throw ConfigError("'beam_width' must be at least 1");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw ConfigError("'split_ratio' must lie in (0, 1)");
  if (c.predictors.empty()) throw ConfigError("'predictors' must name at least one regressor");
  if (!(c.ridge_lambda >= 0.0)) throw ConfigError("'ridge_lambda' must be non-negative");
  if (c.knn_k < 1) throw ConfigError("'knn_k' must be at least 1");
  if (c.noise_sigmas.empty()) throw ConfigError("'noise_sigmas' must list at least one value");
  for (double s : c.noise_sigmas)
    if (s < 0.0) throw ConfigError("'noise_sigmas' must be non-negative");
  if (c.k_folds == 1) throw ConfigError("'k_folds' must be 0 (disabled) or at least 2");
  if (!(c.pounce_gamma > 0.0 && c.pounce_gamma <= 1.0)) throw ConfigError("'pounce_gamma' must lie in (0, 1]");
  if (c.output_dir.empty()) throw ConfigError("'output_dir' must not be empty");
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "matrix = " << c.matrix_path << '\n'
      << "chance = " << c.chance_path << '\n'
      << "benchmark_name = " << c.benchmark_name << '\n'
      << "phases = " << join(c.phases, [](Phase p) { return std::string(phase_name(p)); }) << '\n'
      << "r2_threshold = " << format_real(c.r2_threshold) << '\n'
      << "log_offset = " << format_real(c.log_offset) << '\n'
      << "measures = " << join(c.measures, [](Measure m) { return std::string(measure_name(m)); }) << '\n'
      << "gamma = " << format_real(c.gamma) << '\n'
      << "coverage_threshold = " << format_real(c.coverage_threshold) << '\n'
      << "beam_width = " << c.beam_width << '\n'
      << "random_runs = " << c.random_runs << '\n'
      << "similarity_dir = " << c.similarity_dir << '\n'
      << "split_ratio = " << format_real(c.split_ratio) << '\n'
      << "predictors = " << join(c.predictors, [](PredictorKind k) { return std::string(predictor_name(k)); })
      << '\n'
      << "ridge_lambda = " << format_real(c.ridge_lambda) << '\n'
      << "knn_k = " << c.knn_k << '\n'
      << "noise_sigmas = " << join(c.noise_sigmas, [](double s) { return format_real(s); }) << '\n'
      << "noise_mean = " << format_real(c.noise_mean) << '\n'
      << "k_folds = " << c.k_folds << '\n'
      << "pounce_measure = " << measure_name(c.pounce_measure) << '\n'
      << "pounce_gamma = " << format_real(c.pounce_gamma) << '\n';
  if (c.seed) out << "seed = " << *c.seed << '\n';
  out << "output_dir = " << c.output_dir << '\n';
  return out.str();
}

}  // namespace simba
