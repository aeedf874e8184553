#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>

#include "simba/error.hpp"
#include "simba/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::string flag_for(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark analysis: relationship census, representative subsets, performance prediction"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "stalk | prowl | pounce | all")
      ->required()
      ->check(CLI::IsMember({"stalk", "prowl", "pounce", "all"}));
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--seed", seed, "seed for splits, noise, random baselines and MLP init (required for prowl/pounce)");

  std::map<std::string, std::string> overrides;
  for (const auto& key : simba::config_keys()) {
    if (key == "seed") continue;
    app.add_option_function<std::string>(
        flag_for(key), [&overrides, key](const std::string& v) { overrides[key] = v; }, "override '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    simba::RunConfig config;
    if (!config_path.empty()) config = simba::load_config_file(config_path);
    for (const auto& [key, value] : overrides) simba::apply_setting(config, key, value);
    if (seed) config.seed = seed;

    const auto report = simba::run_pipeline(config, command);
    std::cout << "wrote " << report.artifacts().size() << " report(s) and manifest.json to " << config.output_dir
              << '\n';
    return kExitOk;
  } catch (const simba::Error& e) {
    std::cerr << "simba: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "simba: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
