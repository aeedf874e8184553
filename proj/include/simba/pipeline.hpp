#pragma once

#include <map>
#include <string>
#include <vector>

#include "simba/benchio.hpp"
#include "simba/config.hpp"

namespace simba {

/// Collects every output in memory and writes them in one pass, together with
/// manifest.json, so a failed run leaves no partial reports behind.
class ReportWriter {
 public:
  struct Artifact {
    std::string path;  // relative to the output directory
    std::string kind;
    std::map<std::string, std::string> params;
  };

  void add(std::string path, std::string kind, std::string content, std::map<std::string, std::string> params = {});
  void set_header(std::map<std::string, std::string> header) { header_ = std::move(header); }

  const std::vector<Artifact>& artifacts() const noexcept { return artifacts_; }
  const std::string& content(const std::string& path) const;
  std::string manifest() const;

  void commit(const std::string& output_dir) const;

 private:
  std::vector<Artifact> artifacts_;
  std::map<std::string, std::string> contents_;
  std::map<std::string, std::string> header_;
};

/// Loads and normalizes the benchmark named by the config.
Benchmark load_config_benchmark(const RunConfig& config);

void run_stalk(const RunConfig& config, const Benchmark& bench, ReportWriter& out);
void run_prowl(const RunConfig& config, const Benchmark& bench, ReportWriter& out);
void run_pounce(const RunConfig& config, const Benchmark& bench, ReportWriter& out);

/// Runs the configured phases and commits every report to config.output_dir.
/// Returns the writer for inspection.
ReportWriter run_pipeline(const RunConfig& config, const std::string& command);

}  // namespace simba
