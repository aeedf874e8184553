#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simba/grid.hpp"

namespace simba {

/// Score table as loaded from disk. Missing cells are NaN in `scores`.
struct RawBenchmark {
  std::vector<std::string> model_ids;
  std::vector<std::string> dataset_ids;
  Grid scores;
  std::vector<double> chance_levels;

  std::optional<double> cell(std::size_t model, std::size_t dataset) const;
};

/// Normalized benchmark: every present cell lies in [0, 1]; missing cells are NaN.
class Benchmark {
 public:
  Benchmark() = default;
  /// Validates ids (unique, shape) and cell range; throws SchemaError.
  Benchmark(std::vector<std::string> model_ids, std::vector<std::string> dataset_ids, Grid scores);

  std::size_t models() const noexcept { return model_ids_.size(); }
  std::size_t datasets() const noexcept { return dataset_ids_.size(); }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  const std::vector<std::string>& dataset_ids() const noexcept { return dataset_ids_; }
  const Grid& scores() const noexcept { return scores_; }

  std::optional<double> cell(std::size_t model, std::size_t dataset) const;
  bool present(std::size_t model, std::size_t dataset) const;
  bool complete() const;

  /// Throws IncompleteDataError listing every missing (model, dataset) cell.
  void require_complete(const std::string& phase) const;

  Benchmark select_models(std::span<const std::size_t> rows) const;
  Benchmark select_datasets(std::span<const std::size_t> cols) const;

  /// Cell-wise equality treating two missing cells as equal.
  bool same_cells(const Benchmark& other) const;

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> dataset_ids_;
  Grid scores_;
};

struct ModelSplit {
  Benchmark train;
  Benchmark test;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

RawBenchmark load_benchmark(std::istream& source, std::istream& chance_source);
RawBenchmark load_benchmark_files(const std::string& matrix_path, const std::string& chance_path);

/// max(0, (x - chance) / (1 - chance)), clamped to [0, 1].
double normalize_score(double x, double chance);
Benchmark normalize_scores(const RawBenchmark& raw);

/// Train size is round(ratio * m) with halves going to train.
std::size_t train_size(std::size_t models, double ratio);
ModelSplit split_models(const Benchmark& bench, double ratio, std::uint64_t seed);

Benchmark perturb_with_noise(const Benchmark& bench, double mean, double sigma, std::uint64_t seed);

/// Shortest text that parses back to the same double; used by every file the toolkit writes.
std::string format_real(double v);

/// Quotes a field when it holds a comma, quote or line break, doubling inner quotes.
std::string csv_field(std::string_view text);

/// Splits one comma-delimited line, honoring quoted fields and trimming unquoted whitespace.
std::vector<std::string> split_csv_record(const std::string& line);

/// Writes the comma-delimited matrix format (empty field = missing).
void write_benchmark(std::ostream& out, const Benchmark& bench);

}  // namespace simba
