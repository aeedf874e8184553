#include "simba/benchio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "simba/rng.hpp"

namespace simba {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

struct Record {
  std::size_t line_no;
  std::vector<std::string> fields;
};

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    out.push_back({line_no, split_csv_record(line)});
  }
  return out;
}

std::optional<double> parse_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::istringstream ss(text);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  ss >> v;
  if (ss.fail() || !ss.eof() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw SchemaError(std::string("empty ") + what + " id");
    if (!seen.insert(id).second) throw SchemaError(std::string("duplicate ") + what + " id '" + id + "'");
  }
}

}  // namespace

// RFC 4180-style fields; quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::optional<double> RawBenchmark::cell(std::size_t model, std::size_t dataset) const {
  const double v = scores(model, dataset);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

Benchmark::Benchmark(std::vector<std::string> model_ids, std::vector<std::string> dataset_ids, Grid scores)
    : model_ids_(std::move(model_ids)), dataset_ids_(std::move(dataset_ids)), scores_(std::move(scores)) {
  require_unique(model_ids_, "model");
  require_unique(dataset_ids_, "dataset");
  if (scores_.rows() != model_ids_.size() || scores_.cols() != dataset_ids_.size())
    throw SchemaError("score grid shape does not match id lists");
  for (std::size_t r = 0; r < scores_.rows(); ++r)
    for (std::size_t c = 0; c < scores_.cols(); ++c) {
      const double v = scores_(r, c);
      if (!std::isnan(v) && (v < 0.0 || v > 1.0))
        throw SchemaError("normalized score out of [0,1] at model '" + model_ids_[r] + "', dataset '" +
                          dataset_ids_[c] + "'");
    }
}

std::optional<double> Benchmark::cell(std::size_t model, std::size_t dataset) const {
  const double v = scores_(model, dataset);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

bool Benchmark::present(std::size_t model, std::size_t dataset) const {
  return !std::isnan(scores_(model, dataset));
}

bool Benchmark::complete() const {
  return std::none_of(scores_.values().begin(), scores_.values().end(), [](double v) { return std::isnan(v); });
}

void Benchmark::require_complete(const std::string& phase) const {
  std::ostringstream missing;
  std::size_t count = 0;
  for (std::size_t r = 0; r < models(); ++r)
    for (std::size_t c = 0; c < datasets(); ++c)
      if (!present(r, c)) {
        missing << (count++ ? "; " : "") << '(' << model_ids_[r] << ", " << dataset_ids_[c] << ')';
      }
  if (count)
    throw IncompleteDataError(phase + " requires complete columns; " + std::to_string(count) +
                              " missing cell(s): " + missing.str());
}

Benchmark Benchmark::select_models(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(model_ids_.at(r));
  return Benchmark(std::move(ids), dataset_ids_, scores_.select_rows(rows));
}

Benchmark Benchmark::select_datasets(std::span<const std::size_t> cols) const {
  std::vector<std::string> ids;
  ids.reserve(cols.size());
  for (auto c : cols) ids.push_back(dataset_ids_.at(c));
  return Benchmark(model_ids_, std::move(ids), scores_.select_columns(cols));
}

bool Benchmark::same_cells(const Benchmark& other) const {
  if (model_ids_ != other.model_ids_ || dataset_ids_ != other.dataset_ids_) return false;
  const auto a = scores_.values();
  const auto b = other.scores_.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) != std::isnan(b[i])) return false;
    if (!std::isnan(a[i]) && a[i] != b[i]) return false;
  }
  return true;
}

RawBenchmark load_benchmark(std::istream& source, std::istream& chance_source) {
  const auto records = read_records(source);
  if (records.empty()) throw SchemaError("matrix file is empty");

  RawBenchmark raw;
  const auto& header = records.front().fields;
  if (header.size() < 2) throw SchemaError("matrix header must list at least one dataset id");
  raw.dataset_ids.assign(header.begin() + 1, header.end());
  require_unique(raw.dataset_ids, "dataset");

  const std::size_t d = raw.dataset_ids.size();
  std::vector<double> cells;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != d + 1)
      throw ParseError("expected " + std::to_string(d + 1) + " fields, found " + std::to_string(rec.fields.size()),
                       rec.line_no, rec.fields.size());
    raw.model_ids.push_back(rec.fields[0]);
    for (std::size_t c = 0; c < d; ++c) {
      const auto& text = rec.fields[c + 1];
      if (text.empty()) {
        cells.push_back(kMissing);
        continue;
      }
      const auto v = parse_real(text);
      if (!v) throw ParseError("non-numeric cell '" + text + "'", rec.line_no, c + 2);
      cells.push_back(*v);
    }
  }
  require_unique(raw.model_ids, "model");
  if (raw.model_ids.empty()) throw SchemaError("matrix file has no model rows");

  raw.scores = Grid(raw.model_ids.size(), d);
  std::copy(cells.begin(), cells.end(), raw.scores.values().begin());

  std::unordered_map<std::string, double> chance;
  const auto chance_records = read_records(chance_source);
  for (std::size_t i = 0; i < chance_records.size(); ++i) {
    const auto& rec = chance_records[i];
    if (rec.fields.size() != 2)
      throw ParseError("chance file rows need exactly 2 fields", rec.line_no, rec.fields.size());
    const auto v = parse_real(rec.fields[1]);
    if (!v) {
      if (i == 0) continue;  // header row
      throw ParseError("non-numeric chance level '" + rec.fields[1] + "'", rec.line_no, 2);
    }
    if (*v < 0.0 || *v > 1.0)
      throw SchemaError("chance level for '" + rec.fields[0] + "' must lie in [0, 1)");
    if (!chance.emplace(rec.fields[0], *v).second)
      throw SchemaError("duplicate dataset id '" + rec.fields[0] + "' in chance file");
  }
  raw.chance_levels.reserve(d);
  for (const auto& id : raw.dataset_ids) {
    const auto it = chance.find(id);
    if (it == chance.end()) throw SchemaError("dataset '" + id + "' missing from chance file");
    raw.chance_levels.push_back(it->second);
  }
  return raw;
}

RawBenchmark load_benchmark_files(const std::string& matrix_path, const std::string& chance_path) {
  std::ifstream matrix(matrix_path);
  if (!matrix) throw SchemaError("cannot open matrix file '" + matrix_path + "'");
  std::ifstream chance(chance_path);
  if (!chance) throw SchemaError("cannot open chance file '" + chance_path + "'");
  return load_benchmark(matrix, chance);
}

double normalize_score(double x, double chance) {
  if (chance >= 1.0) throw DegenerateChanceError("chance level 1 leaves no headroom above random");
  const double v = std::max(0.0, (x - chance) / (1.0 - chance));
  return std::min(v, 1.0);
}

Benchmark normalize_scores(const RawBenchmark& raw) {
  const std::size_t m = raw.model_ids.size();
  const std::size_t d = raw.dataset_ids.size();
  if (raw.scores.rows() != m || raw.scores.cols() != d || raw.chance_levels.size() != d)
    throw SchemaError("raw benchmark shape is inconsistent");

  Grid out(m, d, kMissing);
  for (std::size_t c = 0; c < d; ++c) {
    const double chance = raw.chance_levels[c];
    if (chance >= 1.0)
      throw DegenerateChanceError("dataset '" + raw.dataset_ids[c] + "' has chance level 1");
    if (chance < 0.0) throw SchemaError("dataset '" + raw.dataset_ids[c] + "' has negative chance level");
    std::size_t present = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const double x = raw.scores(r, c);
      if (std::isnan(x)) continue;
      out(r, c) = normalize_score(x, chance);
      ++present;
    }
    if (present < 2)
      throw SchemaError("dataset '" + raw.dataset_ids[c] + "' has fewer than 2 observed models");
  }
  return Benchmark(raw.model_ids, raw.dataset_ids, std::move(out));
}

std::size_t train_size(std::size_t models, double ratio) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(models) + 0.5));
}

ModelSplit split_models(const Benchmark& bench, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw SplitError("split ratio must lie strictly between 0 and 1");
  const std::size_t m = bench.models();
  if (m < 2) throw SplitError("need at least 2 models to split");
  const std::size_t n_train = train_size(m, ratio);
  if (n_train == 0 || n_train >= m)
    throw SplitError("split of " + std::to_string(m) + " models at ratio leaves an empty half");

  Rng rng(seed);
  auto perm = rng.permutation(m);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  // Keep file order inside each half.
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {bench.select_models(train), bench.select_models(test), seed, ratio};
}

Benchmark perturb_with_noise(const Benchmark& bench, double mean, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  Grid out = bench.scores();
  if (sigma == 0.0 && mean == 0.0) return bench;
  Rng rng(seed);
  for (auto& v : out.values()) {
    if (std::isnan(v)) continue;
    v = std::clamp(v + rng.normal(mean, sigma), 0.0, 1.0);
  }
  return Benchmark(bench.model_ids(), bench.dataset_ids(), std::move(out));
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_benchmark(std::ostream& out, const Benchmark& bench) {
  out << "model_id";
  for (const auto& id : bench.dataset_ids()) out << ',' << csv_field(id);
  out << '\n';
  for (std::size_t r = 0; r < bench.models(); ++r) {
    out << csv_field(bench.model_ids()[r]);
    for (std::size_t c = 0; c < bench.datasets(); ++c) {
      out << ',';
      if (auto v = bench.cell(r, c)) out << format_real(*v);
    }
    out << '\n';
  }
}

}  // namespace simba
