#include "simba/simmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "simba/kernels.hpp"

namespace simba {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

struct Pair {
  std::vector<double> x;
  std::vector<double> y;
};

Pair common_rows(std::span<const double> x, std::span<const double> y) {
  Pair p;
  p.x.reserve(x.size());
  p.y.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    p.x.push_back(x[i]);
    p.y.push_back(y[i]);
  }
  return p;
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

SimilarityValue pearson(std::span<const double> x, std::span<const double> y) {
  // Exact test: a variance computed in floating point can be a tiny positive number for equal values.
  if (is_constant(x) || is_constant(y)) return {0.0, true};
  const double n = static_cast<double>(x.size());
  const double mx = kernels::sum(x) / n;
  const double my = kernels::sum(y) / n;
  const auto mom = kernels::centered_moments(x, y, mx, my);
  if (mom.xx <= 0.0 || mom.yy <= 0.0) return {0.0, true};
  return {std::clamp(mom.xy / std::sqrt(mom.xx * mom.yy), -1.0, 1.0), false};
}

// Goodman-Kruskal form: tied pairs count toward neither side.
SimilarityValue kendall(std::span<const double> x, std::span<const double> y) {
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0.0)
        ++concordant;
      else if (s < 0.0)
        ++discordant;
    }
  if (concordant + discordant == 0) return {0.0, true};
  return {static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant), false};
}

SimilarityValue cosine(std::span<const double> x, std::span<const double> y) {
  const double nx = kernels::dot(x, x);
  const double ny = kernels::dot(y, y);
  if (nx <= 0.0 || ny <= 0.0) return {0.0, true};
  return {std::clamp(kernels::dot(x, y) / (std::sqrt(nx) * std::sqrt(ny)), -1.0, 1.0), false};
}

std::vector<double> to_distribution(std::span<const double> x) {
  for (double v : x)
    if (v < 0.0) throw Error("Jensen-Shannon similarity needs non-negative scores");
  const double total = kernels::sum(x);
  std::vector<double> p(x.size());
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(x.size()));
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] / total;
  }
  return p;
}

SimilarityValue jensen_shannon(std::span<const double> x, std::span<const double> y) {
  const auto p = to_distribution(x);
  const auto q = to_distribution(y);
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_p += p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) kl_q += q[i] * std::log(q[i] / m);
  }
  const double divergence = std::clamp(0.5 * (kl_p + kl_q) / std::log(2.0), 0.0, 1.0);
  return {1.0 - std::sqrt(divergence), false};
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kPearson:
      return "pearson";
    case Measure::kSpearman:
      return "spearman";
    case Measure::kKendallTau:
      return "kendall_tau";
    case Measure::kCosine:
      return "cosine";
    case Measure::kManhattan:
      return "manhattan";
    case Measure::kEuclidean:
      return "euclidean";
    case Measure::kMinkowskiP3:
      return "minkowski_p3";
    case Measure::kWasserstein:
      return "wasserstein";
    case Measure::kJensenShannon:
      return "jensen_shannon";
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures)
    if (measure_name(m) == name) return m;
  return std::nullopt;
}

bool is_correlation(Measure m) {
  return m == Measure::kPearson || m == Measure::kSpearman || m == Measure::kKendallTau;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double wasserstein1(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("Wasserstein inputs differ in length");
  if (x.empty()) return 0.0;
  std::vector<double> sx(x.begin(), x.end()), sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  return kernels::abs_diff_sum(sx, sy) / static_cast<double>(sx.size());
}

SimilarityValue column_similarity(std::span<const double> x, std::span<const double> y, Measure measure,
                                  std::optional<double> max_w1) {
  if (x.size() != y.size()) throw ShapeError("similarity inputs differ in length");
  if (x.size() < 2) return {0.0, true};
  if (std::equal(x.begin(), x.end(), y.begin())) return {1.0, false};

  switch (measure) {
    case Measure::kPearson:
      return pearson(x, y);
    case Measure::kSpearman: {
      const auto rx = average_ranks(x);
      const auto ry = average_ranks(y);
      return pearson(rx, ry);
    }
    case Measure::kKendallTau:
      return kendall(x, y);
    case Measure::kCosine:
      return cosine(x, y);
    case Measure::kManhattan:
      return {std::exp(-kernels::abs_diff_sum(x, y)), false};
    case Measure::kEuclidean:
      return {std::exp(-std::sqrt(kernels::sq_diff_sum(x, y))), false};
    case Measure::kMinkowskiP3:
      return {std::exp(-std::cbrt(kernels::cube_diff_sum(x, y))), false};
    case Measure::kWasserstein: {
      if (!max_w1) throw Error("Wasserstein similarity needs the benchmark-wide maximum distance");
      const double w = wasserstein1(x, y);
      if (*max_w1 <= 0.0) return {1.0, false};
      return {std::exp(-w / *max_w1), false};
    }
    case Measure::kJensenShannon:
      return jensen_shannon(x, y);
  }
  throw InvariantError("unhandled similarity measure");
}

SimilarityMatrix::SimilarityMatrix(Measure measure, Grid values) : measure_(measure), values_(std::move(values)) {
  const std::size_t d = values_.rows();
  if (values_.cols() != d) throw SchemaError("similarity matrix must be square");
  for (std::size_t i = 0; i < d; ++i) {
    if (std::fabs(values_(i, i) - 1.0) > kSymmetryTolerance)
      throw SchemaError("similarity matrix diagonal must be 1");
    for (std::size_t j = i + 1; j < d; ++j) {
      const double a = values_(i, j), b = values_(j, i);
      if (!std::isfinite(a) || std::fabs(a - b) > kSymmetryTolerance)
        throw SchemaError("similarity matrix must be finite and symmetric");
      if (a > 1.0 + kSymmetryTolerance) throw SchemaError("similarity values must not exceed 1");
    }
  }
}

SimilarityReport similarity_matrix_report(const Benchmark& bench, Measure measure) {
  const std::size_t d = bench.datasets();
  if (d < 2) throw SchemaError("similarity matrix needs at least 2 datasets");

  std::vector<std::vector<double>> columns(d);
  for (std::size_t c = 0; c < d; ++c) columns[c] = bench.scores().column(c);

  SimilarityReport report;
  if (measure == Measure::kWasserstein) {
    double max_w1 = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        const auto p = common_rows(columns[i], columns[j]);
        if (p.x.size() >= 2) max_w1 = std::max(max_w1, wasserstein1(p.x, p.y));
      }
    report.max_w1 = max_w1;
  }

  Grid values(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto p = common_rows(columns[i], columns[j]);
      SimilarityValue s;
      if (p.x.size() < 2) {
        s = {0.0, true};
        report.diagnostics.push_back({i, j, "fewer than 2 common observations"});
      } else {
        s = column_similarity(p.x, p.y, measure, report.max_w1);
        if (s.degenerate) report.diagnostics.push_back({i, j, "degenerate column (zero variance or zero norm)"});
      }
      values(i, j) = values(j, i) = s.value;
    }
  }
  report.matrix = SimilarityMatrix(measure, std::move(values));
  return report;
}

SimilarityMatrix similarity_matrix(const Benchmark& bench, Measure measure) {
  return similarity_matrix_report(bench, measure).matrix;
}

void write_similarity_matrix(std::ostream& out, const SimilarityMatrix& matrix,
                             const std::vector<std::string>& dataset_ids) {
  out << "dataset_id";
  for (const auto& id : dataset_ids) out << ',' << csv_field(id);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << csv_field(dataset_ids[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) out << ',' << format_real(matrix(i, j));
    out << '\n';
  }
}

SimilarityMatrix read_similarity_matrix(std::istream& in, Measure measure,
                                        const std::vector<std::string>& dataset_ids) {
  const std::size_t d = dataset_ids.size();
  Grid values(d, d);
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != d + 1) throw ParseError("similarity row has wrong field count", line_no, fields.size());
    if (line_no == 1) {
      if (!std::equal(fields.begin() + 1, fields.end(), dataset_ids.begin()))
        throw SchemaError("similarity matrix header does not match benchmark dataset ids");
      continue;
    }
    if (row >= d || fields[0] != dataset_ids[row])
      throw SchemaError("similarity matrix row ids do not match benchmark dataset ids");
    for (std::size_t j = 0; j < d; ++j) {
      std::istringstream cell(fields[j + 1]);
      cell.imbue(std::locale::classic());
      double v;
      if (!(cell >> v)) throw ParseError("non-numeric similarity value", line_no, j + 2);
      values(row, j) = v;
    }
    ++row;
  }
  if (row != d) throw SchemaError("similarity matrix has " + std::to_string(row) + " rows, expected " + std::to_string(d));
  return SimilarityMatrix(measure, std::move(values));
}

}  // namespace simba
