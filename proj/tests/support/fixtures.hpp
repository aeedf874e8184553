#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simba/benchio.hpp"
#include "simba/rng.hpp"
#include "simba/simmeasure.hpp"

namespace fixtures {

inline std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline simba::Benchmark from_rows(const std::vector<std::vector<double>>& rows) {
  simba::Grid g(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c];
  return simba::Benchmark(ids("m", rows.size()), ids("d", rows.front().size()), std::move(g));
}

inline std::vector<std::vector<double>> rows_of(const simba::Benchmark& b) {
  std::vector<std::vector<double>> out(b.models(), std::vector<double>(b.datasets()));
  for (std::size_t r = 0; r < b.models(); ++r)
    for (std::size_t c = 0; c < b.datasets(); ++c) out[r][c] = b.scores()(r, c);
  return out;
}

inline simba::Benchmark uniform(std::size_t m, std::size_t d, std::uint64_t seed) {
  simba::Rng rng(seed);
  simba::Grid g(m, d);
  for (auto& v : g.values()) v = rng.uniform();
  return simba::Benchmark(ids("m", m), ids("d", d), std::move(g));
}

/// `clusters` groups of `per_cluster` near-duplicate columns (jitter 1e-3).
/// Cluster k's column is dataset index k * per_cluster + j.
inline simba::Benchmark planted_clusters(std::size_t clusters, std::size_t per_cluster, std::size_t m,
                                         std::uint64_t seed) {
  simba::Rng rng(seed);
  simba::Grid g(m, clusters * per_cluster);
  for (std::size_t k = 0; k < clusters; ++k) {
    const double offset = 0.05 + 0.45 * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(clusters - 1, 1));
    std::vector<double> base(m);
    for (auto& v : base) v = offset + 0.45 * rng.uniform();
    for (std::size_t j = 0; j < per_cluster; ++j)
      for (std::size_t r = 0; r < m; ++r)
        g(r, k * per_cluster + j) = std::clamp(base[r] + rng.uniform(-1e-3, 1e-3), 0.0, 1.0);
  }
  return simba::Benchmark(ids("m", m), ids("d", clusters * per_cluster), std::move(g));
}

/// Every column is an exact affine function of a 2-d latent ability.
inline simba::Benchmark planted_linear(std::size_t m, std::size_t d, std::uint64_t seed) {
  simba::Rng rng(seed);
  std::vector<double> z1(m), z2(m);
  for (std::size_t r = 0; r < m; ++r) {
    z1[r] = rng.uniform();
    z2[r] = rng.uniform();
  }
  simba::Grid g(m, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double a = rng.uniform(0.05, 0.25);
    const double w1 = rng.uniform(0.1, 0.35);
    const double w2 = rng.uniform(0.1, 0.35);
    for (std::size_t r = 0; r < m; ++r) g(r, c) = a + w1 * z1[r] + w2 * z2[r];
  }
  return simba::Benchmark(ids("m", m), ids("d", d), std::move(g));
}

/// Symmetric similarity matrix with unit diagonal; entries in [lo, hi].
inline simba::SimilarityMatrix random_similarity(std::size_t d, std::uint64_t seed, double lo = 0.0,
                                                 double hi = 1.0) {
  simba::Rng rng(seed);
  simba::Grid g(d, d, 1.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) g(i, j) = g(j, i) = rng.uniform(lo, hi);
  return simba::SimilarityMatrix(simba::Measure::kPearson, std::move(g));
}

inline std::vector<std::vector<double>> to_nested(const simba::SimilarityMatrix& s) {
  std::vector<std::vector<double>> out(s.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) out[i][j] = s(i, j);
  return out;
}

}  // namespace fixtures
