#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the similarity measures and the greedy
// coverage search. Every kernel has a scalar reference implementation; vector
// variants are selected once at runtime from what the CPU reports and must
// agree with the reference to within reassociation error.

namespace simba::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

struct CrossMoments {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum |x - y|
  double (*abs_diff_sum)(const double* x, const double* y, std::size_t n);
  // sum (x - y)^2
  double (*sq_diff_sum)(const double* x, const double* y, std::size_t n);
  // sum |x - y|^3
  double (*cube_diff_sum)(const double* x, const double* y, std::size_t n);
  // sum max(col - floor, 0)
  double (*gain_sum)(const double* floor, const double* col, std::size_t n);
  // sums of centered squares and cross products around (mx, my)
  CrossMoments (*centered_moments)(const double* x, const double* y, std::size_t n, double mx, double my);
};

std::string_view isa_name(Isa isa);

/// Table for a specific ISA, or nullptr if it was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

/// Best supported table; SIMBA_FORCE_SCALAR=1 in the environment pins the reference.
const KernelTable& active();

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double abs_diff_sum(std::span<const double> x, std::span<const double> y) {
  return active().abs_diff_sum(x.data(), y.data(), x.size());
}
inline double sq_diff_sum(std::span<const double> x, std::span<const double> y) {
  return active().sq_diff_sum(x.data(), y.data(), x.size());
}
inline double cube_diff_sum(std::span<const double> x, std::span<const double> y) {
  return active().cube_diff_sum(x.data(), y.data(), x.size());
}
inline double gain_sum(std::span<const double> floor, std::span<const double> col) {
  return active().gain_sum(floor.data(), col.data(), floor.size());
}
inline CrossMoments centered_moments(std::span<const double> x, std::span<const double> y, double mx, double my) {
  return active().centered_moments(x.data(), y.data(), x.size(), mx, my);
}

}  // namespace simba::kernels
