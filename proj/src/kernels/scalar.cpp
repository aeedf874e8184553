#include <cmath>

#include "simba/kernels.hpp"

namespace simba::kernels::detail {
namespace {

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double abs_diff_sum(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - y[i]);
  return s;
}

double sq_diff_sum(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double cube_diff_sum(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(x[i] - y[i]);
    s += d * d * d;
  }
  return s;
}

double gain_sum(const double* floor, const double* col, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = col[i] - floor[i];
    if (g > 0.0) s += g;
  }
  return s;
}

CrossMoments centered_moments(const double* x, const double* y, std::size_t n, double mx, double my) {
  CrossMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.xx += dx * dx;
    m.yy += dy * dy;
    m.xy += dx * dy;
  }
  return m;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::kScalar, sum, dot, abs_diff_sum, sq_diff_sum, cube_diff_sum, gain_sum, centered_moments,
};

}  // namespace simba::kernels::detail
