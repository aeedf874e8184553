// AArch64 only; Advanced SIMD is architecturally guaranteed there.
#include <arm_neon.h>

#include <cmath>

#include "simba/kernels.hpp"

namespace simba::kernels::detail {
namespace {

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double abs_diff_sum(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(x[i] - y[i]);
  return s;
}

double sq_diff_sum(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vaddq_f64(acc, vmulq_f64(d, d));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double cube_diff_sum(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vaddq_f64(acc, vmulq_f64(vmulq_f64(d, d), d));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(x[i] - y[i]);
    s += d * d * d;
  }
  return s;
}

double gain_sum(const double* floor, const double* col, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t acc = zero;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vmaxq_f64(vsubq_f64(vld1q_f64(col + i), vld1q_f64(floor + i)), zero));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double g = col[i] - floor[i];
    if (g > 0.0) s += g;
  }
  return s;
}

CrossMoments centered_moments(const double* x, const double* y, std::size_t n, double mx, double my) {
  const float64x2_t vmx = vdupq_n_f64(mx);
  const float64x2_t vmy = vdupq_n_f64(my);
  float64x2_t axx = vdupq_n_f64(0.0), ayy = axx, axy = axx;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(x + i), vmx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(y + i), vmy);
    axx = vaddq_f64(axx, vmulq_f64(dx, dx));
    ayy = vaddq_f64(ayy, vmulq_f64(dy, dy));
    axy = vaddq_f64(axy, vmulq_f64(dx, dy));
  }
  CrossMoments m{vaddvq_f64(axx), vaddvq_f64(ayy), vaddvq_f64(axy)};
  for (; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.xx += dx * dx;
    m.yy += dy * dy;
    m.xy += dx * dy;
  }
  return m;
}

const KernelTable kNeonTable{
    Isa::kNeon, sum, dot, abs_diff_sum, sq_diff_sum, cube_diff_sum, gain_sum, centered_moments,
};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

}  // namespace simba::kernels::detail
