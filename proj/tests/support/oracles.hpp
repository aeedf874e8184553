#pragma once

// Brute-force reference computations used only by tests. Each one follows the
// textbook definition directly and shares no code with the library paths it
// checks (no kernels, no incremental state).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

struct Ols {
  double slope;
  double intercept;
  double r_squared;
};

// Normal equations for y = a x + b, r^2 = 1 - SSres/SStot.
inline Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - a * sx) / n;
  const double ybar = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss_res += (y[i] - a * x[i] - b) * (y[i] - a * x[i] - b);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  return {a, b, 1.0 - ss_res / ss_tot};
}

inline std::vector<double> log_of(const std::vector<double>& v, double offset = 1e-6) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x + offset));
  return out;
}

/// The six r^2 values in the order lin(x->y), lin(y->x), exp(x->y), exp(y->x), pow(x->y), pow(y->x).
inline std::vector<double> six_r2(const std::vector<double>& x, const std::vector<double>& y) {
  return {ols(x, y).r_squared,
          ols(y, x).r_squared,
          ols(x, log_of(y)).r_squared,
          ols(y, log_of(x)).r_squared,
          ols(log_of(x), log_of(y)).r_squared,
          ols(log_of(y), log_of(x)).r_squared};
}

/// NaN when either side is constant.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto constant = [](const std::vector<double>& v) {
    for (double e : v)
      if (e != v.front()) return false;
    return true;
  };
  if (constant(a) || constant(b)) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

/// rows = models, cols = datasets, row-major.
inline std::vector<double> mwr(const std::vector<std::vector<double>>& b, const std::vector<std::size_t>& cols) {
  const std::size_t m = b.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t mu = 0; mu < m; ++mu) {
    double total = 0;
    for (std::size_t c : cols) {
      double wins = 0;
      for (std::size_t other = 0; other < m; ++other)
        if (other != mu && b[mu][c] > b[other][c]) wins += 1;
      total += wins / static_cast<double>(m - 1);
    }
    out[mu] = total / static_cast<double>(cols.size());
  }
  return out;
}

/// Proxy coverage straight from the definition. sim is d x d.
inline double delta(const std::set<std::size_t>& s, const std::vector<std::vector<double>>& sim) {
  if (s.empty()) return 0.0;
  const std::size_t d = sim.size();
  double total = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (s.count(i)) {
      total += 1;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j : s) best = std::max(best, sim[i][j]);
    total += best;
  }
  return total / static_cast<double>(d);
}

/// Best proxy coverage over all subsets of a given size (d <= 12).
inline double best_delta_of_size(std::size_t size, const std::vector<std::vector<double>>& sim,
                                 std::set<std::size_t>* argbest = nullptr) {
  const std::size_t d = sim.size();
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
    std::set<std::size_t> s;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (1u << i)) s.insert(i);
    const double v = delta(s, sim);
    if (v > best) {
      best = v;
      if (argbest) *argbest = s;
    }
  }
  return best;
}

inline double kendall_gk(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) c += 1;
      if (s < 0) d += 1;
    }
  return (c - d) / (c + d);
}

/// Trapezoid over explicit points (x_i, y_i).
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

}  // namespace oracle
