#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

inline constexpr double kPi = 3.14159265358979323846;

/// Deterministic uniform double in [lo, hi) built from the raw engine output,
/// independent of the standard library's distribution implementations.
inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
  return lo + (hi - lo) * u;
}

/// Standard normal via Box-Muller on the deterministic uniform.
inline double normal(std::mt19937_64& rng) {
  double u1 = uniform(rng);
  while (u1 <= 0.0) u1 = uniform(rng);
  const double u2 = uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

/// Finite-difference weights on arbitrary nodes (Fornberg's recursion).
/// Returns weights w so that f^(m)(x0) ~= sum_i w[i] f(nodes[i]).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
  const int nd = static_cast<int>(nodes.size());
  std::vector<std::vector<std::vector<double>>> c(
      nd, std::vector<std::vector<double>>(nd, std::vector<double>(m + 1, 0.0)));
  c[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i < nd; ++i) {
    double c2 = 1.0;
    const int mn = std::min(i, m);
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      for (int k = 0; k <= mn; ++k) {
        c[i][j][k] = ((nodes[i] - x0) * c[i - 1][j][k] - (k > 0 ? k * c[i - 1][j][k - 1] : 0.0)) / c3;
      }
    }
    for (int k = 0; k <= mn; ++k) {
      c[i][i][k] = c1 / c2 *
                   ((k > 0 ? k * c[i - 1][i - 1][k - 1] : 0.0) - (nodes[i - 1] - x0) * c[i - 1][i - 1][k]);
    }
    c1 = c2;
  }
  std::vector<double> w(nd);
  for (int j = 0; j < nd; ++j) w[j] = c[nd - 1][j][m];
  return w;
}

/// 4th-order derivative of a callable, central where possible, one-sided when
/// the argument may not cross `floor` (e.g. a boundary defining function).
template <class F>
double diff4(F&& f, double x, double h, double floor_value = -1e300) {
  if (h <= 0.0 || !std::isfinite(h)) throw StepError("diff4: invalid step");
  if (x - 2.0 * h > floor_value) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
  }
  // 5-point one-sided stencil anchored at x.
  return (-25 * f(x) + 48 * f(x + h) - 36 * f(x + 2 * h) + 16 * f(x + 3 * h) - 3 * f(x + 4 * h)) /
         (12 * h);
}

/// Run fn(i) for i in [0, count) over `threads` workers. Result slots are
/// index-addressed by the caller, so the output is order-deterministic.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int nw = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

/// Least-squares line fit y = a + b x; returns {a, b, stderr_b, residual_rms}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double residual_rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>* wts = nullptr) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitError("fit_line: need at least two samples");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = wts ? (*wts)[i] : 1.0;
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw FitError("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = (sw * sxy - sx * sy) / det;
  out.intercept = (sxx * sy - sx * sxy) / det;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ss += (wts ? (*wts)[i] : 1.0) * r * r;
  }
  out.residual_rms = std::sqrt(ss / sw);
  if (n > 2) out.slope_stderr = std::sqrt((ss / (n - 2)) / (sxx - sx * sx / sw));
  return out;
}

}  // namespace eblab
