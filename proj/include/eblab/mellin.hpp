#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "eblab/errors.hpp"
#include "eblab/util.hpp"

namespace eblab {

/// Matched sample/transform grids for the Mellin transform
///   (M u)(lambda) = int_0^inf rho^{-i lambda} u(rho) drho / rho
/// on the line Im lambda = -gamma. The geometric rho-grid is uniform in
/// log rho; the frequency grid spans one full Nyquist period so that the
/// forward/inverse pair is a discrete Fourier pair.
struct MellinGrid {
  double rho_min = 1e-8;
  double rho_max = 60.0;
  int npts = 4096;
  double gamma = 0.0;  // weight line Im lambda = -gamma

  double h() const { return (std::log(rho_max) - std::log(rho_min)) / (npts - 1); }
  double theta(int j) const { return std::log(rho_min) + j * h(); }
  double rho(int j) const { return std::exp(theta(j)); }
  double dsigma() const { return 2.0 * kPi / (npts * h()); }
  double sigma(int k) const { return (k - npts / 2) * dsigma(); }
  std::complex<double> lambda(int k) const { return {sigma(k), -gamma}; }
};

namespace detail {

inline void check_weighted_decay(const MellinGrid& g, const std::vector<std::complex<double>>& uw,
                                 double tol) {
  double mx = 0.0;
  for (const auto& v : uw) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return;
  const int n = static_cast<int>(uw.size());
  const double edge = std::max(std::max(std::abs(uw[0]), std::abs(uw[1])),
                               std::max(std::abs(uw[n - 2]), std::abs(uw[n - 1])));
  if (edge > tol * mx)
    throw AliasError("mellin: weighted samples do not decay at the grid ends");
}

}  // namespace detail

/// Forward transform of samples u(rho_j) along the line Im lambda = -gamma.
inline std::vector<std::complex<double>> mellin_forward(const MellinGrid& g,
                                                        const std::vector<std::complex<double>>& u,
                                                        double decay_tol = 1e-10) {
  if (static_cast<int>(u.size()) != g.npts) throw DomainError("mellin_forward: size mismatch");
  std::vector<std::complex<double>> uw(g.npts);
  for (int j = 0; j < g.npts; ++j) uw[j] = std::pow(g.rho(j), -g.gamma) * u[j];
  detail::check_weighted_decay(g, uw, decay_tol);
  const double h = g.h();
  std::vector<std::complex<double>> out(g.npts, 0.0);
  for (int k = 0; k < g.npts; ++k) {
    const double s = g.sigma(k);
    std::complex<double> acc = 0.0;
    for (int j = 0; j < g.npts; ++j) {
      const double ph = -s * g.theta(j);
      acc += uw[j] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    out[k] = h * acc;
  }
  // Bandwidth check: the transform must decay before the Nyquist edge.
  double mx = 0.0;
  for (const auto& v : out) mx = std::max(mx, std::abs(v));
  if (mx > 0.0) {
    const double edge = std::max(std::abs(out[0]), std::abs(out[g.npts - 1]));
    if (edge > 1e-8 * mx) throw AliasError("mellin: insufficient bandwidth on the frequency grid");
  }
  return out;
}

/// Inverse transform back to the rho-grid.
inline std::vector<std::complex<double>> mellin_inverse(
    const MellinGrid& g, const std::vector<std::complex<double>>& M) {
  if (static_cast<int>(M.size()) != g.npts) throw DomainError("mellin_inverse: size mismatch");
  std::vector<std::complex<double>> out(g.npts, 0.0);
  const double ds = g.dsigma();
  for (int j = 0; j < g.npts; ++j) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < g.npts; ++k) {
      const double ph = g.sigma(k) * g.theta(j);
      acc += M[k] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    out[j] = std::pow(g.rho(j), g.gamma) * acc * ds / (2.0 * kPi);
  }
  return out;
}

/// Squared weighted norm of the samples, int |rho^-gamma u|^2 drho/rho.
inline double mellin_weighted_norm_sq(const MellinGrid& g,
                                      const std::vector<std::complex<double>>& u) {
  double acc = 0.0;
  for (int j = 0; j < g.npts; ++j) acc += std::norm(std::pow(g.rho(j), -g.gamma) * u[j]);
  return acc * g.h();
}

/// Squared line-integral norm of the transform, (2 pi)^-1 int |M|^2 dsigma.
inline double mellin_line_norm_sq(const MellinGrid& g,
                                  const std::vector<std::complex<double>>& M) {
  double acc = 0.0;
  for (const auto& v : M) acc += std::norm(v);
  return acc * g.dsigma() / (2.0 * kPi);
}

}  // namespace eblab
