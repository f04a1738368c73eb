#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "eblab/errors.hpp"
#include "eblab/nullgrid.hpp"
#include "eblab/util.hpp"

namespace eblab {

/// Curves for pointwise decay fits. OutgoingRay follows t - r = c toward null
/// infinity; Interior follows t = c r (c < 1) toward spacelike infinity;
/// TowardIplus follows t = c r (c > 1) toward future timelike infinity.
struct DecayCurve {
  enum class Kind { OutgoingRay, Interior, TowardIplus };
  Kind kind = Kind::OutgoingRay;
  double c = 0.0;
};

/// Log-log abscissa of the fit: the radius, or the chart defining function of
/// null infinity xI = sqrt((T - (t-r))/r) at a fixed shift T.
struct DecayAbscissa {
  enum class Kind { Radius, XI };
  Kind kind = Kind::Radius;
  double T = 0.0;
};

struct DecayFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double residual_rms = 0.0;
  int samples = 0;
};

/// Least-squares fit of log|u| against the log abscissa along a curve.
/// Samples below `floor_rel` of the on-curve maximum are discarded; `r_min`
/// restricts the fit to the far zone beyond the source region.
inline DecayFit decay_fit(const SolutionField& sol, const DecayCurve& curve,
                          const DecayAbscissa& abscissa = {}, double r_min = 0.0,
                          int samples = 200, double floor_rel = 1e-6) {
  const NullGrid& g = sol.spec.grid;
  // Determine the r-range of the curve inside the grid.
  double r_lo = 1e300, r_hi = 0.0;
  auto point_of = [&](double r) {
    double t;
    switch (curve.kind) {
      case DecayCurve::Kind::OutgoingRay: t = curve.c + r; break;
      case DecayCurve::Kind::Interior:
      case DecayCurve::Kind::TowardIplus: t = curve.c * r; break;
    }
    return std::pair<double, double>(t - r, t + r);  // (u_ret, v_adv)
  };
  // March candidate radii and keep the valid window.
  for (int k = 0; k < 4000; ++k) {
    const double r = std::exp(std::log(0.51 * g.h) +
                              (std::log(0.5 * (g.v(g.nv - 1) - g.u0)) - std::log(0.51 * g.h)) * k /
                                  3999.0);
    const auto [uu, vv] = point_of(r);
    if (r < r_min) continue;
    if (uu <= g.u0 + g.h || vv <= g.v(0) + g.h) continue;
    if (uu >= g.u(g.nu - 2) || vv >= g.v(g.nv - 2)) continue;
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
  }
  if (!(r_hi > 0.0) || r_hi / r_lo < 100.0)
    throw InsufficientRange("decay_fit: curve spans less than two decades inside the grid");

  std::vector<double> lx, ly;
  std::vector<std::pair<double, double>> kept;
  double umax = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double r = std::exp(std::log(r_lo) + (std::log(r_hi) - std::log(r_lo)) * k /
                                                   (samples - 1.0));
    const auto [uu, vv] = point_of(r);
    double uval;
    try {
      uval = sol.sample_w(uu, vv) / std::pow(r, sol.spec.mass_exponent());
    } catch (const DomainError&) {
      continue;
    }
    double x;
    if (abscissa.kind == DecayAbscissa::Kind::Radius) {
      x = r;
    } else {
      const double s = abscissa.T - uu;
      if (s <= 0.0) continue;
      x = std::sqrt(s / r);
    }
    umax = std::max(umax, std::abs(uval));
    kept.emplace_back(x, uval);
  }
  for (const auto& [x, uval] : kept) {
    if (std::abs(uval) < floor_rel * umax) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(std::abs(uval)));
  }
  if (lx.size() < 8) throw InsufficientRange("decay_fit: too few usable samples on the curve");
  const LineFit f = fit_line(lx, ly);
  DecayFit out;
  out.exponent = f.slope;
  out.stderr_exponent = f.slope_stderr;
  out.residual_rms = f.residual_rms;
  out.samples = static_cast<int>(lx.size());
  return out;
}

/// Synthetic solution field from a pointwise amplitude, for fit calibration.
template <class F>
SolutionField synthetic_field(const SolveSpec& spec, F&& u_of_tr) {
  SolutionField out;
  out.spec = spec;
  const NullGrid& g = spec.grid;
  out.w.assign(static_cast<std::size_t>(g.nu) * g.nv, 0.0);
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double r = g.r(i, j);
      if (r <= 0.0) continue;
      out.at(i, j) = u_of_tr(g.t(i, j), r) * std::pow(r, spec.mass_exponent());
    }
  return out;
}

}  // namespace eblab
