#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "eblab/errors.hpp"
#include "eblab/nullgrid.hpp"

namespace eblab {

namespace detail {

/// Nodes/weights of the 12-point Gauss-Legendre rule on [-1, 1].
inline const std::array<double, 12>& gl_nodes() {
  static const std::array<double, 12> x = {
      -0.9815606342467192, -0.9041172563704749, -0.7699026741943047, -0.5873179542866175,
      -0.3678314989981802, -0.1252334085114689, 0.1252334085114689,  0.3678314989981802,
      0.5873179542866175,  0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
  return x;
}
inline const std::array<double, 12>& gl_weights() {
  static const std::array<double, 12> w = {
      0.0471753363865118, 0.1069393259953184, 0.1600783285433462, 0.2031674267230659,
      0.2334925365383548, 0.2491470458134028, 0.2491470458134028, 0.2334925365383548,
      0.2031674267230659, 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
  return w;
}

template <class F>
double gl_integrate(F&& f, double a, double b, int pieces) {
  if (b <= a) return 0.0;
  double total = 0.0;
  const double dh = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * dh;
    const double mid = lo + 0.5 * dh, half = 0.5 * dh;
    for (int q = 0; q < 12; ++q)
      total += half * gl_weights()[q] * f(mid + half * gl_nodes()[q]);
  }
  return total;
}

}  // namespace detail

/// Exact (quadrature-limited) forward solution for n = 3, ell = 0 by Duhamel
/// integration over the backward characteristic triangle with odd reflection
/// of r f(t, r) at the axis:
///   (r u)(t, r) = 1/2 int_0^t int_{r-(t-t')}^{r+(t-t')} r' f(t', |r'|) dr' dt'.
struct DalembertOracle {
  ForcingSpec forcing;
  int pieces = 24;  // quadrature subdivisions per direction

  double reduced(double t, double r) const {  // returns w = r u
    const double tlo = std::max(forcing.t0, t - (r + forcing.r1));
    const double thi = std::min(forcing.t1, t);
    if (thi <= tlo) return 0.0;
    auto inner = [&](double tp) {
      const double a = r - (t - tp), b = r + (t - tp);
      double val = 0.0;
      // positive branch
      {
        const double lo = std::max(a, forcing.r0), hi = std::min(b, forcing.r1);
        if (hi > lo)
          val += detail::gl_integrate([&](double rp) { return rp * forcing(tp, rp); }, lo, hi,
                                      pieces);
      }
      // reflected branch, r' in [a,b] cap [-r1, -r0]
      {
        const double lo = std::max(a, -forcing.r1), hi = std::min(b, -forcing.r0);
        if (hi > lo)
          val += detail::gl_integrate([&](double rp) { return rp * forcing(tp, -rp); }, lo, hi,
                                      pieces);
      }
      return val;
    };
    return 0.5 * detail::gl_integrate(inner, tlo, thi, pieces);
  }

  double operator()(double t, double r) const {
    if (r <= 0.0) throw DomainError("oracle: needs r > 0");
    return reduced(t, r) / r;
  }
};

}  // namespace eblab
