#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

/// Characteristic grid in retarded/advanced coordinates u = t - r, v = t + r
/// with equal spacing h in both directions. The axis r = 0 is the diagonal
/// v = u; the grid is aligned so that axis points are grid points.
struct NullGrid {
  double u0 = 0.0;
  double h = 0.01;
  int nu = 0;
  int nv = 0;
  long axis_offset = 0;  // (v0 - u0) / h, an exact integer

  double u(int i) const { return u0 + i * h; }
  double v(int j) const { return u0 + (axis_offset + j) * h; }
  // The radius is computed from integer index differences so that axis
  // points are exactly zero regardless of rounding in u0 and h.
  double r(int i, int j) const { return 0.5 * h * (axis_offset + j - i); }
  double t(int i, int j) const { return u(i) + r(i, j); }

  static NullGrid make(double u_lo, double u_hi, double v_lo, double v_hi, double h) {
    NullGrid g;
    g.h = h;
    g.u0 = u_lo;
    // Snap v0 so that v0 - u0 is an integer multiple of h (axis on grid).
    g.axis_offset = static_cast<long>(std::llround((v_lo - u_lo) / h));
    g.nu = static_cast<int>(std::ceil((u_hi - u_lo) / h)) + 1;
    g.nv = static_cast<int>(std::ceil((v_hi - g.v(0)) / h)) + 1;
    if (g.nu < 3 || g.nv < 3) throw GridTooCoarse("null grid needs at least 3 points per side");
    return g;
  }
};

/// Compactly supported separable forcing profile in (t, r) acting on a single
/// spherical mode. bump_order 0 selects the smooth exponential bump; q >= 1
/// selects the C^{q-1} window (1-s^2)^q.
struct ForcingSpec {
  double amplitude = 1.0;
  double t0 = 0.0, t1 = 1.0;
  double r0 = 1.0, r1 = 2.0;
  int bump_order = 0;
  int ell = 0;

  static double window(double s, int order) {
    if (std::abs(s) >= 1.0) return 0.0;
    if (order <= 0) return std::exp(1.0 - 1.0 / (1.0 - s * s));
    return std::pow(1.0 - s * s, order);
  }

  double operator()(double t, double r) const {
    const double st = (2.0 * t - t0 - t1) / (t1 - t0);
    const double sr = (2.0 * r - r0 - r1) / (r1 - r0);
    return amplitude * window(st, bump_order) * window(sr, bump_order);
  }
};

enum class OperatorVariant { Wave, ModelP1 };

/// Specification of one forward mode solve.
struct SolveSpec {
  int n = 3;                 // space dimension (2 or 3)
  OperatorVariant op = OperatorVariant::Wave;
  double p1 = 0.0;           // subprincipal constant of the ModelP1 operator
  ForcingSpec forcing;
  NullGrid grid;

  double mass_exponent() const { return 0.5 * (n - 1); }  // w = r^m u
  double potential(double r) const {
    const double m = mass_exponent();
    const double lam = forcing.ell * (forcing.ell + n - 2);
    return (m * (m - 1.0) + lam) / (r * r);
  }
  double p1_coeff() const { return op == OperatorVariant::ModelP1 ? 2.0 * p1 : 0.0; }
};

/// Forward solution of one spherical mode on the characteristic grid,
/// stored as the reduced field w = r^{(n-1)/2} u.
struct SolutionField {
  SolveSpec spec;
  std::vector<double> w;  // row-major, index i * nv + j
  double forcing_scale = 0.0;

  double& at(int i, int j) { return w[static_cast<std::size_t>(i) * spec.grid.nv + j]; }
  double at(int i, int j) const { return w[static_cast<std::size_t>(i) * spec.grid.nv + j]; }

  /// Physical mode amplitude u = w / r^m; requires r > 0.
  double u_phys(int i, int j) const {
    const double rr = spec.grid.r(i, j);
    return at(i, j) / std::pow(rr, spec.mass_exponent());
  }

  /// Bilinear sample of w at arbitrary (u_ret, v_adv) inside the grid.
  double sample_w(double uu, double vv) const {
    const NullGrid& g = spec.grid;
    const double fi = (uu - g.u0) / g.h;
    const double fj = (vv - g.v(0)) / g.h;
    const int i = static_cast<int>(std::floor(fi));
    const int j = static_cast<int>(std::floor(fj));
    if (i < 0 || j < 0 || i + 1 >= g.nu || j + 1 >= g.nv)
      throw DomainError("sample_w: point outside the solved grid");
    const double ai = fi - i, aj = fj - j;
    return (1 - ai) * (1 - aj) * at(i, j) + ai * (1 - aj) * at(i + 1, j) +
           (1 - ai) * aj * at(i, j + 1) + ai * aj * at(i + 1, j + 1);
  }

  double sample_u(double t, double r) const {
    return sample_w(t - r, t + r) / std::pow(r, spec.mass_exponent());
  }
};

namespace detail {

inline void validate_solve_spec(const SolveSpec& spec) {
  if (spec.n != 2 && spec.n != 3)
    throw UnsupportedMode("mode solver supports space dimensions 2 and 3");
  if (spec.forcing.ell < 0 || spec.forcing.ell > 8)
    throw UnsupportedMode("mode solver supports spherical modes ell <= 8");
  const NullGrid& g = spec.grid;
  // The scheme solves for w_N with coefficient 4/h^2 + p1c/(r_c h); a sign
  // change there breaks the marching.
  const double rmin = 0.5 * g.h;
  if (4.0 / (g.h * g.h) + spec.p1_coeff() / (rmin * g.h) <= 0.0)
    throw CFLViolation("p1 drift term overwhelms the cell update at the axis");
}

}  // namespace detail

/// Forward characteristic march. For each computed column j the sink is
/// invoked with the column values w(:, j); column 0 and row 0 are zero
/// (the grid must start before the forcing support).
inline void solve_streaming(const SolveSpec& spec,
                            const std::function<void(int, const std::vector<double>&)>& sink) {
  detail::validate_solve_spec(spec);
  const NullGrid& g = spec.grid;
  const double h = g.h;
  const double m = spec.mass_exponent();
  const double p1c = spec.p1_coeff();

  std::vector<double> col_prev(g.nu, 0.0), col_new(g.nu, 0.0);
  sink(0, col_prev);
  for (int j = 0; j + 1 < g.nv; ++j) {
    col_new[0] = 0.0;
    for (int i = 0; i + 1 < g.nu; ++i) {
      // Cell corners: S=(i,j), E=(i,j+1), W=(i+1,j), N=(i+1,j+1).
      const double r_s = g.r(i, j);
      if (r_s <= 0.0) {
        col_new[i + 1] = 0.0;  // axis and unphysical side
        continue;
      }
      const double wS = col_prev[i];
      const double wE = col_new[i];
      const double wW = (g.r(i + 1, j) > 0.0) ? col_prev[i + 1] : 0.0;
      const double r_c = r_s;  // cell center radius
      const double t_c = g.t(i, j) + 0.5 * h;
      const double Vc = spec.potential(r_c);
      const double Fc = std::pow(r_c, m) * spec.forcing(t_c, r_c);
      // Potential handled on the (N,S) average: stable next to the axis.
      const double aN = 4.0 / (h * h) + 0.5 * Vc + p1c / (r_c * h);
      if (aN <= 0.0) throw CFLViolation("cell update coefficient lost positivity");
      const double rhs = 4.0 / (h * h) * (wE + wW - wS) - 0.5 * Vc * wS +
                         p1c / (r_c * h) * wS + Fc;
      col_new[i + 1] = rhs / aN;
    }
    sink(j + 1, col_new);
    std::swap(col_prev, col_new);
  }
}

/// Forward solve with full storage of the reduced field.
inline SolutionField solve_spherical_forward(const SolveSpec& spec) {
  SolutionField out;
  out.spec = spec;
  out.w.assign(static_cast<std::size_t>(spec.grid.nu) * spec.grid.nv, 0.0);
  out.forcing_scale = std::abs(spec.forcing.amplitude);
  solve_streaming(spec, [&](int j, const std::vector<double>& col) {
    for (int i = 0; i < spec.grid.nu; ++i) out.at(i, j) = col[i];
  });
  return out;
}

/// Residual of the discrete operator applied to the (restricted) solution on
/// a grid coarsened by an integer factor, relative to the forcing scale.
inline double operator_residual(const SolutionField& sol, int coarsen = 2) {
  const NullGrid& g = sol.spec.grid;
  const int c = coarsen;
  const double H = g.h * c;
  const double m = sol.spec.mass_exponent();
  const double p1c = sol.spec.p1_coeff();
  double worst = 0.0;
  for (int i = 0; i + c < g.nu; i += c) {
    for (int j = 0; j + c < g.nv; j += c) {
      const double r_s = g.r(i, j);
      if (r_s <= 0.5 * H) continue;
      const double wS = sol.at(i, j), wE = sol.at(i, j + c), wW = sol.at(i + c, j),
                   wN = sol.at(i + c, j + c);
      const double t_c = g.t(i, j) + 0.5 * H;
      const double Vc = sol.spec.potential(r_s);
      const double Fc = std::pow(r_s, m) * sol.spec.forcing(t_c, r_s);
      const double res = 4.0 / (H * H) * (wN - wE - wW + wS) + 0.5 * Vc * (wN + wS) +
                         p1c / (r_s * H) * (wN - wS) - Fc;
      worst = std::max(worst, std::abs(res));
    }
  }
  const double scale = std::abs(sol.spec.forcing.amplitude);
  return worst / (scale > 0 ? scale : 1.0);
}

/// Streaming variant: solve and evaluate the coarsened residual in one pass,
/// without storing the full grid.
inline double operator_residual_streaming(const SolveSpec& spec, int coarsen = 2) {
  const NullGrid& g = spec.grid;
  const int c = coarsen;
  const double H = g.h * c;
  const double m = spec.mass_exponent();
  const double p1c = spec.p1_coeff();
  std::vector<std::vector<double>> ring(c + 1);
  double worst = 0.0;
  int stored = 0;
  solve_streaming(spec, [&](int j, const std::vector<double>& col) {
    ring[j % (c + 1)] = col;
    ++stored;
    if (j < c || j % c != 0) return;
    const std::vector<double>& colj = ring[(j - c) % (c + 1)];
    const std::vector<double>& colJ = ring[j % (c + 1)];
    if (static_cast<int>(colj.size()) == 0) return;
    for (int i = 0; i + c < g.nu; i += c) {
      const double r_s = g.r(i, j - c);
      if (r_s <= 0.5 * H) continue;
      const double wS = colj[i], wE = colJ[i], wW = colj[i + c], wN = colJ[i + c];
      const double t_c = g.t(i, j - c) + 0.5 * H;
      const double Vc = spec.potential(r_s);
      const double Fc = std::pow(r_s, m) * spec.forcing(t_c, r_s);
      const double res = 4.0 / (H * H) * (wN - wE - wW + wS) + 0.5 * Vc * (wN + wS) +
                         p1c / (r_s * H) * (wN - wS) - Fc;
      worst = std::max(worst, std::abs(res));
    }
  });
  const double scale = std::abs(spec.forcing.amplitude);
  return worst / (scale > 0 ? scale : 1.0);
}

/// Conserved-quantity diagnostic: the standard t-slice energy of the reduced
/// field, E = 1/2 int (w_t^2 + w_r^2 + V w^2) dr along the grid diagonal
/// closest to the requested time.
inline double slice_energy(const SolutionField& sol, double t_slice) {
  const NullGrid& g = sol.spec.grid;
  const int K = static_cast<int>(std::round((2.0 * t_slice - g.u0 - g.v(0)) / g.h));
  double E = 0.0;
  for (int i = std::max(1, K - g.nv + 2); i + 1 < g.nu && K - i - 1 >= 1; ++i) {
    const int j = K - i;
    if (j + 1 >= g.nv || j - 1 < 1) continue;
    if (g.r(i, j) <= 0.0) continue;
    const double wu = (sol.at(i + 1, j) - sol.at(i - 1, j)) / (2 * g.h);
    const double wv = (sol.at(i, j + 1) - sol.at(i, j - 1)) / (2 * g.h);
    const double wt = wu + wv;
    const double wr = wv - wu;
    const double V = sol.spec.potential(g.r(i, j));
    E += 0.5 * (wt * wt + wr * wr + V * sol.at(i, j) * sol.at(i, j)) * g.h;
  }
  return E;
}

/// b-vector fields available for extra-regularity experiments.
enum class BField {
  UWeighted,  // <t-r> (dt - dr) = 2 <u> du
  VOutgoing,  // r (dt + dr) = 2 r dv
  Rotation,   // spherical rotation: multiplies the mode by sqrt(ell(ell+n-2))
};

/// Apply one b-vector field to the solution, producing a new reduced field on
/// the same grid (boundary rows fall back to one-sided differences).
inline SolutionField apply_bfield(const SolutionField& sol, BField kind) {
  const NullGrid& g = sol.spec.grid;
  SolutionField out = sol;
  if (kind == BField::Rotation) {
    const double lam = std::sqrt(
        static_cast<double>(sol.spec.forcing.ell * (sol.spec.forcing.ell + sol.spec.n - 2)));
    for (auto& x : out.w) x *= lam;
    return out;
  }
  const double mexp = sol.spec.mass_exponent();
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      if (g.r(i, j) <= 0.0) {
        out.at(i, j) = 0.0;
        continue;
      }
      auto du = [&]() {
        if (i == 0) return (sol.at(1, j) - sol.at(0, j)) / g.h;
        if (i + 1 == g.nu) return (sol.at(i, j) - sol.at(i - 1, j)) / g.h;
        return (sol.at(i + 1, j) - sol.at(i - 1, j)) / (2 * g.h);
      };
      auto dv = [&]() {
        if (j == 0) return (sol.at(i, 1) - sol.at(i, 0)) / g.h;
        if (j + 1 == g.nv) return (sol.at(i, j) - sol.at(i, j - 1)) / g.h;
        return (sol.at(i, j + 1) - sol.at(i, j - 1)) / (2 * g.h);
      };
      // The fields act on the physical amplitude u = w / r^m; express the
      // result again as a reduced field: X(w r^-m) r^m = X w - m (X r / r) w.
      if (kind == BField::UWeighted) {
        const double uu = g.u(i);
        const double xw = 2.0 * std::sqrt(1.0 + uu * uu) * du();
        const double xr_over_r = 2.0 * std::sqrt(1.0 + uu * uu) * (-0.5) / g.r(i, j);
        out.at(i, j) = xw - mexp * xr_over_r * sol.at(i, j);
      } else {
        const double xw = 2.0 * g.r(i, j) * dv();
        const double xr_over_r = 2.0 * g.r(i, j) * 0.5 / g.r(i, j);
        out.at(i, j) = xw - mexp * xr_over_r * sol.at(i, j);
      }
    }
  }
  return out;
}

}  // namespace eblab
