#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "eblab/metrics.hpp"
#include "eblab/phase.hpp"
#include "eblab/util.hpp"

namespace eblab {

/// Principal symbol: the dual rescaled metric as a quadratic form on the
/// fiber covector of p. Single source of truth shared with dual_metric_eb.
inline double symbol_value(const MetricSpec& m, const PhasePoint& p) {
  const Eigen::MatrixXd G = dual_metric_eb(m, p.base);
  const Eigen::VectorXd f = p.fiber();
  return f.dot(G * f);
}

enum class CharComponent { SigmaPlus, SigmaMinus, OffCharacteristic };

/// Locate a phase point relative to the two components of the characteristic
/// set over (or near) null infinity. The component discriminant is xi - zeta
/// on NearI0 and zeta on NearIplus.
inline CharComponent characteristic_component(const MetricSpec& m, const PhasePoint& p,
                                              double tol = 1e-9) {
  const double val = symbol_value(m, p);
  const double scale = p.fiber().squaredNorm();
  if (std::abs(val) >= tol * std::max(1.0, scale)) return CharComponent::OffCharacteristic;
  const double disc = (p.base.chart.face == Face::NearI0) ? (p.xi - p.zeta) : p.zeta;
  if (std::abs(disc) < tol * std::sqrt(std::max(1.0, scale)))
    throw ToleranceAmbiguous("characteristic_component: sign discriminant below tolerance");
  return disc > 0 ? CharComponent::SigmaPlus : CharComponent::SigmaMinus;
}

/// Hamiltonian vector field components in the frame order
/// (rho d/drho, x d/dx, x d/dy^a, d/dxi, d/deta_a, d/dzeta); length 2n+2.
struct HamiltonianField {
  Eigen::VectorXd comp;
  int n = 0;

  double rho_comp() const { return comp(0); }
  double x_comp() const { return comp(1); }
  double y_comp(int a) const { return comp(2 + a); }
  double xi_comp() const { return comp(n + 1); }
  double eta_comp(int a) const { return comp(n + 2 + a); }
  double zeta_comp() const { return comp(2 * n + 1); }
};

namespace detail {

/// Symbol as a function of the full coordinate tuple, for finite differences.
/// The sphere point's patch is held fixed; rho and x may be probed slightly
/// outside [0,1) by one-sided stencils at the boundary.
struct SymbolFn {
  const MetricSpec* m;
  ChartId chart;
  int patch;

  double operator()(double rho, double x, const Eigen::VectorXd& w, double zeta, double xi,
                    const Eigen::VectorXd& eta) const {
    ChartPoint b;
    b.chart = chart;
    b.rho = rho;
    b.x = x;
    b.y = SpherePoint{patch, w};
    PhasePoint p;
    p.base = b;
    p.zeta = zeta;
    p.xi = xi;
    p.eta = eta;
    return symbol_value(*m, p);
  }
};

inline bool has_exact_model_symbol(const MetricSpec& m) {
  return m.kind == MetricSpec::Kind::Minkowski || m.kind == MetricSpec::Kind::ModelP1;
}

}  // namespace detail

/// Exact Hamiltonian field of the model (Minkowski) symbol
///   G = -eps/2 xi (xi - 2 zeta) + x^2 xi^2 / 4 + k^{ab}(w) eta_a eta_b.
inline HamiltonianField hamiltonian_field_model(const PhasePoint& p) {
  const int d = p.eta.size();
  const int n = d + 1;
  const double eps = detail::chart_eps(p.base.chart);
  const double x = p.base.x;
  const double K = 1.0 / std::pow(sphere_conformal_factor(p.base.y.w), 2);
  const double eta2k = K * p.eta.squaredNorm();

  HamiltonianField H;
  H.n = n;
  H.comp = Eigen::VectorXd::Zero(2 * n + 2);
  H.comp(0) = eps * p.xi;                                    // rho d/drho
  H.comp(1) = -eps * (p.xi - p.zeta) + 0.5 * x * x * p.xi;   // x d/dx
  for (int a = 0; a < d; ++a) H.comp(2 + a) = 2.0 * K * p.eta(a);
  H.comp(n + 1) = -(0.5 * x * x * p.xi * p.xi + 2.0 * eta2k);  // d/dxi
  const double dK = (1.0 + p.base.y.w.squaredNorm());          // dK/dw_a = dK * w_a
  for (int a = 0; a < d; ++a) {
    H.comp(n + 2 + a) = (-eps * (p.xi - p.zeta) + 0.5 * x * x * p.xi) * p.eta(a) -
                        x * dK * p.base.y.w(a) * p.eta.squaredNorm();
  }
  H.comp(2 * n + 1) = 0.0;  // d/dzeta
  return H;
}

/// Hamiltonian field of symbol_value by 4th-order central finite differences
/// through the edge-b coordinate formula
///   H_p = (dp/dxi)(x dx + eta deta) + (dp/deta_a) x dy^a + (dp/dzeta) rho drho
///         - ((x dx + eta deta) p) dxi - (x dy^a p) deta_a - (rho drho p) dzeta.
inline HamiltonianField hamiltonian_field_fd(const MetricSpec& m, const PhasePoint& p,
                                             double h_rel = 1e-4) {
  const int d = p.eta.size();
  const int n = d + 1;
  const detail::SymbolFn f{&m, p.base.chart, p.base.y.patch};
  const double rho = p.base.rho, x = p.base.x;
  const Eigen::VectorXd& w = p.base.y.w;

  auto step = [&](double v) { return h_rel * (1.0 + std::abs(v)); };

  const double dp_dxi =
      diff4([&](double s) { return f(rho, x, w, p.zeta, s, p.eta); }, p.xi, step(p.xi));
  const double dp_dzeta =
      diff4([&](double s) { return f(rho, x, w, s, p.xi, p.eta); }, p.zeta, step(p.zeta));
  Eigen::VectorXd dp_deta(d), x_dy(d);
  for (int a = 0; a < d; ++a) {
    dp_deta(a) = diff4(
        [&](double s) {
          Eigen::VectorXd e = p.eta;
          e(a) = s;
          return f(rho, x, w, p.zeta, p.xi, e);
        },
        p.eta(a), step(p.eta(a)));
    x_dy(a) = x * diff4(
                      [&](double s) {
                        Eigen::VectorXd ww = w;
                        ww(a) = s;
                        return f(rho, x, ww, p.zeta, p.xi, p.eta);
                      },
                      w(a), step(w(a)));
  }
  // One-sided stencils keep rho and x probes on the chart side of the faces
  // when fractional-power perturbation coefficients are present.
  const double floor_b = detail::has_exact_model_symbol(m) ? -1e300 : 0.0;
  const double x_dx =
      x * diff4([&](double s) { return f(rho, s, w, p.zeta, p.xi, p.eta); }, x, step(x), floor_b);
  const double rho_drho =
      rho * diff4([&](double s) { return f(s, x, w, p.zeta, p.xi, p.eta); }, rho, step(rho), floor_b);

  HamiltonianField H;
  H.n = n;
  H.comp = Eigen::VectorXd::Zero(2 * n + 2);
  H.comp(0) = dp_dzeta;
  H.comp(1) = dp_dxi;
  for (int a = 0; a < d; ++a) H.comp(2 + a) = dp_deta(a);
  H.comp(n + 1) = -(x_dx + p.eta.dot(dp_deta));
  for (int a = 0; a < d; ++a) H.comp(n + 2 + a) = dp_dxi * p.eta(a) - x_dy(a);
  H.comp(2 * n + 1) = -rho_drho;
  return H;
}

/// Hamiltonian field: exact for the model symbol, finite differences else.
inline HamiltonianField hamiltonian_field(const MetricSpec& m, const PhasePoint& p) {
  if (detail::has_exact_model_symbol(m)) return hamiltonian_field_model(p);
  return hamiltonian_field_fd(m, p);
}

/// Layout of the compactified phase-space coordinates:
/// (rho, x, w_1..w_{n-1}, rho_inf, hat1, eta_hat_1..eta_hat_{n-1}).
inline int compact_dim(int n) { return 2 * n + 2; }
inline int idx_rho() { return 0; }
inline int idx_x() { return 1; }
inline int idx_w(int a) { return 2 + a; }
inline int idx_rho_inf(int n) { return n + 1; }
inline int idx_hat1(int n) { return n + 2; }
inline int idx_eta_hat(int n, int a) { return n + 3 + a; }

inline Eigen::VectorXd pack_compact(const CompactPhasePoint& c) {
  const int d = c.eta_hat.size();
  const int n = d + 1;
  Eigen::VectorXd v(compact_dim(n));
  v(idx_rho()) = c.base.rho;
  v(idx_x()) = c.base.x;
  for (int a = 0; a < d; ++a) v(idx_w(a)) = c.base.y.w(a);
  v(idx_rho_inf(n)) = c.rho_inf;
  v(idx_hat1(n)) = c.hat1;
  for (int a = 0; a < d; ++a) v(idx_eta_hat(n, a)) = c.eta_hat(a);
  return v;
}

inline CompactPhasePoint unpack_compact(const Eigen::VectorXd& v, const CompactPhasePoint& like) {
  const int d = like.eta_hat.size();
  const int n = d + 1;
  CompactPhasePoint c = like;
  c.base.rho = v(idx_rho());
  c.base.x = v(idx_x());
  for (int a = 0; a < d; ++a) c.base.y.w(a) = v(idx_w(a));
  c.rho_inf = v(idx_rho_inf(n));
  c.hat1 = v(idx_hat1(n));
  for (int a = 0; a < d; ++a) c.eta_hat(a) = v(idx_eta_hat(n, a));
  return c;
}

/// Smooth extension of rho_inf * H across fiber infinity, in the compactified
/// coordinates; plain coordinate velocities. Vanishes exactly on the radial
/// sets of the model symbol.
inline Eigen::VectorXd rescaled_field(const MetricSpec& m, const CompactPhasePoint& c) {
  const int d = c.eta_hat.size();
  const int n = d + 1;
  if (std::abs(c.hat1) > 25.0 || c.eta_hat.norm() > 25.0)
    throw FiberChartError("rescaled_field: hat coordinates outside fiber chart validity");
  const PhasePoint rep = c.representative();
  const HamiltonianField H = hamiltonian_field(m, rep);
  const double s = static_cast<double>(c.sign);

  // Fiber velocities of the representative.
  const double xi_dot = H.xi_comp();
  const double zeta_dot = H.zeta_comp();
  Eigen::VectorXd eta_dot(d);
  for (int a = 0; a < d; ++a) eta_dot(a) = H.eta_comp(a);
  const double large_dot = (c.fiber_chart == FiberChart::ZetaLarge) ? zeta_dot : xi_dot;
  const double small_dot = (c.fiber_chart == FiberChart::ZetaLarge) ? xi_dot : zeta_dot;

  Eigen::VectorXd F(compact_dim(n));
  F(idx_rho()) = c.base.rho * H.rho_comp();
  F(idx_x()) = c.base.x * H.x_comp();
  for (int a = 0; a < d; ++a) F(idx_w(a)) = c.base.x * H.y_comp(a);
  F(idx_rho_inf(n)) = -s * c.rho_inf * large_dot;
  F(idx_hat1(n)) = s * (small_dot - c.hat1 * large_dot);
  for (int a = 0; a < d; ++a) F(idx_eta_hat(n, a)) = s * (eta_dot(a) - c.eta_hat(a) * large_dot);
  return F;
}

/// Classification of a nondegenerate critical point, restricted to the
/// stated coordinate block.
enum class CriticalType { Source, Sink, Saddle, Degenerate };

struct Linearization {
  Eigen::MatrixXd jacobian;              // full, in compactified coordinates
  Eigen::VectorXcd eigenvalues;          // full spectrum, sorted by real part
  CriticalType type = CriticalType::Degenerate;
};

/// FD Jacobian of rescaled_field at a candidate radial point.
inline Eigen::MatrixXd rescaled_field_jacobian(const MetricSpec& m, const CompactPhasePoint& c,
                                               double h = 1e-5) {
  const int dim = compact_dim(static_cast<int>(c.eta_hat.size()) + 1);
  const Eigen::VectorXd v0 = pack_compact(c);
  Eigen::MatrixXd J(dim, dim);
  for (int k = 0; k < dim; ++k) {
    auto eval = [&](double s) {
      Eigen::VectorXd v = v0;
      v(k) = s;
      return rescaled_field(m, unpack_compact(v, c));
    };
    // rho, x, rho_inf stay nonnegative: one-sided there when at the face.
    const bool bounded = (k == idx_rho() || k == idx_x() ||
                          k == idx_rho_inf(static_cast<int>(c.eta_hat.size()) + 1));
    const double floor_v = bounded ? 0.0 : -1e300;
    Eigen::VectorXd col;
    if (v0(k) - 2 * h > floor_v) {
      col = (-eval(v0(k) + 2 * h) + 8 * eval(v0(k) + h) - 8 * eval(v0(k) - h) + eval(v0(k) - 2 * h)) /
            (12 * h);
    } else {
      col = (-25 * eval(v0(k)) + 48 * eval(v0(k) + h) - 36 * eval(v0(k) + 2 * h) +
             16 * eval(v0(k) + 3 * h) - 3 * eval(v0(k) + 4 * h)) /
            (12 * h);
    }
    J.col(k) = col;
  }
  return J;
}

/// Linearize the rescaled field at a candidate radial point; throws
/// NotCritical if the field does not vanish there.
inline Linearization linearize_at_point(const MetricSpec& m, const CompactPhasePoint& c,
                                        double tol = 1e-8) {
  const Eigen::VectorXd F = rescaled_field(m, c);
  if (F.norm() > tol)
    throw NotCritical("linearize_at_point: |rescaled field| = " + std::to_string(F.norm()));
  Linearization lin;
  lin.jacobian = rescaled_field_jacobian(m, c);
  Eigen::EigenSolver<Eigen::MatrixXd> es(lin.jacobian);
  Eigen::VectorXcd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() < b.real();
            });
  lin.eigenvalues = ev;
  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i).real() > 1e-6) ++pos;
    else if (ev(i).real() < -1e-6) ++neg;
    else ++zero;
  }
  if (pos > 0 && neg > 0) lin.type = CriticalType::Saddle;
  else if (pos > 0 && neg == 0 && zero == 0) lin.type = CriticalType::Source;
  else if (neg > 0 && pos == 0 && zero == 0) lin.type = CriticalType::Sink;
  else lin.type = CriticalType::Degenerate;
  return lin;
}

/// Eigenvalues of the Jacobian restricted to a coordinate-index block,
/// sorted by real part. The model linearizations hold modulo the vanishing
/// ideal of the critical manifold, which this projection realizes.
inline Eigen::VectorXcd block_eigenvalues(const Eigen::MatrixXd& jac, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = jac(idx[i], idx[j]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sub);
  Eigen::VectorXcd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() < b.real();
            });
  return ev;
}

}  // namespace eblab
