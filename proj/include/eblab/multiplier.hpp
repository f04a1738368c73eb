#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "eblab/frames.hpp"
#include "eblab/metrics.hpp"
#include "eblab/util.hpp"

namespace eblab {

/// Multiplier vector field V = rho^{-2 a0} x^{-4 aI} W with
///   W = -x dx + (2 - c) rho drho        (NearI0 chart)
///   W =  x dx - (2 + c) rho drho        (NearIplus chart)
/// written with the shifted weights a = (alpha + 1-vector) of the energy
/// pairing; c in (0, 2) tilts W off the light cone.
struct MultiplierField {
  double check_alpha0 = 0.0;   // shifted weight at I^0 (NearI0 chart)
  double check_alphaI = 0.0;   // shifted weight at null infinity
  double check_alphaPlus = 0.0;  // shifted weight at I^+ (NearIplus chart)
  double c = 0.1;
  ChartId chart;

  /// Frame components of W (order rho drho, x dx, sphere).
  Eigen::VectorXd w_frame(int n) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
    if (chart.face == Face::NearI0) {
      v(0) = 2.0 - c;
      v(1) = -1.0;
    } else {
      v(0) = -(2.0 + c);
      v(1) = 1.0;
    }
    return v;
  }

  /// Scalar weight of V at a chart point (the inactive rho is 1).
  double weight(const ChartPoint& p) const {
    const double a_rho = (chart.face == Face::NearI0) ? check_alpha0 : check_alphaPlus;
    return std::pow(p.rho, -2.0 * a_rho) * std::pow(p.x, -4.0 * check_alphaI);
  }
};

enum class CausalCharacter { FutureTimelike, Null, Spacelike, PastTimelike };

inline std::string to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::FutureTimelike: return "FutureTimelike";
    case CausalCharacter::Null: return "Null";
    case CausalCharacter::Spacelike: return "Spacelike";
    case CausalCharacter::PastTimelike: return "PastTimelike";
  }
  return "?";
}

/// Causal character of a frame vector for the rescaled metric, with the time
/// orientation fixed by the declared future-causal generators of the chart.
inline CausalCharacter causal_character(const MetricSpec& m, const Eigen::VectorXd& v,
                                        const ChartPoint& p, double tol = 1e-12) {
  const Eigen::MatrixXd g = metric_eb(m, p);
  const double q = v.dot(g * v);
  const int n = m.n;
  // Future-null generator of the chart: rho drho - x dx / 2 (NearI0),
  // -rho drho + x dx / 2 (NearIplus).
  Eigen::VectorXd gen = Eigen::VectorXd::Zero(n + 1);
  if (p.chart.face == Face::NearI0) {
    gen(0) = 1.0;
    gen(1) = -0.5;
  } else {
    gen(0) = -1.0;
    gen(1) = 0.5;
  }
  const double pair = v.dot(g * gen);
  if (std::abs(q) <= tol * v.squaredNorm()) return CausalCharacter::Null;
  if (q > 0.0) return CausalCharacter::Spacelike;
  return (pair < 0.0) ? CausalCharacter::FutureTimelike : CausalCharacter::PastTimelike;
}

/// Symmetric contravariant 2-tensor at a point, stored weight-stripped in the
/// edge-b frame (order rho drho, x dx, x sphere-frame), together with the
/// stripped weight exponents.
struct DeformationTensor {
  Eigen::MatrixXd mat;         // (n+1) x (n+1), symmetric
  double weight_exp_rho = 0;   // exponent of rho in the stripped prefactor
  double weight_exp_x = 0;     // exponent of x
};

/// Closed-form multiplier deformation tensor at null infinity for the frozen
/// model operator: the energy-pairing tensor of V with the p1 term included,
/// restricted to an eigenvalue 2*lambda of p1 + p1^*.
inline DeformationTensor deformation_tensor_model(int n, const Eigen::MatrixXd& k_dual,
                                                  const MultiplierField& mult, double lambda) {
  const double c = mult.c;
  const double aI = mult.check_alphaI;
  DeformationTensor out;
  out.mat = Eigen::MatrixXd::Zero(n + 1, n + 1);
  if (mult.chart.face == Face::NearI0) {
    const double a0 = mult.check_alpha0;
    const double A = (2.0 - c) * (-4.0 * aI + 4.0 * lambda);
    const double B = 4.0 * aI - 4.0 * lambda + 0.5 * c * (-n + 1.0 - 4.0 * aI + 2.0 * lambda);
    const double C = -2.0 * aI + 2.0 * lambda + 0.5 * c * (n - 1.0 + 2.0 * a0);
    const double D = 2.0 - 4.0 * aI + 4.0 * a0 + c * (-n + 1.0 - 2.0 * a0);
    out.mat(0, 0) = A;
    out.mat(0, 1) = out.mat(1, 0) = B;
    out.mat(1, 1) = C;
    out.mat.block(2, 2, n - 1, n - 1) = D * k_dual;
    out.weight_exp_rho = -2.0 * (a0 - 1.0);
    out.weight_exp_x = -4.0 * (aI - 0.5);
  } else {
    const double ap = mult.check_alphaPlus;
    const double A = (2.0 + c) * (-4.0 * aI + 4.0 * lambda);
    const double B = 4.0 * aI - 4.0 * lambda + 0.5 * c * (n - 1.0 + 4.0 * aI - 2.0 * lambda);
    const double C = -2.0 * aI + 2.0 * lambda + 0.5 * c * (-n + 1.0 - 2.0 * ap);
    const double D = -2.0 + 4.0 * aI - 4.0 * ap + c * (-n + 1.0 - 2.0 * ap);
    out.mat(0, 0) = A;
    out.mat(0, 1) = out.mat(1, 0) = B;
    out.mat(1, 1) = C;
    out.mat.block(2, 2, n - 1, n - 1) = D * k_dual;
    out.weight_exp_rho = -2.0 * (ap - 1.0);
    out.weight_exp_x = -4.0 * (aI - 0.5);
  }
  return out;
}

namespace detail {

/// Contravariant dual metric in chart coordinates (rho, x, w) from its
/// edge-b frame representation: g^-1 = w_g S G_frame S with S = diag(rho,x,..x).
inline Eigen::MatrixXd dual_metric_coord(const Eigen::MatrixXd& G_frame, const ChartPoint& p) {
  const int dim = static_cast<int>(G_frame.rows());
  Eigen::VectorXd s(dim);
  s(0) = p.rho;
  s(1) = p.x;
  for (int a = 2; a < dim; ++a) s(a) = p.x;
  const double wg = p.rho * p.rho * p.x * p.x;  // inactive rho frozen to 1
  return wg * (s.asDiagonal() * G_frame * s.asDiagonal());
}

}  // namespace detail

/// Deformation tensor by a 4th-order finite-difference Lie derivative of the
/// dual metric along the multiplier flow, plus trace modification and the
/// subprincipal p1 coupling. `dual_frame` supplies the dual metric in the
/// edge-b frame at arbitrary chart points (full metric or frozen model).
inline DeformationTensor deformation_tensor_fd(
    const std::function<Eigen::MatrixXd(const ChartPoint&)>& dual_frame, const ChartPoint& p,
    const MultiplierField& mult, double p1, double h_rel = 1e-4) {
  if (p.rho <= 0.0 || p.x <= 0.0)
    throw StepError("deformation_tensor_fd: needs an interior point");
  const int d = p.y.dim();
  const int n = d + 1;
  const int dim = n + 1;

  // Multiplier components in chart coordinates.
  auto v_coord = [&](const ChartPoint& q) {
    Eigen::VectorXd W = mult.w_frame(n);
    Eigen::VectorXd v(dim);
    v(0) = W(0) * q.rho;
    v(1) = W(1) * q.x;
    for (int a = 2; a < dim; ++a) v(a) = 0.0;
    return (mult.weight(q) * v).eval();
  };
  auto ginv_coord = [&](const ChartPoint& q) { return detail::dual_metric_coord(dual_frame(q), q); };

  auto at_shift = [&](int k, double s) {
    ChartPoint q = p;
    if (k == 0) q.rho += s;
    else if (k == 1) q.x += s;
    else q.y.w(k - 2) += s;
    return q;
  };
  auto coord_of = [&](int k) { return k == 0 ? p.rho : (k == 1 ? p.x : p.y.w(k - 2)); };

  // 4th-order partial derivatives of g^-1 and V in coordinates.
  std::vector<Eigen::MatrixXd> dG(dim);
  std::vector<Eigen::VectorXd> dV(dim);
  for (int k = 0; k < dim; ++k) {
    const double h = h_rel * (1.0 + std::abs(coord_of(k)));
    const double hh = std::min(h, (k <= 1 ? 0.45 * coord_of(k) : h));
    dG[k] = (-ginv_coord(at_shift(k, 2 * hh)) + 8 * ginv_coord(at_shift(k, hh)) -
             8 * ginv_coord(at_shift(k, -hh)) + ginv_coord(at_shift(k, -2 * hh))) /
            (12 * hh);
    dV[k] = (-v_coord(at_shift(k, 2 * hh)) + 8 * v_coord(at_shift(k, hh)) -
             8 * v_coord(at_shift(k, -hh)) + v_coord(at_shift(k, -2 * hh))) /
            (12 * hh);
  }

  const Eigen::MatrixXd A = ginv_coord(p);
  const Eigen::VectorXd V = v_coord(p);
  // (L_V A)^{mn} = V^l d_l A^{mn} - A^{ln} d_l V^m - A^{ml} d_l V^n
  Eigen::MatrixXd lie = Eigen::MatrixXd::Zero(dim, dim);
  for (int l = 0; l < dim; ++l) lie += V(l) * dG[l];
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = 0; nu < dim; ++nu)
      for (int l = 0; l < dim; ++l) lie(mu, nu) -= A(l, nu) * dV[l](mu) + A(mu, l) * dV[l](nu);

  const Eigen::MatrixXd pi = -lie;                      // deformation of the dual metric
  const Eigen::MatrixXd g_cov = A.inverse();            // covariant metric in coordinates
  const double tr = (g_cov.transpose().cwiseProduct(pi)).sum();
  Eigen::MatrixXd K = pi - 0.5 * tr * A;

  // Subprincipal coupling 2 sigma(P1) (x)_s sigma(Z); the model operator has
  // sigma(P1) = -eps * p1 * w_g * (x dx - 2 rho drho), eps the chart sign.
  {
    const double wg = p.rho * p.rho * p.x * p.x;
    const double eps = detail::chart_eps(p.chart);
    Eigen::VectorXd sp1 = Eigen::VectorXd::Zero(dim);
    sp1(0) = -eps * p1 * wg * (-2.0 * p.rho);
    sp1(1) = -eps * p1 * wg * p.x;
    K += sp1 * V.transpose() + V * sp1.transpose();
  }

  // Back to weight-stripped frame components: the full tensor carries the
  // prefactor rho^exp_rho x^exp_x relative to the frame basis.
  Eigen::VectorXd s(dim);
  s(0) = 1.0 / p.rho;
  s(1) = 1.0 / p.x;
  for (int a = 2; a < dim; ++a) s(a) = 1.0 / p.x;
  DeformationTensor out;
  const double a_rho =
      (mult.chart.face == Face::NearI0) ? mult.check_alpha0 : mult.check_alphaPlus;
  out.weight_exp_rho = -2.0 * (a_rho - 1.0);
  out.weight_exp_x = -4.0 * (mult.check_alphaI - 0.5);
  const double strip = std::pow(p.rho, -out.weight_exp_rho) * std::pow(p.x, -out.weight_exp_x);
  out.mat = strip * (s.asDiagonal() * K * s.asDiagonal());
  out.mat = 0.5 * (out.mat + out.mat.transpose()).eval();  // enforce exact symmetry
  return out;
}

/// Deformation tensor of a metric spec: the closed-form normal-operator value
/// on null infinity, the finite-difference route at interior points.
inline DeformationTensor deformation_tensor(const MetricSpec& m, const MultiplierField& mult,
                                            const ChartPoint& p, double p1) {
  if (p.x == 0.0) {
    return deformation_tensor_model(m.n, sphere_dual_metric(p.y), mult, p1);
  }
  return deformation_tensor_fd([&m](const ChartPoint& q) { return dual_metric_eb(m, q); }, p, mult,
                               p1);
}

/// Trace and determinant of the (rho drho, x dx) minor.
struct MinorTraceDet {
  double trace = 0.0;
  double det = 0.0;
};

inline MinorTraceDet minor_trace_det(const DeformationTensor& K) {
  MinorTraceDet out;
  out.trace = K.mat(0, 0) + K.mat(1, 1);
  out.det = K.mat(0, 0) * K.mat(1, 1) - K.mat(0, 1) * K.mat(0, 1);
  return out;
}

/// Richardson-extrapolated leading coefficients of the minor data in c:
/// trace -> c = 0 limit, determinant -> slope at c = 0, evaluated from two
/// c values (c and c/2).
struct MinorCoefficients {
  double trace_limit = 0.0;
  double det_slope = 0.0;
};

inline MinorCoefficients minor_coefficients_model(int n, const Eigen::MatrixXd& k_dual,
                                                  MultiplierField mult, double lambda, double c) {
  MinorCoefficients out;
  mult.c = c;
  const MinorTraceDet full = minor_trace_det(deformation_tensor_model(n, k_dual, mult, lambda));
  mult.c = c / 2.0;
  const MinorTraceDet half = minor_trace_det(deformation_tensor_model(n, k_dual, mult, lambda));
  out.trace_limit = 2.0 * half.trace - full.trace;
  out.det_slope = (4.0 * half.det - full.det) / c;
  return out;
}

/// Per-weight-pair result of the multiplier positivity scan at null infinity.
struct PositivityResult {
  double alpha0 = 0.0;
  double alphaI = 0.0;
  bool positive = false;     // some c in the grid gives a positive definite tensor
  double best_c = 0.0;
  double best_min_eig = -1e300;
};

/// Scan c over a geometric grid and report whether the weight-stripped
/// multiplier tensor at null infinity (NearI0 side) is positive definite for
/// some c. Unshifted weights (alpha0, alphaI) on input.
inline PositivityResult positivity_scan(int n, double alpha0, double alphaI, double p1,
                                        int c_points = 60, double c_min = 1e-4,
                                        double c_max = 1.0) {
  PositivityResult res;
  res.alpha0 = alpha0;
  res.alphaI = alphaI;
  const Eigen::MatrixXd k_dual = Eigen::MatrixXd::Identity(n - 1, n - 1);
  MultiplierField mult;
  mult.chart = ChartId{Face::NearI0, 0.0};
  mult.check_alpha0 = alpha0 + 1.0;
  mult.check_alphaI = alphaI + 0.5;
  for (int i = 0; i < c_points; ++i) {
    mult.c = c_min * std::pow(c_max / c_min, static_cast<double>(i) / (c_points - 1));
    const DeformationTensor K = deformation_tensor_model(n, k_dual, mult, p1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.mat);
    const double mineig = es.eigenvalues().minCoeff();
    if (mineig > res.best_min_eig) {
      res.best_min_eig = mineig;
      res.best_c = mult.c;
    }
  }
  res.positive = res.best_min_eig > 0.0;
  return res;
}

/// Bisect the positivity boundary in alphaI at fixed alpha0.
inline double positivity_boundary_alphaI(int n, double alpha0, double p1, double lo, double hi,
                                         double tol = 1e-3) {
  auto pos = [&](double aI) { return positivity_scan(n, alpha0, aI, p1).positive; };
  if (!pos(lo) || pos(hi)) throw DomainError("positivity_boundary_alphaI: bracket does not straddle");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pos(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Adjoint-side scan on the future cap: the energy tensor of the backward
/// problem, built from the adjoint data (p1 -> -p1 on an eigenvalue),
/// must be negative definite for some c. Unshifted tilde weights on input.
inline PositivityResult negativity_scan_adjoint(int n, double alphaI_t, double alphaPlus_t,
                                                double p1, int c_points = 60, double c_min = 1e-4,
                                                double c_max = 1.0) {
  PositivityResult res;
  res.alpha0 = alphaPlus_t;
  res.alphaI = alphaI_t;
  const Eigen::MatrixXd k_dual = Eigen::MatrixXd::Identity(n - 1, n - 1);
  MultiplierField mult;
  mult.chart = ChartId{Face::NearIplus, 0.0};
  mult.check_alphaI = alphaI_t + 0.5;
  mult.check_alphaPlus = alphaPlus_t + 1.0;
  double best_max_eig = 1e300;
  for (int i = 0; i < c_points; ++i) {
    mult.c = c_min * std::pow(c_max / c_min, static_cast<double>(i) / (c_points - 1));
    const DeformationTensor K = deformation_tensor_model(n, k_dual, mult, -p1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.mat);
    const double maxeig = es.eigenvalues().maxCoeff();
    if (maxeig < best_max_eig) {
      best_max_eig = maxeig;
      res.best_c = mult.c;
    }
  }
  res.best_min_eig = -best_max_eig;
  res.positive = best_max_eig < 0.0;  // "positive" records success of the scan
  return res;
}

}  // namespace eblab
