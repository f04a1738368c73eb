#pragma once

#include <Eigen/Dense>

#include "eblab/charts.hpp"
#include "eblab/errors.hpp"
#include "eblab/metrics.hpp"

namespace eblab {

/// Vector in the ordered edge-b frame (rho d/drho, x d/dx, x * sphere frame).
struct FrameVector {
  ChartId chart;
  Eigen::VectorXd components;  // size n+1
};

/// Covector in the dual frame (drho/rho, dx/x, sphere coframe / x),
/// i.e. components (zeta, xi, eta_a).
struct FrameCovector {
  ChartId chart;
  Eigen::VectorXd components;
};

/// The edge-b frame expressed in spacetime directions (d/dt*, d/dr, sphere
/// coordinate frame d/dy^a). Row i of the returned matrix holds the spacetime
/// components of frame vector i. Also reports the condition number.
///
/// In either chart (rho = rho0 or rho_+, eps = +1 / -1):
///   rho d/drho = eps * (1/rho) d/dt* - r d/dr
///   x  d/dx    = -2 r d/dr
///   x  d/dy^a  (sphere coordinate frame, stereographic coordinates)
struct FrameInSpacetime {
  Eigen::MatrixXd frame;  // (n+1) x (n+1)
  double condition_number = 0.0;
};

inline FrameInSpacetime eb_frame_in_spacetime(const ChartPoint& c) {
  if (!c.interior()) throw DomainError("eb_frame_in_spacetime: needs an interior chart point");
  const int d = c.y.dim();
  const int n = d + 1;
  const double eps = detail::chart_eps(c.chart);
  const double r = 1.0 / (c.rho * c.x * c.x);
  Eigen::MatrixXd fr = Eigen::MatrixXd::Zero(n + 1, n + 1);
  fr(0, 0) = eps / c.rho;  // d/dt* component of rho d/drho
  fr(0, 1) = -r;
  fr(1, 1) = -2.0 * r;
  for (int a = 0; a < d; ++a) fr(2 + a, 2 + a) = c.x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(fr);
  FrameInSpacetime out;
  out.frame = fr;
  out.condition_number = svd.singularValues()(0) / svd.singularValues()(n);
  return out;
}

/// Express a spacetime vector (components on d/dt*, d/dr, d/dy^a) in the
/// edge-b frame at the given chart point.
inline Eigen::VectorXd spacetime_to_frame(const ChartPoint& c, const Eigen::VectorXd& v) {
  const FrameInSpacetime f = eb_frame_in_spacetime(c);
  return f.frame.transpose().colPivHouseholderQr().solve(v);
}

/// Metric pairing g_eb(v, w) of two frame vectors at a chart point.
inline double g_eb_pair(const MetricSpec& m, const ChartPoint& c, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w) {
  const Eigen::MatrixXd g = metric_eb(m, c);
  return v.dot(g * w);
}

}  // namespace eblab
