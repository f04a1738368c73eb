#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "eblab/errors.hpp"

namespace eblab {

/// Point on the unit (n-1)-sphere in a two-patch stereographic atlas.
/// Patch 0 covers the sphere minus the south pole, patch 1 minus the north
/// pole; the hand-off happens at the equator |w| = 1 where both are valid.
struct SpherePoint {
  int patch = 0;
  Eigen::VectorXd w;  // stereographic coordinates, dimension n-1

  int dim() const { return static_cast<int>(w.size()); }
};

/// Round metric in stereographic coordinates: k_ab = 4 delta_ab / (1+|w|^2)^2.
inline double sphere_conformal_factor(const Eigen::VectorXd& w) {
  return 2.0 / (1.0 + w.squaredNorm());
}

inline Eigen::MatrixXd sphere_metric(const SpherePoint& p) {
  const double c = sphere_conformal_factor(p.w);
  return (c * c) * Eigen::MatrixXd::Identity(p.dim(), p.dim());
}

inline Eigen::MatrixXd sphere_dual_metric(const SpherePoint& p) {
  const double c = sphere_conformal_factor(p.w);
  return (1.0 / (c * c)) * Eigen::MatrixXd::Identity(p.dim(), p.dim());
}

/// |eta|^2 with respect to the dual round metric, eta in coordinate components.
inline double sphere_dual_sq(const SpherePoint& p, const Eigen::VectorXd& eta) {
  const double c = sphere_conformal_factor(p.w);
  return eta.squaredNorm() / (c * c);
}

/// Embed into R^n. Patch 0 projects from the south pole, patch 1 from the north.
inline Eigen::VectorXd sphere_embed(const SpherePoint& p) {
  const int d = p.dim();
  Eigen::VectorXd out(d + 1);
  const double s = p.w.squaredNorm();
  out.head(d) = 2.0 * p.w / (1.0 + s);
  out(d) = (p.patch == 0 ? (1.0 - s) : (s - 1.0)) / (1.0 + s);
  return out;
}

/// Inverse of sphere_embed into the requested patch.
inline SpherePoint sphere_from_unit(const Eigen::VectorXd& omega, int patch = 0) {
  const int d = static_cast<int>(omega.size()) - 1;
  const double last = (patch == 0 ? omega(d) : -omega(d));
  if (last <= -1.0 + 1e-14) throw DomainError("sphere_from_unit: point at the patch's pole");
  SpherePoint p;
  p.patch = patch;
  p.w = omega.head(d) / (1.0 + last);
  return p;
}

/// Jacobian of the patch transition w -> w/|w|^2 evaluated at w.
inline Eigen::MatrixXd sphere_transition_jacobian(const Eigen::VectorXd& w) {
  const double s = w.squaredNorm();
  if (s < 1e-300) throw DomainError("sphere transition at patch origin");
  const int d = static_cast<int>(w.size());
  return Eigen::MatrixXd::Identity(d, d) / s - 2.0 * (w * w.transpose()) / (s * s);
}

/// Move a point to the other patch.
inline SpherePoint sphere_switch_patch(const SpherePoint& p) {
  const double s = p.w.squaredNorm();
  if (s < 1e-300) throw DomainError("sphere_switch_patch: at patch origin");
  SpherePoint q;
  q.patch = 1 - p.patch;
  q.w = p.w / s;
  return q;
}

/// Transform covector components (w.r.t. dw^a) under the patch switch.
/// eta'_b = sum_a eta_a dw^a/dw'^b, evaluated at the image point.
inline Eigen::VectorXd sphere_switch_covector(const SpherePoint& p, const Eigen::VectorXd& eta) {
  const SpherePoint q = sphere_switch_patch(p);
  // The transition map is an involution, so dw/dw' at q.w is its own Jacobian.
  return sphere_transition_jacobian(q.w).transpose() * eta;
}

}  // namespace eblab
