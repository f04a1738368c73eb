#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "eblab/charts.hpp"
#include "eblab/errors.hpp"
#include "eblab/metrics.hpp"

namespace eblab {

/// Point of the edge-b phase space away from the zero section. Fiber
/// components refer to the covector zeta drho/rho + xi dx/x + eta_a dy^a/x.
struct PhasePoint {
  ChartPoint base;
  double xi = 0.0;
  Eigen::VectorXd eta;
  double zeta = 0.0;

  Eigen::VectorXd fiber() const {
    Eigen::VectorXd f(2 + eta.size());
    f(0) = zeta;
    f(1) = xi;
    f.tail(eta.size()) = eta;
    return f;
  }
};

/// Fiber-compactification charts: ZetaLarge uses rho_inf = |zeta|^-1 with
/// hats (xi/zeta, eta/zeta); XiLarge uses rho_inf = |xi|^-1 with
/// (zeta/xi, eta/xi). `sign` records the sign of the large fiber variable.
enum class FiberChart { ZetaLarge, XiLarge };

struct CompactPhasePoint {
  ChartPoint base;
  FiberChart fiber_chart = FiberChart::ZetaLarge;
  int sign = +1;
  double rho_inf = 1.0;        // 0 exactly at fiber infinity
  double hat1 = 0.0;           // xi_hat (ZetaLarge) or zeta_hat (XiLarge)
  Eigen::VectorXd eta_hat;

  /// Representative with the large fiber variable set to sign (unit scale).
  PhasePoint representative() const {
    PhasePoint p;
    p.base = base;
    const double s = static_cast<double>(sign);
    if (fiber_chart == FiberChart::ZetaLarge) {
      p.zeta = s;
      p.xi = s * hat1;
    } else {
      p.xi = s;
      p.zeta = s * hat1;
    }
    p.eta = s * eta_hat;
    return p;
  }
};

/// True (uncompactified) phase point; requires rho_inf > 0.
inline PhasePoint uncompactify(const CompactPhasePoint& c) {
  if (c.rho_inf <= 0.0) throw FiberChartError("uncompactify: point at fiber infinity");
  PhasePoint p = c.representative();
  p.xi /= c.rho_inf;
  p.zeta /= c.rho_inf;
  p.eta /= c.rho_inf;
  return p;
}

/// Compactify, choosing the fiber chart by the hand-off rule |xi/zeta| <= 3.
inline CompactPhasePoint compactify(const PhasePoint& p) {
  CompactPhasePoint c;
  c.base = p.base;
  const bool zeta_chart = std::abs(p.xi) <= 3.0 * std::abs(p.zeta);
  if (zeta_chart) {
    if (p.zeta == 0.0) throw FiberChartError("compactify: zero fiber covector");
    c.fiber_chart = FiberChart::ZetaLarge;
    c.sign = (p.zeta > 0) ? +1 : -1;
    c.rho_inf = 1.0 / std::abs(p.zeta);
    c.hat1 = p.xi / p.zeta;
    c.eta_hat = p.eta / p.zeta;
  } else {
    c.fiber_chart = FiberChart::XiLarge;
    c.sign = (p.xi > 0) ? +1 : -1;
    c.rho_inf = 1.0 / std::abs(p.xi);
    c.hat1 = p.zeta / p.xi;
    c.eta_hat = p.eta / p.xi;
  }
  return c;
}

/// Exact fiber-chart changes on the compactified fiber.
inline CompactPhasePoint to_xi_chart(const CompactPhasePoint& c) {
  if (c.fiber_chart == FiberChart::XiLarge) return c;
  if (c.hat1 == 0.0) throw FiberChartError("to_xi_chart: xi_hat = 0");
  CompactPhasePoint o = c;
  o.fiber_chart = FiberChart::XiLarge;
  o.sign = (c.hat1 > 0) ? c.sign : -c.sign;
  o.rho_inf = c.rho_inf / std::abs(c.hat1);
  o.hat1 = 1.0 / c.hat1;
  o.eta_hat = c.eta_hat / c.hat1;
  return o;
}

inline CompactPhasePoint to_zeta_chart(const CompactPhasePoint& c) {
  if (c.fiber_chart == FiberChart::ZetaLarge) return c;
  if (c.hat1 == 0.0) throw FiberChartError("to_zeta_chart: zeta_hat = 0");
  CompactPhasePoint o = c;
  o.fiber_chart = FiberChart::ZetaLarge;
  o.sign = (c.hat1 > 0) ? c.sign : -c.sign;
  o.rho_inf = c.rho_inf / std::abs(c.hat1);
  o.hat1 = 1.0 / c.hat1;
  o.eta_hat = c.eta_hat / c.hat1;
  return o;
}

/// The four radial sets near null infinity, per characteristic component.
enum class RadialSetKind { RinMinus, Rc, Rout, RinPlus };

struct RadialSetId {
  RadialSetKind kind = RadialSetKind::Rout;
  int component = +1;  // +1 for Sigma^+, -1 for Sigma^-
};

inline std::string to_string(const RadialSetId& id) {
  std::string s;
  switch (id.kind) {
    case RadialSetKind::RinMinus: s = "R_in-"; break;
    case RadialSetKind::Rc: s = "R_c"; break;
    case RadialSetKind::Rout: s = "R_out"; break;
    case RadialSetKind::RinPlus: s = "R_in+"; break;
  }
  return s + (id.component > 0 ? "^+" : "^-");
}

}  // namespace eblab
