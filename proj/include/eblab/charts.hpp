#pragma once

#include <cmath>
#include <string>

#include "eblab/errors.hpp"
#include "eblab/sphere.hpp"

namespace eblab {

/// Which end of null infinity the chart is anchored at.
enum class Face { NearI0, NearIplus };

/// A coordinate chart near null infinity. `shift` is the retarded-time offset
/// T; the chart covers t* < T-1 (NearI0) resp. t* > T+1 (NearIplus), r > 1.
struct ChartId {
  Face face = Face::NearI0;
  double shift = 0.0;

  friend bool operator==(const ChartId& a, const ChartId& b) {
    return a.face == b.face && a.shift == b.shift;
  }
};

inline std::string to_string(const ChartId& c) {
  return (c.face == Face::NearI0 ? "NearI0(T=" : "NearIplus(T=") + std::to_string(c.shift) + ")";
}

/// Point of the physical spacetime in polar coordinates.
struct SpacetimePoint {
  double t = 0.0;
  double r = 1.0;  // > 0
  SpherePoint omega;

  double tstar() const { return t - r; }
};

/// Point of the compactified spacetime in a named chart.
/// rho is the defining function of I^0 (NearI0) resp. I^+ (NearIplus);
/// x is the defining function of null infinity. Both lie in [0,1) in-chart.
struct ChartPoint {
  ChartId chart;
  double rho = 0.0;
  double x = 0.0;
  SpherePoint y;

  bool on_scri() const { return x == 0.0; }
  bool interior() const { return rho > 0.0 && x > 0.0; }
};

/// Boundary defining function rho_bar = 1/(t+r) as a sanity quantity; on each
/// chart it is a bounded positive multiple of rho * x^2 * rho_+.
inline double varrho(const SpacetimePoint& p) { return 1.0 / (p.t + p.r); }

/// Chart map. NearI0: rho = 1/(T-t*), x = sqrt((T-t*)/r).
/// NearIplus: rho = 1/(t*-T), x = sqrt((t*-T)/r).
inline ChartPoint to_chart(const SpacetimePoint& p, const ChartId& chart) {
  const double ts = p.tstar();
  const double s = (chart.face == Face::NearI0) ? (chart.shift - ts) : (ts - chart.shift);
  if (p.r <= 1.0) throw DomainError("to_chart: requires r > 1");
  if (s <= 0.0) throw DomainError("to_chart: t* on the wrong side of the chart shift");
  ChartPoint c;
  c.chart = chart;
  c.rho = 1.0 / s;
  c.x = std::sqrt(s / p.r);
  c.y = p.omega;
  if (c.rho >= 1.0) throw DomainError("to_chart: rho >= 1 (outside chart)");
  if (c.x >= 1.0) throw DomainError("to_chart: x >= 1 (outside chart)");
  return c;
}

/// Inverse chart map; boundary points (rho = 0 or x = 0) have no spacetime
/// preimage.
inline SpacetimePoint from_chart(const ChartPoint& c) {
  if (c.rho <= 0.0 || c.x <= 0.0) throw DomainError("from_chart: boundary point has no preimage");
  const double s = 1.0 / c.rho;  // |t* - T|
  const double ts = (c.chart.face == Face::NearI0) ? (c.chart.shift - s) : (c.chart.shift + s);
  SpacetimePoint p;
  p.r = s / (c.x * c.x);
  p.t = ts + p.r;
  p.omega = c.y;
  return p;
}

/// Retarded time of a chart point; finite also on the rho = 0 boundary
/// only in the sense of the local chart (infinite there).
inline double tstar_of(const ChartPoint& c) {
  const double s = 1.0 / c.rho;
  return (c.chart.face == Face::NearI0) ? (c.chart.shift - s) : (c.chart.shift + s);
}

/// Direct chart-to-chart transition. Valid on the overlap and, unlike going
/// through spacetime coordinates, also on the x = 0 boundary.
inline ChartPoint transition(const ChartPoint& c, const ChartId& target) {
  if (c.chart.face == target.face && c.chart.shift == target.shift) return c;
  if (c.rho <= 0.0) throw DomainError("transition: rho = 0 boundary point is chart-bound");
  const double ts = tstar_of(c);
  const double s_old = 1.0 / c.rho;
  const double s_new = (target.face == Face::NearI0) ? (target.shift - ts) : (ts - target.shift);
  if (s_new <= 0.0) throw DomainError("transition: point not in target chart");
  ChartPoint out;
  out.chart = target;
  out.rho = 1.0 / s_new;
  out.x = c.x * std::sqrt(s_new / s_old);
  out.y = c.y;
  if (out.rho >= 1.0 || out.x >= 1.0) throw DomainError("transition: image outside target chart");
  return out;
}

}  // namespace eblab
