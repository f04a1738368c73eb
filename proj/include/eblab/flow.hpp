#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "eblab/hamiltonian.hpp"
#include "eblab/rk45.hpp"

namespace eblab {

/// State of the closed-form null-bicharacteristic flow over null infinity:
/// the base point is frozen at x = 0 with fixed angles, only (rho, zeta, xi,
/// eta) move.
inline PhasePoint closed_form_flow(const PhasePoint& start, double s) {
  if (start.base.x != 0.0) throw DomainError("closed_form_flow: defined over null infinity only");
  {
    const MetricSpec mink = MetricSpec::minkowski(start.eta.size() + 1);
    const double val = symbol_value(mink, start);
    if (std::abs(val) > 1e-10 * std::max(1.0, start.fiber().squaredNorm()))
      throw DomainError("closed_form_flow: start not on the characteristic set");
  }
  const double rho = start.base.rho, zeta = start.zeta, xi = start.xi;
  const double eps = detail::chart_eps(start.base.chart);
  PhasePoint out = start;

  if (eps > 0) {  // NearI0
    if (zeta == 0.0) {
      const double den = 1.0 + s * xi;
      if (den <= 0.0) throw DomainError("closed_form_flow: s outside maximal interval");
      const double rho_new = rho * den;
      if (rho_new >= 1.0) throw DomainError("closed_form_flow: leaves the chart (rho >= 1)");
      out.base.rho = rho_new;
      out.xi = xi / den;
      out.eta = start.eta / den;
      return out;
    }
    const double den = xi - (xi - 2.0 * zeta) * std::exp(-2.0 * zeta * s);
    if (den <= 0.0) throw DomainError("closed_form_flow: s outside maximal interval");
    const double rho_new = rho * (1.0 + xi / (2.0 * zeta) * (std::exp(2.0 * zeta * s) - 1.0));
    if (rho_new < 0.0 || rho_new >= 1.0)
      throw DomainError("closed_form_flow: leaves the chart (rho out of range)");
    out.base.rho = rho_new;
    out.xi = 2.0 * xi * zeta / den;
    out.eta = 2.0 * zeta * std::exp(-zeta * s) / den * start.eta;
    return out;
  }

  // NearIplus
  if (zeta == 0.0) throw DomainError("closed_form_flow: zeta = 0 is empty over I^+ cap");
  const double den = xi + (2.0 * zeta - xi) * std::exp(2.0 * zeta * s);
  if (den <= 0.0) throw DomainError("closed_form_flow: s outside maximal interval");
  const double rho_new = rho * (1.0 + xi / (2.0 * zeta) * (std::exp(-2.0 * zeta * s) - 1.0));
  if (rho_new < 0.0 || rho_new >= 1.0)
    throw DomainError("closed_form_flow: leaves the chart (rho out of range)");
  out.base.rho = rho_new;
  out.xi = 2.0 * xi * zeta / den;
  out.eta = 2.0 * zeta * std::exp(zeta * s) / den * start.eta;
  return out;
}

/// Covector transition joint with a base chart change; exact also on x = 0.
inline CompactPhasePoint transition_phase(const CompactPhasePoint& c, const ChartId& target) {
  if (c.base.chart == target) return c;
  if (c.base.rho <= 0.0) throw DomainError("transition_phase: rho = 0 is chart-bound");
  const double ts = tstar_of(c.base);
  const double s_old = 1.0 / c.base.rho;
  const double s_new = (target.face == Face::NearI0) ? (target.shift - ts) : (ts - target.shift);
  if (s_new <= 0.0) throw DomainError("transition_phase: point not in target chart");
  const double kappa = std::sqrt(s_new / s_old);

  PhasePoint rep = c.representative();
  PhasePoint moved;
  moved.base.chart = target;
  moved.base.rho = 1.0 / s_new;
  moved.base.x = c.base.x * kappa;
  moved.base.y = c.base.y;
  if (moved.base.rho >= 1.0 || moved.base.x >= 1.0)
    throw DomainError("transition_phase: image outside target chart");
  const double ratio = c.base.rho / moved.base.rho;  // rho_old / rho_new
  const double face_sign = (target.face == c.base.chart.face) ? +1.0 : -1.0;
  moved.xi = rep.xi;
  moved.eta = kappa * rep.eta;
  moved.zeta = rep.xi / 2.0 + face_sign * ratio * (rep.zeta - rep.xi / 2.0);

  CompactPhasePoint out = compactify(moved);
  out.rho_inf *= c.rho_inf;
  return out;
}

/// Reference data of one radial set in a given fiber chart.
struct RadialRef {
  RadialSetId id;
  Face face;
  // expected values; rho/x/rho_inf entries < 0 mean "unconstrained"
  double rho = 0.0, x = 0.0, rho_inf = -1.0;
  double hat1_zeta = 0.0;  // xi_hat in ZetaLarge
  double hat1_xi = 0.0;    // zeta_hat in XiLarge
  bool zeta_chart_ok = true, xi_chart_ok = true;
  int sign_zeta = +1, sign_xi = +1;
  double eta_hat_knorm = 0.0;  // |eta_hat|_k target
};

/// The complete list of radial sets attached to a chart face, for one
/// characteristic component.
inline std::vector<RadialRef> radial_refs(Face face, int component) {
  std::vector<RadialRef> out;
  const int cmp = component;
  if (face == Face::NearI0) {
    RadialRef rin;  // rho0 = x = 0, eta = 0, xi = 2 zeta, +-xi > 0
    rin.id = {RadialSetKind::RinMinus, cmp};
    rin.face = face;
    rin.hat1_zeta = 2.0;
    rin.hat1_xi = 0.5;
    rin.sign_zeta = cmp;
    rin.sign_xi = cmp;
    out.push_back(rin);

    RadialRef rc;  // rho0 = x = 0, zeta = 0, xi = +-sqrt2 |eta|_k, at fiber infinity
    rc.id = {RadialSetKind::Rc, cmp};
    rc.face = face;
    rc.rho_inf = 0.0;
    rc.zeta_chart_ok = false;
    rc.hat1_xi = 0.0;
    rc.sign_xi = cmp;
    rc.eta_hat_knorm = 1.0 / std::sqrt(2.0);
    out.push_back(rc);
  } else {
    RadialRef rin;  // rho+ = x = 0, eta = 0, xi = 2 zeta
    rin.id = {RadialSetKind::RinPlus, cmp};
    rin.face = face;
    rin.hat1_zeta = 2.0;
    rin.hat1_xi = 0.5;
    rin.sign_zeta = cmp;
    rin.sign_xi = cmp;
    out.push_back(rin);
  }
  RadialRef rout;  // x = 0, xi = eta = 0; zeta sign flips between the charts
  rout.id = {RadialSetKind::Rout, cmp};
  rout.face = face;
  rout.rho = -1.0;
  rout.hat1_zeta = 0.0;
  rout.sign_zeta = (face == Face::NearI0) ? -cmp : cmp;
  rout.xi_chart_ok = false;
  out.push_back(rout);
  return out;
}

/// Distance of a compact phase point to a radial set, measured in its own
/// fiber chart; +inf if the set is not visible there.
inline double radial_distance(const CompactPhasePoint& c, const RadialRef& ref) {
  constexpr double kFar = 1e300;
  if (c.base.chart.face != ref.face) return kFar;
  double d2 = 0.0;
  if (ref.rho >= 0.0) d2 += c.base.rho * c.base.rho;
  d2 += c.base.x * c.base.x;
  if (ref.rho_inf >= 0.0) d2 += c.rho_inf * c.rho_inf;
  const double K = 1.0 / std::pow(sphere_conformal_factor(c.base.y.w), 2);
  const double eta_k = std::sqrt(K) * c.eta_hat.norm();
  if (c.fiber_chart == FiberChart::ZetaLarge) {
    if (!ref.zeta_chart_ok || c.sign != ref.sign_zeta) return kFar;
    const double dh = c.hat1 - ref.hat1_zeta;
    d2 += dh * dh + (eta_k - 0.0) * (eta_k - 0.0);  // eta_hat = 0 on Zeta-visible sets
  } else {
    if (!ref.xi_chart_ok || c.sign != ref.sign_xi) return kFar;
    const double dh = c.hat1 - ref.hat1_xi;
    const double de = eta_k - ref.eta_hat_knorm;
    d2 += dh * dh + de * de;
  }
  return std::sqrt(d2);
}

enum class FlowClass { ToRinMinus, ToRc, ToRout, ToRinPlus, ExitsChart, Undetermined };

inline std::string to_string(FlowClass c) {
  switch (c) {
    case FlowClass::ToRinMinus: return "ToRinMinus";
    case FlowClass::ToRc: return "ToRc";
    case FlowClass::ToRout: return "ToRout";
    case FlowClass::ToRinPlus: return "ToRinPlus";
    case FlowClass::ExitsChart: return "ExitsChart";
    case FlowClass::Undetermined: return "Undetermined";
  }
  return "?";
}

struct FlowSample {
  double tau = 0.0;   // rescaled flow parameter
  double s_H = 0.0;   // accumulated Hamiltonian time
  CompactPhasePoint point;
  double field_norm = 0.0;
  double symbol_rep = 0.0;  // rescaled symbol at the unit representative
};

struct FlowResult {
  std::vector<FlowSample> trajectory;
  FlowClass classification = FlowClass::Undetermined;
  double max_symbol_drift = 0.0;
  int chart_switches = 0;
};

struct FlowOptions {
  bool forward = true;
  double rtol = 1e-9;
  double atol = 1e-12;
  double s_max = 200.0;            // rescaled-parameter budget
  double tau_end = 0.0;            // stop exactly at this parameter when > 0
  double radial_dist_tol = 1e-4;
  double radial_speed_tol = 1e-6;
  double base_switch_rho = 0.8;
  double fiber_switch_hi = 3.0;    // ZetaLarge -> XiLarge when |xi_hat| > hi
  double fiber_switch_lo = 2.5;    // XiLarge -> ZetaLarge when |1/zeta_hat| < lo
  int max_steps = 200000;
  bool allow_base_switch = true;
};

/// Numerical flow of the rescaled Hamiltonian field on the compactified
/// phase space, with fiber- and base-chart switching.
inline FlowResult integrate_flow(const MetricSpec& m, const CompactPhasePoint& start,
                                 const FlowOptions& opt = {}) {
  FlowResult res;
  CompactPhasePoint cur = start;
  const int n = m.n;
  const double dir = opt.forward ? 1.0 : -1.0;

  double tau = 0.0, s_H = 0.0;
  const double sym0 = symbol_value(m, cur.representative());

  auto record = [&](void) {
    FlowSample smp;
    smp.tau = tau;
    smp.s_H = s_H;
    smp.point = cur;
    smp.field_norm = rescaled_field(m, cur).norm();
    smp.symbol_rep = symbol_value(m, cur.representative());
    res.max_symbol_drift = std::max(res.max_symbol_drift, std::abs(smp.symbol_rep - sym0));
    res.trajectory.push_back(smp);
  };
  record();

  Rk45Options rko;
  rko.rtol = opt.rtol;
  rko.atol = opt.atol;
  rko.h_max = 0.5;

  // `cur` doubles as the structure template (chart, fiber chart, sign, patch)
  // of the packed state; events below rebuild the packed vector.
  Rk45Stepper stepper(
      [&](const Eigen::VectorXd& v) {
        CompactPhasePoint c = unpack_compact(v.head(compact_dim(n)), cur);
        Eigen::VectorXd rhs(v.size());
        rhs.head(compact_dim(n)) = dir * rescaled_field(m, c);
        rhs(v.size() - 1) = dir * c.rho_inf;  // Hamiltonian time
        return rhs;
      },
      rko);

  for (int step = 0; step < opt.max_steps; ++step) {
    Eigen::VectorXd v(compact_dim(n) + 1);
    v.head(compact_dim(n)) = pack_compact(cur);
    v(compact_dim(n)) = s_H;
    const double h_keep = stepper.h;
    bool clamped = false;
    if (opt.tau_end > 0.0) {
      const double left = opt.tau_end - tau;
      if (left <= 1e-14) break;
      if (left < stepper.h) {
        stepper.h = left;
        clamped = true;
      }
    }
    double taken;
    try {
      taken = stepper.step(v);
    } catch (const StepFailure&) {
      res.classification = FlowClass::Undetermined;
      return res;
    }
    if (clamped) stepper.h = h_keep;
    tau += taken;
    s_H = v(compact_dim(n));
    cur = unpack_compact(v.head(compact_dim(n)), cur);

    // Fiber chart hand-off with hysteresis.
    if (cur.fiber_chart == FiberChart::ZetaLarge && std::abs(cur.hat1) > opt.fiber_switch_hi) {
      cur = to_xi_chart(cur);
    } else if (cur.fiber_chart == FiberChart::XiLarge && cur.hat1 != 0.0 &&
               std::abs(1.0 / cur.hat1) < opt.fiber_switch_lo) {
      cur = to_zeta_chart(cur);
    }

    // Base chart hand-off.
    if (cur.base.rho >= opt.base_switch_rho) {
      bool switched = false;
      if (opt.allow_base_switch && cur.base.rho < 1.0) {
        const double ts = tstar_of(cur.base);
        const Face other = (cur.base.chart.face == Face::NearI0) ? Face::NearIplus : Face::NearI0;
        const double T2 = (other == Face::NearIplus) ? (ts - 1.5) : (ts + 1.5);
        try {
          cur = transition_phase(cur, ChartId{other, T2});
          ++res.chart_switches;
          switched = true;
        } catch (const DomainError&) {
          switched = false;
        }
      }
      if (!switched && cur.base.rho >= 1.0) {
        record();
        res.classification = FlowClass::ExitsChart;
        return res;
      }
    }
    if (cur.base.x >= 1.0) {
      record();
      res.classification = FlowClass::ExitsChart;
      return res;
    }

    record();

    // Radial-set convergence test.
    const double speed = res.trajectory.back().field_norm;
    if (speed < opt.radial_speed_tol) {
      for (int comp : {+1, -1}) {
        for (const RadialRef& ref : radial_refs(cur.base.chart.face, comp)) {
          if (radial_distance(cur, ref) < opt.radial_dist_tol) {
            switch (ref.id.kind) {
              case RadialSetKind::RinMinus: res.classification = FlowClass::ToRinMinus; break;
              case RadialSetKind::Rc: res.classification = FlowClass::ToRc; break;
              case RadialSetKind::Rout: res.classification = FlowClass::ToRout; break;
              case RadialSetKind::RinPlus: res.classification = FlowClass::ToRinPlus; break;
            }
            return res;
          }
        }
      }
    }
    if (opt.tau_end <= 0.0 && tau > opt.s_max) break;
  }
  res.classification = FlowClass::Undetermined;
  return res;
}

/// Post-hoc classification of a stored trajectory by its endpoint.
inline FlowClass classify_asymptotics(const FlowResult& res, double dist_tol = 1e-4,
                                      double speed_tol = 1e-6) {
  if (res.trajectory.empty()) throw DomainError("classify_asymptotics: empty trajectory");
  const FlowSample& last = res.trajectory.back();
  if (last.point.base.rho >= 1.0 || last.point.base.x >= 1.0) return FlowClass::ExitsChart;
  if (last.field_norm < speed_tol) {
    for (int comp : {+1, -1}) {
      for (const RadialRef& ref : radial_refs(last.point.base.chart.face, comp)) {
        if (radial_distance(last.point, ref) < dist_tol) {
          switch (ref.id.kind) {
            case RadialSetKind::RinMinus: return FlowClass::ToRinMinus;
            case RadialSetKind::Rc: return FlowClass::ToRc;
            case RadialSetKind::Rout: return FlowClass::ToRout;
            case RadialSetKind::RinPlus: return FlowClass::ToRinPlus;
          }
        }
      }
    }
  }
  return res.classification == FlowClass::ExitsChart ? FlowClass::ExitsChart
                                                     : FlowClass::Undetermined;
}

struct LocatedRadialPoint {
  CompactPhasePoint point;
  RadialSetId id;
  double field_norm = 0.0;
  double match_distance = 0.0;
};

struct LocateOptions {
  double coarse_tol = 0.2;
  double refine_tol = 1e-12;
  int max_newton = 60;
  std::vector<double> rho_samples{0.0, 0.3, 0.6};
  std::vector<double> rho_inf_samples{0.0, 0.35, 0.7};
  double hat_range = 3.0;
  double hat_step = 0.5;
};

namespace detail {

/// Residual for the radial-point search: the rescaled field augmented with
/// the rescaled symbol, which keeps the refinement on the characteristic set.
inline Eigen::VectorXd radial_residual(const MetricSpec& m, const CompactPhasePoint& c) {
  const Eigen::VectorXd F = rescaled_field(m, c);
  Eigen::VectorXd r(F.size() + 1);
  r.head(F.size()) = F;
  r(F.size()) = symbol_value(m, c.representative());
  return r;
}

inline bool gauss_newton_refine(const MetricSpec& m, CompactPhasePoint& c, double tol,
                                int max_iter) {
  const int n = m.n;
  const int dim = compact_dim(n);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd R = radial_residual(m, c);
    if (R.norm() < tol) return true;
    // FD Jacobian of the augmented residual.
    Eigen::MatrixXd J(dim + 1, dim);
    const Eigen::VectorXd v0 = pack_compact(c);
    const double h = 1e-6;
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd vp = v0, vm = v0;
      vp(k) += h;
      const bool bounded = (k == idx_rho() || k == idx_x() || k == idx_rho_inf(n));
      if (bounded && v0(k) - h < 0.0) {
        J.col(k) = (radial_residual(m, unpack_compact(vp, c)) - R) / h;
      } else {
        vm(k) -= h;
        J.col(k) = (radial_residual(m, unpack_compact(vp, c)) -
                    radial_residual(m, unpack_compact(vm, c))) /
                   (2 * h);
      }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
    cod.setThreshold(1e-7);
    Eigen::VectorXd dv = cod.solve(R);
    Eigen::VectorXd v = pack_compact(c) - dv;
    v(idx_rho()) = std::max(0.0, v(idx_rho()));
    v(idx_x()) = std::max(0.0, v(idx_x()));
    v(idx_rho_inf(n)) = std::max(0.0, v(idx_rho_inf(n)));
    c = unpack_compact(v, c);
  }
  return radial_residual(m, c).norm() < tol;
}

}  // namespace detail

/// Grid scan plus Gauss-Newton refinement of the zeros of the rescaled field
/// over null infinity. Every returned point is matched against the model
/// radial sets; unmatched refined zeros are returned with a negative match
/// distance so callers can flag them.
inline std::vector<LocatedRadialPoint> locate_radial_sets(const MetricSpec& m, const ChartId& chart,
                                                          const SpherePoint& y,
                                                          const LocateOptions& opt = {}) {
  const int d = y.dim();
  std::vector<LocatedRadialPoint> found;

  auto consider = [&](const CompactPhasePoint& seed) {
    CompactPhasePoint c = seed;
    Eigen::VectorXd R;
    try {
      R = detail::radial_residual(m, c);
    } catch (const FiberChartError&) {
      return;
    }
    if (R.norm() > opt.coarse_tol) return;
    if (!detail::gauss_newton_refine(m, c, opt.refine_tol, opt.max_newton)) return;
    // Match against the model radial sets.
    LocatedRadialPoint lp;
    lp.point = c;
    lp.field_norm = rescaled_field(m, c).norm();
    lp.match_distance = -1.0;
    for (int comp : {+1, -1}) {
      for (const RadialRef& ref : radial_refs(chart.face, comp)) {
        const double dist = radial_distance(c, ref);
        if (dist < 1e-6) {
          lp.id = ref.id;
          lp.match_distance = dist;
        }
      }
    }
    // Deduplicate within matched sets.
    for (const auto& prev : found) {
      if (prev.id.kind == lp.id.kind && prev.id.component == lp.id.component &&
          lp.match_distance >= 0.0 && prev.match_distance >= 0.0)
        return;
      if (lp.match_distance < 0.0 && prev.match_distance < 0.0 &&
          (pack_compact(prev.point) - pack_compact(lp.point)).norm() < 1e-6)
        return;
    }
    found.push_back(lp);
  };

  std::vector<double> hats;
  for (double h = -opt.hat_range; h <= opt.hat_range + 1e-12; h += opt.hat_step) hats.push_back(h);
  std::vector<double> etas;
  for (double e = -1.5; e <= 1.5 + 1e-12; e += 0.25) etas.push_back(e);

  auto sweep_eta = [&](CompactPhasePoint templ, auto&& self, int a) -> void {
    if (a == d) {
      consider(templ);
      return;
    }
    for (double e : etas) {
      templ.eta_hat(a) = e;
      self(templ, self, a + 1);
    }
  };

  for (double rho : opt.rho_samples) {
    for (double rinf : opt.rho_inf_samples) {
      for (int sign : {+1, -1}) {
        for (int fc = 0; fc < 2; ++fc) {
          CompactPhasePoint templ;
          templ.base.chart = chart;
          templ.base.rho = rho;
          templ.base.x = 0.0;
          templ.base.y = y;
          templ.fiber_chart = (fc == 0) ? FiberChart::ZetaLarge : FiberChart::XiLarge;
          templ.sign = sign;
          templ.rho_inf = rinf;
          templ.eta_hat = Eigen::VectorXd::Zero(d);
          const double hat_lim = (fc == 0) ? opt.hat_range : 0.45;
          for (double h = -hat_lim; h <= hat_lim + 1e-12;
               h += (fc == 0 ? opt.hat_step : 0.15)) {
            templ.hat1 = h;
            sweep_eta(templ, sweep_eta, 0);
          }
        }
      }
    }
  }
  return found;
}

}  // namespace eblab
