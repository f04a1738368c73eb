#include "test_common.hpp"

#include "eblab/flow.hpp"

using namespace eblab;
using testutil::make_point;

namespace {

PhasePoint scri_phase(Face face, double rho, double zeta, double xi, double e0, double e1) {
  PhasePoint p;
  p.base = make_point(face, 0.0, rho, 0.0);
  p.zeta = zeta;
  p.xi = xi;
  p.eta = Eigen::VectorXd(2);
  p.eta << e0, e1;
  return p;
}

/// Random characteristic start over null infinity in the Sigma^+ component.
PhasePoint random_char_start(std::mt19937_64& rng, Face face) {
  const double rho = uniform(rng, 0.05, 0.5);
  if (face == Face::NearI0) {
    // Pick zeta and |eta|_k, solve -xi(xi-2zeta)/2 + |eta|_k^2 = 0 with xi - zeta > 0.
    const double zeta = uniform(rng, -1.0, 1.0);
    const double ek = uniform(rng, 0.05, 1.0);
    const double xi = zeta + std::sqrt(zeta * zeta + 2.0 * ek * ek);
    const double phi = uniform(rng, 0.0, 2 * kPi);
    // w = 0: |eta| = 2 |eta|_k
    return scri_phase(face, rho, zeta, xi, 2.0 * ek * std::cos(phi), 2.0 * ek * std::sin(phi));
  }
  // NearIplus Sigma^+: zeta > 0, xi in (0, 2 zeta), |eta|_k^2 = xi(2zeta - xi)/2.
  const double zeta = uniform(rng, 0.3, 1.5);
  const double xi = uniform(rng, 0.15, 1.85) * zeta;
  const double ek = std::sqrt(0.5 * xi * (2.0 * zeta - xi));
  const double phi = uniform(rng, 0.0, 2 * kPi);
  return scri_phase(face, rho, zeta, xi, 2.0 * ek * std::cos(phi), 2.0 * ek * std::sin(phi));
}

}  // namespace

TEST_CASE("closed-form flow: quoted values") {
  // NearI0, zeta != 0 branch stays on the in-going manifold.
  PhasePoint p = scri_phase(Face::NearI0, 0.1, 1.0, 2.0, 0, 0);
  PhasePoint q = closed_form_flow(p, std::log(2.0) / 2.0);
  CHECK(q.base.rho == Approx(0.2).epsilon(1e-13));
  CHECK(q.zeta == Approx(1.0).epsilon(1e-13));
  CHECK(q.xi == Approx(2.0).epsilon(1e-13));
  CHECK(q.eta.norm() == Approx(0.0).margin(1e-15));

  // NearI0, zeta = 0 branch: (0.1, 0, sqrt2, |eta|_k = 1), s = 1/sqrt2.
  PhasePoint p2 = scri_phase(Face::NearI0, 0.1, 0.0, std::sqrt(2.0), 2.0, 0.0);
  PhasePoint q2 = closed_form_flow(p2, 1.0 / std::sqrt(2.0));
  CHECK(q2.base.rho == Approx(0.2).epsilon(1e-13));
  CHECK(q2.xi == Approx(std::sqrt(2.0) / 2.0).epsilon(1e-13));
  // |eta|_k halves: coordinate eta goes from 2 to 1.
  CHECK(q2.eta(0) == Approx(1.0).epsilon(1e-13));

  // Domain error at the lower endpoint of the zeta = 0 branch.
  CHECK_THROWS_AS(closed_form_flow(p2, -1.0 / std::sqrt(2.0)), DomainError);
  // Off-characteristic starts are rejected.
  CHECK_THROWS_AS(closed_form_flow(scri_phase(Face::NearI0, 0.1, 1.0, 1.0, 0, 0), 0.1),
                  DomainError);
}

TEST_CASE("closed-form flow: group law") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 300; ++k) {
    const Face face = (rng() & 1) ? Face::NearIplus : Face::NearI0;
    const PhasePoint p = random_char_start(rng, face);
    const double s1 = uniform(rng, -0.2, 0.4);
    const double s2 = uniform(rng, -0.2, 0.4);
    PhasePoint a, b;
    try {
      a = closed_form_flow(p, s1 + s2);
      b = closed_form_flow(closed_form_flow(p, s1), s2);
    } catch (const DomainError&) {
      continue;  // admissible (s1, s2) only
    }
    CHECK(a.base.rho == Approx(b.base.rho).epsilon(1e-12).margin(1e-14));
    CHECK(a.xi == Approx(b.xi).epsilon(1e-12).margin(1e-14));
    CHECK(a.zeta == Approx(b.zeta).epsilon(1e-12).margin(1e-14));
    CHECK((a.eta - b.eta).norm() < 1e-12 * (1.0 + a.eta.norm()));
  }
}

TEST_CASE("integrator matches the closed-form flow") {
  std::mt19937_64 rng(43);
  const MetricSpec m = MetricSpec::minkowski(3);
  double worst = 0.0;
  int tested = 0;
  FlowOptions opt;
  opt.s_max = 3.0;  // short arcs, stay inside one chart
  opt.allow_base_switch = false;
  while (tested < 200) {
    const Face face = (rng() & 1) ? Face::NearIplus : Face::NearI0;
    const PhasePoint p = random_char_start(rng, face);
    FlowResult res = integrate_flow(m, compactify(p), opt);
    bool compared = false;
    for (const FlowSample& smp : res.trajectory) {
      if (smp.point.base.rho >= 0.75) break;
      PhasePoint expect;
      try {
        expect = closed_form_flow(p, smp.s_H);
      } catch (const DomainError&) {
        break;
      }
      PhasePoint got;
      try {
        got = uncompactify(smp.point);
      } catch (const FiberChartError&) {
        break;
      }
      // Compare scale-invariantly: normalize both to |zeta| = 1 scale via ratios.
      const double scale = std::abs(expect.xi) + std::abs(expect.zeta) + expect.eta.norm() + 1.0;
      worst = std::max(worst, std::abs(got.base.rho - expect.base.rho) / (expect.base.rho + 1e-3));
      worst = std::max(worst, std::abs(got.xi - expect.xi) / scale);
      worst = std::max(worst, std::abs(got.zeta - expect.zeta) / scale);
      worst = std::max(worst, (got.eta - expect.eta).norm() / scale);
      compared = true;
    }
    if (compared) ++tested;
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("symbol is conserved along integrated trajectories") {
  std::mt19937_64 rng(47);
  const MetricSpec m = MetricSpec::minkowski(3);
  for (int k = 0; k < 20; ++k) {
    const Face face = (rng() & 1) ? Face::NearIplus : Face::NearI0;
    const PhasePoint p = random_char_start(rng, face);
    const FlowResult res = integrate_flow(m, compactify(p));
    CHECK(res.max_symbol_drift < 1e-6);
    // Membership in Sigma^+ is preserved: the component discriminant keeps its sign.
    for (const FlowSample& smp : res.trajectory) {
      PhasePoint pt;
      try {
        pt = uncompactify(smp.point);
      } catch (const FiberChartError&) {
        continue;
      }
      const double disc = (pt.base.chart.face == Face::NearI0) ? (pt.xi - pt.zeta) : pt.zeta;
      CHECK(disc > 0.0);
    }
  }
}

TEST_CASE("trajectories on the in-going manifold stay on it") {
  const MetricSpec m = MetricSpec::minkowski(3);
  // xi = 2 zeta, eta = 0, x = 0 on NearI0.
  const PhasePoint p = scri_phase(Face::NearI0, 0.02, 0.7, 1.4, 0, 0);
  FlowOptions opt;
  opt.s_max = 60.0;
  const FlowResult res = integrate_flow(m, compactify(p), opt);
  REQUIRE(res.trajectory.size() > 3);
  for (const FlowSample& smp : res.trajectory) {
    if (smp.point.fiber_chart != FiberChart::ZetaLarge) continue;
    CHECK(std::abs(smp.point.hat1 - 2.0) < 1e-9);
    CHECK(smp.point.eta_hat.norm() < 1e-9);
    CHECK(smp.point.base.x == 0.0);
  }
  // Forward along the in-going manifold: crosses to NearIplus, lands on R_in,+.
  CHECK(res.chart_switches >= 1);
  CHECK(res.classification == FlowClass::ToRinPlus);
}

TEST_CASE("time reversal returns to the start") {
  std::mt19937_64 rng(53);
  const MetricSpec m = MetricSpec::minkowski(3);
  for (int k = 0; k < 10; ++k) {
    const PhasePoint p = random_char_start(rng, Face::NearIplus);
    FlowOptions fwd;
    fwd.s_max = 2.0;
    fwd.allow_base_switch = false;
    const FlowResult res = integrate_flow(m, compactify(p), fwd);
    const CompactPhasePoint end = res.trajectory.back().point;
    FlowOptions bwd = fwd;
    bwd.forward = false;
    bwd.tau_end = res.trajectory.back().tau;
    FlowResult back = integrate_flow(m, end, bwd);
    const CompactPhasePoint ret = back.trajectory.back().point;
    const PhasePoint got = uncompactify(ret);
    CHECK(std::abs(got.base.rho - p.base.rho) < 1e-5);
    CHECK(std::abs(got.xi - p.xi) < 1e-5 * (1 + std::abs(p.xi)));
    CHECK(std::abs(got.zeta - p.zeta) < 1e-5 * (1 + std::abs(p.zeta)));
  }
}

TEST_CASE("forward classification over the I+ cap") {
  std::mt19937_64 rng(59);
  const MetricSpec m = MetricSpec::minkowski(3);
  int to_rout = 0, to_rinp = 0;
  for (int k = 0; k < 30; ++k) {
    const PhasePoint p = random_char_start(rng, Face::NearIplus);
    const FlowResult res = integrate_flow(m, compactify(p));
    const FlowClass cls = classify_asymptotics(res);
    if (cls == FlowClass::ToRout) ++to_rout;
    if (cls == FlowClass::ToRinPlus) ++to_rinp;
    CHECK((cls == FlowClass::ToRout || cls == FlowClass::ToRinPlus));
    // Backward, generic starts reach the corner saddle R_c.
    FlowOptions bwd;
    bwd.forward = false;
    const FlowResult back = integrate_flow(m, compactify(p), bwd);
    CHECK(classify_asymptotics(back) == FlowClass::ToRc);
  }
  CHECK(to_rout > 0);  // generic starts flow into the outgoing set
}

TEST_CASE("exiting trajectories are classified as such") {
  const MetricSpec m = MetricSpec::minkowski(3);
  const PhasePoint p = scri_phase(Face::NearI0, 0.5, 0.7, 1.4, 0, 0);
  FlowOptions opt;
  opt.allow_base_switch = false;
  const FlowResult res = integrate_flow(m, compactify(p), opt);
  CHECK(res.classification == FlowClass::ExitsChart);
  CHECK(classify_asymptotics(res) == FlowClass::ExitsChart);
}

TEST_CASE("classification is stable under halved tolerances") {
  std::mt19937_64 rng(61);
  const MetricSpec m = MetricSpec::minkowski(3);
  for (int k = 0; k < 8; ++k) {
    const PhasePoint p = random_char_start(rng, Face::NearIplus);
    FlowOptions a;
    const FlowResult r1 = integrate_flow(m, compactify(p), a);
    FlowOptions b;
    b.rtol = a.rtol / 2.0;
    b.atol = a.atol / 2.0;
    const FlowResult r2 = integrate_flow(m, compactify(p), b);
    CHECK(r1.classification == r2.classification);
  }
}

TEST_CASE("locate_radial_sets finds the model list") {
  const MetricSpec m = MetricSpec::minkowski(3);
  const SpherePoint y{0, Eigen::VectorXd::Zero(2)};

  const auto near_i0 = locate_radial_sets(m, ChartId{Face::NearI0, 0.0}, y);
  bool rin_minus = false, rc = false, rout = false;
  for (const auto& lp : near_i0) {
    REQUIRE(lp.match_distance >= 0.0);  // no unmatched zeros
    CHECK(lp.match_distance < 1e-8);
    if (lp.id.component != +1) continue;
    if (lp.id.kind == RadialSetKind::RinMinus) rin_minus = true;
    if (lp.id.kind == RadialSetKind::Rc) rc = true;
    if (lp.id.kind == RadialSetKind::Rout) rout = true;
    CHECK(lp.id.kind != RadialSetKind::RinPlus);
  }
  CHECK(rin_minus);
  CHECK(rc);
  CHECK(rout);

  const auto near_ip = locate_radial_sets(m, ChartId{Face::NearIplus, 0.0}, y);
  bool rin_plus = false;
  for (const auto& lp : near_ip) {
    REQUIRE(lp.match_distance >= 0.0);
    if (lp.id.component == +1 && lp.id.kind == RadialSetKind::RinPlus) rin_plus = true;
  }
  CHECK(rin_plus);
}

TEST_CASE("small admissible perturbations leave the radial sets in place") {
  MetricSpec m = MetricSpec::minkowski(3);
  m.kind = MetricSpec::Kind::Perturbation;
  PerturbationTerm t;
  t.slot = PerturbSlot::D01;
  t.coeff = parse_expr("0.001 * xI");
  m.terms.push_back(t);

  const SpherePoint y{0, Eigen::VectorXd::Zero(2)};
  LocateOptions opt;
  opt.rho_samples = {0.0, 0.4};
  opt.rho_inf_samples = {0.0, 0.5};
  const auto found = locate_radial_sets(m, ChartId{Face::NearI0, 0.0}, y, opt);
  bool rin_minus = false, rc = false, rout = false;
  for (const auto& lp : found) {
    REQUIRE(lp.match_distance >= 0.0);
    CHECK(lp.match_distance < 1e-8);  // perturbation vanishes over null infinity
    if (lp.id.component != +1) continue;
    if (lp.id.kind == RadialSetKind::RinMinus) rin_minus = true;
    if (lp.id.kind == RadialSetKind::Rc) rc = true;
    if (lp.id.kind == RadialSetKind::Rout) rout = true;
  }
  CHECK(rin_minus);
  CHECK(rc);
  CHECK(rout);
}

TEST_CASE("radial sets in the planar dimension n = 2") {
  const MetricSpec m = MetricSpec::minkowski(2);
  const SpherePoint y{0, Eigen::VectorXd::Zero(1)};
  LocateOptions opt;
  opt.rho_samples = {0.0, 0.4};
  opt.rho_inf_samples = {0.0, 0.5};
  const auto found = locate_radial_sets(m, ChartId{Face::NearI0, 0.0}, y, opt);
  bool rin_minus = false, rc = false, rout = false;
  for (const auto& lp : found) {
    REQUIRE(lp.match_distance >= 0.0);
    if (lp.id.component != +1) continue;
    if (lp.id.kind == RadialSetKind::RinMinus) rin_minus = true;
    if (lp.id.kind == RadialSetKind::Rc) rc = true;
    if (lp.id.kind == RadialSetKind::Rout) rout = true;
  }
  CHECK(rin_minus);
  CHECK(rc);
  CHECK(rout);
}
