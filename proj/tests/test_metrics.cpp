#include "test_common.hpp"

#include "eblab/admissibility.hpp"
#include "eblab/frames.hpp"
#include "eblab/metrics.hpp"
#include "eblab/util.hpp"

using namespace eblab;

using testutil::make_point;

namespace {

double qform(const Eigen::MatrixXd& G, double zeta, double xi, const Eigen::VectorXd& eta) {
  Eigen::VectorXd f(2 + eta.size());
  f(0) = zeta;
  f(1) = xi;
  f.tail(eta.size()) = eta;
  return f.dot(G * f);
}

}  // namespace

TEST_CASE("Minkowski dual metric over null infinity") {
  const MetricSpec m = MetricSpec::minkowski(3);
  Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(2);

  // NearI0, x = 0: the form is -xi(xi - 2 zeta)/2 + |eta|_k^2.
  const Eigen::MatrixXd G0 = dual_metric_eb(m, make_point(Face::NearI0, 0.0, 0.2, 0.0));
  CHECK(qform(G0, 1.0, 2.0, eta0) == Approx(0.0).margin(1e-14));
  CHECK(qform(G0, 1.0, 1.0, eta0) == Approx(0.5).margin(1e-14));
  // |eta|_k = |eta| / conformal = 1 for eta = (2,0) at w = 0: value -1 + 1 = 0.
  Eigen::VectorXd eta1(2);
  eta1 << 2.0, 0.0;
  CHECK(qform(G0, 0.0, std::sqrt(2.0), eta1) == Approx(0.0).margin(1e-12));

  // NearIplus, x = 0: +xi(xi-2zeta)/2 + |eta|_k^2 vanishes at (zeta,xi)=(1,0).
  const Eigen::MatrixXd Gp = dual_metric_eb(m, make_point(Face::NearIplus, 0.0, 0.2, 0.0));
  CHECK(qform(Gp, 1.0, 0.0, eta0) == Approx(0.0).margin(1e-14));
  CHECK(qform(Gp, 1.0, 1.0, eta0) == Approx(-0.5).margin(1e-14));
}

TEST_CASE("metric and dual metric are inverse on the edge-b frame") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const bool plus = (rng() & 1) != 0;
    ChartPoint c = make_point(plus ? Face::NearIplus : Face::NearI0, 0.0, uniform(rng, 0.0, 0.9),
                              uniform(rng, 0.0, 0.9));
    c.y.w << uniform(rng, -1, 1), uniform(rng, -1, 1);
    for (const MetricSpec& m :
         {MetricSpec::minkowski(3), MetricSpec::schwarzschild(3, 0.05), MetricSpec::model_p1(3, 0.5)}) {
      if (m.kind == MetricSpec::Kind::Schwarzschild && c.rho * c.x * c.x > 1.0 / (4.0 * m.mass))
        continue;  // stay outside the horizon region
      const Eigen::MatrixXd g = metric_eb(m, c);
      const Eigen::MatrixXd G = dual_metric_eb(m, c);
      CHECK((g * G - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
    }
  }
}

TEST_CASE("Lorentzian signature at interior points") {
  std::mt19937_64 rng(12);
  const MetricSpec sch = MetricSpec::schwarzschild(3, 1.0);
  int checked = 0;
  while (checked < 100) {
    const bool plus = (rng() & 1) != 0;
    ChartPoint c = make_point(plus ? Face::NearIplus : Face::NearI0, 0.0, uniform(rng, 0.01, 0.9),
                              uniform(rng, 0.01, 0.9));
    c.y.w << uniform(rng, -1, 1), uniform(rng, -1, 1);
    if (c.rho * c.x * c.x > 0.2) continue;  // r > 5 > 2m
    CHECK(is_lorentzian(dual_metric_eb(sch, c)));
    ++checked;
  }
  // Minkowski everywhere in-chart, including the boundary faces.
  const MetricSpec mink = MetricSpec::minkowski(3);
  for (int k = 0; k < 100; ++k) {
    ChartPoint c = make_point((rng() & 1) ? Face::NearIplus : Face::NearI0, 0.0,
                              uniform(rng, 0.0, 0.95), uniform(rng, 0.0, 0.95));
    CHECK(is_lorentzian(dual_metric_eb(mink, c)));
  }
}

TEST_CASE("hypersurfaces: x = const is spacelike near I0 and timelike near I+") {
  const MetricSpec m = MetricSpec::minkowski(3);
  Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(2);
  for (double x : {0.0, 0.05, 0.2}) {
    const Eigen::MatrixXd G0 = dual_metric_eb(m, make_point(Face::NearI0, 0.0, 0.3, x));
    CHECK(qform(G0, 0.0, 1.0, eta0) < 0.0);  // dx/x is timelike => level set spacelike
    const Eigen::MatrixXd Gp = dual_metric_eb(m, make_point(Face::NearIplus, 0.0, 0.3, x));
    CHECK(qform(Gp, 0.0, 1.0, eta0) > 0.0);
  }
}

TEST_CASE("edge-b frame in spacetime directions") {
  // d/dt* = rho (rho d/drho - x d/dx / 2) on NearI0.
  ChartPoint c = make_point(Face::NearI0, 1.0, 0.5, std::sqrt(0.5));
  const auto fr = eb_frame_in_spacetime(c);
  Eigen::VectorXd dt_star = Eigen::VectorXd::Zero(4);
  dt_star(0) = 1.0;
  const Eigen::VectorXd comp = spacetime_to_frame(c, dt_star);
  CHECK(comp(0) == Approx(c.rho).epsilon(1e-12));
  CHECK(comp(1) == Approx(-0.5 * c.rho).epsilon(1e-12));
  CHECK(std::abs(comp(2)) < 1e-14);
  CHECK(fr.condition_number > 1.0);
  CHECK(std::abs(fr.frame.determinant()) > 1e-12);

  // d/dr = -(rho x^3 / 2) d/dx on NearIplus; at (rho+=0.2, x=0.3) the
  // coefficient of d/dx is -0.0027.
  ChartPoint cp = make_point(Face::NearIplus, 0.0, 0.2, 0.3);
  Eigen::VectorXd dr = Eigen::VectorXd::Zero(4);
  dr(1) = 1.0;
  const Eigen::VectorXd comp_r = spacetime_to_frame(cp, dr);
  CHECK(comp_r(1) == Approx(-0.5 * 0.2 * 0.3 * 0.3).epsilon(1e-12));  // on x d/dx
  CHECK(comp_r(1) * cp.x == Approx(-0.0027).epsilon(1e-12));          // on d/dx
  CHECK(std::abs(comp_r(0)) < 1e-15);
}

TEST_CASE("frame construction rejects boundary points") {
  CHECK_THROWS_AS(eb_frame_in_spacetime(make_point(Face::NearI0, 0.0, 0.0, 0.3)), DomainError);
  CHECK_THROWS_AS(eb_frame_in_spacetime(make_point(Face::NearI0, 0.0, 0.3, 0.0)), DomainError);
}

TEST_CASE("admissibility orders: Minkowski against itself is exact") {
  const MetricSpec m = MetricSpec::minkowski(3);
  const ChartPoint base = make_point(Face::NearI0, 0.0, 0.3, 0.3);
  const OrderFitReport rep = fit_admissibility_orders(m, base, FitPath::ToScri);
  CHECK(rep.all_exact);
}

TEST_CASE("admissibility orders: Schwarzschild x_I exponent is 2") {
  const MetricSpec m = MetricSpec::schwarzschild(3, 1.0);
  const ChartPoint base = make_point(Face::NearIplus, 0.0, 0.2, 0.3);
  const OrderFitReport rep = fit_admissibility_orders(m, base, FitPath::ToScri);
  REQUIRE(!rep.all_exact);
  CHECK(rep.min_exponent == Approx(2.0).margin(0.1));
  // rho+ path: first-order decay at I+.
  const OrderFitReport rep2 = fit_admissibility_orders(m, base, FitPath::ToRhoPlus);
  CHECK(rep2.min_exponent == Approx(1.0).margin(0.1));
}

TEST_CASE("admissibility orders: synthetic x^0.5 bump perturbation") {
  MetricSpec m = MetricSpec::minkowski(3);
  m.kind = MetricSpec::Kind::Perturbation;
  m.ellI = 0.25;
  PerturbationTerm t;
  t.slot = PerturbSlot::D01;
  t.coeff = parse_expr("0.01 * xI^0.5");
  m.terms.push_back(t);
  const ChartPoint base = make_point(Face::NearI0, 0.0, 0.3, 0.3);
  const OrderFitReport rep = fit_admissibility_orders(m, base, FitPath::ToScri);
  REQUIRE(!rep.all_exact);
  CHECK(rep.min_exponent == Approx(0.5).margin(0.05));
}

TEST_CASE("admissibility fit rejects too-sparse sampling") {
  const MetricSpec m = MetricSpec::schwarzschild(3, 1.0);
  const ChartPoint base = make_point(Face::NearIplus, 0.0, 0.2, 0.3);
  OrderFitOptions opt;
  opt.points_per_decade = 3;
  CHECK_THROWS_AS(fit_admissibility_orders(m, base, FitPath::ToScri, opt), FitError);
}

TEST_CASE("perturbation expression grammar") {
  const Expr e = parse_expr("2 * rho0^1.5 * bump(xI,0.5,0.25) - 0.5 * rhop");
  CHECK(e.eval(0.4, 0.5, 0.2) == Approx(2.0 * std::pow(0.4, 1.5) - 0.1).epsilon(1e-12));
  CHECK(e.eval(0.4, 0.8, 0.2) == Approx(-0.1).epsilon(1e-12));  // bump support left
  CHECK_THROWS_AS(parse_expr("2 ** xI"), ConfigError);
  CHECK_THROWS_AS(parse_expr("bump(xI,0.5)"), ConfigError);
}

TEST_CASE("planar dimension n = 2: metric and frame") {
  const MetricSpec m = MetricSpec::minkowski(2);
  ChartPoint c;
  c.chart = ChartId{Face::NearI0, 0.0};
  c.rho = 0.3;
  c.x = 0.4;
  c.y = SpherePoint{0, Eigen::VectorXd::Zero(1)};
  CHECK(is_lorentzian(dual_metric_eb(m, c)));
  const Eigen::MatrixXd g = metric_eb(m, c);
  CHECK((g * dual_metric_eb(m, c) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK(eb_frame_in_spacetime(c).condition_number > 1.0);
}

TEST_CASE("Schwarzschild remainder decays at first order toward the spacelike face") {
  const MetricSpec m = MetricSpec::schwarzschild(3, 1.0);
  ChartPoint base;
  base.chart = ChartId{Face::NearI0, 0.0};
  base.rho = 0.2;
  base.x = 0.3;
  base.y = SpherePoint{0, Eigen::VectorXd::Zero(2)};
  const OrderFitReport rep = fit_admissibility_orders(m, base, FitPath::ToRho0);
  REQUIRE(!rep.all_exact);
  CHECK(rep.min_exponent == Approx(1.0).margin(0.1));
}
