#include "test_common.hpp"

#include "eblab/multiplier.hpp"

using namespace eblab;
using testutil::make_point;

namespace {

Eigen::MatrixXd frozen_model_dual(const ChartPoint& q) {
  const double eps = (q.chart.face == Face::NearI0) ? 1.0 : -1.0;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(4, 4);
  G(0, 1) = G(1, 0) = eps * 0.5;
  G(1, 1) = -eps * 0.5;
  G.block(2, 2, 2, 2) = sphere_dual_metric(q.y);
  return G;
}

MultiplierField mult_near_i0(double a0, double aI, double c) {
  MultiplierField m;
  m.chart = ChartId{Face::NearI0, 0.0};
  m.check_alpha0 = a0;
  m.check_alphaI = aI;
  m.c = c;
  return m;
}

}  // namespace

TEST_CASE("causal character of the multiplier") {
  const MetricSpec m = MetricSpec::minkowski(3);
  const ChartPoint p = make_point(Face::NearI0, 0.0, 0.3, 0.0);

  MultiplierField mult = mult_near_i0(1.0, -0.25, 0.1);
  const Eigen::VectorXd W = mult.w_frame(3);
  CHECK(g_eb_pair(m, p, W, W) == Approx(-2.0 * 0.1 * (2.0 - 0.1)).epsilon(1e-13));
  CHECK(g_eb_pair(m, p, W, W) == Approx(-0.38).epsilon(1e-13));
  CHECK(causal_character(m, W, p) == CausalCharacter::FutureTimelike);

  // c = 0 degenerates to a null vector.
  mult.c = 0.0;
  CHECK(causal_character(m, mult.w_frame(3), p) == CausalCharacter::Null);

  // -x dx is a declared causal generator; on the model it is null at x = 0.
  Eigen::VectorXd mxdx = Eigen::VectorXd::Zero(4);
  mxdx(1) = -1.0;
  CHECK(causal_character(m, mxdx, p) == CausalCharacter::Null);
  CHECK(g_eb_pair(m, p, mxdx, mxdx) == Approx(0.0).margin(1e-14));

  // Past and spacelike cases.
  Eigen::VectorXd past = -mult_near_i0(1.0, -0.25, 0.5).w_frame(3);
  CHECK(causal_character(m, past, p) == CausalCharacter::PastTimelike);
  Eigen::VectorXd sph = Eigen::VectorXd::Zero(4);
  sph(2) = 1.0;
  CHECK(causal_character(m, sph, p) == CausalCharacter::Spacelike);

  // The NearIplus multiplier is future timelike as well.
  const ChartPoint pp = make_point(Face::NearIplus, 0.0, 0.3, 0.0);
  MultiplierField mp;
  mp.chart = ChartId{Face::NearIplus, 0.0};
  mp.c = 0.3;
  CHECK(causal_character(m, mp.w_frame(3), pp) == CausalCharacter::FutureTimelike);
}

TEST_CASE("deformation tensor closed form: quoted coefficients") {
  // lambda = p1 = 0, shifted weights (a0, aI) = (1, -0.25), c = 0.01.
  const Eigen::MatrixXd k_dual = Eigen::MatrixXd::Identity(2, 2);
  const MultiplierField mult = mult_near_i0(1.0, -0.25, 0.01);
  const DeformationTensor K = deformation_tensor_model(3, k_dual, mult, 0.0);
  CHECK(K.mat(0, 0) == Approx((2.0 - 0.01) * (4.0 * 0.25)).epsilon(1e-13));
  CHECK(K.mat(0, 0) == Approx(1.99).epsilon(1e-13));
  CHECK((K.mat - K.mat.transpose()).norm() == 0.0);

  // Richardson in c: trace limit -10 aI + 10 lambda, determinant slope
  // 8 (aI - lambda)(aI - a0).
  const MinorCoefficients mc = minor_coefficients_model(3, k_dual, mult, 0.0, 0.01);
  CHECK(mc.trace_limit == Approx(2.5).epsilon(1e-10));
  CHECK(mc.det_slope == Approx(8.0 * (-0.25) * (-0.25 - 1.0)).epsilon(1e-9));
  CHECK(mc.det_slope == Approx(2.5).epsilon(1e-9));
  // det at c = 0.01 is close to slope * c.
  const MinorTraceDet td = minor_trace_det(K);
  CHECK(td.det == Approx(0.025).epsilon(0.05));

  // Degenerate slopes when aI = lambda or aI = a0.
  const MinorCoefficients deg1 =
      minor_coefficients_model(3, k_dual, mult_near_i0(1.0, -0.25, 0.01), -0.25, 0.01);
  CHECK(deg1.det_slope == Approx(0.0).margin(1e-9));
  const MinorCoefficients deg2 =
      minor_coefficients_model(3, k_dual, mult_near_i0(-0.25, -0.25, 0.01), 0.0, 0.01);
  CHECK(deg2.det_slope == Approx(0.0).margin(1e-9));
}

TEST_CASE("FD Lie-derivative route matches the closed form on the frozen model") {
  std::mt19937_64 rng(71);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const bool plus = (rng() & 1) != 0;
    ChartPoint p = make_point(plus ? Face::NearIplus : Face::NearI0, 0.0,
                              uniform(rng, 0.15, 0.7), uniform(rng, 0.15, 0.7));
    p.y.w << uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8);
    MultiplierField mult;
    mult.chart = p.chart;
    mult.check_alpha0 = uniform(rng, -1.0, 1.0);
    mult.check_alphaI = uniform(rng, -1.0, 1.0);
    mult.check_alphaPlus = uniform(rng, -1.0, 1.0);
    mult.c = uniform(rng, 0.01, 0.5);
    const double p1 = uniform(rng, -0.5, 0.5);
    const DeformationTensor fd = deformation_tensor_fd(frozen_model_dual, p, mult, p1);
    const DeformationTensor exact =
        deformation_tensor_model(3, sphere_dual_metric(p.y), mult, p1);
    worst = std::max(worst, (fd.mat - exact.mat).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("deformation tensor of the full Minkowski metric approaches the model near scri") {
  const MultiplierField mult = mult_near_i0(1.0, -0.25, 0.05);
  const MetricSpec mk = MetricSpec::minkowski(3);
  double prev = 1e300;
  for (double x : {0.2, 0.1, 0.05}) {
    const ChartPoint p = make_point(Face::NearI0, 0.0, 0.3, x);
    const DeformationTensor fd = deformation_tensor(mk, mult, p, 0.0);
    const DeformationTensor model =
        deformation_tensor_model(3, sphere_dual_metric(p.y), mult, 0.0);
    const double dev = (fd.mat - model.mat).cwiseAbs().maxCoeff();
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 0.02);  // O(x^2) corrections
}

TEST_CASE("multiplier tensor positivity region") {
  // Thresholds: alphaI < -1/2 + p1bar and alphaI < alpha0 + 1/2.
  CHECK(positivity_scan(3, 0.0, -0.75, 0.0).positive);
  CHECK_FALSE(positivity_scan(3, 0.0, -0.4, 0.0).positive);
  CHECK_FALSE(positivity_scan(3, -2.0, -0.75, 0.0).positive);
  // Some c value below 0.2 already works for the passing pair.
  CHECK(positivity_scan(3, 0.0, -0.75, 0.0, 60, 1e-4, 0.2).positive);

  // The boundary in alphaI matches the analytic thresholds to 1e-3.
  const double b1 = positivity_boundary_alphaI(3, 0.0, 0.0, -0.7, -0.3);
  CHECK(b1 == Approx(-0.5).margin(2e-3));
  const double b2 = positivity_boundary_alphaI(3, -1.6, 0.0, -1.3, -0.8);
  CHECK(b2 == Approx(-1.1).margin(2e-3));  // alpha0 + 1/2 binds
  // With p1bar > 0 the null-infinity threshold moves.
  const double b3 = positivity_boundary_alphaI(3, 0.0, 0.25, -0.45, -0.05);
  CHECK(b3 == Approx(-0.25).margin(2e-3));
}

TEST_CASE("adjoint-side tensor is negative definite inside the dual window") {
  // Window for the tilde weights: alphaI~ > -1/2 - p1bar, alphaI~ < alpha+~ + 1/2.
  CHECK(negativity_scan_adjoint(3, -0.25, -0.5, 0.0).positive);
  CHECK_FALSE(negativity_scan_adjoint(3, -0.6, -0.5, 0.0).positive);   // below -1/2
  CHECK_FALSE(negativity_scan_adjoint(3, -0.25, -1.0, 0.0).positive);  // alphaI~ > alpha+~ + 1/2
  // p1 shifts the lower edge.
  CHECK(negativity_scan_adjoint(3, -0.6, -0.5, 0.25).positive);
  CHECK_FALSE(negativity_scan_adjoint(3, -0.8, -0.5, 0.25).positive);
}
