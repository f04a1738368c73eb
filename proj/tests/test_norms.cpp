#include "test_common.hpp"

#include "eblab/norms.hpp"

using namespace eblab;

namespace {

SolveSpec exterior_spec(double h, double v_hi) {
  SolveSpec s;
  s.n = 3;
  s.forcing.ell = 0;
  s.forcing.t0 = 0.0;
  s.forcing.t1 = 1.0;
  s.forcing.r0 = 3.0;
  s.forcing.r1 = 4.0;
  // supp f in u_ret (-4, -2), v_adv (3, 5): inside the exterior region t <= r-1
  s.grid = NullGrid::make(-5.0, -1.0, 2.0, v_hi, h);
  return s;
}

}  // namespace

TEST_CASE("weighted norm basics") {
  const SolveSpec s = exterior_spec(0.05, 100.0);
  SolutionField zero;
  zero.spec = s;
  zero.w.assign(static_cast<std::size_t>(s.grid.nu) * s.grid.nv, 0.0);
  Region reg;
  reg.kind = Region::Kind::Exterior;
  NormSpec spec;
  spec.s = 0;
  spec.alpha0 = -1.0;
  spec.alphaI = -0.6;
  CHECK(weighted_norm(zero, spec, reg).value == 0.0);
}

TEST_CASE("weight-shift identity") {
  // Norm of rho0^a xI^{2b} u at weights (alpha0, alphaI) equals the norm of u
  // at (alpha0 - a, alphaI - b): the weights commute through the definition.
  const SolveSpec s = exterior_spec(0.1, 60.0);
  const SolutionField sol = solve_spherical_forward(s);
  Region reg;
  reg.kind = Region::Kind::Exterior;

  const double a = 0.7, b = -0.4;
  SolutionField scaled = sol;
  const NullGrid& g = s.grid;
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double t = g.t(i, j), r = g.r(i, j);
      if (r <= 0.0 || !reg.contains(t, r)) continue;
      double rho0, xI, rhop;
      reg.weights(t, r, &rho0, &xI, &rhop);
      scaled.at(i, j) *= std::pow(rho0, a) * std::pow(xI, 2.0 * b);
    }

  NormSpec w1;
  w1.s = 0;
  w1.alpha0 = -0.5;
  w1.alphaI = -0.8;
  NormSpec w2 = w1;
  w2.alpha0 = w1.alpha0 - a;
  w2.alphaI = w1.alphaI - b;
  const double n1 = weighted_norm(scaled, w1, reg).value;
  const double n2 = weighted_norm(sol, w2, reg).value;
  CHECK(n1 == Approx(n2).epsilon(1e-10));
}

TEST_CASE("norm is monotone in the weight exponents on the exterior region") {
  const SolveSpec s = exterior_spec(0.1, 60.0);
  const SolutionField sol = solve_spherical_forward(s);
  Region reg;
  reg.kind = Region::Kind::Exterior;
  NormSpec spec;
  spec.s = 0;
  spec.alpha0 = -1.0;
  spec.alphaI = -1.0;
  const double base = weighted_norm(sol, spec, reg).value;
  // rho0, xI <= 1 on the region, so the measure factor rho^-alpha grows
  // pointwise with each exponent: the norm is monotone in each weight.
  for (double d : {0.25, 0.5, 1.0}) {
    NormSpec up = spec;
    up.alpha0 += d;
    CHECK(weighted_norm(sol, up, reg).value >= base * (1 - 1e-12));
    NormSpec dn = spec;
    dn.alpha0 -= d;
    CHECK(weighted_norm(sol, dn, reg).value <= base * (1 + 1e-12));
    NormSpec upI = spec;
    upI.alphaI += d;
    CHECK(weighted_norm(sol, upI, reg).value >= base * (1 - 1e-12));
    NormSpec dnI = spec;
    dnI.alphaI -= d;
    CHECK(weighted_norm(sol, dnI, reg).value <= base * (1 + 1e-12));
  }
}

TEST_CASE("sharpness scan brackets the critical null-infinity weight") {
  // Forward solution measured in the exterior region on a far-reaching grid;
  // the streaming scan never stores the grid.
  const double h = 0.02;
  SolveSpec s = exterior_spec(h, 40.0);
  Region reg;
  reg.kind = Region::Kind::Exterior;

  const std::vector<double> alphaI = {-0.8, -0.7, -0.6, -0.55, -0.5, -0.45, -0.4, -0.3};
  const SharpnessReport rep = sharpness_scan_streaming(s, alphaI, -1.0, reg, 1.0e9);
  REQUIRE(rep.transition_found);
  CHECK(rep.bracket_lo <= -0.5);
  CHECK(rep.bracket_hi >= -0.5 - 1e-9);
  CHECK(rep.bracket_hi - rep.bracket_lo <= 0.1 + 1e-9);
  // The quoted endpoints: finite at -0.6, divergent trend at -0.4.
  for (const auto& row : rep.rows) {
    if (row.alphaI == -0.6) CHECK(row.finite);
    if (row.alphaI == -0.4) CHECK_FALSE(row.finite);
  }
}

TEST_CASE("extra b-regularity persists for k = 1, 2") {
  const double h = 0.05;
  SolveSpec s = exterior_spec(h, 2000.0);
  const SolutionField sol = solve_spherical_forward(s);
  Region reg;
  reg.kind = Region::Kind::Exterior;
  NormSpec spec;
  spec.s = 0;
  spec.alpha0 = -1.0;
  spec.alphaI = -1.2;

  const NormValue base = weighted_norm(sol, spec, reg);
  REQUIRE(base.finite);
  REQUIRE(base.value > 0.0);

  for (BField bf : {BField::VOutgoing, BField::Rotation, BField::UWeighted}) {
    const SolutionField d1 = apply_bfield(sol, bf);
    const NormValue n1 = weighted_norm(d1, spec, reg);
    CHECK(n1.finite);
    const SolutionField d2 = apply_bfield(d1, bf);
    const NormValue n2 = weighted_norm(d2, spec, reg);
    CHECK(n2.finite);
  }
}

TEST_CASE("first-order edge-b norm is finite at admissible weights") {
  const double h = 0.04;
  SolveSpec s = exterior_spec(h, 1500.0);
  const SolutionField sol = solve_spherical_forward(s);
  Region reg;
  reg.kind = Region::Kind::Exterior;
  NormSpec spec;
  spec.s = 1;
  spec.alpha0 = -1.0;
  spec.alphaI = -1.2;
  const NormValue nv = weighted_norm(sol, spec, reg);
  CHECK(nv.finite);
  CHECK(nv.value > 0.0);
  // s beyond the supported stencil depth is rejected.
  NormSpec bad = spec;
  bad.s = 4;
  CHECK_THROWS_AS(weighted_norm(sol, bad, reg), GridTooCoarse);
}

TEST_CASE("future-cap and forward-cone regions") {
  // A solve reaching past the axis into the future cap t - r > T + 1.
  SolveSpec s;
  s.n = 3;
  s.forcing.ell = 0;
  s.forcing.t0 = 0.0;
  s.forcing.t1 = 1.0;
  s.forcing.r0 = 1.0;
  s.forcing.r1 = 2.0;
  s.grid = NullGrid::make(-3.0, 30.0, 0.0, 400.0, 0.05);
  const SolutionField sol = solve_spherical_forward(s);

  Region cap;
  cap.kind = Region::Kind::NearIplus;
  cap.T = 0.0;
  NormSpec spec;
  spec.s = 0;
  spec.alphaI = -1.2;
  spec.alphaPlus = -2.0;
  const NormValue nv = weighted_norm(sol, spec, cap);
  CHECK(nv.value > 0.0);
  CHECK(nv.finite);

  Region cone;
  cone.kind = Region::Kind::ForwardCone;
  NormSpec spec2;
  spec2.s = 0;
  spec2.alpha0 = -1.0;
  spec2.alphaI = -1.2;
  spec2.alphaPlus = -2.0;
  CHECK(weighted_norm(sol, spec2, cone).value >= nv.value * 0.1);

  // The global weight functions stay comparable to the chart product:
  // 1/(t+r) vs rho0 xI^2 rho+ within a factor below 10.
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const double t = uniform(rng, 0.0, 2000.0);
    const double r = uniform(rng, 0.05, 2000.0);
    double rho0, xI, rhop;
    cone.weights(t, r, &rho0, &xI, &rhop);
    const double ratio = (1.0 / (t + r + 1.0)) / (rho0 * xI * xI * rhop);
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
  }
}

TEST_CASE("boundary-tangent family norm is finite at admissible weights") {
  const SolveSpec s = exterior_spec(0.05, 1200.0);
  const SolutionField sol = solve_spherical_forward(s);
  Region reg;
  reg.kind = Region::Kind::Exterior;
  NormSpec spec;
  spec.s = 1;
  spec.family = NormSpec::Family::B;
  spec.alpha0 = -1.0;
  spec.alphaI = -1.2;
  const NormValue nv = weighted_norm(sol, spec, reg);
  CHECK(nv.value > 0.0);
  CHECK(nv.finite);
}
