#include "test_common.hpp"

#include "eblab/thresholds.hpp"

using namespace eblab;

TEST_CASE("threshold reports: quoted cases") {
  ThresholdInput in;
  in.s = 1.0;
  in.alpha0 = 0.0;
  in.alphaI = -0.75;
  in.alphaPlus = -1.5;
  in.p1bar = 0.0;
  const ThresholdReport global = threshold_evaluate(in, TheoremTag::GlobalRegularity);
  CHECK(global.all_pass);
  CHECK(global.records.size() == 4);

  ThresholdInput bad = in;
  bad.alphaI = -0.4;
  const ThresholdReport ext = threshold_evaluate(bad, TheoremTag::ExteriorDecay);
  CHECK_FALSE(ext.all_pass);
  CHECK_FALSE(ext.records[0].pass);  // alphaI < -1/2 + p1bar
  CHECK(ext.records[0].name.find("alphaI < -1/2") == 0);
  CHECK(ext.records[1].pass);
  CHECK_THROWS_AS(require_thresholds(ext), ThresholdViolation);

  // The reduced-family window -Im lambda < gammaI < q1bar+.
  ThresholdInput red;
  red.n = 3;
  red.p1bar_plus = 0.0;  // q1bar+ = 1
  red.im_lambda = -0.2;
  red.gammaI = 0.5;
  CHECK(threshold_evaluate(red, TheoremTag::ReducedBounded).all_pass);
  red.gammaI = 1.1;
  CHECK_FALSE(threshold_evaluate(red, TheoremTag::ReducedBounded).all_pass);
  red.gammaI = 0.1;
  CHECK_FALSE(threshold_evaluate(red, TheoremTag::ReducedBounded).all_pass);
}

TEST_CASE("order duality is an involution") {
  std::mt19937_64 rng(83);
  for (int k = 0; k < 200; ++k) {
    ThresholdInput in;
    in.s = uniform(rng, -3, 3);
    in.s0 = uniform(rng, -3, 3);
    in.alpha0 = uniform(rng, -3, 3);
    in.alphaI = uniform(rng, -3, 3);
    in.alphaPlus = uniform(rng, -3, 3);
    const ThresholdInput twice = dual_orders(dual_orders(in));
    CHECK(twice.s == Approx(in.s).margin(1e-14));
    CHECK(twice.alpha0 == Approx(in.alpha0).margin(1e-14));
    CHECK(twice.alphaI == Approx(in.alphaI).margin(1e-14));
    CHECK(twice.alphaPlus == Approx(in.alphaPlus).margin(1e-14));
  }
}

TEST_CASE("forward and backward reports correspond under the duality map") {
  std::mt19937_64 rng(89);
  for (int k = 0; k < 500; ++k) {
    ThresholdInput in;
    in.s = uniform(rng, -3, 3);
    in.alpha0 = uniform(rng, -3, 3);
    in.alphaI = uniform(rng, -3, 3);
    in.alphaPlus = uniform(rng, -3, 3);
    in.p1bar = uniform(rng, -0.5, 0.5);
    // Pick s0 strictly between the threshold and s so that the s-chain in the
    // forward statement collapses to the single dual inequality.
    const double thr = 0.5 - in.alpha0 + 2.0 * in.alphaI - in.p1bar;
    in.s0 = 0.5 * (thr + in.s);

    const ThresholdReport fw = threshold_evaluate(in, TheoremTag::PropagationForward);
    ThresholdInput dual = dual_orders(in);
    dual.p1bar = in.p1bar;
    const ThresholdReport bw = threshold_evaluate(dual, TheoremTag::PropagationBackward);

    // Record mapping: fw[0] alpha+ <-> bw[2]; fw[1] alpha0 <-> bw[1];
    // fw[4] full control <-> bw[0]; fw[2] && fw[3] (s-chain) <-> bw[3].
    CHECK(fw.records[0].pass == bw.records[2].pass);
    CHECK(fw.records[1].pass == bw.records[1].pass);
    CHECK(fw.records[4].pass == bw.records[0].pass);
    CHECK((fw.records[2].pass && fw.records[3].pass) == bw.records[3].pass);

    // Same correspondence between the solvability statements.
    const ThresholdReport sf = threshold_evaluate(in, TheoremTag::SolvabilityForward);
    const ThresholdReport sb = threshold_evaluate(dual, TheoremTag::SolvabilityBackward);
    CHECK(sf.records[0].pass == sb.records[0].pass);
    CHECK(sf.records[1].pass == sb.records[1].pass);
    CHECK(sf.records[2].pass == sb.records[2].pass);

    // Outgoing radial set estimate and edge-normal-operator window.
    CHECK(threshold_evaluate(in, TheoremTag::RoutForward).all_pass ==
          threshold_evaluate(dual, TheoremTag::RoutBackward).all_pass);
    CHECK(threshold_evaluate(in, TheoremTag::EdgeInvertForward).all_pass ==
          threshold_evaluate(dual, TheoremTag::EdgeInvertBackward).all_pass);
  }
}

TEST_CASE("theorem tags parse and print") {
  for (const char* name : {"ThmExterior", "ThmGlobal", "ThmPropFw", "ThmPropBw", "ThmSolveFw",
                           "ThmSolveBw", "LemRoutFw", "LemRoutBw", "PropEdgeFw", "PropEdgeBw",
                           "ThmReduced", "ThmReducedAdj", "ThmSolveGlobal"}) {
    CHECK(theorem_tag_name(parse_theorem_tag(name)) == name);
  }
  CHECK_THROWS_AS(parse_theorem_tag("NoSuchTheorem"), UnknownTheoremTag);
}
