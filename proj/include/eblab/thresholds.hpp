#pragma once

#include <string>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

/// The statements whose weight/order hypotheses can be evaluated.
enum class TheoremTag {
  ExteriorDecay,        // forward solvability in the exterior region
  GlobalRegularity,     // global forward regularity on {t >= 0}
  PropagationForward,   // microlocal propagation through null infinity, forward
  PropagationBackward,  // ... backward (adjoint) direction
  SolvabilityForward,   // energy solvability near null infinity minus I+
  SolvabilityBackward,
  RoutForward,          // radial point estimate at the outgoing set
  RoutBackward,
  EdgeInvertForward,    // invertibility of the edge normal operator near I+
  EdgeInvertBackward,
  ReducedBounded,        // bounded-frequency estimates for the reduced family
  ReducedBoundedAdjoint,
  SolveGlobal,          // global solvability of the wave-type equation
};

inline TheoremTag parse_theorem_tag(const std::string& s) {
  if (s == "ThmExterior") return TheoremTag::ExteriorDecay;
  if (s == "ThmGlobal") return TheoremTag::GlobalRegularity;
  if (s == "ThmPropFw") return TheoremTag::PropagationForward;
  if (s == "ThmPropBw") return TheoremTag::PropagationBackward;
  if (s == "ThmSolveFw") return TheoremTag::SolvabilityForward;
  if (s == "ThmSolveBw") return TheoremTag::SolvabilityBackward;
  if (s == "LemRoutFw") return TheoremTag::RoutForward;
  if (s == "LemRoutBw") return TheoremTag::RoutBackward;
  if (s == "PropEdgeFw") return TheoremTag::EdgeInvertForward;
  if (s == "PropEdgeBw") return TheoremTag::EdgeInvertBackward;
  if (s == "ThmReduced") return TheoremTag::ReducedBounded;
  if (s == "ThmReducedAdj") return TheoremTag::ReducedBoundedAdjoint;
  if (s == "ThmSolveGlobal") return TheoremTag::SolveGlobal;
  throw UnknownTheoremTag("unknown theorem tag '" + s + "'");
}

inline std::string theorem_tag_name(TheoremTag t) {
  switch (t) {
    case TheoremTag::ExteriorDecay: return "ThmExterior";
    case TheoremTag::GlobalRegularity: return "ThmGlobal";
    case TheoremTag::PropagationForward: return "ThmPropFw";
    case TheoremTag::PropagationBackward: return "ThmPropBw";
    case TheoremTag::SolvabilityForward: return "ThmSolveFw";
    case TheoremTag::SolvabilityBackward: return "ThmSolveBw";
    case TheoremTag::RoutForward: return "LemRoutFw";
    case TheoremTag::RoutBackward: return "LemRoutBw";
    case TheoremTag::EdgeInvertForward: return "PropEdgeFw";
    case TheoremTag::EdgeInvertBackward: return "PropEdgeBw";
    case TheoremTag::ReducedBounded: return "ThmReduced";
    case TheoremTag::ReducedBoundedAdjoint: return "ThmReducedAdj";
    case TheoremTag::SolveGlobal: return "ThmSolveGlobal";
  }
  return "?";
}

/// Orders and weights entering the threshold inequalities. The reduced-family
/// tags read (im_lambda, gammaI, n) instead of the Sobolev weights.
struct ThresholdInput {
  double s = 1.0;
  double s0 = 0.75;
  double alpha0 = 0.0;
  double alphaI = -0.75;
  double alphaPlus = -1.5;
  double p1bar = 0.0;       // infimal real part of the subprincipal spectrum
  double p1bar_plus = 0.0;  // same, restricted to the future corner
  double im_lambda = 0.0;
  double gammaI = 0.5;
  int n = 3;
};

struct ThresholdRecord {
  std::string name;
  double lhs = 0.0;  // inequality lhs < rhs
  double rhs = 0.0;
  bool pass = false;
};

struct ThresholdReport {
  TheoremTag tag = TheoremTag::ExteriorDecay;
  std::vector<ThresholdRecord> records;
  bool all_pass = true;

  void add(const std::string& name, double lhs, double rhs) {
    records.push_back({name, lhs, rhs, lhs < rhs});
    all_pass = all_pass && records.back().pass;
  }
};

/// The order/weight duality map between the forward and backward statements:
/// s~ = -s + 1, alpha~ = -alpha - (2, 2, 2) (the I-weight loses only 1 since
/// it is recorded unhalved).
inline ThresholdInput dual_orders(const ThresholdInput& in) {
  ThresholdInput out = in;
  out.s = -in.s + 1.0;
  out.s0 = -in.s0 + 1.0;
  out.alpha0 = -in.alpha0 - 2.0;
  out.alphaI = -in.alphaI - 1.0;
  out.alphaPlus = -in.alphaPlus - 2.0;
  return out;
}

/// Evaluate every inequality of the tagged statement literally.
inline ThresholdReport threshold_evaluate(const ThresholdInput& in, TheoremTag tag) {
  ThresholdReport rep;
  rep.tag = tag;
  const double s_thr = 0.5 - in.alpha0 + 2.0 * in.alphaI - in.p1bar;
  const double s_thr_bw = 0.5 - in.alpha0 + 2.0 * in.alphaI + in.p1bar;
  const double q1bar_plus = 0.5 * (in.n - 1) + in.p1bar_plus;
  switch (tag) {
    case TheoremTag::ExteriorDecay:
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      rep.add("alphaI < alpha0 + 1/2", in.alphaI, in.alpha0 + 0.5);
      rep.add("s >= 1", 1.0 - 1e-12, in.s);
      break;
    case TheoremTag::GlobalRegularity:
      rep.add("alpha+ + 1/2 < alphaI", in.alphaPlus + 0.5, in.alphaI);
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      rep.add("alphaI < alpha0 + 1/2", in.alphaI, in.alpha0 + 0.5);
      rep.add("s >= 1", 1.0 - 1e-12, in.s);
      break;
    case TheoremTag::PropagationForward:
      rep.add("alpha+ < alphaI - 1/2", in.alphaPlus, in.alphaI - 0.5);
      rep.add("alphaI - 1/2 < alpha0", in.alphaI - 0.5, in.alpha0);
      rep.add("s0 > 1/2 - alpha0 + 2 alphaI - p1bar", s_thr, in.s0);
      rep.add("s > s0", in.s0, in.s);
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      break;
    case TheoremTag::PropagationBackward:
      rep.add("alphaI > -1/2 - p1bar", -0.5 - in.p1bar, in.alphaI);
      rep.add("alpha0 < alphaI - 1/2", in.alpha0, in.alphaI - 0.5);
      rep.add("alphaI - 1/2 < alpha+", in.alphaI - 0.5, in.alphaPlus);
      rep.add("s < 1/2 - alpha0 + 2 alphaI + p1bar", in.s, s_thr_bw);
      break;
    case TheoremTag::SolvabilityForward:
      rep.add("s > 1/2 - alpha0 + 2 alphaI - p1bar", s_thr, in.s);
      rep.add("alphaI < alpha0 + 1/2", in.alphaI, in.alpha0 + 0.5);
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      break;
    case TheoremTag::SolvabilityBackward:
      rep.add("s < 1/2 - alpha0 + 2 alphaI + p1bar", in.s, s_thr_bw);
      rep.add("alpha0 < alphaI - 1/2", in.alpha0, in.alphaI - 0.5);
      rep.add("alphaI > -1/2 - p1bar", -0.5 - in.p1bar, in.alphaI);
      break;
    case TheoremTag::RoutForward:
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      break;
    case TheoremTag::RoutBackward:
      rep.add("alphaI > -1/2 - p1bar", -0.5 - in.p1bar, in.alphaI);
      break;
    case TheoremTag::EdgeInvertForward:
      rep.add("alpha+ + 1/2 < alphaI", in.alphaPlus + 0.5, in.alphaI);
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      break;
    case TheoremTag::EdgeInvertBackward:
      rep.add("-1/2 - p1bar < alphaI", -0.5 - in.p1bar, in.alphaI);
      rep.add("alphaI < alpha+ + 1/2", in.alphaI, in.alphaPlus + 0.5);
      break;
    case TheoremTag::ReducedBounded:
      rep.add("-Im lambda < gammaI", -in.im_lambda, in.gammaI);
      rep.add("gammaI < q1bar+", in.gammaI, q1bar_plus);
      break;
    case TheoremTag::ReducedBoundedAdjoint:
      rep.add("-q1bar+ < gammaI", -q1bar_plus, in.gammaI);
      rep.add("gammaI < -Im lambda", in.gammaI, -in.im_lambda);
      break;
    case TheoremTag::SolveGlobal:
      rep.add("alpha+ + 1/2 < alphaI", in.alphaPlus + 0.5, in.alphaI);
      rep.add("alphaI < alpha0 + 1/2", in.alphaI, in.alpha0 + 0.5);
      rep.add("alphaI < -1/2 + p1bar", in.alphaI, -0.5 + in.p1bar);
      rep.add("s > 1/2 - alpha0 + 2 alphaI - p1bar", s_thr, in.s);
      break;
  }
  return rep;
}

/// Throw ThresholdViolation naming the first failing inequality.
inline void require_thresholds(const ThresholdReport& rep) {
  for (const auto& r : rep.records) {
    if (!r.pass)
      throw ThresholdViolation("threshold gate [" + theorem_tag_name(rep.tag) + "] fails: " +
                               r.name);
  }
}

}  // namespace eblab
