#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "eblab/admissibility.hpp"
#include "eblab/config.hpp"
#include "eblab/dalembert.hpp"
#include "eblab/decay.hpp"
#include "eblab/emit.hpp"
#include "eblab/flow.hpp"
#include "eblab/mellin.hpp"
#include "eblab/multiplier.hpp"
#include "eblab/normop.hpp"
#include "eblab/norms.hpp"
#include "eblab/nullgrid.hpp"
#include "eblab/thresholds.hpp"

namespace eblab {

struct RunOptions {
  std::string out_dir = "out";
  long seed = 0;
  bool seed_override = false;
  int threads = 1;
  std::string format = "csv";  // csv | json
};

struct RunResult {
  std::vector<std::string> files;
  std::string summary;
};

namespace detail {

inline MetricSpec metric_from_config(const Config& cfg) {
  const std::string kind = cfg.get_string("metric", "kind", "minkowski");
  const int n = static_cast<int>(cfg.get_int("metric", "n", 3));
  if (kind == "minkowski") return MetricSpec::minkowski(n);
  if (kind == "schwarzschild")
    return MetricSpec::schwarzschild(n, cfg.get_double("metric", "mass", 1.0));
  if (kind == "model_p1") return MetricSpec::model_p1(n, cfg.get_double("metric", "p1", 0.0));
  if (kind == "perturbation") {
    MetricSpec m = MetricSpec::minkowski(n);
    m.kind = MetricSpec::Kind::Perturbation;
    m.ell0 = cfg.get_double("metric", "ell0", 1.0);
    m.ellI = cfg.get_double("metric", "ellI", 0.5);
    m.ellp = cfg.get_double("metric", "ellp", 1.0);
    for (int k = 1; k <= 9; ++k) {
      const std::string slot_key = "term" + std::to_string(k) + ".slot";
      if (!cfg.has("metric", slot_key)) break;
      PerturbationTerm t;
      t.slot = parse_slot(cfg.get_string("metric", slot_key));
      t.coeff = parse_expr(cfg.get_string("metric", "term" + std::to_string(k) + ".coeff"));
      m.terms.push_back(t);
    }
    return m;
  }
  throw ConfigError("[metric] kind: unknown metric '" + kind + "'");
}

inline Face face_from_string(const std::string& s) {
  if (s == "near_i0") return Face::NearI0;
  if (s == "near_iplus") return Face::NearIplus;
  throw ConfigError("chart face must be near_i0 or near_iplus, got '" + s + "'");
}

/// Emit a table in the requested format; returns the file path.
inline std::string emit_table(const RunOptions& opt, const std::string& name,
                              const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  if (opt.format == "csv") {
    CsvTable table(header);
    for (const auto& r : rows) table.add_row(r);
    const std::string path = (fs::path(opt.out_dir) / (name + ".csv")).string();
    write_file(path, table.to_string());
    return path;
  }
  Json arr;
  for (const auto& r : rows) {
    Json row = Json::object();
    for (std::size_t i = 0; i < header.size(); ++i) row.set(header[i], r[i]);
    arr.push_back(std::move(row));
  }
  if (rows.empty()) arr = Json::Array{};
  const std::string path = (fs::path(opt.out_dir) / (name + ".json")).string();
  write_file(path, versioned(std::move(arr)).dump() + "\n");
  return path;
}

inline std::string emit_json(const RunOptions& opt, const std::string& name, Json payload) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  const std::string path = (fs::path(opt.out_dir) / (name + ".json")).string();
  write_file(path, versioned(std::move(payload)).dump() + "\n");
  return path;
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

/// ---- experiment: chart --------------------------------------------------

inline RunResult run_chart(const Config& cfg, const RunOptions& opt, std::mt19937_64& rng) {
  const int count = static_cast<int>(cfg.get_int("chart", "count", 1000));
  const double T0 = cfg.get_double("chart", "T0", 5.0);
  const double T1 = cfg.get_double("chart", "T1", -5.0);
  const int d = static_cast<int>(cfg.get_int("metric", "n", 3)) - 1;

  std::vector<std::vector<std::string>> rows;
  double worst_rt = 0.0, worst_tr = 0.0;
  for (int k = 0; k < count; ++k) {
    const bool plus = (rng() & 1) != 0;
    const ChartId chart{plus ? Face::NearIplus : Face::NearI0, plus ? T1 : T0};
    const double s = uniform(rng, 1.05, 20.0);
    const double r = s / uniform(rng, 0.01, 0.95);
    SpacetimePoint p;
    p.r = r;
    p.t = (plus ? chart.shift + s : chart.shift - s) + r;
    p.omega = SpherePoint{0, Eigen::VectorXd::Zero(d)};
    for (int a = 0; a < d; ++a) p.omega.w(a) = uniform(rng, -0.9, 0.9);
    const ChartPoint c = to_chart(p, chart);
    const SpacetimePoint back = from_chart(c);
    const double rt = std::abs(back.t - p.t) / (1 + std::abs(p.t)) + std::abs(back.r - p.r) / p.r;
    worst_rt = std::max(worst_rt, rt);
    // Overlap transition check when the point lies in both charts.
    double tr = 0.0;
    const ChartId other{plus ? Face::NearI0 : Face::NearIplus, plus ? T0 : T1};
    try {
      const ChartPoint direct = to_chart(p, other);
      const ChartPoint via = transition(c, other);
      tr = std::abs(via.rho - direct.rho) / direct.rho + std::abs(via.x - direct.x) / direct.x;
      worst_tr = std::max(worst_tr, tr);
    } catch (const DomainError&) {
      tr = -1.0;  // not on the overlap
    }
    rows.push_back({plus ? "near_iplus" : "near_i0", detail::fmt(chart.shift), detail::fmt(p.t),
                    detail::fmt(p.r), detail::fmt(c.rho), detail::fmt(c.x), detail::fmt(rt),
                    detail::fmt(tr)});
  }
  RunResult res;
  res.files.push_back(detail::emit_table(opt, "chart_roundtrip",
                                         {"face", "T", "t", "r", "rho", "x", "roundtrip_err",
                                          "transition_err"},
                                         rows));
  Json sum = Json::object();
  sum.set("count", count);
  sum.set("max_roundtrip_err", worst_rt);
  sum.set("max_transition_err", worst_tr);
  res.files.push_back(detail::emit_json(opt, "chart_summary", std::move(sum)));
  res.summary = "chart: max roundtrip " + detail::fmt(worst_rt);
  return res;
}

/// ---- experiment: flow (trace | radial_sets) ------------------------------

inline RunResult run_flow(const Config& cfg, const RunOptions& opt, std::mt19937_64&) {
  const MetricSpec m = detail::metric_from_config(cfg);
  const std::string task = cfg.get_string("flow", "task", "trace");
  RunResult res;

  if (task == "radial_sets") {
    const ChartId chart{detail::face_from_string(cfg.get_string("flow", "chart", "near_i0")),
                        cfg.get_double("flow", "T", 0.0)};
    const SpherePoint y{0, Eigen::VectorXd::Zero(m.n - 1)};
    const auto found = locate_radial_sets(m, chart, y);
    std::vector<std::vector<std::string>> rows;
    for (const auto& lp : found) {
      std::string eigs;
      try {
        const Linearization lin = linearize_at_point(m, lp.point, 1e-6);
        for (int i = 0; i < lin.eigenvalues.size(); ++i) {
          if (i) eigs += ';';
          eigs += detail::fmt(lin.eigenvalues(i).real());
        }
      } catch (const NotCritical&) {
        eigs = "n/a";
      }
      rows.push_back({to_string(lp.point.base.chart),
                      lp.point.fiber_chart == FiberChart::ZetaLarge ? "zeta" : "xi",
                      std::to_string(lp.point.sign), detail::fmt(lp.point.base.rho),
                      detail::fmt(lp.point.base.x), detail::fmt(lp.point.rho_inf),
                      detail::fmt(lp.point.hat1), detail::fmt(lp.point.eta_hat.norm()),
                      detail::fmt(lp.field_norm), eigs, detail::fmt(lp.match_distance),
                      to_string(lp.id)});
    }
    res.files.push_back(detail::emit_table(
        opt, "radial_sets",
        {"chart", "fiber_chart", "sign", "rho", "x", "rho_inf", "hat1", "eta_hat_norm",
         "field_norm", "eigenvalues", "match_distance", "classification"},
        rows));
    res.summary = "flow radial_sets: " + std::to_string(rows.size()) + " points";
    return res;
  }

  if (task != "trace") throw ConfigError("[flow] task must be trace or radial_sets");
  PhasePoint start;
  start.base.chart = ChartId{detail::face_from_string(cfg.get_string("start", "chart")),
                             cfg.get_double("start", "T", 0.0)};
  start.base.rho = cfg.get_double("start", "rho");
  start.base.x = cfg.get_double("start", "x", 0.0);
  start.base.y = SpherePoint{0, Eigen::VectorXd::Zero(m.n - 1)};
  start.zeta = cfg.get_double("start", "zeta");
  start.xi = cfg.get_double("start", "xi");
  start.eta = Eigen::VectorXd::Zero(m.n - 1);
  if (cfg.has("start", "eta")) {
    const std::vector<double> e = cfg.get_list("start", "eta");
    for (std::size_t a = 0; a < e.size() && a < static_cast<std::size_t>(m.n - 1); ++a)
      start.eta(a) = e[a];
  }
  FlowOptions fopt;
  fopt.forward = cfg.get_int("flow", "forward", 1) != 0;
  fopt.s_max = cfg.get_double("flow", "s_max", 200.0);
  fopt.rtol = cfg.get_double("flow", "rtol", 1e-9);

  const FlowResult fr = integrate_flow(m, compactify(start), fopt);
  std::vector<std::vector<std::string>> rows;
  for (const FlowSample& smp : fr.trajectory) {
    rows.push_back({detail::fmt(smp.tau), detail::fmt(smp.s_H), to_string(smp.point.base.chart),
                    smp.point.fiber_chart == FiberChart::ZetaLarge ? "zeta" : "xi",
                    std::to_string(smp.point.sign), detail::fmt(smp.point.base.rho),
                    detail::fmt(smp.point.base.x), detail::fmt(smp.point.rho_inf),
                    detail::fmt(smp.point.hat1), detail::fmt(smp.point.eta_hat.norm()),
                    detail::fmt(smp.field_norm), detail::fmt(smp.symbol_rep)});
  }
  res.files.push_back(detail::emit_table(
      opt, "flow_trace",
      {"tau", "s_H", "chart", "fiber_chart", "sign", "rho", "x", "rho_inf", "hat1",
       "eta_hat_norm", "field_norm", "symbol"},
      rows));
  Json sum = Json::object();
  sum.set("classification", to_string(fr.classification));
  sum.set("max_symbol_drift", fr.max_symbol_drift);
  sum.set("chart_switches", fr.chart_switches);
  sum.set("steps", fr.trajectory.size());
  res.files.push_back(detail::emit_json(opt, "flow_summary", std::move(sum)));
  res.summary = "flow trace: " + to_string(fr.classification);
  return res;
}

/// ---- experiment: portrait ------------------------------------------------

inline RunResult run_portrait(const Config& cfg, const RunOptions& opt, std::mt19937_64&) {
  const MetricSpec m = detail::metric_from_config(cfg);
  const Face face = detail::face_from_string(cfg.get_string("portrait", "chart", "near_iplus"));
  const int n_rho = static_cast<int>(cfg.get_int("portrait", "rho_points", 5));
  const int n_dir = static_cast<int>(cfg.get_int("portrait", "direction_points", 24));
  const bool backward = cfg.get_int("portrait", "backward", 0) != 0;

  // Start grid on Sigma^+ over one fiber of null infinity.
  std::vector<PhasePoint> starts;
  for (int i = 0; i < n_rho; ++i) {
    const double rho = 0.08 + 0.6 * i / std::max(1, n_rho - 1);
    for (int kdir = 0; kdir < n_dir; ++kdir) {
      PhasePoint p;
      p.base.chart = ChartId{face, cfg.get_double("portrait", "T", 0.0)};
      p.base.rho = rho;
      p.base.x = 0.0;
      p.base.y = SpherePoint{0, Eigen::VectorXd::Zero(m.n - 1)};
      p.eta = Eigen::VectorXd::Zero(m.n - 1);
      const double frac = (kdir + 0.5) / n_dir;
      if (face == Face::NearIplus) {
        // zeta > 0, xi in (0, 2 zeta) on the characteristic set.
        p.zeta = 1.0;
        p.xi = 2.0 * frac;
        const double ek2 = 0.5 * p.xi * (2.0 * p.zeta - p.xi);
        p.eta(0) = 2.0 * std::sqrt(std::max(0.0, ek2));
      } else {
        // xi - zeta > 0 branch, zeta spanning both signs.
        p.zeta = -1.0 + 2.0 * frac;
        const double ek = 0.5;
        p.xi = p.zeta + std::sqrt(p.zeta * p.zeta + 2.0 * ek * ek);
        p.eta(0) = 2.0 * ek;
      }
      starts.push_back(p);
    }
  }

  std::vector<FlowClass> classes(starts.size());
  std::vector<double> drifts(starts.size());
  FlowOptions fopt;
  fopt.forward = !backward;
  parallel_for(starts.size(), opt.threads, [&](std::size_t k) {
    const FlowResult fr = integrate_flow(m, compactify(starts[k]), fopt);
    classes[k] = classify_asymptotics(fr);
    drifts[k] = fr.max_symbol_drift;
  });

  std::vector<std::vector<std::string>> rows;
  std::map<std::string, int> counts;
  double max_drift = 0.0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const PhasePoint& p = starts[k];
    rows.push_back({detail::fmt(p.base.rho), detail::fmt(p.zeta), detail::fmt(p.xi),
                    detail::fmt(p.eta.norm()), to_string(classes[k]), detail::fmt(drifts[k])});
    counts[to_string(classes[k])]++;
    max_drift = std::max(max_drift, drifts[k]);
  }
  RunResult res;
  res.files.push_back(detail::emit_table(
      opt, "portrait", {"rho", "zeta", "xi", "eta_norm", "classification", "symbol_drift"}, rows));
  Json sum = Json::object();
  Json cj = Json::object();
  for (const auto& [name, cnt] : counts) cj.set(name, cnt);
  sum.set("counts", std::move(cj));
  sum.set("starts", starts.size());
  sum.set("max_symbol_drift", max_drift);
  sum.set("direction", backward ? "backward" : "forward");
  res.files.push_back(detail::emit_json(opt, "portrait_summary", std::move(sum)));
  res.summary = "portrait: " + std::to_string(starts.size()) + " starts";
  return res;
}

/// ---- experiment: thresholds ----------------------------------------------

inline RunResult run_thresholds(const Config& cfg, const RunOptions& opt, std::mt19937_64&) {
  const TheoremTag tag = parse_theorem_tag(cfg.get_string("thresholds", "tag", "ThmGlobal"));
  ThresholdInput base;
  base.s = cfg.get_double("thresholds", "s", 1.0);
  base.s0 = cfg.get_double("thresholds", "s0", 0.75);
  base.alphaPlus = cfg.get_double("thresholds", "alpha_plus", -1.5);
  base.p1bar = cfg.get_double("thresholds", "p1bar", 0.0);
  base.p1bar_plus = cfg.get_double("thresholds", "p1bar_plus", 0.0);
  base.im_lambda = cfg.get_double("thresholds", "im_lambda", 0.0);
  base.gammaI = cfg.get_double("thresholds", "gammaI", 0.5);
  base.n = static_cast<int>(cfg.get_int("metric", "n", 3));
  const std::vector<double> a0 =
      cfg.has("thresholds", "alpha0_grid") ? cfg.get_list("thresholds", "alpha0_grid")
                                           : std::vector<double>{cfg.get_double("thresholds", "alpha0", 0.0)};
  const std::vector<double> aI =
      cfg.has("thresholds", "alphaI_grid") ? cfg.get_list("thresholds", "alphaI_grid")
                                           : std::vector<double>{cfg.get_double("thresholds", "alphaI", -0.75)};

  std::vector<std::vector<std::string>> rows;
  int pass_count = 0, total = 0;
  for (double A0 : a0) {
    for (double AI : aI) {
      ThresholdInput in = base;
      in.alpha0 = A0;
      in.alphaI = AI;
      const ThresholdReport rep = threshold_evaluate(in, tag);
      for (const auto& r : rep.records) {
        rows.push_back({theorem_tag_name(tag), detail::fmt(A0), detail::fmt(AI),
                        detail::fmt(base.alphaPlus), detail::fmt(base.s), r.name,
                        detail::fmt(r.lhs), detail::fmt(r.rhs), r.pass ? "pass" : "fail"});
      }
      ++total;
      if (rep.all_pass) ++pass_count;
    }
  }
  RunResult res;
  res.files.push_back(detail::emit_table(
      opt, "thresholds",
      {"tag", "alpha0", "alphaI", "alpha_plus", "s", "inequality", "lhs", "rhs", "verdict"}, rows));
  Json sum = Json::object();
  sum.set("tag", theorem_tag_name(tag));
  sum.set("weight_pairs", total);
  sum.set("all_pass_pairs", pass_count);
  res.files.push_back(detail::emit_json(opt, "thresholds_summary", std::move(sum)));
  res.summary = "thresholds: " + std::to_string(pass_count) + "/" + std::to_string(total) +
                " weight pairs pass";
  return res;
}

/// ---- experiment: multiplier ------------------------------------------------

inline RunResult run_multiplier(const Config& cfg, const RunOptions& opt, std::mt19937_64&) {
  const int n = static_cast<int>(cfg.get_int("metric", "n", 3));
  const double p1 = cfg.get_double("multiplier", "p1", 0.0);
  const std::vector<double> a0 = cfg.get_list("multiplier", "alpha0_grid");
  const std::vector<double> aI = cfg.get_list("multiplier", "alphaI_grid");

  std::vector<std::vector<std::string>> rows;
  for (double A0 : a0) {
    for (double AI : aI) {
      const PositivityResult pr = positivity_scan(n, A0, AI, p1);
      rows.push_back({detail::fmt(A0), detail::fmt(AI), detail::fmt(p1),
                      pr.positive ? "positive" : "indefinite", detail::fmt(pr.best_c),
                      detail::fmt(pr.best_min_eig)});
    }
  }
  RunResult res;
  res.files.push_back(detail::emit_table(
      opt, "positivity", {"alpha0", "alphaI", "p1", "verdict", "best_c", "best_min_eig"}, rows));

  // Minor trace/determinant Richardson data at the configured shifted weights.
  const double ca0 = cfg.get_double("multiplier", "check_alpha0", 1.0);
  const double caI = cfg.get_double("multiplier", "check_alphaI", -0.25);
  const double lambda = cfg.get_double("multiplier", "lambda", 0.0);
  const double cc = cfg.get_double("multiplier", "c", 0.01);
  MultiplierField mult;
  mult.chart = ChartId{Face::NearI0, 0.0};
  mult.check_alpha0 = ca0;
  mult.check_alphaI = caI;
  mult.c = cc;
  const Eigen::MatrixXd k_dual = Eigen::MatrixXd::Identity(n - 1, n - 1);
  const MinorCoefficients mc = minor_coefficients_model(n, k_dual, mult, lambda, cc);
  const MinorTraceDet td = minor_trace_det(deformation_tensor_model(n, k_dual, mult, lambda));
  Json minor = Json::object();
  minor.set("check_alpha0", ca0);
  minor.set("check_alphaI", caI);
  minor.set("lambda", lambda);
  minor.set("c", cc);
  minor.set("trace", td.trace);
  minor.set("det", td.det);
  minor.set("trace_limit_richardson", mc.trace_limit);
  minor.set("det_slope_richardson", mc.det_slope);
  minor.set("trace_limit_expected", -10.0 * caI + 10.0 * lambda);
  minor.set("det_slope_expected", 8.0 * (caI - lambda) * (caI - ca0));
  res.files.push_back(detail::emit_json(opt, "minor_coefficients", std::move(minor)));
  res.summary = "multiplier: " + std::to_string(rows.size()) + " weight pairs scanned";
  return res;
}

/// ---- experiment: solve -----------------------------------------------------

inline RunResult run_solve(const Config& cfg, const RunOptions& opt, std::mt19937_64&) {
  // Optional threshold gate.
  if (cfg.has("gate", "tag")) {
    ThresholdInput in;
    in.s = cfg.get_double("gate", "s", 1.0);
    in.s0 = cfg.get_double("gate", "s0", 0.75);
    in.alpha0 = cfg.get_double("gate", "alpha0", 0.0);
    in.alphaI = cfg.get_double("gate", "alphaI", -0.75);
    in.alphaPlus = cfg.get_double("gate", "alpha_plus", -1.5);
    in.p1bar = cfg.get_double("gate", "p1bar", 0.0);
    require_thresholds(threshold_evaluate(in, parse_theorem_tag(cfg.get_string("gate", "tag"))));
  }

  SolveSpec spec;
  spec.n = static_cast<int>(cfg.get_int("metric", "n", 3));
  spec.p1 = cfg.get_double("metric", "p1", 0.0);
  spec.op = (cfg.get_string("metric", "kind", "minkowski") == "model_p1")
                ? OperatorVariant::ModelP1
                : OperatorVariant::Wave;
  spec.forcing.ell = static_cast<int>(cfg.get_int("forcing", "ell", 0));
  spec.forcing.amplitude = cfg.get_double("forcing", "amplitude", 1.0);
  spec.forcing.t0 = cfg.get_double("forcing", "t0", 0.0);
  spec.forcing.t1 = cfg.get_double("forcing", "t1", 2.0);
  spec.forcing.r0 = cfg.get_double("forcing", "r0", 1.0);
  spec.forcing.r1 = cfg.get_double("forcing", "r1", 3.0);
  spec.forcing.bump_order = static_cast<int>(cfg.get_int("forcing", "bump_order", 0));
  spec.grid = NullGrid::make(cfg.get_double("grid", "u_lo"), cfg.get_double("grid", "u_hi"),
                             cfg.get_double("grid", "v_lo"), cfg.get_double("grid", "v_hi"),
                             cfg.get_double("grid", "h"));
  const SolutionField sol = solve_spherical_forward(spec);

  RunResult res;
  // Subsampled snapshot of the reduced field.
  {
    const int stride = std::max(1, static_cast<int>(cfg.get_int("output", "stride", 16)));
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < spec.grid.nu; i += stride)
      for (int j = 0; j < spec.grid.nv; j += stride) {
        if (spec.grid.r(i, j) <= 0.0) continue;
        rows.push_back({detail::fmt(spec.grid.u(i)), detail::fmt(spec.grid.v(j)),
                        detail::fmt(sol.at(i, j))});
      }
    res.files.push_back(detail::emit_table(opt, "solution_snapshot", {"u_ret", "v_adv", "w"}, rows));
  }

  Json sum = Json::object();
  sum.set("n", spec.n);
  sum.set("ell", spec.forcing.ell);
  sum.set("p1", spec.p1);
  sum.set("residual_same_grid", operator_residual(sol, 1));
  sum.set("residual_half_resolution", operator_residual(sol, 2));

  // Decay fits along configured rays.
  if (cfg.has("decay", "rays")) {
    Json fits;
    for (double c : cfg.get_list("decay", "rays")) {
      DecayCurve curve;
      curve.kind = DecayCurve::Kind::OutgoingRay;
      curve.c = c;
      DecayAbscissa absc;
      const std::string akind = cfg.get_string("decay", "abscissa", "radius");
      absc.kind = (akind == "xI") ? DecayAbscissa::Kind::XI : DecayAbscissa::Kind::Radius;
      absc.T = cfg.get_double("decay", "T", 0.0);
      const DecayFit f =
          decay_fit(sol, curve, absc, cfg.get_double("decay", "r_min", 8.0));
      Json row = Json::object();
      row.set("ray", c);
      row.set("abscissa", akind);
      row.set("exponent", f.exponent);
      row.set("stderr", f.stderr_exponent);
      row.set("samples", f.samples);
      fits.push_back(std::move(row));
    }
    sum.set("decay_fits", std::move(fits));
  }

  // Weighted norms.
  Region region;
  const std::string rk = cfg.get_string("norm", "region", "exterior");
  region.kind = (rk == "forward_cone") ? Region::Kind::ForwardCone
               : (rk == "near_iplus") ? Region::Kind::NearIplus
                                      : Region::Kind::Exterior;
  region.T = cfg.get_double("norm", "T", 0.0);
  if (cfg.has("norm", "alphaI")) {
    NormSpec nspec;
    nspec.s = static_cast<int>(cfg.get_int("norm", "s", 0));
    nspec.alpha0 = cfg.get_double("norm", "alpha0", 0.0);
    nspec.alphaI = cfg.get_double("norm", "alphaI");
    nspec.alphaPlus = cfg.get_double("norm", "alpha_plus", 0.0);
    nspec.family = cfg.get_string("norm", "family", "edge_b") == "b" ? NormSpec::Family::B
                                                                     : NormSpec::Family::EdgeB;
    const NormValue nv = weighted_norm(sol, nspec, region);
    Json nj = Json::object();
    nj.set("value", nv.value);
    nj.set("finite", nv.finite);
    Json ex;
    for (double e : nv.exhaustion) ex.push_back(e);
    nj.set("exhaustion", std::move(ex));
    sum.set("norm", std::move(nj));
  }

  // Sharpness scan over the null-infinity weight (streaming march; v_deep
  // extends the exhaustion range beyond the stored grid when applicable).
  if (cfg.has("sharpness", "alphaI_grid")) {
    const SharpnessReport rep = sharpness_scan_streaming(
        spec, cfg.get_list("sharpness", "alphaI_grid"),
        cfg.get_double("sharpness", "alpha0", -1.0), region,
        cfg.get_double("sharpness", "v_deep", 0.0));
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : rep.rows)
      rows.push_back({detail::fmt(row.alphaI), row.finite ? "finite" : "divergent",
                      detail::fmt(row.norm_value), detail::fmt(row.last_ratio)});
    res.files.push_back(detail::emit_table(
        opt, "sharpness", {"alphaI", "verdict", "norm_value", "last_ratio"}, rows));
    Json sj = Json::object();
    sj.set("transition_found", rep.transition_found);
    sj.set("bracket_lo", rep.bracket_lo);
    sj.set("bracket_hi", rep.bracket_hi);
    sum.set("sharpness", std::move(sj));
  }

  res.files.push_back(detail::emit_json(opt, "solve_summary", std::move(sum)));
  res.summary = "solve: grid " + std::to_string(spec.grid.nu) + "x" + std::to_string(spec.grid.nv);
  return res;
}

/// ---- experiment: normop ----------------------------------------------------

inline RunResult run_normop(const Config& cfg, const RunOptions& opt, std::mt19937_64& rng);

/// ---- experiment: mellin ----------------------------------------------------

inline RunResult run_mellin(const Config& cfg, const RunOptions& opt, std::mt19937_64& rng) {
  MellinGrid g;
  g.npts = static_cast<int>(cfg.get_int("mellin", "points", 2048));
  g.rho_min = std::exp(cfg.get_double("mellin", "log_rho_min", -16.0));
  g.rho_max = std::exp(cfg.get_double("mellin", "log_rho_max", 12.0));
  const std::vector<double> gammas =
      cfg.has("mellin", "gamma_grid") ? cfg.get_list("mellin", "gamma_grid")
                                      : std::vector<double>{-1.0, 0.0, 1.0};
  const int trials = static_cast<int>(cfg.get_int("mellin", "trials", 20));

  std::vector<std::vector<std::string>> rows;
  double worst_rt = 0.0, worst_iso = 0.0;
  for (double gamma : gammas) {
    g.gamma = gamma;
    for (int k = 0; k < trials; ++k) {
      const double c = uniform(rng, -4.0, 2.0);
      const double w = uniform(rng, 0.6, 1.5);
      const double tilt = uniform(rng, -3.0, 3.0);
      std::vector<std::complex<double>> u(g.npts);
      for (int j = 0; j < g.npts; ++j) {
        const double th = g.theta(j);
        u[j] = std::pow(g.rho(j), gamma) * std::exp(-std::pow((th - c) / w, 2)) *
               std::complex<double>(std::cos(tilt * th), std::sin(tilt * th));
      }
      const auto M = mellin_forward(g, u);
      const auto back = mellin_inverse(g, M);
      double rt = 0.0, scale = 0.0;
      for (int j = 0; j < g.npts; ++j) {
        const double wj = std::pow(g.rho(j), -gamma);
        rt = std::max(rt, wj * std::abs(back[j] - u[j]));
        scale = std::max(scale, wj * std::abs(u[j]));
      }
      rt /= scale;
      const double a = mellin_weighted_norm_sq(g, u);
      const double b = mellin_line_norm_sq(g, M);
      const double iso = std::abs(a - b) / a;
      rows.push_back({detail::fmt(gamma), std::to_string(k), detail::fmt(rt), detail::fmt(iso)});
      worst_rt = std::max(worst_rt, rt);
      worst_iso = std::max(worst_iso, iso);
    }
  }
  RunResult res;
  res.files.push_back(detail::emit_table(opt, "mellin_check",
                                         {"gamma", "trial", "roundtrip_err", "isometry_err"}, rows));
  Json sum = Json::object();
  sum.set("max_roundtrip_err", worst_rt);
  sum.set("max_isometry_err", worst_iso);
  res.files.push_back(detail::emit_json(opt, "mellin_summary", std::move(sum)));
  res.summary = "mellin: max roundtrip " + detail::fmt(worst_rt) + ", max isometry " +
                detail::fmt(worst_iso);
  return res;
}

inline RunResult run_normop(const Config& cfg, const RunOptions& opt, std::mt19937_64& rng) {
  const std::string task = cfg.get_string("normop", "task", "solve");
  if (task == "mellin-check") return run_mellin(cfg, opt, rng);

  const int n = static_cast<int>(cfg.get_int("metric", "n", 3));
  const double p1p = cfg.get_double("normop", "p1_plus", 0.0);

  if (task == "spectrum") {
    const cplx lambda(cfg.get_double("normop", "re_lambda", 0.5),
                      cfg.get_double("normop", "im_lambda", 0.0));
    const ReducedNormalOp op = ReducedNormalOp::make(n, p1p, lambda);
    const BoundarySpectrum bs = boundary_spectrum(op);
    Json out = Json::object();
    out.set("q1", op.q1);
    Json ind, exps;
    for (const auto& z : bs.indicial) {
      Json zz = Json::object();
      zz.set("re", z.real());
      zz.set("im", z.imag());
      ind.push_back(std::move(zz));
    }
    for (const auto& z : bs.exponents) {
      Json zz = Json::object();
      zz.set("re", z.real());
      zz.set("im", z.imag());
      exps.push_back(std::move(zz));
    }
    out.set("indicial", std::move(ind));
    out.set("exponents", std::move(exps));
    out.set("coincident", bs.coincident);
    RunResult res;
    res.files.push_back(detail::emit_json(opt, "normop_spectrum", std::move(out)));
    res.summary = "normop spectrum: q1 = " + detail::fmt(op.q1);
    return res;
  }

  if (task != "solve") throw ConfigError("[normop] task must be spectrum, solve or mellin-check");
  HalfLineGrid g;
  g.npts = static_cast<int>(cfg.get_int("normop", "points", 1601));
  const double re_l = cfg.get_double("normop", "re_lambda", 0.3);
  const std::vector<double> im_l = cfg.has("normop", "im_lambda_grid")
                                       ? cfg.get_list("normop", "im_lambda_grid")
                                       : std::vector<double>{cfg.get_double("normop", "im_lambda", -0.1)};
  const std::vector<double> gammas = cfg.get_list("normop", "gammaI_grid");

  struct Cell {
    double im_lambda, gammaI, sigma;
    bool inside;
  };
  std::vector<Cell> cells;
  for (double im : im_l)
    for (double gam : gammas) cells.push_back({im, gam, 0.0, false});
  parallel_for(cells.size(), opt.threads, [&](std::size_t k) {
    Cell& c = cells[k];
    const ReducedNormalOp op = ReducedNormalOp::make(n, p1p, cplx(re_l, c.im_lambda));
    c.inside = (-c.im_lambda < c.gammaI && c.gammaI < op.q1);
    if (c.inside) c.sigma = smallest_singular_value(op, c.gammaI, g);
  });
  std::vector<std::vector<std::string>> rows;
  for (const Cell& c : cells)
    rows.push_back({detail::fmt(re_l), detail::fmt(c.im_lambda), detail::fmt(c.gammaI),
                    c.inside ? "inside" : "outside", detail::fmt(c.sigma)});
  RunResult res;
  res.files.push_back(detail::emit_table(
      opt, "normop_singular_values", {"re_lambda", "im_lambda", "gammaI", "window", "sigma_min"},
      rows));
  res.summary = "normop solve: " + std::to_string(cells.size()) + " grid cells";
  return res;
}

/// Dispatch a parsed experiment configuration.
inline RunResult run_experiment(const Config& cfg, RunOptions opt) {
  const std::string kind = cfg.get_string("experiment", "kind");
  const long seed =
      opt.seed_override ? opt.seed : cfg.get_int("experiment", "seed", 20240811);
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));

  if (kind == "chart") return run_chart(cfg, opt, rng);
  if (kind == "flow") return run_flow(cfg, opt, rng);
  if (kind == "portrait") return run_portrait(cfg, opt, rng);
  if (kind == "thresholds") return run_thresholds(cfg, opt, rng);
  if (kind == "multiplier") return run_multiplier(cfg, opt, rng);
  if (kind == "solve") return run_solve(cfg, opt, rng);
  if (kind == "normop") return run_normop(cfg, opt, rng);
  if (kind == "mellin") return run_mellin(cfg, opt, rng);
  throw ConfigError("[experiment] kind: unknown experiment '" + kind + "'");
}

}  // namespace eblab
