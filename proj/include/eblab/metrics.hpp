#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "eblab/charts.hpp"
#include "eblab/errors.hpp"

namespace eblab {

/// Smooth compactly supported bump, equal to 1 at s = 0, supported in |s| < 1.
inline double smooth_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

/// One multiplicative factor of a perturbation coefficient: a power of one of
/// the boundary defining functions or a smooth bump in one of them.
struct ExprFactor {
  enum class Var { Rho0, XI, RhoPlus };
  enum class Kind { Power, Bump };
  Kind kind = Kind::Power;
  Var var = Var::XI;
  double power = 1.0;   // for Kind::Power
  double center = 0.0;  // for Kind::Bump
  double width = 1.0;
};

/// Sum of products of factors with numeric coefficients; the closed grammar
/// for metric perturbation coefficients.
struct Expr {
  struct Term {
    double coeff = 1.0;
    std::vector<ExprFactor> factors;
  };
  std::vector<Term> terms;

  double eval(double rho0, double x, double rhop) const {
    double sum = 0.0;
    for (const auto& t : terms) {
      double v = t.coeff;
      for (const auto& f : t.factors) {
        const double arg = (f.var == ExprFactor::Var::Rho0) ? rho0
                           : (f.var == ExprFactor::Var::XI) ? x
                                                            : rhop;
        if (f.kind == ExprFactor::Kind::Power) {
          v *= std::pow(arg, f.power);
        } else {
          v *= smooth_bump((arg - f.center) / f.width);
        }
      }
      sum += v;
    }
    return sum;
  }
};

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline bool match_word(const std::string& s, std::size_t& i, const char* word) {
  std::size_t j = i, k = 0;
  while (word[k] && j < s.size() && s[j] == word[k]) ++j, ++k;
  if (word[k]) return false;
  i = j;
  return true;
}

inline double parse_number(const std::string& s, std::size_t& i) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s.substr(i), &used);
  } catch (const std::exception&) {
    throw ConfigError("expression: expected a number at '" + s.substr(i) + "'");
  }
  i += used;
  return v;
}

}  // namespace detail

/// Parse the closed coefficient grammar: terms joined by '+'/'-', factors by
/// '*'; factor = number | rho0^p | xI^p | rhop^p | bump(var,center,width).
inline Expr parse_expr(const std::string& src) {
  using detail::skip_ws;
  Expr out;
  std::size_t i = 0;
  skip_ws(src, i);
  if (i >= src.size()) throw ConfigError("expression: empty");
  double sign = 1.0;
  if (src[i] == '+' || src[i] == '-') {
    sign = (src[i] == '-') ? -1.0 : 1.0;
    ++i;
  }
  while (i < src.size()) {
    Expr::Term term;
    term.coeff = sign;
    for (;;) {
      skip_ws(src, i);
      auto parse_var = [&](ExprFactor::Var* v) -> bool {
        if (detail::match_word(src, i, "rho0")) { *v = ExprFactor::Var::Rho0; return true; }
        if (detail::match_word(src, i, "rhop")) { *v = ExprFactor::Var::RhoPlus; return true; }
        if (detail::match_word(src, i, "xI")) { *v = ExprFactor::Var::XI; return true; }
        return false;
      };
      ExprFactor f;
      if (detail::match_word(src, i, "bump(")) {
        f.kind = ExprFactor::Kind::Bump;
        skip_ws(src, i);
        if (!parse_var(&f.var)) throw ConfigError("expression: bump() needs rho0|xI|rhop");
        skip_ws(src, i);
        if (i >= src.size() || src[i] != ',') throw ConfigError("expression: bump missing ','");
        ++i;
        f.center = detail::parse_number(src, i);
        skip_ws(src, i);
        if (i >= src.size() || src[i] != ',') throw ConfigError("expression: bump missing ','");
        ++i;
        f.width = detail::parse_number(src, i);
        skip_ws(src, i);
        if (i >= src.size() || src[i] != ')') throw ConfigError("expression: bump missing ')'");
        ++i;
        term.factors.push_back(f);
      } else if (parse_var(&f.var)) {
        f.kind = ExprFactor::Kind::Power;
        f.power = 1.0;
        skip_ws(src, i);
        if (i < src.size() && src[i] == '^') {
          ++i;
          skip_ws(src, i);
          f.power = detail::parse_number(src, i);
        }
        term.factors.push_back(f);
      } else {
        term.coeff *= detail::parse_number(src, i);
      }
      skip_ws(src, i);
      if (i < src.size() && src[i] == '*') {
        ++i;
        continue;
      }
      break;
    }
    out.terms.push_back(term);
    skip_ws(src, i);
    if (i >= src.size()) break;
    if (src[i] == '+' || src[i] == '-') {
      sign = (src[i] == '-') ? -1.0 : 1.0;
      ++i;
    } else {
      throw ConfigError("expression: expected '+' or '-' at '" + src.substr(i) + "'");
    }
  }
  return out;
}

/// Which symmetric 2-tensor slot a perturbation coefficient multiplies, in
/// the double-null frame adapted to null infinity (x0 = t+r, x1 = t-r):
///   D00: xI^2 dx0 (x) dx0        D01: dx0 (x)_s dx1
///   D0S: xI dx0 (x)_s r dw       D11: xI^-2 dx1 (x) dx1
///   D1S: xI^-1 dx1 (x)_s r dw    DSS: r dw (x) r dw (spherical trace part)
enum class PerturbSlot { D00, D01, D0S, D11, D1S, DSS };

inline PerturbSlot parse_slot(const std::string& name) {
  if (name == "00") return PerturbSlot::D00;
  if (name == "01") return PerturbSlot::D01;
  if (name == "0s") return PerturbSlot::D0S;
  if (name == "11") return PerturbSlot::D11;
  if (name == "1s") return PerturbSlot::D1S;
  if (name == "ss") return PerturbSlot::DSS;
  throw ConfigError("unknown perturbation slot '" + name + "' (want 00|01|0s|11|1s|ss)");
}

inline std::string slot_name(PerturbSlot s) {
  switch (s) {
    case PerturbSlot::D00: return "00";
    case PerturbSlot::D01: return "01";
    case PerturbSlot::D0S: return "0s";
    case PerturbSlot::D11: return "11";
    case PerturbSlot::D1S: return "1s";
    case PerturbSlot::DSS: return "ss";
  }
  return "?";
}

struct PerturbationTerm {
  PerturbSlot slot = PerturbSlot::D01;
  Expr coeff;
};

/// Background metric selector with declared decay orders.
struct MetricSpec {
  enum class Kind { Minkowski, Schwarzschild, ModelP1, Perturbation };
  Kind kind = Kind::Minkowski;
  int n = 3;           // space dimension, >= 2
  double mass = 0.0;   // Schwarzschild
  double p1 = 0.0;     // ModelP1 subprincipal constant
  std::vector<PerturbationTerm> terms;
  double ell0 = 1.0, ellI = 0.5, ellp = 1.0;  // declared decay orders

  static MetricSpec minkowski(int n) { return MetricSpec{Kind::Minkowski, n, 0.0, 0.0, {}, 1, .5, 1}; }
  static MetricSpec schwarzschild(int n, double m) {
    return MetricSpec{Kind::Schwarzschild, n, m, 0.0, {}, 1, .5, 1};
  }
  static MetricSpec model_p1(int n, double p1) {
    return MetricSpec{Kind::ModelP1, n, 0.0, p1, {}, 1, .5, 1};
  }
  /// The subprincipal constant of the associated model wave operator.
  double operator_p1() const { return kind == Kind::ModelP1 ? p1 : 0.0; }
};

namespace detail {

/// Chart bookkeeping: eps = +1 on NearI0, -1 on NearIplus; in either chart the
/// inactive defining function is frozen to 1.
inline double chart_eps(const ChartId& c) { return c.face == Face::NearI0 ? 1.0 : -1.0; }

inline void chart_rhos(const ChartPoint& c, double& rho0, double& rhop) {
  rho0 = (c.chart.face == Face::NearI0) ? c.rho : 1.0;
  rhop = (c.chart.face == Face::NearIplus) ? c.rho : 1.0;
}

}  // namespace detail

/// Rescaled covariant metric rho0^2 xI^2 rho+^2 g as a matrix in the edge-b
/// coframe, component order (d rho/rho, d x/x, d y^a / x). Smooth up to the
/// boundary faces; the sphere block uses the stereographic coordinate basis.
inline Eigen::MatrixXd metric_eb(const MetricSpec& m, const ChartPoint& c) {
  const int n = m.n;
  const int d = n - 1;
  if (c.y.dim() != d) throw DomainError("metric_eb: sphere point dimension mismatch");
  const double x = c.x;
  const double eps = detail::chart_eps(c.chart);

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n + 1);
  // Minkowski part, exact in chart coordinates:
  //   NearI0:    (2 - x^2)(drho/rho)^2 + 4 drho/rho (x)_s dx/x + k(dy/x)
  //   NearIplus: (-2 - x^2)(drho/rho)^2 - 4 drho/rho (x)_s dx/x + k(dy/x)
  g(0, 0) = eps * 2.0 - x * x;
  g(0, 1) = g(1, 0) = eps * 2.0;
  g.block(2, 2, d, d) = sphere_metric(c.y);

  if (m.kind == MetricSpec::Kind::Schwarzschild) {
    // Remainder (2m/r) dx0 (x)_s dx1 in eb-coframe components, closed form:
    // C_rr = 2 m rho x^2 (x^2 - 2 eps), C_rx = -4 eps m rho x^2.
    const double w = c.rho * x * x;  // rho * x^2 = 1/r in-chart
    g(0, 0) += 2.0 * m.mass * w * (x * x - 2.0 * eps);
    g(0, 1) += -4.0 * eps * m.mass * w;
    g(1, 0) = g(0, 1);
  } else if (m.kind == MetricSpec::Kind::Perturbation) {
    double rho0, rhop;
    detail::chart_rhos(c, rho0, rhop);
    // Weighted double-null coframe legs, all smooth up to the boundary:
    //   D0 = rho x^2 dx0 = (eps x^2 - 2) e_rho - 4 e_x
    //   D1 = rho dx1     = eps e_rho
    //   E^a = rho x (r dw^a) = conformal * e_a   (g-orthonormal sphere leg)
    Eigen::VectorXd D0 = Eigen::VectorXd::Zero(n + 1);
    D0(0) = eps * x * x - 2.0;
    D0(1) = -4.0;
    Eigen::VectorXd D1 = Eigen::VectorXd::Zero(n + 1);
    D1(0) = eps;
    const double cf = sphere_conformal_factor(c.y.w);
    auto Esph = [&](int a) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
      e(2 + a) = cf;
      return e;
    };
    auto sym = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return ((a * b.transpose() + b * a.transpose()) / 2.0).eval();
    };
    for (const auto& term : m.terms) {
      const double co = term.coeff.eval(rho0, x, rhop);
      if (co == 0.0) continue;
      switch (term.slot) {
        case PerturbSlot::D00: g += co * sym(D0, D0); break;
        case PerturbSlot::D01: g += co * sym(D0, D1); break;
        case PerturbSlot::D0S: g += co * sym(D0, Esph(0)); break;
        case PerturbSlot::D11: g += co * sym(D1, D1); break;
        case PerturbSlot::D1S: g += co * sym(D1, Esph(0)); break;
        case PerturbSlot::DSS: {
          for (int a = 0; a < d; ++a) g += co * sym(Esph(a), Esph(a));
          break;
        }
      }
    }
  }
  return g;
}

/// Dual rescaled metric G_eb = rho0^-2 xI^-2 rho+^-2 g^-1 as a quadratic form
/// on edge-b covectors, component order (zeta, xi, eta_a).
inline Eigen::MatrixXd dual_metric_eb(const MetricSpec& m, const ChartPoint& c) {
  const int n = m.n;
  const double x = c.x;
  const double eps = detail::chart_eps(c.chart);
  if (m.kind == MetricSpec::Kind::Minkowski || m.kind == MetricSpec::Kind::ModelP1) {
    // Exact closed form: eps * xi(xi - 2 zeta)/(-2 eps...) -- assembled directly.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + 1, n + 1);
    G(0, 1) = G(1, 0) = eps * 0.5;
    G(1, 1) = -eps * 0.5 + 0.25 * x * x;
    G.block(2, 2, n - 1, n - 1) = sphere_dual_metric(c.y);
    return G;
  }
  const Eigen::MatrixXd g = metric_eb(m, c);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw DomainError("dual_metric_eb: degenerate rescaled metric");
  return lu.inverse();
}

/// Signature check: returns true if the quadratic form has one negative and
/// n positive eigenvalues.
inline bool is_lorentzian(const Eigen::MatrixXd& q, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  int neg = 0, pos = 0;
  for (int i = 0; i < q.rows(); ++i) {
    if (es.eigenvalues()(i) < -tol) ++neg;
    if (es.eigenvalues()(i) > tol) ++pos;
  }
  return neg == 1 && pos == q.rows() - 1;
}

}  // namespace eblab
