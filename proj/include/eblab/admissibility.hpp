#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "eblab/charts.hpp"
#include "eblab/metrics.hpp"
#include "eblab/util.hpp"

namespace eblab {

/// Which boundary face a fit path approaches.
enum class FitPath { ToScri, ToRho0, ToRhoPlus };

inline std::string fit_path_name(FitPath p) {
  switch (p) {
    case FitPath::ToScri: return "xI->0";
    case FitPath::ToRho0: return "rho0->0";
    case FitPath::ToRhoPlus: return "rho+->0";
  }
  return "?";
}

/// Per-component result of the decay-order fit of the rescaled metric
/// remainder along one boundary-approaching path.
struct OrderFitComponent {
  int i = 0, j = 0;
  bool exact_zero = false;  // remainder identically zero along the path
  double exponent = 0.0;
  double residual = 0.0;  // rms residual of the log-log fit, in exponent units
};

struct OrderFitReport {
  FitPath path = FitPath::ToScri;
  std::vector<OrderFitComponent> components;
  double min_exponent = 0.0;  // over non-zero components
  bool all_exact = true;
};

struct OrderFitOptions {
  double coord_hi = 0.3;   // start of the geometric path
  int decades = 3;         // decades of approach to the face
  int points_per_decade = 8;
  double zero_floor = 1e-13;     // |component| below this counts as exactly zero
  double residual_tol = 0.1;     // max rms residual in the fitted exponent
};

/// Least-squares log-log fit of the decay exponents of the components of
/// rho0^2 xI^2 rho+^2 (g - g_Minkowski), in the edge-b coframe, along a
/// geometric path to a boundary face of the chart.
inline OrderFitReport fit_admissibility_orders(const MetricSpec& m, const ChartPoint& base,
                                               FitPath path, const OrderFitOptions& opt = {}) {
  if (opt.points_per_decade < 4) throw FitError("fit_admissibility_orders: need >= 4 samples per decade");
  const bool path_in_rho = (path != FitPath::ToScri);
  if (path == FitPath::ToRho0 && base.chart.face != Face::NearI0)
    throw DomainError("fit_admissibility_orders: rho0 path needs the NearI0 chart");
  if (path == FitPath::ToRhoPlus && base.chart.face != Face::NearIplus)
    throw DomainError("fit_admissibility_orders: rho+ path needs the NearIplus chart");

  const MetricSpec mink = MetricSpec::minkowski(m.n);
  const int nsamp = opt.decades * opt.points_per_decade;
  const int dim = m.n + 1;

  std::vector<double> logc(nsamp);
  std::vector<Eigen::MatrixXd> rem(nsamp);
  for (int k = 0; k < nsamp; ++k) {
    const double c = opt.coord_hi * std::pow(10.0, -static_cast<double>(k) / opt.points_per_decade);
    ChartPoint p = base;
    if (path_in_rho)
      p.rho = c;
    else
      p.x = c;
    logc[k] = std::log(c);
    rem[k] = metric_eb(m, p) - metric_eb(mink, p);
  }

  OrderFitReport rep;
  rep.path = path;
  double min_exp = 1e300;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      OrderFitComponent comp;
      comp.i = i;
      comp.j = j;
      std::vector<double> lx, ly;
      for (int k = 0; k < nsamp; ++k) {
        const double v = std::abs(rem[k](i, j));
        if (v > opt.zero_floor) {
          lx.push_back(logc[k]);
          ly.push_back(std::log(v));
        }
      }
      if (lx.size() < static_cast<std::size_t>(nsamp) / 2) {
        comp.exact_zero = true;
      } else {
        const LineFit f = fit_line(lx, ly);
        comp.exponent = f.slope;
        comp.residual = f.residual_rms;
        if (comp.residual > opt.residual_tol)
          throw FitError("fit_admissibility_orders: exponent fit residual " +
                         std::to_string(comp.residual) + " exceeds tolerance on component (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
        rep.all_exact = false;
        min_exp = std::min(min_exp, comp.exponent);
      }
      rep.components.push_back(comp);
    }
  }
  rep.min_exponent = rep.all_exact ? 0.0 : min_exp;
  return rep;
}

}  // namespace eblab
