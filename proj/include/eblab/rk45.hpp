#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "eblab/errors.hpp"

namespace eblab {

/// Embedded Dormand-Prince 5(4) step with PI-free elementary step control.
struct Rk45Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 1.0;
};

struct Rk45Stepper {
  using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  Rhs rhs;
  Rk45Options opt;
  double h;

  explicit Rk45Stepper(Rhs f, Rk45Options o = {}) : rhs(std::move(f)), opt(o), h(o.h_init) {}

  /// Advance y by one accepted adaptive step; returns the step size taken.
  double step(Eigen::VectorXd& y) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    for (;;) {
      if (h < opt.h_min) throw StepFailure("rk45: step size underflow");
      const Eigen::VectorXd k1 = rhs(y);
      const Eigen::VectorXd k2 = rhs(y + h * (a21 * k1));
      const Eigen::VectorXd k3 = rhs(y + h * (a31 * k1 + a32 * k2));
      const Eigen::VectorXd k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXd k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXd k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Eigen::VectorXd k7 = rhs(y5);
      const Eigen::VectorXd err =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double scale = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double s = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
        scale = std::max(scale, std::abs(err(i)) / s);
      }
      if (scale <= 1.0 || h <= opt.h_min * 2.0) {
        const double taken = h;
        const double grow = (scale > 0) ? 0.9 * std::pow(scale, -0.2) : 5.0;
        h = std::min(opt.h_max, h * std::min(5.0, std::max(0.2, grow)));
        y = y5;
        return taken;
      }
      h *= std::max(0.1, 0.9 * std::pow(scale, -0.2));
    }
  }
};

}  // namespace eblab
