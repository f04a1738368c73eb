#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "eblab/charts.hpp"
#include "eblab/util.hpp"

using Catch::Approx;

namespace testutil {

inline eblab::SpherePoint random_sphere_point(std::mt19937_64& rng, int d) {
  eblab::SpherePoint y;
  y.patch = (rng() & 1) ? 1 : 0;
  y.w = Eigen::VectorXd(d);
  for (int a = 0; a < d; ++a) y.w(a) = eblab::uniform(rng, -0.9, 0.9);
  return y;
}

inline eblab::ChartPoint make_point(eblab::Face face, double T, double rho, double x, int d = 2) {
  eblab::ChartPoint c;
  c.chart = eblab::ChartId{face, T};
  c.rho = rho;
  c.x = x;
  c.y = eblab::SpherePoint{0, Eigen::VectorXd::Zero(d)};
  return c;
}

}  // namespace testutil
