#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "eblab/bandmat.hpp"
#include "eblab/errors.hpp"
#include "eblab/util.hpp"

namespace eblab {

using cplx = std::complex<double>;

/// The reduced operator at future timelike infinity on the half line,
///   P = 1/2 (x D_x - 2 i^-1 q1)(x D_x - 2 lambda) + x^2 + p0,
/// with D = -i d/dx, acting on functions of x = xI |eta|.
struct ReducedNormalOp {
  cplx lambda{0.0, 0.0};
  double q1 = 1.0;  // (n-1)/2 + p1_plus, real in the scalar reduction
  double p0 = 0.0;
  int n = 3;

  static ReducedNormalOp make(int n, double p1_plus, cplx lambda, double p0 = 0.0) {
    ReducedNormalOp op;
    op.n = n;
    op.q1 = 0.5 * (n - 1) + p1_plus;
    op.lambda = lambda;
    op.p0 = p0;
    return op;
  }

  cplx lambda_tilde() const { return lambda + cplx(0.0, 1.0) * q1; }
};

/// Boundary spectrum of the x -> 0 normal operator: the indicial values in
/// the Mellin dual variable and the x-power exponents of the homogeneous
/// solutions.
struct BoundarySpectrum {
  std::vector<cplx> indicial;   // {2 lambda, -2 i q1}
  std::vector<cplx> exponents;  // {2 i lambda, 2 q1}
  bool coincident = false;      // double root when 2 lambda = -2 i q1
};

inline BoundarySpectrum boundary_spectrum(const ReducedNormalOp& op, double tol = 1e-12) {
  BoundarySpectrum out;
  const cplx i{0.0, 1.0};
  out.indicial = {2.0 * op.lambda, -2.0 * i * op.q1};
  out.exponents = {2.0 * i * op.lambda, cplx(2.0 * op.q1, 0.0)};
  out.coincident = std::abs(out.indicial[0] - out.indicial[1]) < tol;
  return out;
}

/// Collocation grid on the half line, geometric in x (uniform in log x).
struct HalfLineGrid {
  double x_min = 1e-6;
  double x_max = 40.0;
  int npts = 3501;

  double h() const { return (std::log(x_max) - std::log(x_min)) / (npts - 1); }
  double theta(int i) const { return std::log(x_min) + i * h(); }
  double x(int i) const { return std::exp(theta(i)); }
};

namespace detail {

/// Rows of the 4th-order discretization of c2 w'' + c1 w' + c0(x) w in the
/// log variable, with one-sided stencils near the ends.
inline void fd_row(BandMatrix& A, const HalfLineGrid& g, int i, cplx c2, cplx c1,
                   const std::function<cplx(double)>& c0) {
  const double h = g.h();
  const int N = g.npts;
  int lo = i - 2, np = 5;
  if (i == 1) {
    lo = 0;
    np = 6;
  } else if (i == N - 2) {
    lo = N - 6;
    np = 6;
  }
  std::vector<double> nodes(np);
  for (int k = 0; k < np; ++k) nodes[k] = (lo + k - i) * h;
  const std::vector<double> w2 = fd_weights(0.0, nodes, 2);
  const std::vector<double> w1 = fd_weights(0.0, nodes, 1);
  for (int k = 0; k < np; ++k) A.at(i, lo + k) += c2 * w2[k] + c1 * w1[k];
  A.at(i, i) += c0(g.x(i));
}

}  // namespace detail

/// Discretized, weight-conjugated reduced operator: the matrix acting on
/// w = x^{-2 gammaI} u with the indicial-branch Robin condition at x -> 0
/// and a Dirichlet cap at the scattering end. In the log variable,
///   P_gamma = -1/2 (d - A)(d - B) + x^2 + p0,  A = 2 q1 - 2 gammaI,
///   B = 2 i lambda - 2 gammaI.
inline BandMatrix reduced_matrix(const ReducedNormalOp& op, double gammaI, const HalfLineGrid& g) {
  const double A = 2.0 * op.q1 - 2.0 * gammaI;
  const cplx B = 2.0 * cplx(0.0, 1.0) * op.lambda - 2.0 * gammaI;
  const int N = g.npts;
  BandMatrix M(N, 5, 5);
  for (int i = 1; i + 1 < N; ++i) {
    detail::fd_row(M, g, i, cplx(-0.5, 0.0), 0.5 * (A + B),
                   [&](double x) { return cplx(-0.5, 0.0) * (A * B) + x * x + op.p0; });
  }
  // Robin row: w'(theta0) = A w(theta0), one-sided 4th order.
  {
    std::vector<double> nodes(5);
    for (int k = 0; k < 5; ++k) nodes[k] = k * g.h();
    const std::vector<double> w1 = fd_weights(0.0, nodes, 1);
    for (int k = 0; k < 5; ++k) M.at(0, k) += w1[k];
    M.at(0, 0) -= A;
  }
  M.at(N - 1, N - 1) = 1.0;
  return M;
}

struct ReducedSolution {
  std::vector<cplx> u;        // on the grid, unconjugated
  std::vector<cplx> w;        // conjugated variable x^{-2 gammaI} u
  double residual = 0.0;      // discrete residual of the linear solve
  double smallest_singular_value = 0.0;
};

/// Smallest singular value of the discretized conjugated operator by inverse
/// iteration on A^H A (two banded solves per step).
inline double smallest_singular_value(const ReducedNormalOp& op, double gammaI,
                                      const HalfLineGrid& g, int iters = 200, double tol = 1e-10) {
  BandMatrix A = reduced_matrix(op, gammaI, g);
  // Conjugate transpose as an explicit second band matrix.
  BandMatrix AH(g.npts, 5, 5);
  {
    BandMatrix plain = reduced_matrix(op, gammaI, g);
    for (int i = 0; i < g.npts; ++i)
      for (int j = std::max(0, i - 5); j <= std::min(g.npts - 1, i + 5); ++j)
        AH.at(j, i) = std::conj(plain.at(i, j));
  }
  A.factor();
  AH.factor();
  std::mt19937_64 rng(12345);
  std::vector<cplx> y(g.npts);
  for (auto& v : y) v = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  double prev = 0.0;
  for (int it = 0; it < iters; ++it) {
    // z = A^-1 A^-H y grows like 1/sigma_min^2.
    std::vector<cplx> z = y;
    AH.solve(z);
    A.solve(z);
    double nz = 0.0;
    for (const auto& v : z) nz += std::norm(v);
    nz = std::sqrt(nz);
    const double sigma = 1.0 / std::sqrt(nz);
    for (auto& v : z) v /= nz;
    y = std::move(z);
    if (it > 4 && std::abs(sigma - prev) < tol * std::max(1e-300, sigma)) return sigma;
    prev = sigma;
  }
  throw NoConvergence("smallest_singular_value: inverse iteration did not settle");
}

/// Solve P u = f on the half line in the weighted space selected by gammaI.
/// Requires the admissible window -Im lambda < gammaI < q1.
inline ReducedSolution solve_reduced(const ReducedNormalOp& op, const std::vector<cplx>& f,
                                     double gammaI, const HalfLineGrid& g) {
  if (!(-op.lambda.imag() < gammaI && gammaI < op.q1))
    throw ThresholdViolation("solve_reduced: gammaI outside (-Im lambda, q1)");
  if (static_cast<int>(f.size()) != g.npts)
    throw DomainError("solve_reduced: right-hand side size mismatch");
  BandMatrix A = reduced_matrix(op, gammaI, g);
  BandMatrix A2 = reduced_matrix(op, gammaI, g);  // keep an unfactored copy
  A.factor();
  ReducedSolution out;
  out.w.resize(g.npts);
  for (int i = 0; i < g.npts; ++i)
    out.w[i] = std::pow(g.x(i), -2.0 * gammaI) * f[i];
  out.w[0] = 0.0;
  out.w[g.npts - 1] = 0.0;
  std::vector<cplx> rhs = out.w;
  A.solve(out.w);
  // Discrete residual of the linear solve.
  double rnum = 0.0, rden = 0.0;
  {
    std::vector<cplx> Aw(g.npts, 0.0);
    for (int i = 0; i < g.npts; ++i) {
      for (int j = std::max(0, i - 5); j <= std::min(g.npts - 1, i + 5); ++j)
        Aw[i] += A2.at(i, j) * out.w[j];
      rnum += std::norm(Aw[i] - rhs[i]);
      rden += std::norm(rhs[i]);
    }
  }
  out.residual = std::sqrt(rnum / std::max(rden, 1e-300));
  out.u.resize(g.npts);
  for (int i = 0; i < g.npts; ++i) out.u[i] = std::pow(g.x(i), 2.0 * gammaI) * out.w[i];
  out.smallest_singular_value = smallest_singular_value(op, gammaI, g);
  return out;
}

/// Apply the reduced operator to samples by 4th-order differences in log x.
inline std::vector<cplx> apply_reduced(const ReducedNormalOp& op, const std::vector<cplx>& u,
                                       const HalfLineGrid& g) {
  // P = -1/2 (d - 2 q1)(d - 2 i lambda) + x^2 + p0 in theta = log x.
  const double A = 2.0 * op.q1;
  const cplx B = 2.0 * cplx(0.0, 1.0) * op.lambda;
  const int N = g.npts;
  const double h = g.h();
  std::vector<cplx> out(N, 0.0);
  for (int i = 0; i < N; ++i) {
    int lo = i - 2, np = 5;
    if (i < 2) {
      lo = 0;
      np = 6;
    } else if (i >= N - 2) {
      lo = N - 6;
      np = 6;
    }
    std::vector<double> nodes(np);
    for (int k = 0; k < np; ++k) nodes[k] = (lo + k - i) * h;
    const std::vector<double> w2 = fd_weights(0.0, nodes, 2);
    const std::vector<double> w1 = fd_weights(0.0, nodes, 1);
    cplx d2{0, 0}, d1{0, 0};
    for (int k = 0; k < np; ++k) {
      d2 += w2[k] * u[lo + k];
      d1 += w1[k] * u[lo + k];
    }
    const double x = g.x(i);
    out[i] = -0.5 * d2 + 0.5 * (A + B) * d1 - 0.5 * A * B * u[i] + (x * x + op.p0) * u[i];
  }
  return out;
}

/// Apply the conjugated (simplified) operator (x D_x)^2 - lt^2 + 2 x^2, the
/// double of the conjugation of P by x^{q1 + i lambda}; p0 must vanish.
inline std::vector<cplx> apply_simplified(const ReducedNormalOp& op, const std::vector<cplx>& ut,
                                          const HalfLineGrid& g) {
  if (op.p0 != 0.0) throw DomainError("apply_simplified: requires p0 = 0");
  const cplx lt = op.lambda_tilde();
  const int N = g.npts;
  const double h = g.h();
  std::vector<cplx> out(N, 0.0);
  for (int i = 0; i < N; ++i) {
    int lo = i - 2, np = 5;
    if (i < 2) {
      lo = 0;
      np = 6;
    } else if (i >= N - 2) {
      lo = N - 6;
      np = 6;
    }
    std::vector<double> nodes(np);
    for (int k = 0; k < np; ++k) nodes[k] = (lo + k - i) * h;
    const std::vector<double> w2 = fd_weights(0.0, nodes, 2);
    cplx d2{0, 0};
    for (int k = 0; k < np; ++k) d2 += w2[k] * ut[lo + k];
    const double x = g.x(i);
    out[i] = -d2 - lt * lt * ut[i] + 2.0 * x * x * ut[i];
  }
  return out;
}

/// Two-path conjugation check: compare 2 x^{-q1 - i lambda} P u against the
/// simplified operator applied to x^{-q1 - i lambda} u. Returns the relative
/// sup deviation over the window [x_lo, x_hi].
inline double conjugation_residual(const ReducedNormalOp& op, const std::vector<cplx>& u,
                                   const HalfLineGrid& g, double x_lo = 1e-4, double x_hi = 20.0) {
  if (op.p0 != 0.0) throw DomainError("conjugation_residual: requires p0 = 0");
  const cplx a = cplx(op.q1, 0.0) + cplx(0.0, 1.0) * op.lambda;
  const int N = g.npts;
  std::vector<cplx> ut(N);
  for (int i = 0; i < N; ++i) ut[i] = std::exp(-a * g.theta(i)) * u[i];
  const std::vector<cplx> lhs = apply_simplified(op, ut, g);
  const std::vector<cplx> pu = apply_reduced(op, u, g);
  double dev = 0.0, scale = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = g.x(i);
    if (x < x_lo || x > x_hi) continue;
    const cplx rhs = 2.0 * std::exp(-a * g.theta(i)) * pu[i];
    dev = std::max(dev, std::abs(lhs[i] - rhs));
    scale = std::max(scale, std::abs(lhs[i]));
  }
  return dev / std::max(scale, 1e-300);
}

/// Semiclassical radial points of the reduced Hamiltonian field at the face
/// x = 0 of the future cap, for the sign of the real Mellin frequency:
///   H = 2 (xi -+ 1)(x dx + eta deta) - 2 |eta|^2 dxi + O(x) sphere terms.
struct SemiclassicalRadialPoints {
  Eigen::Vector2d in_point;   // (xi, |eta|) of the source
  Eigen::Vector2d out_point;  // (xi, |eta|) of the sink
  double max_offsets = 0.0;   // |field| at the two points
  double min_elsewhere = 1e300;
  Eigen::VectorXd in_eigs;    // linearization eigenvalues in (x, eta)
  Eigen::VectorXd out_eigs;
};

inline SemiclassicalRadialPoints semiclassical_radial_points(int sign, int n = 3) {
  const double sgn = sign >= 0 ? 1.0 : -1.0;
  const int d = n - 1;
  auto field = [&](double x, double xi, const Eigen::VectorXd& eta) {
    Eigen::VectorXd F(2 + d);
    F(0) = 2.0 * (xi - sgn) * x;
    F(1) = -2.0 * eta.squaredNorm();
    for (int a = 0; a < d; ++a) F(2 + a) = 2.0 * (xi - sgn) * eta(a);
    return F;
  };
  SemiclassicalRadialPoints out;
  out.in_point = {2.0 * sgn, 0.0};
  out.out_point = {0.0, 0.0};
  const Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(d);
  out.max_offsets = std::max(field(0.0, 2.0 * sgn, eta0).norm(), field(0.0, 0.0, eta0).norm());

  // Scan the characteristic set {xi(xi -+ 2)/2 + |eta|^2 = 0} at x = 0.
  for (int k = 1; k < 60; ++k) {
    const double xi = sgn * (2.0 * k / 60.0);
    const double e2 = -0.5 * xi * (xi - 2.0 * sgn);
    if (e2 <= 1e-12) continue;
    Eigen::VectorXd eta = eta0;
    eta(0) = std::sqrt(e2);
    const double dist = std::min(std::hypot(xi - 2.0 * sgn, eta.norm()), std::hypot(xi, eta.norm()));
    if (dist < 0.25) continue;
    out.min_elsewhere = std::min(out.min_elsewhere, field(0.0, xi, eta).norm());
  }

  // FD linearization in the (x, eta) block at both points.
  auto block_eigs = [&](double xi0) {
    const double h = 1e-6;
    Eigen::MatrixXd J(1 + d, 1 + d);
    auto f_of = [&](double x, const Eigen::VectorXd& eta) {
      const Eigen::VectorXd F = field(x, xi0, eta);
      Eigen::VectorXd out_block(1 + d);
      out_block(0) = F(0);
      out_block.tail(d) = F.tail(d);
      return out_block;
    };
    J.col(0) = (f_of(h, eta0) - f_of(0.0, eta0)) / h;  // one-sided at the face
    for (int a = 0; a < d; ++a) {
      Eigen::VectorXd ep = eta0, em = eta0;
      ep(a) += h;
      em(a) -= h;
      J.col(1 + a) = (f_of(0.0, ep) - f_of(0.0, em)) / (2 * h);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd re = es.eigenvalues().real();
    std::sort(re.data(), re.data() + re.size());
    return re;
  };
  out.in_eigs = block_eigs(2.0 * sgn);
  out.out_eigs = block_eigs(0.0);
  return out;
}

}  // namespace eblab
