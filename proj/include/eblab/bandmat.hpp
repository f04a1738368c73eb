#pragma once

#include <complex>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

/// Complex banded matrix with kl sub- and ku superdiagonals, LAPACK-style
/// band storage with kl extra rows of fill for partial-pivoting LU.
class BandMatrix {
 public:
  using cplx = std::complex<double>;

  BandMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0),
        piv_(n, 0) {}

  int size() const { return n_; }

  cplx& at(int i, int j) {
    if (j - i > ku_ || i - j > kl_) throw DomainError("BandMatrix: entry outside the band");
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }

  /// In-place LU with partial pivoting (banded).
  void factor() {
    factored_ = true;
    const int kv = kl_ + ku_;
    for (int j = 0; j < n_; ++j) {
      // pivot search in column j, rows j..min(j+kl, n-1)
      const int jmax = std::min(j + kl_, n_ - 1);
      int p = j;
      double best = std::abs(entry(j, j));
      for (int i = j + 1; i <= jmax; ++i) {
        const double a = std::abs(entry(i, j));
        if (a > best) {
          best = a;
          p = i;
        }
      }
      if (best == 0.0) throw NoConvergence("BandMatrix::factor: singular matrix");
      piv_[j] = p;
      if (p != j) {  // swap rows j and p within their shared band columns
        const int jhi = std::min(j + kv, n_ - 1);
        for (int c = j; c <= jhi; ++c) std::swap(entry(j, c), entry(p, c));
      }
      const cplx pivot = entry(j, j);
      for (int i = j + 1; i <= jmax; ++i) {
        const cplx l = entry(i, j) / pivot;
        entry(i, j) = l;
        const int jhi = std::min(j + kv, n_ - 1);
        for (int c = j + 1; c <= jhi; ++c) entry(i, c) -= l * entry(j, c);
      }
    }
  }

  /// Solve A x = b after factor(); b is overwritten with x.
  void solve(std::vector<cplx>& b) const {
    if (!factored_) throw NoConvergence("BandMatrix::solve: factor() not called");
    for (int j = 0; j < n_ - 1; ++j) {
      if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
      const int imax = std::min(j + kl_, n_ - 1);
      for (int i = j + 1; i <= imax; ++i) b[i] -= entry_c(i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      const int lo = std::max(0, j - kl_ - ku_);
      b[j] /= entry_c(j, j);
      for (int i = lo; i < j; ++i) b[i] -= entry_c(i, j) * b[j];
    }
  }

 private:
  // Band storage access with fill rows; valid for j - i <= ku + kl.
  cplx& entry(int i, int j) { return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]; }
  const cplx& entry_c(int i, int j) const {
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }

  int n_, kl_, ku_, ldab_;
  std::vector<cplx> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace eblab
