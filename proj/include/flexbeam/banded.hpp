#pragma once

#include <cstddef>
#include <vector>

namespace flexbeam {

// Symmetric banded matrix, lower-triangle storage: band(d, i) holds A(i+d, i)
// for diagonal offset d in [0, bw]. Entries outside the band are zero.
class SymBandMatrix {
 public:
  SymBandMatrix() = default;
  SymBandMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  double& at(std::size_t row, std::size_t col);
  double get(std::size_t row, std::size_t col) const;

  // y = A x
  std::vector<double> multiply(const std::vector<double>& x) const;

  // Dense mirror, mostly for diagnostics and tests.
  std::vector<std::vector<double>> to_dense() const;

  SymBandMatrix& add_scaled(const SymBandMatrix& other, double factor);

 private:
  friend class BandCholesky;
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  // band_[d][i] = A(i + d, i)
  std::vector<std::vector<double>> band_;
};

// Cholesky factorization A = L L^T of a symmetric positive definite banded
// matrix. Throws Error(SolverDivergence) when a pivot is not positive.
class BandCholesky {
 public:
  explicit BandCholesky(const SymBandMatrix& a);

  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<std::vector<double>> band_;  // lower factor, same layout
};

// Smallest eigenvalue of the generalized symmetric problem K v = lambda M v
// (K positive definite) by inverse iteration with Rayleigh quotient stopping.
double smallest_generalized_eigenvalue(const SymBandMatrix& stiffness,
                                       const SymBandMatrix& mass,
                                       double rel_tol = 1e-12,
                                       int max_iters = 500);

}  // namespace flexbeam
