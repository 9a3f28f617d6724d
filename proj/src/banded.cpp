#include "flexbeam/banded.hpp"

#include <algorithm>
#include <cmath>

#include "flexbeam/errors.hpp"

namespace flexbeam {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), band_(bandwidth + 1) {
  for (std::size_t d = 0; d <= bw_; ++d) {
    band_[d].assign(n_ > d ? n_ - d : 0, 0.0);
  }
}

double& SymBandMatrix::at(std::size_t row, std::size_t col) {
  if (row < col) std::swap(row, col);
  const std::size_t d = row - col;
  if (d > bw_ || row >= n_) {
    fail(ErrorCode::IndexOutOfRange, "band entry outside storage");
  }
  return band_[d][col];
}

double SymBandMatrix::get(std::size_t row, std::size_t col) const {
  if (row < col) std::swap(row, col);
  const std::size_t d = row - col;
  if (row >= n_) fail(ErrorCode::IndexOutOfRange, "band entry outside matrix");
  if (d > bw_) return 0.0;
  return band_[d][col];
}

std::vector<double> SymBandMatrix::multiply(const std::vector<double>& x) const {
  if (x.size() != n_) fail(ErrorCode::DimensionMismatch, "banded multiply");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = band_[0][i] * x[i];
    for (std::size_t d = 1; d <= bw_; ++d) {
      if (i + d < n_) acc += band_[d][i] * x[i + d];
      if (i >= d) acc += band_[d][i - d] * x[i - d];
    }
    y[i] = acc;
  }
  return y;
}

std::vector<std::vector<double>> SymBandMatrix::to_dense() const {
  std::vector<std::vector<double>> a(n_, std::vector<double>(n_, 0.0));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) a[i][j] = get(i, j);
  }
  return a;
}

SymBandMatrix& SymBandMatrix::add_scaled(const SymBandMatrix& other,
                                         double factor) {
  if (other.n_ != n_ || other.bw_ != bw_) {
    fail(ErrorCode::DimensionMismatch, "banded add");
  }
  for (std::size_t d = 0; d <= bw_; ++d) {
    for (std::size_t i = 0; i < band_[d].size(); ++i) {
      band_[d][i] += factor * other.band_[d][i];
    }
  }
  return *this;
}

BandCholesky::BandCholesky(const SymBandMatrix& a)
    : n_(a.n_), bw_(a.bw_), band_(a.band_) {
  for (std::size_t j = 0; j < n_; ++j) {
    double diag = band_[0][j];
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      fail(ErrorCode::SolverDivergence, "non-positive pivot in banded Cholesky");
    }
    const double ljj = std::sqrt(diag);
    band_[0][j] = ljj;
    const std::size_t last = std::min(n_ - 1, j + bw_);
    for (std::size_t i = j + 1; i <= last; ++i) {
      band_[i - j][j] /= ljj;
    }
    for (std::size_t k = j + 1; k <= last; ++k) {
      const double ljk = band_[k - j][j];
      for (std::size_t i = k; i <= last; ++i) {
        band_[i - k][k] -= band_[i - j][j] * ljk;
      }
    }
  }
}

std::vector<double> BandCholesky::solve(const std::vector<double>& rhs) const {
  if (rhs.size() != n_) fail(ErrorCode::DimensionMismatch, "banded solve");
  std::vector<double> x = rhs;
  // forward: L y = rhs
  for (std::size_t j = 0; j < n_; ++j) {
    x[j] /= band_[0][j];
    const std::size_t last = std::min(n_ - 1, j + bw_);
    for (std::size_t i = j + 1; i <= last; ++i) {
      x[i] -= band_[i - j][j] * x[j];
    }
  }
  // backward: L^T x = y
  for (std::size_t jj = n_; jj-- > 0;) {
    const std::size_t last = std::min(n_ - 1, jj + bw_);
    for (std::size_t i = jj + 1; i <= last; ++i) {
      x[jj] -= band_[i - jj][jj] * x[i];
    }
    x[jj] /= band_[0][jj];
  }
  return x;
}

double smallest_generalized_eigenvalue(const SymBandMatrix& stiffness,
                                       const SymBandMatrix& mass,
                                       double rel_tol, int max_iters) {
  const std::size_t n = stiffness.size();
  if (mass.size() != n) fail(ErrorCode::DimensionMismatch, "eigen solve");
  BandCholesky chol(stiffness);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);

  double lambda = 0.0;
  double prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> mv = mass.multiply(v);
    std::vector<double> w = chol.solve(mv);
    double norm = 0.0;
    for (double c : w) norm = std::max(norm, std::abs(c));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      fail(ErrorCode::SolverDivergence, "inverse iteration degenerated");
    }
    for (double& c : w) c /= norm;
    std::vector<double> kw = stiffness.multiply(w);
    std::vector<double> mw = mass.multiply(w);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += w[i] * kw[i];
      den += w[i] * mw[i];
    }
    lambda = num / den;
    v = std::move(w);
    if (prev > 0.0 && std::abs(lambda - prev) <= rel_tol * std::abs(lambda)) {
      return lambda;
    }
    prev = lambda;
  }
  return lambda;
}

}  // namespace flexbeam
