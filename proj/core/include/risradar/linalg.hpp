#pragma once

/// Small dense complex linear algebra: just enough for covariance matrices,
/// subspace projections and the Jacobi eigensolver. Row-major storage,
/// value semantics, matrices up to a few hundred rows.

#include <complex>
#include <span>
#include <vector>

namespace risradar {

using cdouble = std::complex<double>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols) {}

  static CMatrix identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cdouble& operator()(int r, int c) { return d_[static_cast<size_t>(r) * cols_ + c]; }
  const cdouble& operator()(int r, int c) const { return d_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<cdouble> row(int r) { return {d_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const cdouble> row(int r) const {
    return {d_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  std::span<cdouble> flat() { return d_; }
  std::span<const cdouble> flat() const { return d_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cdouble> d_;
};

class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return d_[static_cast<size_t>(r) * cols_ + c]; }
  const double& operator()(int r, int c) const { return d_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<double> flat() { return d_; }
  std::span<const double> flat() const { return d_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

CMatrix multiply(const CMatrix& a, const CMatrix& b);
/// y = A x.
std::vector<cdouble> multiply(const CMatrix& a, std::span<const cdouble> x);
/// y = A^H x.
std::vector<cdouble> multiply_adjoint(const CMatrix& a, std::span<const cdouble> x);
/// x^T y (no conjugation).
cdouble dot(std::span<const cdouble> x, std::span<const cdouble> y);
/// x^H y.
cdouble dot_conj(std::span<const cdouble> x, std::span<const cdouble> y);

CMatrix adjoint(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
double frobenius_norm(const CMatrix& a);
double norm2_squared(std::span<const cdouble> x);

struct JacobiOptions {
  int max_sweeps = 100;
  double rel_tolerance = 1e-12;  // stop when off(A) < rel_tolerance * ||A||_F
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors(:, i) is the unit eigenvector of
/// eigenvalues[i]. `converged` is false when the sweep cap was reached first;
/// `off_diagonal_norm` then holds the remaining off(A) residual.
struct EigHermitianResult {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;
  bool converged = false;
  int sweeps_used = 0;
  double off_diagonal_norm = 0.0;
};

EigHermitianResult eig_hermitian(CMatrix a, const JacobiOptions& opts = {});

}  // namespace risradar
