#include "risradar/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace risradar {

CMatrix multiply(const CMatrix& a, const CMatrix& b) {
  assert(a.cols() == b.rows());
  CMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{}) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

std::vector<cdouble> multiply(const CMatrix& a, std::span<const cdouble> x) {
  assert(static_cast<size_t>(a.cols()) == x.size());
  std::vector<cdouble> y(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    cdouble acc = 0.0;
    const auto r = a.row(i);
    for (int j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<cdouble> multiply_adjoint(const CMatrix& a, std::span<const cdouble> x) {
  assert(static_cast<size_t>(a.rows()) == x.size());
  std::vector<cdouble> y(a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const cdouble xi = x[i];
    const auto r = a.row(i);
    for (int j = 0; j < a.cols(); ++j) y[j] += std::conj(r[j]) * xi;
  }
  return y;
}

cdouble dot(std::span<const cdouble> x, std::span<const cdouble> y) {
  assert(x.size() == y.size());
  cdouble acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

cdouble dot_conj(std::span<const cdouble> x, std::span<const cdouble> y) {
  assert(x.size() == y.size());
  cdouble acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double frobenius_norm(const CMatrix& a) {
  double acc = 0.0;
  for (const auto& v : a.flat()) acc += std::norm(v);
  return std::sqrt(acc);
}

double norm2_squared(std::span<const cdouble> x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc;
}

namespace {

double off_diagonal(const CMatrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) acc += std::norm(a(i, j));
  return std::sqrt(acc);
}

}  // namespace

// Cyclic Jacobi for Hermitian matrices. Each rotation zeroes pivot (p, q):
// the pivot phase is factored out (diag(1, e^{-i arg a_pq})) so the 2x2 block
// becomes real symmetric, then the classic Givens rotation is applied. The
// combined unitary is
//   U_pp = c, U_pq = s, U_qp = -s e^{-i phi}, U_qq = c e^{-i phi}.
EigHermitianResult eig_hermitian(CMatrix a, const JacobiOptions& opts) {
  assert(a.rows() == a.cols());
  const int n = a.rows();
  CMatrix v = CMatrix::identity(n);

  const double norm_f = frobenius_norm(a);
  const double stop = opts.rel_tolerance * norm_f;

  EigHermitianResult res;
  res.off_diagonal_norm = off_diagonal(a);

  int sweep = 0;
  while (res.off_diagonal_norm > stop && norm_f > 0.0 && sweep < opts.max_sweeps) {
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double h = std::abs(apq);
        if (h == 0.0) continue;
        const cdouble phase_conj = std::conj(apq) / h;  // e^{-i phi}

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * h);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const cdouble aip = a(i, p);
          const cdouble aiq = a(i, q);
          a(i, p) = c * aip - s * phase_conj * aiq;
          a(i, q) = s * aip + c * phase_conj * aiq;
          a(p, i) = std::conj(a(i, p));
          a(q, i) = std::conj(a(i, q));
        }
        a(p, p) = c * c * app - 2.0 * c * s * h + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * c * s * h + c * c * aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (int i = 0; i < n; ++i) {
          const cdouble vip = v(i, p);
          const cdouble viq = v(i, q);
          v(i, p) = c * vip - s * phase_conj * viq;
          v(i, q) = s * vip + c * phase_conj * viq;
        }
      }
    }
    res.off_diagonal_norm = off_diagonal(a);
  }

  res.sweeps_used = sweep;
  res.converged = res.off_diagonal_norm <= stop || norm_f == 0.0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  res.eigenvalues.resize(n);
  res.eigenvectors = CMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    res.eigenvalues[k] = a(order[k], order[k]).real();
    for (int i = 0; i < n; ++i) res.eigenvectors(i, k) = v(i, order[k]);
  }
  return res;
}

}  // namespace risradar
