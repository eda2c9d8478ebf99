#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "padic/core.hpp"

namespace padic {

/// Small dense row-major matrix; sizes here are at most p^l x p^l with
/// p^l <= a few hundred, so no external linear algebra is needed.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  bool symmetric(double tol = 0.0) const {
    if (rows != cols) return false;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = i + 1; j < cols; ++j)
        if (std::fabs(at(i, j) - at(j, i)) > tol) return false;
    return true;
  }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw DomainError("matmul: shape mismatch");
  Matrix z(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const double v = x.at(i, k);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) z.at(i, j) += v * y.at(k, j);
    }
  return z;
}

inline Matrix transpose(const Matrix& x) {
  Matrix z(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) z.at(j, i) = x.at(i, j);
  return z;
}

inline std::vector<double> matvec(const Matrix& x, const std::vector<double>& v) {
  if (x.cols != v.size()) throw DomainError("matvec: shape mismatch");
  std::vector<double> out(x.rows, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out[i] += x.at(i, j) * v[j];
  return out;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> sym_eigenvalues(const Matrix& m) {
  if (m.rows != m.cols) throw DomainError("sym_eigenvalues: not square");
  Matrix a = m;
  const std::size_t n = a.rows;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off < 1e-30) break;
    for (std::size_t pidx = 0; pidx < n; ++pidx)
      for (std::size_t q = pidx + 1; q < n; ++q) {
        const double apq = a.at(pidx, q);
        if (apq == 0.0) continue;
        const double theta = (a.at(q, q) - a.at(pidx, pidx)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, pidx), akq = a.at(k, q);
          a.at(k, pidx) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(pidx, k), aqk = a.at(q, k);
          a.at(pidx, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a.at(i, i);
  return eig;
}

/// Lower Cholesky factor of m + jitter*I; throws on indefiniteness.
inline Matrix cholesky(const Matrix& m, double jitter = 0.0) {
  if (m.rows != m.cols) throw DomainError("cholesky: not square");
  const std::size_t n = m.rows;
  Matrix low(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m.at(i, j) + (i == j ? jitter : 0.0);
      for (std::size_t k = 0; k < j; ++k) s -= low.at(i, k) * low.at(j, k);
      if (i == j) {
        if (s <= 0.0)
          throw NumericError("cholesky: matrix not positive definite");
        low.at(i, i) = std::sqrt(s);
      } else {
        low.at(i, j) = s / low.at(j, j);
      }
    }
  }
  return low;
}

}  // namespace padic
