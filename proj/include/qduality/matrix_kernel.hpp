// Copyright 2026 The qduality Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qduality {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
// Default numerical tolerances for small dense problems in double precision.
inline constexpr double hermitian = 1e-10;
inline constexpr double eig = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double prob_sum = 1e-12;
inline constexpr double norm = 1e-12;
}  // namespace tol

// Largest row/column count a kernel operation may produce.
inline constexpr Index kMaxDim = Index(1) << 16;

enum class Subsystem { A, B };

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void check_finite(const Matrix& m, const char* where) {
  if (!m.allFinite())
    throw std::runtime_error(std::string(where) + ": non-finite entries");
}

/// Kronecker product with the bipartite index convention (i,j) -> i*d_B + j,
/// i.e. the row-major flattening used for all amplitude tensors.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  require(a.rows() * b.rows() <= kMaxDim && a.cols() * b.cols() <= kMaxDim,
          "tensor: result dimension exceeds configured maximum");
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  check_finite(out, "tensor");
  return out;
}

/// Reduced matrix over one factor of a d_A*d_B square matrix.
inline Matrix partial_trace(const Matrix& m, Index d_a, Index d_b, Subsystem keep) {
  require(d_a >= 1 && d_b >= 1, "partial_trace: dims must be positive");
  require(m.rows() == m.cols() && m.rows() == d_a * d_b,
          "partial_trace: matrix size does not match dims");
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(d_a, d_a);
    for (Index i = 0; i < d_a; ++i)
      for (Index k = 0; k < d_a; ++k)
        for (Index j = 0; j < d_b; ++j) out(i, k) += m(i * d_b + j, k * d_b + j);
    check_finite(out, "partial_trace");
    return out;
  }
  Matrix out = Matrix::Zero(d_b, d_b);
  for (Index j = 0; j < d_b; ++j)
    for (Index l = 0; l < d_b; ++l)
      for (Index i = 0; i < d_a; ++i) out(j, l) += m(i * d_b + j, i * d_b + l);
  check_finite(out, "partial_trace");
  return out;
}

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline Matrix anticommutator(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows() && b.cols() == a.rows() && a.rows() == a.cols(),
          "anticommutator: dimension mismatch");
  return a * b + b * a;
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "frobenius_distance: dimension mismatch");
  return (a - b).norm();
}

inline bool is_hermitian(const Matrix& m, double rel_tol = tol::hermitian) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

struct HermitianEig {
  RealVector values;  // descending
  Matrix vectors;     // orthonormal columns, vectors.col(k) pairs values[k]
};

/// Hermitian eigendecomposition, eigenvalues sorted descending.
/// Eigenvector phases are fixed deterministically: the first component of
/// magnitude > 1e-8 is made real positive.
inline HermitianEig hermitian_eig(const Matrix& m) {
  require(m.rows() == m.cols(), "hermitian_eig: matrix must be square");
  if (!is_hermitian(m))
    throw std::invalid_argument("hermitian_eig: input not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  const Index d = m.rows();
  HermitianEig out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Index k = 0; k < d; ++k) {
    out.values[k] = solver.eigenvalues()[d - 1 - k];
    Vector v = solver.eigenvectors().col(d - 1 - k);
    for (Index i = 0; i < d; ++i) {
      if (std::abs(v[i]) > 1e-8) {
        v *= std::conj(v[i]) / std::abs(v[i]);
        break;
      }
    }
    out.vectors.col(k) = v;
  }
  check_finite(out.vectors, "hermitian_eig");
  return out;
}

/// Row-major flattening of a d_A x d_B amplitude matrix, (i,j) -> i*d_B + j.
inline Vector flatten(const Matrix& a) {
  Vector v(a.rows() * a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

inline Matrix unflatten(const Vector& v, Index rows, Index cols) {
  require(v.size() == rows * cols, "unflatten: size mismatch");
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  return a;
}

}  // namespace qduality
