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

#include <cmath>
#include <utility>

#include "qduality/matrix_kernel.hpp"

namespace qduality {

/// Unit-trace positive Hermitian state.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {
    require(mat_.rows() == mat_.cols(), "DensityMatrix: must be square");
    require(is_hermitian(mat_), "DensityMatrix: not Hermitian");
    require(std::abs(mat_.trace().real() - 1.0) <= tol::trace &&
                std::abs(mat_.trace().imag()) <= tol::trace,
            "DensityMatrix: trace must be 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es((mat_ + mat_.adjoint()) / 2.0);
    require(es.eigenvalues().minCoeff() >= -tol::trace,
            "DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix maximally_mixed(Index d) {
    return DensityMatrix(Matrix::Identity(d, d) / double(d));
  }
  static DensityMatrix pure(const Vector& psi) {
    Vector n = psi / psi.norm();
    return DensityMatrix(n * n.adjoint());
  }

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

/// Hermitian operator with a time label (hbar = 1 units). The label is
/// metadata; correlation functionals validate ordering where they need it.
class Observable {
 public:
  explicit Observable(Matrix m, double time = 0.0) : mat_(std::move(m)), time_(time) {
    require(mat_.rows() == mat_.cols(), "Observable: must be square");
    require(is_hermitian(mat_), "Observable: not Hermitian");
  }

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double time() const { return time_; }
  Observable at_time(double t) const { return Observable(mat_, t); }

 private:
  Matrix mat_;
  double time_;
};

class Hamiltonian {
 public:
  explicit Hamiltonian(Matrix m) : mat_(std::move(m)) {
    require(mat_.rows() == mat_.cols(), "Hamiltonian: must be square");
    require(is_hermitian(mat_), "Hamiltonian: not Hermitian");
  }
  static Hamiltonian zero(Index d) { return Hamiltonian(Matrix::Zero(d, d)); }

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// cos(phi) sigma_x + sin(phi) sigma_z: phi=0 gives sigma_x, phi=pi/2 gives
/// sigma_z, phi=pi/4 gives (sigma_x+sigma_z)/sqrt2 and phi=-pi/4 gives
/// (sigma_x-sigma_z)/sqrt2.
inline Observable pauli_angle(double phi) {
  return Observable(std::cos(phi) * pauli_x() + std::sin(phi) * pauli_z());
}

/// e^{i H0 t} O e^{-i H0 t} via eigendecomposition of H0.
inline Observable heisenberg_evolve(const Observable& o, const Hamiltonian& h0, double t) {
  require(o.dim() == h0.dim(), "heisenberg_evolve: dimension mismatch");
  if (h0.mat().norm() == 0.0 || t == 0.0) return o.at_time(t);
  HermitianEig es = hermitian_eig(h0.mat());
  Vector phases(o.dim());
  for (Index k = 0; k < o.dim(); ++k)
    phases[k] = std::exp(Complex(0, es.values[k] * t));
  Matrix u = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
  return Observable(u * o.mat() * u.adjoint(), t);
}

/// Pure-dephasing decay in the computational basis: diagonal entries kept,
/// off-diagonal entries damped by e^{-gamma t}.
inline Observable dephase_observable(const Observable& o, double t, double gamma) {
  require(o.dim() == 2, "dephase_observable: qubit only");
  require(t >= 0.0, "dephase_observable: t must be >= 0");
  Matrix m = o.mat();
  double f = std::exp(-gamma * t);
  m(0, 1) *= f;
  m(1, 0) *= f;
  return Observable(m, o.time());
}

}  // namespace qduality
