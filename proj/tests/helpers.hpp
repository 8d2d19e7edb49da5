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

#include <catch2/catch_amalgamated.hpp>

#include "qduality/random.hpp"

namespace qdtest {

using namespace qduality;

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vector ket(std::initializer_list<Complex> xs) {
  Vector v(Index(xs.size()));
  Index i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

inline PureBipartiteState bell_phi_plus() {
  Matrix amps = Matrix::Zero(2, 2);
  amps(0, 0) = amps(1, 1) = 1.0 / std::sqrt(2.0);
  return PureBipartiteState(amps);
}

inline PureBipartiteState basis_product_state(Index d_a, Index d_b, Index i, Index j) {
  Matrix amps = Matrix::Zero(d_a, d_b);
  amps(i, j) = 1.0;
  return PureBipartiteState(amps);
}

}  // namespace qdtest
