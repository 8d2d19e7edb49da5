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

#include <cstdint>
#include <random>

#include "qduality/duality.hpp"

namespace qduality {

/// splitmix64 step, used to derive independent substreams from a master seed
/// so that parallel instance evaluation is independent of scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  static Rng derived(std::uint64_t seed, std::uint64_t index) { return Rng(mix_seed(seed, index)); }

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t raw() { return gen_(); }
  std::mt19937_64& engine() { return gen_; }

  Complex cnormal() { return Complex(normal(), normal()); }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix g(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) g(i, j) = cnormal();
    return g;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-random pure bipartite state via normalized complex Gaussian amplitudes.
inline PureBipartiteState random_pure_state(Rng& rng, Index d_a, Index d_b) {
  Matrix g = rng.gaussian_matrix(d_a, d_b);
  return PureBipartiteState(g / g.norm());
}

inline Matrix random_unitary(Rng& rng, Index d) {
  Matrix g = rng.gaussian_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    Complex diag = r(k, k);
    q.col(k) *= (std::abs(diag) > 0 ? diag / std::abs(diag) : 1.0);
  }
  return q;
}

inline DensityMatrix random_density(Rng& rng, Index d, Index rank = 0) {
  if (rank <= 0 || rank > d) rank = d;
  Matrix g = rng.gaussian_matrix(d, rank);
  Matrix m = g * g.adjoint();
  return DensityMatrix(m / m.trace());
}

inline Observable random_observable(Rng& rng, Index d) {
  Matrix g = rng.gaussian_matrix(d, d);
  return Observable((g + g.adjoint()) / 2.0);
}

inline std::vector<double> random_probabilities(Rng& rng, Index k) {
  std::vector<double> p(static_cast<size_t>(k), 0.0);
  double sum = 0.0;
  for (auto& x : p) {
    x = -std::log(rng.uniform() + 1e-300);
    sum += x;
  }
  for (auto& x : p) x /= sum;
  return p;
}

inline BipartiteEnsemble random_ensemble(Rng& rng, Index d_a, Index d_b, Index members) {
  std::vector<BipartiteEnsemble::Member> ms;
  auto p = random_probabilities(rng, members);
  for (Index k = 0; k < members; ++k)
    ms.push_back({p[size_t(k)], random_pure_state(rng, d_a, d_b)});
  return BipartiteEnsemble(std::move(ms));
}

/// Non-selective random-unitary mixture (unital).
inline Evolution random_unitary_mixture(Rng& rng, Index d, Index branches) {
  KrausSet k{d, d, {}};
  auto p = random_probabilities(rng, branches);
  for (Index i = 0; i < branches; ++i)
    k.ops.push_back(std::sqrt(p[size_t(i)]) * random_unitary(rng, d));
  return canonicalize(k);
}

/// Non-selective channel from a Haar-random Stinespring isometry
/// V: H_A -> H_B (x) C^k, Kraus blocks K_mu = (I (x) <mu|) V.
inline Evolution random_nonselective_channel(Rng& rng, Index d_a, Index d_b, Index branches) {
  Matrix g = rng.gaussian_matrix(d_b * branches, d_a);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix v = Matrix(qr.householderQ()).leftCols(d_a);
  KrausSet k{d_a, d_b, {}};
  for (Index mu = 0; mu < branches; ++mu) k.ops.push_back(v.middleRows(mu * d_b, d_b));
  return canonicalize(k);
}

/// Selective evolution: random branch operators with arbitrary probabilities
/// (the mapped image of a random ensemble).
inline Evolution random_selective_evolution(Rng& rng, Index d_a, Index d_b, Index branches) {
  return state_to_evolution(random_ensemble(rng, d_a, d_b, branches));
}

}  // namespace qduality
