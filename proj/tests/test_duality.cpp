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

#include "helpers.hpp"

using namespace qdtest;

TEST_CASE("state_to_evolution on reference states", "[duality]") {
  SECTION("Bell state maps to the identity") {
    Evolution e = state_to_evolution(BipartiteEnsemble::pure(bell_phi_plus()));
    REQUIRE(e.branches().size() == 1);
    REQUIRE(max_abs_diff(e.branches()[0].m, Matrix::Identity(2, 2)) < 1e-14);
    REQUIRE_FALSE(e.selective());
  }

  SECTION("product basis state maps to a selective flip projector") {
    // |0>_A (x) |1>_B: the operator sends the A-basis bra <0| to the B-basis
    // ket |1>, i.e. M = sqrt(d_A) |1><0|.
    Evolution e = state_to_evolution(BipartiteEnsemble::pure(basis_product_state(2, 2, 0, 1)));
    Matrix expect = Matrix::Zero(2, 2);
    expect(1, 0) = std::sqrt(2.0);
    REQUIRE(max_abs_diff(e.branches()[0].m, expect) < 1e-15);
    REQUIRE(e.selective());
  }

  SECTION("the optimal qutrit eigenstate maps to a diagonal contraction") {
    double gamma = (std::sqrt(11.0) - std::sqrt(3.0)) / 2.0;
    double n = 2.0 + gamma * gamma;
    Matrix amps = Matrix::Zero(3, 3);
    amps(0, 0) = amps(2, 2) = 1.0 / std::sqrt(n);
    amps(1, 1) = gamma / std::sqrt(n);
    Evolution e = state_to_evolution(BipartiteEnsemble::pure(PureBipartiteState(amps)));
    double eta = std::sqrt(3.0 / (11.0 / 2.0 - std::sqrt(33.0) / 2.0));
    Matrix expect = Matrix::Zero(3, 3);
    expect(0, 0) = expect(2, 2) = eta;
    expect(1, 1) = eta * gamma;
    REQUIRE(max_abs_diff(e.branches()[0].m, expect) < 1e-14);
    REQUIRE(std::abs((e.branches()[0].m.adjoint() * e.branches()[0].m).trace().real() - 3.0) <
            1e-12);
  }
}

TEST_CASE("evolution_to_state", "[duality]") {
  SECTION("identity maps back to the Bell state") {
    BipartiteEnsemble ens = evolution_to_state(identity_evolution(2));
    REQUIRE(max_abs_diff(ensemble_density(ens).mat(),
                         ensemble_density(BipartiteEnsemble::pure(bell_phi_plus())).mat()) <
            1e-14);
  }

  SECTION("dephasing branches map to an even mixture of |00> and |11>") {
    BipartiteEnsemble ens = evolution_to_state(full_dephasing(2));
    Matrix rho = ensemble_density(ens).mat();
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    REQUIRE(max_abs_diff(rho, expect) < 1e-14);
  }

  SECTION("round trip reproduces rho_AB and the channel action") {
    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
      Index da = 2 + Index(rng.raw() % 3), db = 2 + Index(rng.raw() % 3);
      BipartiteEnsemble ens = random_ensemble(rng, da, db, 1 + Index(rng.raw() % 3));
      Evolution e = state_to_evolution(ens);
      BipartiteEnsemble back = evolution_to_state(e);
      REQUIRE(max_abs_diff(ensemble_density(back).mat(), ensemble_density(ens).mat()) < 1e-12);
      REQUIRE(channel_action_distance(e, state_to_evolution(back)) < 1e-12);
    }
  }
}

TEST_CASE("reduced states", "[duality]") {
  SECTION("Bell state is maximally mixed on both sides") {
    BipartiteEnsemble ens = BipartiteEnsemble::pure(bell_phi_plus());
    REQUIRE(max_abs_diff(reduced(ens, Subsystem::A).mat(), Matrix::Identity(2, 2) / 2.0) < 1e-14);
    REQUIRE(max_abs_diff(reduced(ens, Subsystem::B).mat(), Matrix::Identity(2, 2) / 2.0) < 1e-14);
  }

  SECTION("product states have pure reductions") {
    BipartiteEnsemble ens = BipartiteEnsemble::pure(basis_product_state(2, 3, 1, 2));
    REQUIRE(std::abs(reduced(ens, Subsystem::A).mat()(1, 1).real() - 1.0) < 1e-15);
    REQUIRE(std::abs(reduced(ens, Subsystem::B).mat()(2, 2).real() - 1.0) < 1e-15);
  }

  SECTION("fully mixed werner point") {
    KrausSet k{2, 2,
               {0.5 * Matrix::Identity(2, 2), 0.5 * pauli_x(), 0.5 * pauli_y(),
                0.5 * pauli_z()}};
    BipartiteEnsemble ens = evolution_to_state(canonicalize(k));
    REQUIRE(max_abs_diff(reduced(ens, Subsystem::A).mat(), Matrix::Identity(2, 2) / 2.0) < 1e-14);
    REQUIRE(max_abs_diff(reduced(ens, Subsystem::B).mat(), Matrix::Identity(2, 2) / 2.0) < 1e-14);
  }
}

TEST_CASE("lemma1_check", "[duality]") {
  SECTION("Bell state") {
    auto d = lemma1_check(BipartiteEnsemble::pure(bell_phi_plus()));
    REQUIRE(d.nonselective);
    REQUIRE(d.dist_a < 1e-12);
    REQUIRE(d.dist_b < 1e-12);
  }

  SECTION("product state is selective with biased reductions") {
    auto d = lemma1_check(BipartiteEnsemble::pure(basis_product_state(2, 2, 0, 0)));
    REQUIRE_FALSE(d.nonselective);
    REQUIRE(d.dist_a > 0.1);
    REQUIRE(d.dist_b > 0.1);
  }

  SECTION("random unitary mixtures are non-selective with flat reductions") {
    Rng rng(19);
    for (int k = 0; k < 20; ++k) {
      Index d = 2 + Index(rng.raw() % 3);
      auto diag = lemma1_check(evolution_to_state(random_unitary_mixture(rng, d, 3)));
      REQUIRE(diag.nonselective);
      REQUIRE(diag.dist_a < 1e-9);
      REQUIRE(diag.dist_b < 1e-9);
    }
  }

  SECTION("trace-preserving channels always flatten the A side") {
    Rng rng(20);
    auto diag = lemma1_check(evolution_to_state(random_nonselective_channel(rng, 3, 3, 2)));
    REQUIRE(diag.nonselective);
    REQUIRE(diag.dist_a < 1e-9);
  }
}

TEST_CASE("bipartition", "[duality]") {
  SECTION("GHZ split {0,1}|{2}") {
    Vector ghz = Vector::Zero(8);
    ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
    PureBipartiteState s = bipartition(ghz, {2, 2, 2}, {0, 1});
    REQUIRE(s.d_a() == 4);
    REQUIRE(s.d_b() == 2);
    REQUIRE(std::abs(s.amplitudes()(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    REQUIRE(std::abs(s.amplitudes()(3, 1) - 1.0 / std::sqrt(2.0)) < 1e-15);
    REQUIRE(s.amplitudes().cwiseAbs().sum() == Catch::Approx(std::sqrt(2.0)));
  }

  SECTION("product state splits into a product") {
    Vector v = Vector::Zero(8);
    v[0] = 1.0;
    PureBipartiteState s = bipartition(v, {2, 2, 2}, {1});
    REQUIRE(std::abs(s.amplitudes()(0, 0) - 1.0) < 1e-15);
    auto diag = lemma1_check(BipartiteEnsemble::pure(s));
    REQUIRE(diag.dist_a > 0.1);
  }

  SECTION("W state has Schmidt rank 2 across {0}|{1,2}") {
    Vector w = Vector::Zero(8);
    w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);  // |001>+|010>+|100>
    PureBipartiteState s = bipartition(w, {2, 2, 2}, {0});
    Eigen::JacobiSVD<Matrix> svd(s.amplitudes());
    REQUIRE(svd.singularValues()[0] == Catch::Approx(std::sqrt(2.0 / 3.0)));
    REQUIRE(svd.singularValues()[1] == Catch::Approx(std::sqrt(1.0 / 3.0)));
  }

  SECTION("invalid subsets rejected") {
    Vector v = Vector::Zero(8);
    v[0] = 1.0;
    REQUIRE_THROWS_AS(bipartition(v, {2, 2, 2}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(bipartition(v, {2, 2, 2}, {0, 1, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(bipartition(v, {2, 2, 2}, {3}), std::invalid_argument);
  }
}

TEST_CASE("mixing covariance", "[duality]") {
  // Mixing the mapped evolution with u equals mapping the u-mixed ensemble,
  // compared at the rho_AB level and on the channel action.
  Rng rng(29);
  for (int k = 0; k < 10; ++k) {
    BipartiteEnsemble ens = random_ensemble(rng, 2, 2, 3);
    Matrix u = random_unitary(rng, 3);
    BipartiteEnsemble mixed_ens = mix_ensemble(ens, u);
    Evolution mixed_evo = mix_representation(state_to_evolution(ens), u,
                                             DensityMatrix::maximally_mixed(2));
    REQUIRE(max_abs_diff(ensemble_density(mixed_ens).mat(), ensemble_density(ens).mat()) < 1e-12);
    REQUIRE(channel_action_distance(state_to_evolution(mixed_ens), mixed_evo) < 1e-11);
  }
}

TEST_CASE("maximal entanglement iff unitarity", "[duality]") {
  Rng rng(37);

  SECTION("unitary images have zero deviation and flat reductions") {
    Matrix u = random_unitary(rng, 3);
    BipartiteEnsemble ens = evolution_to_state(unitary_evolution(u));
    const auto& s = ens.members()[0].state;
    REQUIRE(unitarity_deviation(s) < 1e-14);
    REQUIRE(max_abs_diff(reduced(ens, Subsystem::A).mat(), Matrix::Identity(3, 3) / 3.0) < 1e-13);
  }

  SECTION("generic pure states have positive deviation and biased reductions") {
    for (int k = 0; k < 10; ++k) {
      PureBipartiteState s = random_pure_state(rng, 3, 3);
      double dev = unitarity_deviation(s);
      double bias =
          frobenius_distance(Matrix(s.amplitudes() * s.amplitudes().adjoint()),
                             Matrix::Identity(3, 3) / 3.0);
      REQUIRE((dev < 1e-9) == (bias < 1e-9));
    }
  }
}

TEST_CASE("spectral ensembles are observationally equivalent", "[duality]") {
  Rng rng(41);
  BipartiteEnsemble ens = random_ensemble(rng, 2, 3, 3);
  BipartiteEnsemble spectral = spectral_ensemble(ensemble_density(ens), 2, 3);
  REQUIRE(max_abs_diff(ensemble_density(spectral).mat(), ensemble_density(ens).mat()) < 1e-11);
  REQUIRE(channel_action_distance(state_to_evolution(spectral), state_to_evolution(ens)) < 1e-10);
}
