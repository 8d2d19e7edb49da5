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
#include "qduality/correlations.hpp"

using namespace qdtest;

namespace {

TemporalScenario pair_scenario(Evolution e, DensityMatrix rho, Matrix o1, Matrix o2,
                               std::optional<DensityMatrix> rfi = {}) {
  return TemporalScenario::two_point(std::move(e), std::move(rho), Observable(std::move(o1), -1.0),
                                     Observable(std::move(o2), 1.0), std::move(rfi));
}

}  // namespace

TEST_CASE("temporal correlation basics", "[correlations]") {
  DensityMatrix mixed = DensityMatrix::maximally_mixed(2);

  SECTION("identity channel, equal observables") {
    REQUIRE(temporal_correlation(pair_scenario(identity_evolution(2), mixed, pauli_z(),
                                               pauli_z())) == Catch::Approx(1.0));
  }

  SECTION("traceless product vanishes") {
    REQUIRE(temporal_correlation(pair_scenario(identity_evolution(2), mixed, pauli_z(),
                                               pauli_x())) == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("tilted pair gives 1/sqrt2") {
    const double pi = std::acos(-1.0);
    double v = temporal_correlation(
        pair_scenario(identity_evolution(2), mixed, pauli_x(), pauli_angle(pi / 4).mat()));
    REQUIRE(v == Catch::Approx(1.0 / std::sqrt(2.0)));
  }

  SECTION("non-flat input is routed to the weak functional") {
    REQUIRE_THROWS_AS(temporal_correlation(pair_scenario(identity_evolution(2),
                                                         DensityMatrix::pure(ket({1, 0})),
                                                         pauli_z(), pauli_z())),
                      std::invalid_argument);
  }

  SECTION("two-point scenarios enforce t1 < 0 < t2") {
    REQUIRE_THROWS_AS(
        TemporalScenario::two_point(identity_evolution(2), mixed, Observable(pauli_z(), 0.5),
                                    Observable(pauli_z(), 1.0)),
        std::invalid_argument);
  }
}

TEST_CASE("spatial correlation basics", "[correlations]") {
  BipartiteEnsemble bell = BipartiteEnsemble::pure(bell_phi_plus());
  REQUIRE(spatial_correlation(SpatialScenario(bell, Observable(pauli_z()),
                                              Observable(pauli_z()))) == Catch::Approx(1.0));
  REQUIRE(spatial_correlation(SpatialScenario(bell, Observable(pauli_x()),
                                              Observable(pauli_x()))) == Catch::Approx(1.0));
}

TEST_CASE("theorem 1 equality", "[correlations]") {
  SECTION("Bell state with sigma_z on both sides") {
    auto chk = theorem1_check(BipartiteEnsemble::pure(bell_phi_plus()), Observable(pauli_z()),
                              Observable(pauli_z()));
    REQUIRE(chk.lhs == Catch::Approx(1.0));
    REQUIRE(chk.delta < 1e-14);
  }

  SECTION("random instances, selective and non-selective, rectangular dims") {
    Rng rng(101);
    for (int k = 0; k < 100; ++k) {
      Index da = 2 + Index(rng.raw() % 3), db = 2 + Index(rng.raw() % 3);
      BipartiteEnsemble ens = (k % 3 == 0)
                                  ? evolution_to_state(random_nonselective_channel(rng, da, db, 2))
                                  : random_ensemble(rng, da, db, 1 + Index(rng.raw() % 3));
      auto chk = theorem1_check(ens, random_observable(rng, da), random_observable(rng, db));
      REQUIRE(chk.delta <= 1e-10);
    }
  }

  SECTION("time/space reflection: swapped parties with transposed operators") {
    Rng rng(102);
    for (int k = 0; k < 20; ++k) {
      BipartiteEnsemble ens = random_ensemble(rng, 3, 2, 2);
      Observable oa = random_observable(rng, 3), ob = random_observable(rng, 2);
      auto direct = theorem1_check(ens, oa, ob);
      auto reflected = theorem1_check(swap_parties(ens), ob, oa);
      REQUIRE(std::abs(direct.rhs - reflected.rhs) < 1e-11);
      REQUIRE(reflected.delta <= 1e-10);
    }
  }
}

TEST_CASE("corollary 1 single expectations", "[correlations]") {
  SECTION("identity channel on the flat state") {
    auto ex = single_expectations(evolution_to_state(identity_evolution(2)),
                                  Observable(pauli_z()), Observable(pauli_z()));
    REQUIRE(ex.temporal_o1 == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(ex.spatial_a == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("projector ensemble |00>") {
    auto ex = single_expectations(BipartiteEnsemble::pure(basis_product_state(2, 2, 0, 0)),
                                  Observable(pauli_z()), Observable(pauli_z()));
    REQUIRE(ex.temporal_o1 == Catch::Approx(1.0));
    REQUIRE(ex.spatial_a == Catch::Approx(1.0));
  }

  SECTION("random instances") {
    Rng rng(103);
    for (int k = 0; k < 50; ++k) {
      Index da = 2 + Index(rng.raw() % 2), db = 2 + Index(rng.raw() % 2);
      BipartiteEnsemble ens = random_ensemble(rng, da, db, 2);
      auto ex = single_expectations(ens, random_observable(rng, da), random_observable(rng, db));
      REQUIRE(std::abs(ex.temporal_o1 - ex.spatial_a) <= 1e-10);
      REQUIRE(std::abs(ex.temporal_o2 - ex.spatial_b) <= 1e-10);
    }
  }
}

TEST_CASE("weak temporal correlation", "[correlations]") {
  SECTION("reduces to the plain correlation on the flat state") {
    REQUIRE(weak_temporal_correlation(pair_scenario(identity_evolution(2),
                                                    DensityMatrix::maximally_mixed(2), pauli_z(),
                                                    pauli_z())) == Catch::Approx(1.0));
  }

  SECTION("pure input, equal observables") {
    REQUIRE(weak_temporal_correlation(pair_scenario(identity_evolution(2),
                                                    DensityMatrix::pure(ket({1, 0})), pauli_z(),
                                                    pauli_z())) == Catch::Approx(1.0));
  }

  SECTION("linearity in each observable slot") {
    Rng rng(104);
    Evolution e = random_selective_evolution(rng, 2, 2, 2);
    DensityMatrix rho = random_density(rng, 2);
    Matrix o1a = random_observable(rng, 2).mat(), o1b = random_observable(rng, 2).mat();
    Matrix o2 = random_observable(rng, 2).mat();
    double lhs = weak_temporal_correlation(pair_scenario(e, rho, o1a + 2.0 * o1b, o2));
    double rhs = weak_temporal_correlation(pair_scenario(e, rho, o1a, o2)) +
                 2.0 * weak_temporal_correlation(pair_scenario(e, rho, o1b, o2));
    REQUIRE(lhs == Catch::Approx(rhs).margin(1e-11));
  }

  SECTION("reduction chain: weak == plain == spatial") {
    Rng rng(105);
    for (int k = 0; k < 25; ++k) {
      BipartiteEnsemble ens = random_ensemble(rng, 2, 3, 2);
      Observable oa = random_observable(rng, 2), ob = random_observable(rng, 3);
      Evolution e = state_to_evolution(ens);
      auto sc = pair_scenario(e, DensityMatrix::maximally_mixed(2), oa.mat(),
                              ob.mat().transpose());
      double weak = weak_temporal_correlation(sc);
      double plain = temporal_correlation(sc);
      double spatial = spatial_correlation(SpatialScenario(ens, oa, ob));
      REQUIRE(std::abs(weak - plain) <= 1e-10);
      REQUIRE(std::abs(plain - spatial) <= 1e-10);
    }
  }
}

TEST_CASE("weak spatial correlation", "[correlations]") {
  SECTION("flat final states reduce to the plain spatial correlation") {
    Rng rng(106);
    BipartiteEnsemble ens = random_ensemble(rng, 2, 2, 2);
    Observable oa = random_observable(rng, 2), ob = random_observable(rng, 2);
    double plain = spatial_correlation(SpatialScenario(ens, oa, ob));
    double weak = weak_spatial_correlation(SpatialScenario(ens, oa, ob));
    double weak_explicit = weak_spatial_correlation(SpatialScenario(
        ens, oa, ob, DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)));
    REQUIRE(weak == Catch::Approx(plain).margin(1e-12));
    REQUIRE(weak_explicit == Catch::Approx(plain).margin(1e-12));
  }

  SECTION("Bell state with a local projection matches the weak temporal value") {
    BipartiteEnsemble bell = BipartiteEnsemble::pure(bell_phi_plus());
    DensityMatrix proj0 = DensityMatrix::pure(ket({1, 0}));
    double spatial = weak_spatial_correlation(SpatialScenario(
        bell, Observable(pauli_z()), Observable(pauli_z()), proj0, {}));
    double temporal = weak_temporal_correlation(
        pair_scenario(identity_evolution(2), proj0, pauli_z(), pauli_z()));
    REQUIRE(spatial == Catch::Approx(temporal).margin(1e-12));
  }

  SECTION("orthogonal post-selection raises") {
    BipartiteEnsemble ens = BipartiteEnsemble::pure(basis_product_state(2, 2, 0, 0));
    DensityMatrix bad = DensityMatrix::pure(ket({0, 1}));
    REQUIRE_THROWS_AS(weak_spatial_correlation(SpatialScenario(ens, Observable(pauli_z()),
                                                               Observable(pauli_z()), bad, {})),
                      std::runtime_error);
  }
}

TEST_CASE("theorem 2 equality", "[correlations]") {
  Rng rng(107);

  SECTION("flat selections reduce to theorem 1") {
    BipartiteEnsemble ens = random_ensemble(rng, 2, 2, 2);
    Observable oa = random_observable(rng, 2), ob = random_observable(rng, 2);
    auto t2 = theorem2_check(ens, oa, ob, DensityMatrix::maximally_mixed(2),
                             DensityMatrix::maximally_mixed(2));
    auto t1 = theorem1_check(ens, oa, ob);
    REQUIRE(t2.delta <= 1e-10);
    REQUIRE(std::abs(t2.rhs - t1.rhs) < 1e-11);
  }

  SECTION("random pure and mixed selections") {
    int done = 0;
    for (int k = 0; done < 60 && k < 400; ++k) {
      Index da = 2 + Index(rng.raw() % 3), db = 2 + Index(rng.raw() % 3);
      BipartiteEnsemble ens = random_ensemble(rng, da, db, 1 + Index(rng.raw() % 3));
      DensityMatrix rafi = (k % 2) ? random_density(rng, da) : random_density(rng, da, 1);
      DensityMatrix rbfi = (k % 3) ? random_density(rng, db) : random_density(rng, db, 1);
      Matrix ff = tensor(rafi.mat(), rbfi.mat());
      if ((ff * ensemble_density(ens).mat()).trace().real() < 1e-3) continue;  // conditioning
      auto chk = theorem2_check(ens, random_observable(rng, da), random_observable(rng, db),
                                rafi, rbfi);
      REQUIRE(chk.delta <= 1e-10);
      REQUIRE(std::abs(chk.d_t - chk.d_s) <= 1e-10);
      REQUIRE(std::abs(chk.n_t - chk.n_s) <= 1e-10);
      ++done;
    }
    REQUIRE(done == 60);
  }
}

TEST_CASE("three time correlation", "[correlations]") {
  auto scenario = [](DensityMatrix rho, Matrix o1, Matrix o2, Matrix o3) {
    return TemporalScenario(identity_evolution(2), std::move(rho),
                            {Observable(std::move(o1), 1.0), Observable(std::move(o2), 2.0),
                             Observable(std::move(o3), 3.0)});
  };

  SECTION("odd sigma_z product on the flat state vanishes") {
    double v = three_time_correlation(
        scenario(DensityMatrix::maximally_mixed(2), pauli_z(), pauli_z(), pauli_z()));
    REQUIRE(v == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("monogamy violation: all pairwise sigma_z correlations are 1") {
    DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
    for (int pair = 0; pair < 3; ++pair) {
      double v = weak_temporal_correlation(TemporalScenario::two_point(
          identity_evolution(2), mixed, Observable(pauli_z(), -1.0), Observable(pauli_z(), 1.0)));
      REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
    }
  }

  SECTION("order dependence on |0><0|") {
    DensityMatrix ground = DensityMatrix::pure(ket({1, 0}));
    double zxx = three_time_correlation(scenario(ground, pauli_z(), pauli_x(), pauli_x()));
    double xzx = three_time_correlation(scenario(ground, pauli_x(), pauli_z(), pauli_x()));
    REQUIRE(zxx == Catch::Approx(1.0));
    REQUIRE(xzx == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(std::abs(zxx - xzx) >= 0.1);
  }

  SECTION("non-identity evolution rejected") {
    Rng rng(109);
    REQUIRE_THROWS_AS(
        three_time_correlation(TemporalScenario(
            random_unitary_mixture(rng, 2, 2), DensityMatrix::maximally_mixed(2),
            {Observable(pauli_z(), 1.0), Observable(pauli_z(), 2.0), Observable(pauli_z(), 3.0)})),
        std::invalid_argument);
  }
}
