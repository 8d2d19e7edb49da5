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

#include <optional>
#include <utility>
#include <vector>

#include "qduality/duality.hpp"

namespace qduality {

/// Local system measured weakly before and after an instantaneous evolution
/// at t = 0, with optional pre/post-selection and internal Hamiltonian.
struct TemporalScenario {
  Evolution evolution;
  DensityMatrix rho_in;
  std::optional<DensityMatrix> rho_fi;
  std::optional<Hamiltonian> h0;
  std::vector<Observable> observables;

  TemporalScenario(Evolution e, DensityMatrix rin, std::vector<Observable> obs,
                   std::optional<DensityMatrix> rfi = {}, std::optional<Hamiltonian> ham = {})
      : evolution(std::move(e)),
        rho_in(std::move(rin)),
        rho_fi(std::move(rfi)),
        h0(std::move(ham)),
        observables(std::move(obs)) {
    require(rho_in.dim() == evolution.d_a(), "TemporalScenario: rho_in dimension mismatch");
    if (rho_fi)
      require(rho_fi->dim() == evolution.d_b(), "TemporalScenario: rho_fi dimension mismatch");
    for (size_t k = 0; k + 1 < observables.size(); ++k)
      require(observables[k].time() < observables[k + 1].time(),
              "TemporalScenario: observable times must be strictly ordered");
    if (observables.size() == 2) {
      require(observables[0].time() < 0.0 && observables[1].time() > 0.0,
              "TemporalScenario: two-point scenarios need t1 < 0 < t2");
      require(observables[0].dim() == evolution.d_a() && observables[1].dim() == evolution.d_b(),
              "TemporalScenario: observable dimension mismatch");
    }
  }

  static TemporalScenario two_point(Evolution e, DensityMatrix rin, Observable o1, Observable o2,
                                    std::optional<DensityMatrix> rfi = {},
                                    std::optional<Hamiltonian> ham = {}) {
    return TemporalScenario(std::move(e), std::move(rin), {std::move(o1), std::move(o2)},
                            std::move(rfi), std::move(ham));
  }
};

/// Two parties sharing rho_AB, measuring O_A and O_B, with optional local
/// final states.
struct SpatialScenario {
  BipartiteEnsemble ensemble;
  Observable o_a;
  Observable o_b;
  std::optional<DensityMatrix> rho_a_fi;
  std::optional<DensityMatrix> rho_b_fi;

  SpatialScenario(BipartiteEnsemble ens, Observable oa, Observable ob,
                  std::optional<DensityMatrix> rafi = {}, std::optional<DensityMatrix> rbfi = {})
      : ensemble(std::move(ens)),
        o_a(std::move(oa)),
        o_b(std::move(ob)),
        rho_a_fi(std::move(rafi)),
        rho_b_fi(std::move(rbfi)) {
    require(o_a.dim() == ensemble.d_a() && o_b.dim() == ensemble.d_b(),
            "SpatialScenario: observable dimension mismatch");
    if (rho_a_fi) require(rho_a_fi->dim() == ensemble.d_a(), "SpatialScenario: rho_A_fi mismatch");
    if (rho_b_fi) require(rho_b_fi->dim() == ensemble.d_b(), "SpatialScenario: rho_B_fi mismatch");
  }
};

/// Correlation functionals of Hermitian inputs are real analytically; enforce
/// that the numerical imaginary residue is negligible before discarding it.
inline double real_checked(Complex z, double tl = tol::hermitian) {
  if (std::abs(z.imag()) > tl * std::max(1.0, std::abs(z.real())))
    throw std::runtime_error("real_checked: non-negligible imaginary part");
  return z.real();
}

namespace detail {

inline Observable evolved(const Observable& o, const std::optional<Hamiltonian>& h0) {
  if (!h0 || h0->mat().norm() == 0.0) return o;
  return heisenberg_evolve(o, *h0, o.time());
}

/// E(q1 q2) without a final state, (1/2) Tr[O2 sum p M' {O1, rho_in} M'^dag].
inline double weak_pair_value(const Evolution& e, const DensityMatrix& rho_in,
                              const Matrix& o1, const Matrix& o2,
                              const std::optional<DensityMatrix>& rho_fi) {
  std::vector<Matrix> mp = renormalize(e, rho_in, rho_fi);
  Matrix inner = anticommutator(o1, rho_in.mat());
  Matrix pushed = Matrix::Zero(e.d_b(), e.d_b());
  for (size_t k = 0; k < mp.size(); ++k)
    pushed += e.branches()[k].p * mp[k] * inner * mp[k].adjoint();
  if (!rho_fi) return 0.5 * real_checked((o2 * pushed).trace());
  return 0.25 * real_checked((rho_fi->mat() * anticommutator(o2, pushed)).trace());
}

}  // namespace detail

/// Pointer-reading correlation of two weak measurements around the evolution;
/// reduces to the plain temporal correlation when rho_in = I/d_A and no final
/// state is selected.
inline double weak_temporal_correlation(const TemporalScenario& s) {
  require(s.observables.size() == 2, "weak_temporal_correlation: needs two observables");
  Observable o1 = detail::evolved(s.observables[0], s.h0);
  Observable o2 = detail::evolved(s.observables[1], s.h0);
  return detail::weak_pair_value(s.evolution, s.rho_in, o1.mat(), o2.mat(), s.rho_fi);
}

/// (1/d_A) Tr[O2(t2) sum p M' O1(t1) M'^dag] with the maximally mixed input.
inline double temporal_correlation(const TemporalScenario& s) {
  require(s.observables.size() == 2, "temporal_correlation: needs two observables");
  require(!s.rho_fi, "temporal_correlation: post-selected scenarios are weak-only");
  Index d = s.evolution.d_a();
  require((s.rho_in.mat() - Matrix::Identity(d, d) / double(d)).norm() <= tol::trace * double(d),
          "temporal_correlation: requires rho_in = I/d_A (use weak_temporal_correlation)");
  Observable o1 = detail::evolved(s.observables[0], s.h0);
  Observable o2 = detail::evolved(s.observables[1], s.h0);
  std::vector<Matrix> mp = renormalize(s.evolution, s.rho_in);
  Matrix pushed = Matrix::Zero(s.evolution.d_b(), s.evolution.d_b());
  for (size_t k = 0; k < mp.size(); ++k)
    pushed += s.evolution.branches()[k].p * mp[k] * o1.mat() * mp[k].adjoint();
  return real_checked((o2.mat() * pushed).trace()) / double(d);
}

/// Tr[(O_A (x) O_B) rho_AB].
inline double spatial_correlation(const SpatialScenario& s) {
  require(!s.rho_a_fi && !s.rho_b_fi,
          "spatial_correlation: final states require weak_spatial_correlation");
  Matrix joint = tensor(s.o_a.mat(), s.o_b.mat());
  return real_checked((joint * ensemble_density(s.ensemble).mat()).trace());
}

/// Weak-measured spatial correlation with local final states; an absent final
/// state is the maximally distributed one.
inline double weak_spatial_correlation(const SpatialScenario& s) {
  Index da = s.ensemble.d_a(), db = s.ensemble.d_b();
  Matrix fa = s.rho_a_fi ? s.rho_a_fi->mat() : Matrix::Identity(da, da) / double(da);
  Matrix fb = s.rho_b_fi ? s.rho_b_fi->mat() : Matrix::Identity(db, db) / double(db);
  Matrix ff = tensor(fa, fb);
  Matrix rho = ensemble_density(s.ensemble).mat();
  double denom = real_checked((ff * rho).trace());
  if (denom <= tol::trace)
    throw std::runtime_error("weak_spatial_correlation: impossible post-selection");
  Matrix lifted_a = tensor(s.o_a.mat(), Matrix::Identity(db, db));
  Matrix lifted_b = tensor(Matrix::Identity(da, da), s.o_b.mat());
  double num = real_checked((ff * anticommutator(lifted_b, anticommutator(lifted_a, rho))).trace());
  return num / (4.0 * denom);
}

struct EqualityCheck {
  double lhs = 0.0;  // temporal value
  double rhs = 0.0;  // spatial value
  double delta = 0.0;
};

/// Temporal/spatial correlation equality for the mapped evolution with
/// O1 = O_A, O2 = O_B^T (plain transpose in the computational basis).
inline EqualityCheck theorem1_check(const BipartiteEnsemble& ens, const Observable& o_a,
                                    const Observable& o_b) {
  Evolution e = state_to_evolution(ens);
  auto temporal = TemporalScenario::two_point(
      e, DensityMatrix::maximally_mixed(ens.d_a()), o_a.at_time(-1.0),
      Observable(o_b.mat().transpose(), 1.0));
  double lhs = temporal_correlation(temporal);
  double rhs = spatial_correlation(SpatialScenario(ens, o_a, o_b));
  return {lhs, rhs, std::abs(lhs - rhs)};
}

struct PostselectedEqualityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;
  // Proof-block diagnostics: matched denominators and numerators of the
  // temporal (per d_A) and spatial expressions.
  double d_t = 0.0, d_s = 0.0, n_t = 0.0, n_s = 0.0;
};

/// Theorem-2 identification: rho_in = rho_A_fi, rho_fi = rho_B_fi^T.
inline PostselectedEqualityCheck theorem2_check(const BipartiteEnsemble& ens,
                                                const Observable& o_a, const Observable& o_b,
                                                const DensityMatrix& rho_a_fi,
                                                const DensityMatrix& rho_b_fi) {
  Evolution e = state_to_evolution(ens);
  DensityMatrix rho_in = rho_a_fi;
  DensityMatrix rho_fi(rho_b_fi.mat().transpose());
  Observable o1 = o_a.at_time(-1.0);
  Observable o2(o_b.mat().transpose(), 1.0);

  auto temporal = TemporalScenario::two_point(e, rho_in, o1, o2, rho_fi);
  double lhs = weak_temporal_correlation(temporal);
  double rhs = weak_spatial_correlation(SpatialScenario(ens, o_a, o_b, rho_a_fi, rho_b_fi));

  PostselectedEqualityCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.delta = std::abs(lhs - rhs);

  const double da = double(ens.d_a());
  Complex dt = 0.0, nt = 0.0;
  for (const auto& br : e.branches()) {
    dt += br.p * (rho_fi.mat() * br.m * rho_in.mat() * br.m.adjoint()).trace();
    nt += br.p *
          (rho_fi.mat() *
           anticommutator(o2.mat(), br.m * anticommutator(o1.mat(), rho_in.mat()) * br.m.adjoint()))
              .trace();
  }
  out.d_t = real_checked(dt) / da;
  out.n_t = real_checked(nt) / da;
  Matrix rho = ensemble_density(ens).mat();
  Matrix ff = tensor(rho_a_fi.mat(), rho_b_fi.mat());
  Matrix lifted_a = tensor(o_a.mat(), Matrix::Identity(ens.d_b(), ens.d_b()));
  Matrix lifted_b = tensor(Matrix::Identity(ens.d_a(), ens.d_a()), o_b.mat());
  out.d_s = real_checked((ff * rho).trace());
  out.n_s = real_checked((ff * anticommutator(lifted_b, anticommutator(lifted_a, rho))).trace());
  return out;
}

struct SingleExpectations {
  double temporal_o1 = 0.0;
  double temporal_o2 = 0.0;
  double spatial_a = 0.0;
  double spatial_b = 0.0;
};

/// Single-operator expectations on both sides of the map. The temporal values
/// are the O2 = I and O1 = I reductions of the weak pair formula, so they
/// include the selection weighting of selective evolutions.
inline SingleExpectations single_expectations(const BipartiteEnsemble& ens, const Observable& o_a,
                                              const Observable& o_b) {
  Evolution e = state_to_evolution(ens);
  DensityMatrix rho_in = DensityMatrix::maximally_mixed(ens.d_a());
  Matrix id_b = Matrix::Identity(ens.d_b(), ens.d_b());
  Matrix id_a = Matrix::Identity(ens.d_a(), ens.d_a());
  SingleExpectations out;
  out.temporal_o1 = detail::weak_pair_value(e, rho_in, o_a.mat(), id_b, {});
  out.temporal_o2 = detail::weak_pair_value(e, rho_in, id_a, o_b.mat().transpose(), {});
  Matrix rho = ensemble_density(ens).mat();
  out.spatial_a = real_checked((tensor(o_a.mat(), id_b) * rho).trace());
  out.spatial_b = real_checked((tensor(id_a, o_b.mat()) * rho).trace());
  return out;
}

/// (1/4) Tr[O3 {O2, {O1, rho_in}}] for three weak measurements with trivial
/// evolution. The nested anticommutator makes the value order-sensitive.
inline double three_time_correlation(const TemporalScenario& s) {
  require(s.observables.size() == 3, "three_time_correlation: needs three observables");
  require(!s.rho_fi, "three_time_correlation: post-selection not supported");
  Index d = s.evolution.d_a();
  require(s.evolution.d_b() == d &&
              channel_action_distance(s.evolution, identity_evolution(d)) <= 1e-12,
          "three_time_correlation: defined for the identity evolution only");
  Observable o1 = detail::evolved(s.observables[0], s.h0);
  Observable o2 = detail::evolved(s.observables[1], s.h0);
  Observable o3 = detail::evolved(s.observables[2], s.h0);
  Matrix nested = anticommutator(o2.mat(), anticommutator(o1.mat(), s.rho_in.mat()));
  return 0.25 * real_checked((o3.mat() * nested).trace());
}

}  // namespace qduality
