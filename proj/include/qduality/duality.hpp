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

#include <algorithm>
#include <utility>
#include <vector>

#include "qduality/channels.hpp"

namespace qduality {

/// Pure bipartite state |psi> = sum_ij alpha_ij |i>|j> held as its d_A x d_B
/// amplitude matrix.
class PureBipartiteState {
 public:
  explicit PureBipartiteState(Matrix amps) : amps_(std::move(amps)) {
    require(std::abs(amps_.norm() - 1.0) <= tol::norm,
            "PureBipartiteState: amplitudes not normalized");
  }

  Index d_a() const { return amps_.rows(); }
  Index d_b() const { return amps_.cols(); }
  const Matrix& amplitudes() const { return amps_; }
  Vector ket() const { return flatten(amps_); }

 private:
  Matrix amps_;
};

/// Convex mixture {(p_mu, |psi_mu>)} over H_A (x) H_B.
class BipartiteEnsemble {
 public:
  struct Member {
    double p;
    PureBipartiteState state;
  };

  explicit BipartiteEnsemble(std::vector<Member> members) : members_(std::move(members)) {
    require(!members_.empty(), "BipartiteEnsemble: needs at least one member");
    double psum = 0.0;
    for (const Member& m : members_) {
      require(m.p > 0.0, "BipartiteEnsemble: probabilities must be positive");
      require(m.state.d_a() == members_.front().state.d_a() &&
                  m.state.d_b() == members_.front().state.d_b(),
              "BipartiteEnsemble: member dimension mismatch");
      psum += m.p;
    }
    require(std::abs(psum - 1.0) <= tol::prob_sum * double(members_.size() + 1),
            "BipartiteEnsemble: probabilities must sum to 1");
  }

  static BipartiteEnsemble pure(PureBipartiteState s) {
    return BipartiteEnsemble({Member{1.0, std::move(s)}});
  }

  Index d_a() const { return members_.front().state.d_a(); }
  Index d_b() const { return members_.front().state.d_b(); }
  const std::vector<Member>& members() const { return members_; }

 private:
  std::vector<Member> members_;
};

// The map between amplitude tensors and evolution operators. Writing alpha as
// a d_A x d_B matrix, the operator is M = sqrt(d_A) alpha^dag (a d_B x d_A
// map from H_A to H_B); every module routes through these two functions so
// the transpose/conjugation convention is fixed in exactly one place.
inline Matrix amplitudes_to_operator(const Matrix& amps) {
  return std::sqrt(double(amps.rows())) * amps.adjoint();
}
inline Matrix operator_to_amplitudes(const Matrix& m) {
  return m.adjoint() / std::sqrt(double(m.cols()));
}

/// Branch-by-branch image of an ensemble under the duality map; the canonical
/// normalization Tr(M^dag M) = d_A follows from <psi|psi> = 1.
inline Evolution state_to_evolution(const BipartiteEnsemble& ens) {
  std::vector<Evolution::Branch> branches;
  branches.reserve(ens.members().size());
  Matrix sum = Matrix::Zero(ens.d_a(), ens.d_a());
  for (const auto& m : ens.members()) {
    Matrix op = amplitudes_to_operator(m.state.amplitudes());
    sum += m.p * op.adjoint() * op;
    branches.push_back({std::move(op), m.p});
  }
  bool selective = (sum - Matrix::Identity(ens.d_a(), ens.d_a())).norm() >
                   tol::hermitian * double(ens.d_a());
  return Evolution(ens.d_a(), ens.d_b(), std::move(branches), selective);
}

inline BipartiteEnsemble evolution_to_state(const Evolution& e) {
  std::vector<BipartiteEnsemble::Member> members;
  members.reserve(e.branches().size());
  for (const auto& br : e.branches())
    members.push_back({br.p, PureBipartiteState(operator_to_amplitudes(br.m))});
  return BipartiteEnsemble(std::move(members));
}

inline DensityMatrix ensemble_density(const BipartiteEnsemble& ens) {
  Index d = ens.d_a() * ens.d_b();
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& m : ens.members()) {
    Vector psi = m.state.ket();
    rho += m.p * psi * psi.adjoint();
  }
  return DensityMatrix(rho);
}

inline DensityMatrix reduced(const BipartiteEnsemble& ens, Subsystem side) {
  return DensityMatrix(
      partial_trace(ensemble_density(ens).mat(), ens.d_a(), ens.d_b(), side));
}

struct Lemma1Diagnosis {
  bool nonselective;
  double dist_a;  // Frobenius distance of rho_A from I/d_A
  double dist_b;  // Frobenius distance of rho_B from I/d_B
};

/// Non-selective mapped evolutions have rho_A maximally mixed; unital ones
/// (e.g. mixtures of unitaries) have rho_B maximally mixed too.
inline Lemma1Diagnosis lemma1_check(const BipartiteEnsemble& ens) {
  Evolution e = state_to_evolution(ens);
  bool nonselective =
      (e.kraus_sum() - Matrix::Identity(ens.d_a(), ens.d_a())).norm() <= 1e-9 * double(ens.d_a());
  double da = frobenius_distance(reduced(ens, Subsystem::A).mat(),
                                 Matrix::Identity(ens.d_a(), ens.d_a()) / double(ens.d_a()));
  double db = frobenius_distance(reduced(ens, Subsystem::B).mat(),
                                 Matrix::Identity(ens.d_b(), ens.d_b()) / double(ens.d_b()));
  return {nonselective, da, db};
}

/// Reshape a multipartite amplitude tensor (row-major over legs, dims[k] per
/// leg) into the bipartite state for the split (group_a | complement). Rows
/// are indexed row-major within group_a in ascending leg order.
inline PureBipartiteState bipartition(const Vector& amplitudes, const std::vector<Index>& dims,
                                      const std::vector<Index>& group_a) {
  Index total = 1;
  for (Index d : dims) {
    require(d >= 1, "bipartition: dims must be positive");
    total *= d;
  }
  require(amplitudes.size() == total, "bipartition: amplitude count mismatch");
  require(!group_a.empty() && group_a.size() < dims.size(),
          "bipartition: group must be a nonempty proper subset of legs");
  std::vector<bool> in_a(dims.size(), false);
  for (Index leg : group_a) {
    require(leg >= 0 && leg < Index(dims.size()), "bipartition: leg index out of range");
    require(!in_a[size_t(leg)], "bipartition: repeated leg index");
    in_a[size_t(leg)] = true;
  }
  Index d_a = 1, d_b = 1;
  for (size_t k = 0; k < dims.size(); ++k) (in_a[k] ? d_a : d_b) *= dims[k];

  Matrix amps = Matrix::Zero(d_a, d_b);
  std::vector<Index> idx(dims.size(), 0);
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    for (size_t k = dims.size(); k-- > 0;) {
      idx[k] = rem % dims[k];
      rem /= dims[k];
    }
    Index row = 0, col = 0;
    for (size_t k = 0; k < dims.size(); ++k) {
      if (in_a[k])
        row = row * dims[k] + idx[k];
      else
        col = col * dims[k] + idx[k];
    }
    amps(row, col) = amplitudes(flat);
  }
  return PureBipartiteState(amps);
}

/// Spectral ensemble of a (possibly mixed) bipartite density matrix; any
/// ensemble realizing the same rho_AB is observationally equivalent.
inline BipartiteEnsemble spectral_ensemble(const DensityMatrix& rho_ab, Index d_a, Index d_b,
                                           double cutoff = 1e-12) {
  require(rho_ab.dim() == d_a * d_b, "spectral_ensemble: dimension mismatch");
  HermitianEig es = hermitian_eig(rho_ab.mat());
  std::vector<BipartiteEnsemble::Member> members;
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values[k] <= cutoff) continue;
    Vector v = es.vectors.col(k);
    members.push_back({es.values[k], PureBipartiteState(unflatten(v / v.norm(), d_a, d_b))});
  }
  require(!members.empty(), "spectral_ensemble: state has no support");
  double psum = 0.0;
  for (auto& m : members) psum += m.p;
  for (auto& m : members) m.p /= psum;
  return BipartiteEnsemble(std::move(members));
}

/// Representation mixing on the spatial side, |phi_nu> ~ sum_mu u_numu
/// sqrt(p_mu) |psi_mu>; mirrors mix_representation on the mapped evolution.
inline BipartiteEnsemble mix_ensemble(const BipartiteEnsemble& ens, const Matrix& u) {
  const Index k = Index(ens.members().size());
  require(u.rows() == k && u.cols() == k, "mix_ensemble: unitary size != member count");
  require((u * u.adjoint() - Matrix::Identity(k, k)).norm() <= tol::hermitian * double(k),
          "mix_ensemble: matrix not unitary");
  std::vector<BipartiteEnsemble::Member> members;
  for (Index nu = 0; nu < k; ++nu) {
    Matrix amp = Matrix::Zero(ens.d_a(), ens.d_b());
    for (Index mu = 0; mu < k; ++mu)
      amp += u(nu, mu) * std::sqrt(ens.members()[mu].p) * ens.members()[mu].state.amplitudes();
    double q = amp.squaredNorm();
    require(q > tol::norm, "mix_ensemble: degenerate member");
    members.push_back({q, PureBipartiteState(amp / std::sqrt(q))});
  }
  return BipartiteEnsemble(std::move(members));
}

/// Exchange of the two parties: alpha -> alpha^T on every member. The mapped
/// evolution transforms as M -> M^T up to canonical rescaling (the
/// time/space reflection of the duality).
inline BipartiteEnsemble swap_parties(const BipartiteEnsemble& ens) {
  std::vector<BipartiteEnsemble::Member> members;
  for (const auto& m : ens.members())
    members.push_back({m.p, PureBipartiteState(m.state.amplitudes().transpose())});
  return BipartiteEnsemble(std::move(members));
}

/// || M M^dag / d - I / d ||_F; zero exactly for maximally entangled states
/// (d_A = d_B), the unitarity measure of the Haar study.
inline double unitarity_deviation(const PureBipartiteState& s) {
  require(s.d_a() == s.d_b(), "unitarity_deviation: square case only");
  Matrix m = amplitudes_to_operator(s.amplitudes());
  double d = double(s.d_a());
  return (m * m.adjoint() / d - Matrix::Identity(s.d_b(), s.d_b()) / d).norm();
}

/// Von Neumann entropy of the reduced state of a pure bipartite state.
inline double entanglement_entropy(const PureBipartiteState& s) {
  Matrix rho_a = s.amplitudes() * s.amplitudes().adjoint();
  HermitianEig es = hermitian_eig(rho_a);
  double h = 0.0;
  for (Index k = 0; k < es.values.size(); ++k) {
    double lam = es.values[k];
    if (lam > 1e-15) h -= lam * std::log(lam);
  }
  return h;
}

}  // namespace qduality
