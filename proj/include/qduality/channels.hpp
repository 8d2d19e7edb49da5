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
#include <optional>
#include <utility>
#include <vector>

#include "qduality/quantum_core.hpp"

namespace qduality {

/// Completely positive map given by raw Kraus operators (d_B x d_A each).
struct KrausSet {
  Index d_a = 0;
  Index d_b = 0;
  std::vector<Matrix> ops;

  void validate() const {
    require(d_a >= 1 && d_b >= 1, "KrausSet: dims must be positive");
    require(!ops.empty(), "KrausSet: needs at least one operator");
    for (const Matrix& k : ops)
      require(k.rows() == d_b && k.cols() == d_a, "KrausSet: operator shape mismatch");
  }

  /// Whether sum K^dag K = I holds (the closed-system constraint).
  bool trace_preserving(double tl = tol::hermitian) const {
    Matrix s = Matrix::Zero(d_a, d_a);
    for (const Matrix& k : ops) s += k.adjoint() * k;
    return (s - Matrix::Identity(d_a, d_a)).norm() <= tl;
  }
};

/// Generalized evolution as a set of canonically normalized operators with
/// branch probabilities: Tr(M^dag M) = d_A for every branch and sum p = 1.
/// Non-selective evolutions additionally satisfy sum p M^dag M = I; the
/// selective flag records which regime the set describes.
class Evolution {
 public:
  struct Branch {
    Matrix m;  // d_B x d_A
    double p;
  };

  Evolution(Index d_a, Index d_b, std::vector<Branch> branches, bool selective)
      : d_a_(d_a), d_b_(d_b), branches_(std::move(branches)), selective_(selective) {
    require(d_a_ >= 1 && d_b_ >= 1, "Evolution: dims must be positive");
    require(!branches_.empty(), "Evolution: needs at least one branch");
    double psum = 0.0;
    for (const Branch& br : branches_) {
      require(br.m.rows() == d_b_ && br.m.cols() == d_a_, "Evolution: branch shape mismatch");
      require(br.p > 0.0, "Evolution: probabilities must be positive");
      double n = (br.m.adjoint() * br.m).trace().real();
      require(std::abs(n - double(d_a_)) <= tol::hermitian * double(d_a_),
              "Evolution: branch not canonically normalized, Tr(M^dag M) != d_A");
      psum += br.p;
    }
    require(std::abs(psum - 1.0) <= tol::prob_sum * double(branches_.size() + 1),
            "Evolution: probabilities must sum to 1");
    if (!selective_)
      require((kraus_sum() - Matrix::Identity(d_a_, d_a_)).norm() <=
                  tol::hermitian * double(d_a_),
              "Evolution: non-selective flag requires sum p M^dag M = I");
  }

  Index d_a() const { return d_a_; }
  Index d_b() const { return d_b_; }
  const std::vector<Branch>& branches() const { return branches_; }
  bool selective() const { return selective_; }

  Matrix kraus_sum() const {
    Matrix s = Matrix::Zero(d_a_, d_a_);
    for (const Branch& br : branches_) s += br.p * br.m.adjoint() * br.m;
    return s;
  }

 private:
  Index d_a_, d_b_;
  std::vector<Branch> branches_;
  bool selective_;
};

/// Canonical form of a Kraus set: M = sqrt(d_A) K / sqrt(Tr K^dag K) with
/// p = Tr(K^dag K) / sum_nu Tr(K_nu^dag K_nu). For trace-preserving sets the
/// normalizer is d_A and p M rho M^dag = K rho K^dag branch by branch; for
/// selective sets, whose probabilities are arbitrary, the relative weights
/// are kept and rescaled to sum to one.
inline Evolution canonicalize(const KrausSet& k) {
  k.validate();
  std::vector<double> weights;
  double wsum = 0.0;
  for (const Matrix& op : k.ops) {
    double w = (op.adjoint() * op).trace().real();
    require(w > 0.0, "canonicalize: zero Kraus operator");
    weights.push_back(w);
    wsum += w;
  }
  std::vector<Evolution::Branch> branches;
  branches.reserve(k.ops.size());
  for (size_t i = 0; i < k.ops.size(); ++i)
    branches.push_back(
        {std::sqrt(double(k.d_a) / weights[i]) * k.ops[i], weights[i] / wsum});
  bool selective = !k.trace_preserving();
  return Evolution(k.d_a, k.d_b, std::move(branches), selective);
}

inline Evolution unitary_evolution(const Matrix& u) {
  return canonicalize(KrausSet{u.cols(), u.rows(), {u}});
}

inline Evolution identity_evolution(Index d) {
  return unitary_evolution(Matrix::Identity(d, d));
}

/// Full computational-basis dephasing {|i><i|}.
inline Evolution full_dephasing(Index d) {
  KrausSet k{d, d, {}};
  for (Index i = 0; i < d; ++i) {
    Matrix p = Matrix::Zero(d, d);
    p(i, i) = 1.0;
    k.ops.push_back(p);
  }
  return canonicalize(k);
}

/// Qubit phase-flip channel {sqrt(1-q) I, sqrt(q) sigma_z}; off-diagonal
/// observable components scale by (1 - 2q).
inline Evolution phase_flip(double q) {
  require(q > 0.0 && q < 1.0, "phase_flip: q must lie in (0,1)");
  Matrix i2 = Matrix::Identity(2, 2);
  return canonicalize(KrausSet{2, 2, {std::sqrt(1.0 - q) * i2, std::sqrt(q) * pauli_z()}});
}

/// Trace-preserving renormalization M' = M / sqrt(Tr[sum_nu p_nu M_nu^dag M_nu rho_in]),
/// or, when a final state is given,
/// M' = M / sqrt(Tr[rho_fi sum_nu p_nu M_nu rho_in M_nu^dag]).
/// The scale is branch-independent. A vanishing denominator signals an
/// impossible pre/post-selection.
inline std::vector<Matrix> renormalize(const Evolution& e, const DensityMatrix& rho_in,
                                       const std::optional<DensityMatrix>& rho_fi = {}) {
  require(rho_in.dim() == e.d_a(), "renormalize: input state dimension mismatch");
  double denom;
  if (rho_fi) {
    require(rho_fi->dim() == e.d_b(), "renormalize: final state dimension mismatch");
    Complex acc = 0.0;
    for (const auto& br : e.branches())
      acc += br.p * (rho_fi->mat() * br.m * rho_in.mat() * br.m.adjoint()).trace();
    denom = acc.real();
  } else {
    denom = (e.kraus_sum() * rho_in.mat()).trace().real();
  }
  if (denom <= tol::trace)
    throw std::runtime_error("renormalize: vanishing denominator (impossible post-selection)");
  double scale = 1.0 / std::sqrt(denom);
  std::vector<Matrix> out;
  out.reserve(e.branches().size());
  for (const auto& br : e.branches()) out.push_back(scale * br.m);
  return out;
}

/// rho -> sum p M' rho M'^dag. Without a final state the result has unit trace
/// by construction of M'; with one, the post-selection probability is divided
/// out so a valid state is returned either way.
inline DensityMatrix apply(const Evolution& e, const DensityMatrix& rho,
                           const std::optional<DensityMatrix>& rho_fi = {}) {
  std::vector<Matrix> mp = renormalize(e, rho, rho_fi);
  Matrix out = Matrix::Zero(e.d_b(), e.d_b());
  for (size_t i = 0; i < mp.size(); ++i)
    out += e.branches()[i].p * mp[i] * rho.mat() * mp[i].adjoint();
  double tr = out.trace().real();
  if (!rho_fi)
    require(std::abs(tr - 1.0) <= tol::trace, "apply: trace not preserved");
  return DensityMatrix(out / tr);
}

/// Heisenberg action with the same conjugation side as states:
/// O -> sum p M O M^dag (equals sum K O K^dag for the canonical set).
inline Observable apply_heisenberg(const Evolution& e, const Observable& o) {
  require(o.dim() == e.d_a(), "apply_heisenberg: dimension mismatch");
  Matrix out = Matrix::Zero(e.d_b(), e.d_b());
  for (const auto& br : e.branches()) out += br.p * br.m * o.mat() * br.m.adjoint();
  return Observable(out, o.time());
}

/// Representation transformation N_nu ~ sum_mu U_numu sqrt(p_mu) M_mu,
/// recanonicalized to Tr(N^dag N) = d_A with q_nu = Tr(N~^dag N~)/d_A so that
/// the induced channel action is unchanged on every input. rho_in enters the
/// intermediate primed operators only through a branch-independent scale and
/// cancels in the canonical set.
inline Evolution mix_representation(const Evolution& e, const Matrix& u,
                                    const DensityMatrix& rho_in) {
  const Index k = Index(e.branches().size());
  require(u.rows() == k && u.cols() == k, "mix_representation: unitary size != branch count");
  require((u * u.adjoint() - Matrix::Identity(k, k)).norm() <= tol::hermitian * double(k),
          "mix_representation: matrix not unitary");
  std::vector<Matrix> mp = renormalize(e, rho_in);
  std::vector<Evolution::Branch> branches;
  double scale2 = (e.kraus_sum() * rho_in.mat()).trace().real();  // undoes the primed scale
  for (Index nu = 0; nu < k; ++nu) {
    Matrix n = Matrix::Zero(e.d_b(), e.d_a());
    for (Index mu = 0; mu < k; ++mu)
      n += u(nu, mu) * std::sqrt(e.branches()[mu].p) * mp[mu];
    double w = (n.adjoint() * n).trace().real() * scale2;
    require(w > tol::norm, "mix_representation: degenerate branch");
    branches.push_back({std::sqrt(double(e.d_a()) / ((n.adjoint() * n).trace().real())) * n,
                        w / double(e.d_a())});
  }
  return Evolution(e.d_a(), e.d_b(), std::move(branches), e.selective());
}

/// Action of the canonical set on a matrix, rho -> sum p M rho M^dag.
inline Matrix raw_action(const Evolution& e, const Matrix& x) {
  Matrix out = Matrix::Zero(e.d_b(), e.d_b());
  for (const auto& br : e.branches()) out += br.p * br.m * x * br.m.adjoint();
  return out;
}

/// Evolutions are equal when their channel actions agree on a full operator
/// basis; operator lists may differ by branch phases and mixing.
inline double channel_action_distance(const Evolution& e1, const Evolution& e2) {
  require(e1.d_a() == e2.d_a() && e1.d_b() == e2.d_b(),
          "channel_action_distance: dimension mismatch");
  double worst = 0.0;
  for (Index i = 0; i < e1.d_a(); ++i)
    for (Index j = 0; j < e1.d_a(); ++j) {
      Matrix unit = Matrix::Zero(e1.d_a(), e1.d_a());
      unit(i, j) = 1.0;
      worst = std::max(worst, (raw_action(e1, unit) - raw_action(e2, unit)).norm());
    }
  return worst;
}

}  // namespace qduality
