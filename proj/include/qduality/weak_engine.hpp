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

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "qduality/correlations.hpp"
#include "qduality/random.hpp"

namespace qduality {

/// Meter wavepacket phi(q) = (eps/2pi)^{1/4} e^{-eps q^2/4}: reading variance
/// 1/eps, and int q phi phi' dq = -1/2 independent of eps. The von Neumann
/// coupling e^{-i p O} displaces the packet by the measured eigenvalue; the
/// weak regime is eps -> 0.
struct GaussianMeter {
  double epsilon;
  explicit GaussianMeter(double eps) : epsilon(eps) {
    require(eps > 0.0, "GaussianMeter: epsilon must be positive");
  }
};

struct WeakSetup {
  TemporalScenario scenario;
  GaussianMeter meter;
};

inline constexpr double kDefaultWeakEpsilon = 1e-3;
inline const std::vector<double>& default_epsilon_ladder() {
  static const std::vector<double> ladder{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  return ladder;
}

namespace detail {

// One Gaussian-product term of the joint reading distribution: displaced
// packets phi_a phi_a' contribute a normal density at the midpoint center
// with weight damped by e^{-eps (a-a')^2 / 8}.
struct MeterTerm {
  double center1;  // (a_m + a_m')/2
  double center2;  // (b_n + b_n')/2
  Complex weight;  // system weight times both damping factors
};

struct MeterExpansion {
  std::vector<MeterTerm> terms;
  Complex total;  // sum of weights = post-selection probability at this eps
};

inline MeterExpansion meter_expansion(const WeakSetup& w) {
  const TemporalScenario& s = w.scenario;
  require(s.observables.size() == 2, "meter model: needs two observables");
  const double eps = w.meter.epsilon;
  Observable o1 = evolved(s.observables[0], s.h0);
  Observable o2 = evolved(s.observables[1], s.h0);
  HermitianEig e1 = hermitian_eig(o1.mat());
  HermitianEig e2 = hermitian_eig(o2.mat());
  const Index da = s.evolution.d_a(), db = s.evolution.d_b();

  // <u_m| rho_in |u_m'> and the post-selection weight <w_n'| R |w_n>,
  // with R = rho_fi or the identity (tracing out the system).
  Matrix rho_u = e1.vectors.adjoint() * s.rho_in.mat() * e1.vectors;
  Matrix fi_w;
  if (s.rho_fi)
    fi_w = e2.vectors.adjoint() * s.rho_fi->mat() * e2.vectors;
  else
    fi_w = Matrix::Identity(db, db);

  MeterExpansion out;
  out.total = 0.0;
  out.terms.reserve(size_t(da * da * db * db));
  for (const auto& br : s.evolution.branches()) {
    Matrix m_wu = e2.vectors.adjoint() * br.m * e1.vectors;  // <w_n| M |u_m>
    for (Index m = 0; m < da; ++m) {
      for (Index mp = 0; mp < da; ++mp) {
        Complex sys_left = rho_u(m, mp);
        if (std::abs(sys_left) < 1e-300) continue;
        double da_gap = e1.values[m] - e1.values[mp];
        double damp1 = std::exp(-eps * da_gap * da_gap / 8.0);
        double c1 = 0.5 * (e1.values[m] + e1.values[mp]);
        for (Index n = 0; n < db; ++n) {
          for (Index np = 0; np < db; ++np) {
            Complex wgt = br.p * sys_left * m_wu(n, m) * std::conj(m_wu(np, mp)) * fi_w(np, n);
            if (std::abs(wgt) < 1e-300) continue;
            double db_gap = e2.values[n] - e2.values[np];
            double damp2 = std::exp(-eps * db_gap * db_gap / 8.0);
            double c2 = 0.5 * (e2.values[n] + e2.values[np]);
            Complex full = wgt * damp1 * damp2;
            out.terms.push_back({c1, c2, full});
            out.total += full;
          }
        }
      }
    }
  }
  if (std::abs(out.total.imag()) > 1e-9 * std::max(1.0, std::abs(out.total.real())))
    throw std::runtime_error("meter model: non-real total weight");
  if (out.total.real() <= 1e-14)
    throw std::runtime_error("meter model: impossible post-selection at this epsilon");
  return out;
}

}  // namespace detail

/// E(q1 q2) of the unexpanded meter model at finite coupling eps. The system
/// weights contract exactly; the meter integrals reduce to the closed-form
/// Gaussian overlap factors, so the only approximation anywhere is floating
/// point. Scalar renormalizations of the branch operators cancel between
/// numerator and denominator.
inline double exact_meter_correlation(const WeakSetup& w) {
  detail::MeterExpansion ex = detail::meter_expansion(w);
  Complex num = 0.0;
  for (const auto& t : ex.terms) num += t.weight * t.center1 * t.center2;
  return real_checked(num, 1e-9) / ex.total.real();
}

struct ConvergenceRow {
  double epsilon;
  double exact;
  double weak_limit;
  double delta;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope;  // d log|delta| / d log eps, absent when delta ~ 0
};

/// Fitted slope of log|delta| vs log eps; first-order convergence shows as
/// slope ~ 1.
inline std::optional<double> fit_loglog_slope(const std::vector<ConvergenceRow>& rows,
                                              double floor = 1e-13) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.delta <= floor) continue;
    double x = std::log(r.epsilon), y = std::log(r.delta);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  double denom = double(n) * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return std::nullopt;
  return (double(n) * sxy - sx * sy) / denom;
}

inline ConvergenceStudy convergence_study(const TemporalScenario& scenario,
                                          const std::vector<double>& eps_ladder) {
  require(!eps_ladder.empty(), "convergence_study: empty ladder");
  for (size_t k = 0; k + 1 < eps_ladder.size(); ++k)
    require(eps_ladder[k] > eps_ladder[k + 1] && eps_ladder[k + 1] > 0.0,
            "convergence_study: ladder must be positive descending");
  double weak = weak_temporal_correlation(scenario);
  ConvergenceStudy out;
  for (double eps : eps_ladder) {
    double exact = exact_meter_correlation({scenario, GaussianMeter(eps)});
    out.rows.push_back({eps, exact, weak, std::abs(exact - weak)});
  }
  out.slope = fit_loglog_slope(out.rows);
  return out;
}

struct MeterSamples {
  std::vector<std::array<double, 2>> samples;
  double estimate = 0.0;
  double std_error = 0.0;
};

namespace detail {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Signed-mixture CDF along one axis; the physical density is nonnegative, so
// the CDF is monotone and bisection inversion is safe.
struct AxisMixture {
  std::vector<double> centers;
  std::vector<double> weights;  // real parts; conjugate terms pair up
  double sigma;
  double lo, hi;

  double cdf(double x) const {
    double acc = 0.0;
    for (size_t k = 0; k < centers.size(); ++k)
      acc += weights[k] * normal_cdf((x - centers[k]) / sigma);
    return acc;
  }

  double invert(double target) const {
    double a = lo, b = hi;
    for (int it = 0; it < 96; ++it) {
      double mid = 0.5 * (a + b);
      (cdf(mid) < target ? a : b) = mid;
    }
    return 0.5 * (a + b);
  }
};

}  // namespace detail

/// Draws (q1, q2) from the exact joint reading density at finite eps: the
/// marginal of q1 and the conditional of q2 are analytic signed Gaussian
/// mixtures inverted by bisection on a bracketing grid, so the sampler has no
/// bias beyond the inversion tolerance. Fixed seed gives bit-identical
/// samples; chunks of fixed size draw from independently derived substreams,
/// making the result independent of the worker count.
inline MeterSamples sample_meters(const WeakSetup& w, std::int64_t n, std::uint64_t seed,
                                  int jobs = 1) {
  require(n >= 1, "sample_meters: need at least one sample");
  detail::MeterExpansion ex = detail::meter_expansion(w);
  const double sigma = 1.0 / std::sqrt(w.meter.epsilon);
  const double total = ex.total.real();

  double lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
  for (const auto& t : ex.terms) {
    lo1 = std::min(lo1, t.center1);
    hi1 = std::max(hi1, t.center1);
    lo2 = std::min(lo2, t.center2);
    hi2 = std::max(hi2, t.center2);
  }
  const double pad = 10.0 * sigma;

  detail::AxisMixture marginal;
  marginal.sigma = sigma;
  marginal.lo = lo1 - pad;
  marginal.hi = hi1 + pad;
  {
    // group by center1, integrating q2 out analytically
    for (const auto& t : ex.terms) {
      marginal.centers.push_back(t.center1);
      marginal.weights.push_back(t.weight.real() / total);
    }
  }
  double mass = marginal.cdf(marginal.hi) - marginal.cdf(marginal.lo);
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::runtime_error("sample_meters: reading density grid under-resolved");

  const std::int64_t chunk = 4096;
  const std::int64_t chunks = (n + chunk - 1) / chunk;
  MeterSamples out;
  out.samples.resize(size_t(n));

  auto run_chunk = [&](std::int64_t c) {
    Rng rng = Rng::derived(seed, std::uint64_t(c));
    std::int64_t begin = c * chunk, end = std::min(n, begin + chunk);
    detail::AxisMixture conditional;
    conditional.sigma = sigma;
    conditional.lo = lo2 - pad;
    conditional.hi = hi2 + pad;
    conditional.centers.resize(ex.terms.size());
    conditional.weights.resize(ex.terms.size());
    for (std::int64_t i = begin; i < end; ++i) {
      double u1 = rng.uniform(), u2 = rng.uniform();
      double q1 = marginal.invert(u1);
      double norm = 0.0;
      for (size_t k = 0; k < ex.terms.size(); ++k) {
        const auto& t = ex.terms[k];
        double z = (q1 - t.center1) / sigma;
        double g = std::exp(-0.5 * z * z);
        conditional.centers[k] = t.center2;
        double wk = t.weight.real() * g;
        conditional.weights[k] = wk;
        norm += wk;
      }
      for (auto& wk : conditional.weights) wk /= norm;
      double q2 = conditional.invert(u2);
      out.samples[size_t(i)] = {q1, q2};
    }
  };

  if (jobs <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::int64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  double mean = 0.0;
  for (const auto& s : out.samples) mean += s[0] * s[1];
  mean /= double(n);
  double var = 0.0;
  for (const auto& s : out.samples) {
    double d = s[0] * s[1] - mean;
    var += d * d;
  }
  var /= std::max<std::int64_t>(1, n - 1);
  out.estimate = mean;
  out.std_error = std::sqrt(var / double(n));
  return out;
}

struct AncillaRealization {
  Index ancilla_dim;
  Vector psi_fi;  // pure system target of the joint post-selection
  Matrix u_int;   // unitary on H_S (x) H_anc
  Vector chi;     // U^dag (psi_fi (x) |0_anc>), the purification of rho_fi
};

namespace detail {

inline Matrix orthonormal_basis_from(const Vector& first) {
  const Index d = first.size();
  Matrix basis(d, d);
  basis.col(0) = first / first.norm();
  Index filled = 1;
  for (Index i = 0; i < d && filled < d; ++i) {
    Vector v = Vector::Zero(d);
    v[i] = 1.0;
    for (Index k = 0; k < filled; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    double nrm = v.norm();
    if (nrm > 1e-8) basis.col(filled++) = v / nrm;
  }
  require(filled == d, "orthonormal_basis_from: completion failed");
  return basis;
}

}  // namespace detail

/// Post-selection onto a mixed rho_fi realized by a system-ancilla unitary
/// followed by pure post-selection of both: projecting onto
/// U^dag(|psi_fi> (x) |0_anc>) = |chi>, the rank-revealing purification of
/// rho_fi, with the ancilla weighted by the (unnormalized) identity. Pure
/// rho_fi needs no ancilla.
inline AncillaRealization ancilla_postselection(const DensityMatrix& rho_fi) {
  HermitianEig es = hermitian_eig(rho_fi.mat());
  std::vector<std::pair<double, Vector>> kept;
  for (Index k = 0; k < es.values.size(); ++k)
    if (es.values[k] > 1e-12) kept.push_back({es.values[k], es.vectors.col(k)});
  require(!kept.empty(), "ancilla_postselection: state has no support");
  const Index d = rho_fi.dim();
  const Index r = Index(kept.size());

  AncillaRealization out;
  out.ancilla_dim = r;
  out.psi_fi = kept[0].second;
  if (r == 1) {
    out.u_int = Matrix::Identity(d, d);
    out.chi = out.psi_fi;
    return out;
  }
  // |chi> = sum_k sqrt(lambda_k) |v_k>|k>, joint index (s, a) -> s*r + a
  Vector chi = Vector::Zero(d * r);
  for (Index k = 0; k < r; ++k)
    for (Index s = 0; s < d; ++s) chi[s * r + k] += std::sqrt(kept[size_t(k)].first) *
                                                    kept[size_t(k)].second[s];
  Vector target = Vector::Zero(d * r);
  for (Index s = 0; s < d; ++s) target[s * r + 0] = out.psi_fi[s];

  Matrix b1 = detail::orthonormal_basis_from(chi);
  Matrix b2 = detail::orthonormal_basis_from(target);
  out.u_int = b2 * b1.adjoint();
  out.chi = chi;
  return out;
}

/// Rewrites a post-selected scenario as the equivalent ancilla-extended one:
/// channel M (x) I_anc, observables O (x) I_anc, input rho_in (x) I/r, and the
/// pure joint final state |chi><chi|. Equality with the direct mixed formula
/// is the content of the ancilla construction.
inline TemporalScenario extend_with_ancilla(const TemporalScenario& s) {
  require(s.rho_fi.has_value(), "extend_with_ancilla: scenario has no final state");
  require(s.observables.size() == 2, "extend_with_ancilla: needs two observables");
  AncillaRealization anc = ancilla_postselection(*s.rho_fi);
  const Index r = anc.ancilla_dim;
  Matrix id_r = Matrix::Identity(r, r);

  std::vector<Evolution::Branch> branches;
  for (const auto& br : s.evolution.branches()) branches.push_back({tensor(br.m, id_r), br.p});
  Evolution extended(s.evolution.d_a() * r, s.evolution.d_b() * r, std::move(branches),
                     s.evolution.selective());

  DensityMatrix rho_in(tensor(s.rho_in.mat(), id_r / double(r)));
  DensityMatrix rho_fi = DensityMatrix::pure(anc.chi);
  Observable o1(tensor(s.observables[0].mat(), id_r), s.observables[0].time());
  Observable o2(tensor(s.observables[1].mat(), id_r), s.observables[1].time());
  std::optional<Hamiltonian> h0;
  if (s.h0) h0 = Hamiltonian(tensor(s.h0->mat(), id_r));
  return TemporalScenario::two_point(std::move(extended), std::move(rho_in), std::move(o1),
                                     std::move(o2), std::move(rho_fi), std::move(h0));
}

}  // namespace qduality
