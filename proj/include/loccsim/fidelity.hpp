// Copyright 2026 The loccsim Authors
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

// Average fidelity of a (measurement, guess) pair, optimal guessing for a
// fixed measurement, and the upper bounds used to bracket local fidelity.

#include "loccsim/families.hpp"

#include <map>
#include <string>
#include <vector>

namespace loccsim {

class Povm {
 public:
  Povm(Dims dims, std::vector<Matrix> elements) : dims_(std::move(dims)), elements_(std::move(elements)) {
    check_dims(dims_);
    const auto side = static_cast<Eigen::Index>(total_dim(dims_));
    if (elements_.empty()) throw std::invalid_argument("POVM has no elements");
    Matrix sum = Matrix::Zero(side, side);
    for (const auto& e : elements_) {
      if (e.rows() != side || e.cols() != side) throw std::invalid_argument("POVM element has wrong size");
      if ((e - e.adjoint()).cwiseAbs().maxCoeff() > kTolerance) throw std::invalid_argument("POVM element not Hermitian");
      Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kTolerance) throw std::invalid_argument("POVM element not positive semidefinite");
      sum += e;
    }
    completeness_residual_ = (sum - Matrix::Identity(side, side)).norm();
    if (completeness_residual_ > kTolerance) throw std::invalid_argument("POVM elements do not sum to identity");
  }

  /// Projective measurement in the computational basis of the full space.
  static Povm computational(const Dims& dims) {
    const auto side = static_cast<Eigen::Index>(total_dim(dims));
    std::vector<Matrix> es;
    for (Eigen::Index i = 0; i < side; ++i) {
      Matrix e = Matrix::Zero(side, side);
      e(i, i) = 1.0;
      es.push_back(std::move(e));
    }
    return Povm(dims, std::move(es));
  }

  /// Projectors onto the given orthonormal states (must span the space).
  static Povm projective(const std::vector<StateVector>& states) {
    std::vector<Matrix> es;
    for (const auto& s : states) es.push_back(s.amps() * s.amps().adjoint());
    return Povm(states.front().dims(), std::move(es));
  }

  const Dims& dims() const { return dims_; }
  const std::vector<Matrix>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  double completeness_residual() const { return completeness_residual_; }

 private:
  Dims dims_;
  std::vector<Matrix> elements_;
  double completeness_residual_ = 0.0;
};

/// Outcome index -> guessed state.
struct GuessStrategy {
  std::vector<StateVector> guesses;
};

/// sum_{i,a} p_i <psi_i|M_a|psi_i> |<psi_i|phi_a>|^2
inline double average_fidelity(const Ensemble& ens, const Povm& m, const GuessStrategy& g) {
  if (m.dims() != ens.dims()) throw std::invalid_argument("average_fidelity: POVM dims do not match ensemble");
  if (g.guesses.size() != m.size()) throw std::invalid_argument("average_fidelity: one guess per outcome required");
  double f = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (g.guesses[a].dims() != ens.dims()) throw std::invalid_argument("average_fidelity: guess dims mismatch");
    for (const auto& mem : ens.members()) {
      const double prob = mem.state.amps().dot(m.elements()[a] * mem.state.amps()).real();
      f += mem.prior * prob * std::norm(mem.state.inner(g.guesses[a]));
    }
  }
  return f;
}

struct OptimalGuess {
  GuessStrategy strategy;
  double fidelity = 0.0;
};

/// For each outcome the guess is the principal eigenvector of
/// rho_a = sum_i p_i <psi_i|M_a|psi_i> |psi_i><psi_i|.
inline OptimalGuess optimal_guess(const Ensemble& ens, const Povm& m) {
  if (m.dims() != ens.dims()) throw std::invalid_argument("optimal_guess: POVM dims do not match ensemble");
  std::vector<Vector> vs;
  for (const auto& mem : ens.members()) vs.push_back(mem.state.amps());
  OptimalGuess out;
  for (const auto& e : m.elements()) {
    std::vector<double> w;
    for (const auto& mem : ens.members()) w.push_back(mem.prior * std::max(0.0, mem.state.amps().dot(e * mem.state.amps()).real()));
    out.strategy.guesses.emplace_back(ens.dims(), principal_eigenvector_of_mixture(vs, w));
  }
  out.fidelity = average_fidelity(ens, m, out.strategy);
  return out;
}

/// Global optimum for mutually orthogonal members: 1, achieved by measuring
/// the member projectors (completed to the identity) and guessing the member.
inline double global_optimum_orthonormal(const Ensemble& ens) {
  if (!ens.is_orthonormal()) {
    throw std::invalid_argument("global_optimum_orthonormal: members are not mutually orthogonal");
  }
  return 1.0;
}

/// d/k: upper bound on local fidelity for k equiprobable d x d maximally
/// entangled states.
inline double mes_bound(std::size_t k, std::size_t d) {
  if (k < 1 || d < 2) throw std::invalid_argument("mes_bound: need k >= 1, d >= 2");
  return static_cast<double>(d) / static_cast<double>(k);
}

/// True when every Schmidt coefficient across `cut` equals 1/sqrt(d) with
/// d = dim of both sides.
inline bool is_maximally_entangled(const StateVector& psi, const Cut& cut) {
  const auto sd = schmidt(psi, cut);
  const auto da = total_dim(sd.left_dims);
  const auto db = total_dim(sd.right_dims);
  if (da != db) return false;
  const double target = 1.0 / std::sqrt(static_cast<double>(da));
  for (double c : sd.coefficients) {
    if (std::abs(c - target) > 1e-7) return false;
  }
  return sd.coefficients.size() == da;
}

inline double max_squared_schmidt_coefficient(const StateVector& psi, const Cut& cut) {
  const double c = schmidt(psi, cut).coefficients.front();
  return c * c;
}

/// Returns 1/2 as an upper bound on separable fidelity across `pc` when the
/// ensemble is a complete equiprobable orthonormal basis whose members all
/// have squared maximal Schmidt coefficient <= 1/2 across that cut.
inline double schmidt_coeff_sep_bound(const Ensemble& ens, const PartyCut& pc) {
  if (!ens.is_complete_basis()) throw std::invalid_argument("schmidt_coeff_sep_bound: ensemble is not a complete orthonormal basis");
  const double p0 = ens[0].prior;
  for (const auto& m : ens.members()) {
    if (std::abs(m.prior - p0) > kTolerance) throw std::invalid_argument("schmidt_coeff_sep_bound: priors are not uniform");
  }
  const Cut cut = to_cut(ens.layout(), pc);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double c2 = max_squared_schmidt_coefficient(ens[i].state, cut);
    if (c2 > 0.5 + kTolerance) {
      throw std::domain_error("schmidt_coeff_sep_bound: member " + std::to_string(i) + " has squared max Schmidt coefficient " +
                              std::to_string(c2) + " > 1/2 across " + pc.label());
    }
  }
  return 0.5;
}

/// Minimum over per-bipartition bounds.
inline double bipartition_min_bound(const std::map<std::string, double>& bounds) {
  if (bounds.empty()) throw std::invalid_argument("bipartition_min_bound: empty map");
  double m = bounds.begin()->second;
  for (const auto& [k, v] : bounds) m = std::min(m, v);
  return m;
}

struct EntropyBoundRow {
  PartyCut cut;
  double resource_entropy = 0.0;  // E(Psi_{A|B}); 0 when the resource misses a side
  double mean_member_entropy = 0.0;
  bool satisfied = false;         // resource_entropy >= mean - tol
};

struct EntropyBoundReport {
  std::vector<EntropyBoundRow> rows;
  /// The necessary condition only constrains complete orthonormal bases.
  bool applicable = false;
  /// Every cut has positive mean member entropy, so a perfect resource must
  /// span every party.
  bool requires_all_parties = false;
  /// The resource is entangled across every cut.
  bool resource_spans_all_cuts = false;
  bool pass = false;
};

/// Compares the resource's entanglement entropy with the prior-weighted mean
/// member entropy across every party bipartition of the ensemble layout.
/// `resource_layout` names a subset of the ensemble's parties.
inline EntropyBoundReport entropy_bound_check(const StateVector& resource, const PartyLayout& resource_layout,
                                              const Ensemble& ens) {
  if (resource_layout.num_subsystems() != resource.num_subsystems()) {
    throw std::invalid_argument("entropy_bound_check: resource layout does not match resource state");
  }
  for (const auto& p : resource_layout.parties()) {
    if (!ens.layout().has_party(p.name)) throw std::invalid_argument("entropy_bound_check: resource party '" + p.name + "' not in ensemble");
  }
  EntropyBoundReport rep;
  rep.applicable = ens.is_complete_basis();
  rep.requires_all_parties = true;
  rep.resource_spans_all_cuts = true;
  bool all_ok = true;
  for (const auto& pc : all_party_cuts(ens.layout())) {
    EntropyBoundRow row;
    row.cut = pc;
    const Cut cut = to_cut(ens.layout(), pc);
    for (const auto& m : ens.members()) row.mean_member_entropy += m.prior * entanglement_entropy(m.state, cut);
    std::vector<std::string> ra, rb;
    for (const auto& n : pc.a) {
      if (resource_layout.has_party(n)) ra.push_back(n);
    }
    for (const auto& n : pc.b) {
      if (resource_layout.has_party(n)) rb.push_back(n);
    }
    if (!ra.empty() && !rb.empty()) {
      row.resource_entropy = entanglement_entropy(resource, Cut{resource_layout.subsystems_of(ra), resource_layout.subsystems_of(rb)});
    }
    row.satisfied = row.resource_entropy >= row.mean_member_entropy - kTolerance;
    all_ok = all_ok && row.satisfied;
    if (row.mean_member_entropy <= kTolerance) rep.requires_all_parties = false;
    if (row.resource_entropy <= kTolerance) rep.resource_spans_all_cuts = false;
    rep.rows.push_back(std::move(row));
  }
  rep.pass = !rep.applicable || all_ok;
  return rep;
}

/// p * f_opt + (1 - p) * f_fallback
inline double mixed_strategy_fidelity(double p, double f_opt, double f_local_fallback) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("mixed_strategy_fidelity: p outside [0,1]");
  return p * f_opt + (1.0 - p) * f_local_fallback;
}

/// Maximal LOCC probability of converting `psi` into a rank-r maximally
/// entangled state across `cut`:
///   min_{1 <= l <= r} r / (r - l + 1) * sum_{i >= l} lambda_i
/// with lambda the squared Schmidt coefficients in descending order.
inline double vidal_conversion_probability(const StateVector& psi, const Cut& cut, std::size_t r) {
  if (r < 2) throw std::invalid_argument("vidal_conversion_probability: target rank must be >= 2");
  auto lambda = schmidt(psi, cut).squared();
  lambda.resize(std::max(lambda.size(), r), 0.0);
  double best = 1.0;
  for (std::size_t l = 1; l <= r; ++l) {
    double tail = 0.0;
    for (std::size_t i = l - 1; i < lambda.size(); ++i) tail += lambda[i];
    best = std::min(best, static_cast<double>(r) / static_cast<double>(r - l + 1) * tail);
  }
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace loccsim
