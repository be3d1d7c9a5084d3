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

// Concrete LOCC protocols: teleportation, partial teleportation of lattice
// states, sequential Bell measurements for GHZ bases, graph-state decoding,
// and a few resource-free baselines.

#include "loccsim/locc.hpp"

#include <functional>
#include <numeric>

namespace loccsim {

// ---------------------------------------------------------------------------
// Local instruments

/// Weyl operator X^a Z^b on C^d with a = t % d, b = t / d. For d = 2 the
/// order is I, X, Z, XZ.
inline Matrix weyl(int d, int t) {
  const int a = t % d;
  const int b = t / d;
  const double pi = std::acos(-1.0);
  Matrix x = Matrix::Zero(d, d);
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    x((j + 1) % d, j) = 1.0;
    z(j, j) = std::polar(1.0, 2.0 * pi * j / d);
  }
  Matrix out = Matrix::Identity(d, d);
  for (int i = 0; i < a; ++i) out = x * out;
  Matrix zb = Matrix::Identity(d, d);
  for (int i = 0; i < b; ++i) zb = z * zb;
  return out * zb;
}

/// (I (x) W_t)|Phi_d> on C^d (x) C^d. For d = 2 the order is
/// Phi+, Psi+, Phi-, Psi-.
inline Vector generalized_bell_state(int d, int t) {
  Vector phi = Vector::Zero(d * d);
  for (int j = 0; j < d; ++j) phi[j * d + j] = 1.0 / std::sqrt(static_cast<double>(d));
  return kron(Matrix::Identity(d, d), weyl(d, t)) * phi;
}

inline Instrument unitary_instrument(std::string party, std::vector<int> targets, Matrix u) {
  return Instrument{std::move(party), std::move(targets), {std::move(u)}};
}

/// Projective measurement onto the given orthonormal local vectors, with a
/// completing projector appended when they do not span the space.
inline Instrument projective_instrument(std::string party, std::vector<int> targets, const std::vector<Vector>& states) {
  Instrument inst{std::move(party), std::move(targets), {}};
  const auto k = states.front().size();
  Matrix rest = Matrix::Identity(k, k);
  for (const auto& s : states) {
    Matrix p = s * s.adjoint();
    rest -= p;
    inst.kraus.push_back(std::move(p));
  }
  if (rest.norm() > kTolerance) inst.kraus.push_back(std::move(rest));
  return inst;
}

/// Generalized Bell measurement on (first target: dim d) (x) (remaining
/// targets: total dim d).
inline Instrument bell_instrument(std::string party, std::vector<int> targets, int d) {
  std::vector<Vector> states;
  for (int t = 0; t < d * d; ++t) states.push_back(generalized_bell_state(d, t));
  return projective_instrument(std::move(party), std::move(targets), states);
}

inline Instrument computational_instrument(std::string party, std::vector<int> targets, const Dims& dims) {
  std::size_t k = 1;
  for (int t : targets) k *= static_cast<std::size_t>(dims[static_cast<std::size_t>(t)]);
  std::vector<Vector> states;
  for (std::size_t i = 0; i < k; ++i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(k));
    e[static_cast<Eigen::Index>(i)] = 1.0;
    states.push_back(std::move(e));
  }
  return projective_instrument(std::move(party), std::move(targets), states);
}

/// Maps |b, a_1..a_k> to |b, a_1 xor b, ..., a_k xor b> on 1 + k qubits.
inline Matrix cnot_fanout(int k) {
  const int n = k + 1;
  const auto side = Eigen::Index{1} << n;
  Matrix u = Matrix::Zero(side, side);
  const Eigen::Index rest_mask = (Eigen::Index{1} << k) - 1;
  for (Eigen::Index i = 0; i < side; ++i) {
    const bool control = (i >> k) & 1;
    u(control ? (i ^ rest_mask) : i, i) = 1.0;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Tree assembly

/// A stage produces the instrument for the next round given the outcomes
/// taken so far.
using Stage = std::function<Instrument(const std::vector<int>& path)>;

/// Applies the stages in sequence along every branch; leaves guess member 0
/// until assigned.
inline ProtocolTree build_sequential(const std::vector<Stage>& stages) {
  std::vector<int> path;
  std::function<ProtocolNode(std::size_t)> rec = [&](std::size_t s) -> ProtocolNode {
    if (s == stages.size()) return make_leaf(std::size_t{0});
    Instrument inst = stages[s](path);
    std::vector<ProtocolNode> children;
    children.reserve(inst.kraus.size());
    for (std::size_t k = 0; k < inst.kraus.size(); ++k) {
      path.push_back(static_cast<int>(k));
      children.push_back(rec(s + 1));
      path.pop_back();
    }
    return make_round(std::move(inst), std::move(children));
  };
  return rec(0);
}

struct BuiltProtocol {
  JointProblem problem;
  ProtocolTree tree;

  RunResult run() const { return run_protocol(problem, tree); }
  double fidelity() const { return run().fidelity; }
};

inline StateVector mes(int d) {
  return StateVector(Dims{d, d}, generalized_bell_state(d, 0));
}

// ---------------------------------------------------------------------------
// Protocols

/// Every party in layout order measures each of its subsystems in the
/// computational basis; leaves carry optimal guesses. Resource-free.
inline BuiltProtocol computational_protocol(const Ensemble& ens) {
  JointProblem problem(ens);
  std::vector<Stage> stages;
  for (const auto& p : ens.layout().parties()) {
    stages.push_back([name = p.name, targets = p.subsystems, dims = ens.dims()](const std::vector<int>&) {
      return computational_instrument(name, targets, dims);
    });
  }
  auto tree = assign_leaf_guesses(problem, build_sequential(stages));
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

/// Teleports the sender's share through a d x d maximally entangled resource
/// (generalized Bell measurement, Weyl correction), after which the receiver
/// measures the projectors onto the members.
inline BuiltProtocol teleportation_protocol(const Ensemble& ens, const std::string& sender, const std::string& receiver) {
  const auto& layout = ens.layout();
  if (layout.num_parties() != 2) throw std::invalid_argument("teleportation_protocol: ensemble must be bipartite");
  if (!layout.has_party(sender) || !layout.has_party(receiver) || sender == receiver) {
    throw std::invalid_argument("teleportation_protocol: sender and receiver must be the two parties");
  }
  if (!ens.is_orthonormal()) throw std::invalid_argument("teleportation_protocol: members must be orthonormal");
  const auto& s_subs = layout.party(sender).subsystems;
  const auto& r_subs = layout.party(receiver).subsystems;
  int d = 1;
  for (int s : s_subs) d *= ens.dims()[static_cast<std::size_t>(s)];

  Party rs{sender, {0}}, rr{receiver, {1}};
  JointProblem problem(ens, Resource{mes(d), PartyLayout({rs, rr}, 2)});
  const int r_send = problem.resource_index(0);
  const int r_recv = problem.resource_index(1);
  std::vector<int> send_targets{r_send};
  for (int s : s_subs) send_targets.push_back(problem.unknown_index(s));
  std::vector<int> recv_targets{r_recv};
  for (int s : r_subs) recv_targets.push_back(problem.unknown_index(s));

  // Member states regrouped as (sender share) (x) (receiver share).
  std::vector<int> perm = s_subs;
  perm.insert(perm.end(), r_subs.begin(), r_subs.end());
  std::vector<Vector> targets;
  for (const auto& m : ens.members()) targets.push_back(permute_subsystems(m.state, perm).amps());

  std::vector<Stage> stages{
      [=](const std::vector<int>&) { return bell_instrument(sender, send_targets, d); },
      [=](const std::vector<int>& path) { return unitary_instrument(receiver, {r_recv}, weyl(d, path.back())); },
      [=](const std::vector<int>&) { return projective_instrument(receiver, recv_targets, targets); },
  };
  auto tree = build_sequential(stages);
  // Leaf under outcome i of the final measurement is member i.
  std::function<void(ProtocolNode&, int)> label = [&](ProtocolNode& n, int depth) {
    if (n.is_leaf()) return;
    auto& r = n.round();
    for (std::size_t k = 0; k < r.children.size(); ++k) {
      if (depth == 2) {
        r.children[k] = make_leaf(k < ens.size() ? k : std::size_t{0});
      } else {
        label(r.children[k], depth + 1);
      }
    }
  };
  label(tree, 0);
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

/// Lattice basis on n pairs with m Bell-pair resources: the first m pairs are
/// teleported from A to B and identified by a Bell measurement at B; the
/// remaining pairs are measured in the computational basis on both sides.
inline BuiltProtocol lattice_partial_teleport(int n, int m) {
  if (n < 1) throw std::invalid_argument("lattice_partial_teleport: n must be >= 1");
  if (m < 1 || m > n) throw std::invalid_argument("lattice_partial_teleport: m must satisfy 1 <= m <= n");
  const Ensemble ens = lattice_basis(n);
  const auto bell = bell_states();
  StateVector res = bell[0];
  for (int j = 1; j < m; ++j) res = kron(res, bell[0]);
  JointProblem problem(ens, Resource{res, paired_layout(m)});
  const auto dims = problem.dims();

  std::vector<Stage> stages;
  for (int j = 0; j < m; ++j) {
    const int ra = problem.resource_index(2 * j);
    const int rb = problem.resource_index(2 * j + 1);
    const int a = problem.unknown_index(2 * j);
    const int b = problem.unknown_index(2 * j + 1);
    stages.push_back([=](const std::vector<int>&) { return bell_instrument("A", {ra, a}, 2); });
    stages.push_back([=](const std::vector<int>& path) { return unitary_instrument("B", {rb}, weyl(2, path.back())); });
    stages.push_back([=](const std::vector<int>&) { return bell_instrument("B", {rb, b}, 2); });
  }
  for (int j = m; j < n; ++j) {
    const int a = problem.unknown_index(2 * j);
    const int b = problem.unknown_index(2 * j + 1);
    stages.push_back([=](const std::vector<int>&) { return computational_instrument("A", {a}, dims); });
    stages.push_back([=](const std::vector<int>&) { return computational_instrument("B", {b}, dims); });
  }
  auto tree = assign_leaf_guesses(problem, build_sequential(stages));
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

namespace detail {

/// One step of the sequential Bell-measurement scheme: party `owner` holds
/// the pair (resource qubit, unknown qubit).
struct BellSite {
  std::string owner;
  int resource_qubit;
  int unknown_qubit;
};

/// Sites Bell-measure in order; every site after the first first applies the
/// Pauli correction (I, X, Z, XZ) for the previous site's outcome to its
/// resource qubit.
inline std::vector<Stage> sequential_bell_stages(const std::vector<BellSite>& sites) {
  std::vector<Stage> stages;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto s = sites[i];
    if (i > 0) {
      stages.push_back([s](const std::vector<int>& path) { return unitary_instrument(s.owner, {s.resource_qubit}, weyl(2, path.back())); });
    }
    stages.push_back([s](const std::vector<int>&) { return bell_instrument(s.owner, {s.resource_qubit, s.unknown_qubit}, 2); });
  }
  return stages;
}

}  // namespace detail

/// GHZ basis on N single-qubit parties with an N-qubit GHZ resource; parties
/// Bell-measure their (resource, unknown) pair in `order` (default A1..AN).
inline BuiltProtocol appendix_a_protocol(int n, std::vector<int> order = {}) {
  if (n < 2) throw std::invalid_argument("appendix_a_protocol: N must be >= 2");
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
  }
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) {
      if (sorted.size() != static_cast<std::size_t>(n) || sorted[static_cast<std::size_t>(i)] != i) {
        throw std::invalid_argument("appendix_a_protocol: order must be a permutation of the parties");
      }
    }
  }
  const Ensemble ens = ghz_basis(n, std::vector<int>(static_cast<std::size_t>(n), 1));
  JointProblem problem(ens, Resource{ghz_state(n), PartyLayout::one_per_party(n)});
  std::vector<detail::BellSite> sites;
  for (int q : order) sites.push_back({party_name(static_cast<std::size_t>(q)), problem.resource_index(q), problem.unknown_index(q)});
  auto tree = assign_leaf_guesses(problem, build_sequential(detail::sequential_bell_stages(sites)));
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

/// GHZ basis with N qubits split among m parties, resource an m-qubit GHZ
/// state. Each party holds n_i - 1 ancillas in |0> next to its GHZ qubit and
/// fans the GHZ qubit out with CNOTs, after which the sequential Bell scheme
/// runs qubit by qubit under the m-party layout.
inline BuiltProtocol ghz_partitioned_protocol(int n, const std::vector<int>& sizes) {
  const Ensemble ens = ghz_basis(n, sizes);  // validates sizes
  const std::size_t m = sizes.size();
  // Resource on N qubits grouped like the ensemble: first qubit of each block
  // is the GHZ qubit, the rest are ancillas.
  Vector rv = Vector::Zero(Eigen::Index{1} << n);
  std::size_t ones = 0;
  int offset = 0;
  for (int s : sizes) {
    ones |= std::size_t{1} << (n - 1 - offset);
    offset += s;
  }
  rv[0] = 1.0;
  rv[static_cast<Eigen::Index>(ones)] = 1.0;
  const StateVector resource = StateVector::normalized(Dims(static_cast<std::size_t>(n), 2), rv);
  JointProblem problem(ens, Resource{resource, PartyLayout::contiguous(sizes)});

  std::vector<Stage> stages;
  offset = 0;
  std::vector<detail::BellSite> sites;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string owner = party_name(i);
    std::vector<int> block;
    for (int q = 0; q < sizes[i]; ++q) {
      block.push_back(problem.resource_index(offset + q));
      sites.push_back({owner, problem.resource_index(offset + q), problem.unknown_index(offset + q)});
    }
    if (sizes[i] > 1) {
      stages.push_back([owner, block, k = sizes[i] - 1](const std::vector<int>&) { return unitary_instrument(owner, block, cnot_fanout(k)); });
    }
    offset += sizes[i];
  }
  for (auto& s : detail::sequential_bell_stages(sites)) stages.push_back(std::move(s));
  auto tree = assign_leaf_guesses(problem, build_sequential(stages));
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

struct GraphDecodeProtocol {
  BuiltProtocol protocol;
  /// Member decoded from each outcome tuple, tuple read base-4 with party 0
  /// most significant; outcome t of a party is the Pauli W_t (I, X, Z, XZ).
  std::vector<std::size_t> decode_table;
  std::vector<Operator> stabilizers;
};

/// Resource |Psi_G*>; every party Bell-measures its (resource, unknown) pair
/// and the outcome tuple (sigma_1..sigma_N) is decoded to the unique member
/// x with |<Psi_x| (x)sigma_k |Psi_G>|^2 = 1.
inline GraphDecodeProtocol graph_decode_protocol(const Graph& g) {
  auto gb = graph_state_basis(g);
  const int n = g.vertex_count();
  if (n < 2) throw std::invalid_argument("graph_decode_protocol: need at least two vertices");
  JointProblem problem(gb.ensemble, Resource{gb.resource, PartyLayout::one_per_party(n)});
  const Vector psi_g = gb.resource.amps().conjugate();
  const Dims qdims(static_cast<std::size_t>(n), 2);

  const std::size_t tuples = std::size_t{1} << (2 * n);
  std::vector<std::size_t> table(tuples);
  for (std::size_t t = 0; t < tuples; ++t) {
    Vector v = psi_g;
    for (int k = 0; k < n; ++k) v = apply_local(weyl(2, static_cast<int>((t >> (2 * (n - 1 - k))) & 3U)), {k}, qdims, v);
    std::optional<std::size_t> hit;
    for (std::size_t x = 0; x < gb.ensemble.size(); ++x) {
      if (std::norm(gb.ensemble[x].state.amps().dot(v)) > 1.0 - kTolerance) {
        hit = x;
        break;
      }
    }
    if (!hit) throw std::logic_error("graph_decode_protocol: Pauli orbit left the graph-state basis");
    table[t] = *hit;
  }

  std::vector<Stage> stages;
  for (int k = 0; k < n; ++k) {
    const std::string owner = party_name(static_cast<std::size_t>(k));
    const int r = problem.resource_index(k);
    const int u = problem.unknown_index(k);
    stages.push_back([=](const std::vector<int>&) { return bell_instrument(owner, {r, u}, 2); });
  }
  auto tree = build_sequential(stages);
  std::function<void(ProtocolNode&, std::size_t)> label = [&](ProtocolNode& node, std::size_t acc) {
    if (node.is_leaf()) {
      node.leaf().guess = table[acc];
      return;
    }
    auto& r = node.round();
    for (std::size_t k = 0; k < r.children.size(); ++k) label(r.children[k], acc * 4 + k);
  };
  label(tree, 0);
  return GraphDecodeProtocol{BuiltProtocol{std::move(problem), std::move(tree)}, std::move(table), std::move(gb.stabilizers)};
}

/// The four three-qubit GHZ states (|000> +/- |111>), (|001> +/- |110>).
inline Ensemble example4_ensemble() {
  const auto full = ghz_basis(3, {1, 1, 1});
  std::vector<StateVector> s;
  for (std::size_t i = 0; i < 4; ++i) s.push_back(full[i].state);
  return Ensemble::equiprobable(PartyLayout::one_per_party(3), s);
}

/// A measures |+/->; on '-' B applies Z to its unknown qubit; B then
/// teleports its unknown qubit to C through the shared Bell pair and C
/// Bell-measures.
inline BuiltProtocol example4_protocol() {
  const Ensemble ens = example4_ensemble();
  Party rb{"B", {0}}, rc{"C", {1}};
  JointProblem problem(ens, Resource{bell_states()[0], PartyLayout({rb, rc}, 2)});
  const int ua = problem.unknown_index(0);
  const int ub = problem.unknown_index(1);
  const int uc = problem.unknown_index(2);
  const int r_b = problem.resource_index(0);
  const int r_c = problem.resource_index(1);
  const double h = 1.0 / std::sqrt(2.0);
  Vector plus(2), minus(2);
  plus << h, h;
  minus << h, -h;
  std::vector<Stage> stages{
      [=](const std::vector<int>&) { return projective_instrument("A", {ua}, {plus, minus}); },
      [=](const std::vector<int>& path) {
        return unitary_instrument("B", {ub}, path.back() == 1 ? pauli_z() : Matrix::Identity(2, 2));
      },
      [=](const std::vector<int>&) { return bell_instrument("B", {r_b, ub}, 2); },
      [=](const std::vector<int>& path) { return unitary_instrument("C", {r_c}, weyl(2, path.back())); },
      [=](const std::vector<int>&) { return bell_instrument("C", {r_c, uc}, 2); },
  };
  auto tree = assign_leaf_guesses(problem, build_sequential(stages));
  return BuiltProtocol{std::move(problem), std::move(tree)};
}

struct VidalFallbackResult {
  double conversion_probability = 0.0;
  double f_opt = 0.0;
  double f_fallback = 0.0;
  double fidelity = 0.0;
};

/// Try to distill a rank-r maximally entangled state from `resource`; on
/// success teleport (fidelity f_opt), otherwise run the resource-free
/// `fallback_tree`.
inline VidalFallbackResult vidal_then_fallback(const Ensemble& ens, const Resource& resource, std::size_t target_rank,
                                               const ProtocolTree& fallback_tree) {
  if (ens.layout().num_parties() != 2) throw std::invalid_argument("vidal_then_fallback: ensemble must be bipartite");
  if (resource.layout.num_parties() != 2) throw std::invalid_argument("vidal_then_fallback: resource must be bipartite");
  const auto& rp = resource.layout.parties();
  VidalFallbackResult out;
  out.conversion_probability =
      vidal_conversion_probability(resource.state, Cut{rp[0].subsystems, rp[1].subsystems}, target_rank);
  const auto names = ens.layout().names();
  out.f_opt = teleportation_protocol(ens, names[0], names[1]).fidelity();
  out.f_fallback = run_protocol(JointProblem(ens), fallback_tree).fidelity;
  out.fidelity = mixed_strategy_fidelity(out.conversion_probability, out.f_opt, out.f_fallback);
  return out;
}

}  // namespace loccsim
