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

// Party layouts, ensembles, and constructors for the state families used
// throughout the library (Bell, GHZ, lattice, graph-state and the two-qubit
// parametric basis).

#include "loccsim/tensor.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace loccsim {

/// "A", "B", ..., "Z", then "P26", "P27", ...
inline std::string party_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "P" + std::to_string(i);
}

struct Party {
  std::string name;
  std::vector<int> subsystems;
};

class PartyLayout {
 public:
  PartyLayout() = default;

  /// Validates that the parties' subsystem lists are disjoint and together
  /// cover 0..num_subsystems-1.
  PartyLayout(std::vector<Party> parties, int num_subsystems) : parties_(std::move(parties)), n_(num_subsystems) {
    std::vector<int> seen(static_cast<std::size_t>(n_), 0);
    std::set<std::string> names;
    for (const auto& p : parties_) {
      if (p.subsystems.empty()) throw std::invalid_argument("party '" + p.name + "' holds no subsystem");
      if (!names.insert(p.name).second) throw std::invalid_argument("duplicate party name '" + p.name + "'");
      for (int s : p.subsystems) {
        if (s < 0 || s >= n_) throw std::out_of_range("party subsystem index out of range");
        if (seen[static_cast<std::size_t>(s)]++) throw std::invalid_argument("subsystem assigned to two parties");
      }
    }
    for (int c : seen) {
      if (c == 0) throw std::invalid_argument("layout leaves a subsystem unassigned");
    }
  }

  /// One subsystem per party, named A, B, C, ...
  static PartyLayout one_per_party(int n) {
    std::vector<Party> ps;
    for (int i = 0; i < n; ++i) ps.push_back({party_name(static_cast<std::size_t>(i)), {i}});
    return PartyLayout(std::move(ps), n);
  }

  /// Contiguous groups of the given sizes, named A, B, C, ...
  static PartyLayout contiguous(const std::vector<int>& sizes) {
    std::vector<Party> ps;
    int next = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      Party p{party_name(i), {}};
      for (int k = 0; k < sizes[i]; ++k) p.subsystems.push_back(next++);
      ps.push_back(std::move(p));
    }
    return PartyLayout(std::move(ps), next);
  }

  const std::vector<Party>& parties() const { return parties_; }
  int num_subsystems() const { return n_; }
  std::size_t num_parties() const { return parties_.size(); }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < parties_.size(); ++i) {
      if (parties_[i].name == name) return i;
    }
    return std::nullopt;
  }

  const Party& party(const std::string& name) const {
    auto i = find(name);
    if (!i) throw std::invalid_argument("unknown party '" + name + "'");
    return parties_[*i];
  }

  bool has_party(const std::string& name) const { return find(name).has_value(); }

  std::vector<int> subsystems_of(const std::vector<std::string>& names) const {
    std::vector<int> out;
    for (const auto& n : names) {
      const auto& p = party(n);
      out.insert(out.end(), p.subsystems.begin(), p.subsystems.end());
    }
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : parties_) out.push_back(p.name);
    return out;
  }

  std::vector<std::vector<int>> groups() const {
    std::vector<std::vector<int>> out;
    for (const auto& p : parties_) out.push_back(p.subsystems);
    return out;
  }

  bool operator==(const PartyLayout& o) const {
    if (n_ != o.n_ || parties_.size() != o.parties_.size()) return false;
    for (std::size_t i = 0; i < parties_.size(); ++i) {
      if (parties_[i].name != o.parties_[i].name || parties_[i].subsystems != o.parties_[i].subsystems) return false;
    }
    return true;
  }

 private:
  std::vector<Party> parties_;
  int n_ = 0;
};

/// Party-level bipartition.
struct PartyCut {
  std::vector<std::string> a;
  std::vector<std::string> b;

  std::string label() const {
    std::string s;
    for (const auto& n : a) s += n;
    s += "|";
    for (const auto& n : b) s += n;
    return s;
  }
};

inline Cut to_cut(const PartyLayout& layout, const PartyCut& pc) {
  return Cut{layout.subsystems_of(pc.a), layout.subsystems_of(pc.b)};
}

/// Every party bipartition, first party always on side `a`.
inline std::vector<PartyCut> all_party_cuts(const PartyLayout& layout) {
  std::vector<PartyCut> out;
  const auto names = layout.names();
  const std::size_t m = names.size();
  if (m < 2) return out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (m - 1)) - 1; ++mask) {
    PartyCut c;
    c.a.push_back(names[0]);
    for (std::size_t i = 1; i < m; ++i) ((mask >> (i - 1)) & 1U ? c.a : c.b).push_back(names[i]);
    out.push_back(std::move(c));
  }
  return out;
}

/// Merges parties. `grouping` maps every party name to a superparty name;
/// superparties appear in order of first occurrence in the layout.
inline PartyLayout coarsen(const PartyLayout& layout, const std::map<std::string, std::string>& grouping) {
  std::vector<Party> merged;
  for (const auto& p : layout.parties()) {
    auto it = grouping.find(p.name);
    if (it == grouping.end()) throw std::invalid_argument("grouping does not cover party '" + p.name + "'");
    auto dst = std::find_if(merged.begin(), merged.end(), [&](const Party& q) { return q.name == it->second; });
    if (dst == merged.end()) {
      merged.push_back({it->second, p.subsystems});
    } else {
      dst->subsystems.insert(dst->subsystems.end(), p.subsystems.begin(), p.subsystems.end());
    }
  }
  return PartyLayout(std::move(merged), layout.num_subsystems());
}

struct Member {
  double prior;
  StateVector state;
};

class Ensemble {
 public:
  Ensemble(PartyLayout layout, std::vector<Member> members) : layout_(std::move(layout)), members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("ensemble is empty");
    double total = 0.0;
    for (const auto& m : members_) {
      if (m.prior < 0.0) throw std::invalid_argument("negative prior");
      if (m.state.dims() != members_.front().state.dims()) throw std::invalid_argument("ensemble members disagree on dims");
      total += m.prior;
    }
    if (std::abs(total - 1.0) > kTolerance) throw std::invalid_argument("priors do not sum to 1");
    if (members_.front().state.num_subsystems() != layout_.num_subsystems()) {
      throw std::invalid_argument("layout does not match member subsystem count");
    }
  }

  static Ensemble equiprobable(PartyLayout layout, const std::vector<StateVector>& states) {
    std::vector<Member> ms;
    const double p = 1.0 / static_cast<double>(states.size());
    for (const auto& s : states) ms.push_back({p, s});
    return Ensemble(std::move(layout), std::move(ms));
  }

  const PartyLayout& layout() const { return layout_; }
  const std::vector<Member>& members() const { return members_; }
  const Member& operator[](std::size_t i) const { return members_.at(i); }
  std::size_t size() const { return members_.size(); }
  const Dims& dims() const { return members_.front().state.dims(); }
  std::size_t dim() const { return total_dim(dims()); }

  Ensemble with_layout(PartyLayout layout) const { return Ensemble(std::move(layout), members_); }

  Matrix gram() const {
    const auto k = static_cast<Eigen::Index>(members_.size());
    Matrix g(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) g(i, j) = members_[static_cast<std::size_t>(i)].state.inner(members_[static_cast<std::size_t>(j)].state);
    }
    return g;
  }

  bool is_orthonormal(double tol = kTolerance) const {
    const Matrix g = gram();
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
  }

  bool is_complete_basis(double tol = kTolerance) const { return size() == dim() && is_orthonormal(tol); }

 private:
  PartyLayout layout_;
  std::vector<Member> members_;
};

// ---------------------------------------------------------------------------
// Graphs

class Graph {
 public:
  Graph(int vertex_count, std::vector<std::pair<int, int>> edges) : n_(vertex_count) {
    if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");
    for (auto [a, b] : edges) {
      if (a == b) throw std::invalid_argument("graph self-loop");
      if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::out_of_range("edge endpoint out of range");
      edges_.insert({std::min(a, b), std::max(a, b)});
    }
  }

  static Graph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
  }
  static Graph cycle(int n) {
    auto e = std::vector<std::pair<int, int>>{};
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
  }
  static Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    }
    return Graph(n, e);
  }
  /// Vertex 0 is the hub.
  static Graph star(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    return Graph(n, e);
  }

  int vertex_count() const { return n_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  bool adjacent(int a, int b) const { return edges_.count({std::min(a, b), std::max(a, b)}) > 0; }

 private:
  int n_;
  std::set<std::pair<int, int>> edges_;
};

// ---------------------------------------------------------------------------
// Constructors

inline StateVector make_state(Dims dims, std::initializer_list<std::pair<std::size_t, cplx>> terms) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(total_dim(dims)));
  for (auto [i, a] : terms) v[static_cast<Eigen::Index>(i)] += a;
  return StateVector::normalized(std::move(dims), std::move(v));
}

/// Phi_1..Phi_4 = (|00>+|11>), (|00>-|11>), (|01>+|10>), (|01>-|10>), all / sqrt 2.
inline std::vector<StateVector> bell_states() {
  const Dims d{2, 2};
  return {make_state(d, {{0, 1.0}, {3, 1.0}}), make_state(d, {{0, 1.0}, {3, -1.0}}),
          make_state(d, {{1, 1.0}, {2, 1.0}}), make_state(d, {{1, 1.0}, {2, -1.0}})};
}

inline Ensemble bell_basis() { return Ensemble::equiprobable(PartyLayout::one_per_party(2), bell_states()); }

/// Index of the bit string `bits` (MSB first) as a flat qubit index.
inline std::size_t bits_to_index(const std::vector<int>& bits) {
  std::size_t i = 0;
  for (int b : bits) i = (i << 1U) | static_cast<std::size_t>(b & 1);
  return i;
}

/// N-qubit GHZ basis: (|k> +/- |k-bar>)/sqrt2 for the 2^(N-1) strings k with
/// leading bit 0 in lexicographic order, plus-sign first. Qubits are grouped
/// contiguously into parties of the given sizes.
inline Ensemble ghz_basis(int n, const std::vector<int>& party_sizes) {
  if (n < 2) throw std::invalid_argument("ghz_basis: N must be >= 2");
  if (party_sizes.size() < 2) throw std::invalid_argument("ghz_basis: need at least two parties");
  int sum = 0;
  for (int s : party_sizes) {
    if (s < 1) throw std::invalid_argument("ghz_basis: every party needs >= 1 qubit");
    sum += s;
  }
  if (sum != n) throw std::invalid_argument("ghz_basis: party sizes do not sum to N");
  const Dims dims(static_cast<std::size_t>(n), 2);
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<StateVector> states;
  for (std::size_t k = 0; k < (std::size_t{1} << (n - 1)); ++k) {
    for (double sign : {1.0, -1.0}) {
      Vector v = Vector::Zero(static_cast<Eigen::Index>(full + 1));
      v[static_cast<Eigen::Index>(k)] = 1.0;
      v[static_cast<Eigen::Index>(full ^ k)] = sign;
      states.push_back(StateVector::normalized(dims, v));
    }
  }
  return Ensemble::equiprobable(PartyLayout::contiguous(party_sizes), states);
}

/// (|0...0> + |1...1>)/sqrt2 on m qubits.
inline StateVector ghz_state(int m) {
  if (m < 2) throw std::invalid_argument("ghz_state: m must be >= 2");
  const Dims dims(static_cast<std::size_t>(m), 2);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(total_dim(dims)));
  v[0] = 1.0;
  v[v.size() - 1] = 1.0;
  return StateVector::normalized(dims, v);
}

/// Two-party layout for n qubit pairs stored pairwise: A holds the even
/// (first-of-pair) qubits, B the odd ones.
inline PartyLayout paired_layout(int n) {
  Party a{"A", {}}, b{"B", {}};
  for (int j = 0; j < n; ++j) {
    a.subsystems.push_back(2 * j);
    b.subsystems.push_back(2 * j + 1);
  }
  return PartyLayout({a, b}, 2 * n);
}

/// All 4^n products of Bell states; member index is base-4 over (i_1..i_n),
/// i_1 most significant.
inline Ensemble lattice_basis(int n) {
  if (n < 1) throw std::invalid_argument("lattice_basis: n must be >= 1");
  const auto bell = bell_states();
  std::vector<StateVector> states;
  const std::size_t count = std::size_t{1} << (2 * n);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::optional<StateVector> acc;
    for (int j = n - 1; j >= 0; --j) {
      const auto& b = bell[(idx >> (2 * j)) & 3U];
      acc = acc ? kron(*acc, b) : b;
    }
    states.push_back(*acc);
  }
  return Ensemble::equiprobable(paired_layout(n), states);
}

struct GraphStateBasis {
  Ensemble ensemble;
  StateVector resource;              // entrywise conjugate of the +1 common eigenvector
  std::vector<Operator> stabilizers;  // K^(a) = X_a prod_{b ~ a} Z_b
};

/// Graph-state basis: |Psi_G> = prod_{edges} CZ |+>^N; member x (vertex 0 the
/// most significant bit) is prod_a Z_a^{x_a} |Psi_G>.
inline GraphStateBasis graph_state_basis(const Graph& g) {
  const int n = g.vertex_count();
  const Dims dims(static_cast<std::size_t>(n), 2);
  const auto side = static_cast<Eigen::Index>(total_dim(dims));
  auto bit = [n](std::size_t idx, int q) { return static_cast<int>((idx >> (n - 1 - q)) & 1U); };

  Vector psi(side);
  for (Eigen::Index i = 0; i < side; ++i) {
    int parity = 0;
    for (auto [a, b] : g.edges()) parity ^= bit(static_cast<std::size_t>(i), a) & bit(static_cast<std::size_t>(i), b);
    psi[i] = parity ? -1.0 : 1.0;
  }
  const StateVector psi_g = StateVector::normalized(dims, psi);

  std::vector<Operator> stabs;
  for (int a = 0; a < n; ++a) {
    Matrix k = Matrix::Identity(side, side);
    k = embed(pauli_x(), {a}, dims) * k;
    for (int b = 0; b < n; ++b) {
      if (g.adjacent(a, b)) k = embed(pauli_z(), {b}, dims) * k;
    }
    stabs.emplace_back(dims, std::move(k));
  }

  std::vector<StateVector> members;
  for (std::size_t x = 0; x < static_cast<std::size_t>(side); ++x) {
    Vector v = psi_g.amps();
    for (int a = 0; a < n; ++a) {
      if (bit(x, a)) v = apply_local(pauli_z(), {a}, dims, v);
    }
    members.emplace_back(dims, std::move(v));
  }
  return GraphStateBasis{Ensemble::equiprobable(PartyLayout::one_per_party(n), members), psi_g.conjugate(),
                         std::move(stabs)};
}

/// psi1 = a|00> + b|11>, psi2 = b|00> - a|11>, psi3 = g|01> + d|10>,
/// psi4 = d|01> - g|10>, with b = sqrt(1-a^2), d = sqrt(1-g^2).
inline Ensemble parametric_basis(double alpha, double gamma) {
  const double lo = 1.0 / std::sqrt(2.0);
  auto in_range = [lo](double v) { return v >= lo - kTolerance && v <= 1.0 + kTolerance; };
  if (!in_range(alpha) || !in_range(gamma)) {
    throw std::invalid_argument("parametric_basis: alpha and gamma must lie in [1/sqrt2, 1]");
  }
  alpha = std::clamp(alpha, lo, 1.0);
  gamma = std::clamp(gamma, lo, 1.0);
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  const double delta = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
  const Dims d{2, 2};
  std::vector<StateVector> s{make_state(d, {{0, alpha}, {3, beta}}), make_state(d, {{0, beta}, {3, -alpha}}),
                             make_state(d, {{1, gamma}, {2, delta}}), make_state(d, {{1, delta}, {2, -gamma}})};
  return Ensemble::equiprobable(PartyLayout::one_per_party(2), s);
}

}  // namespace loccsim
