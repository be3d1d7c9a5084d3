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

// LOCC protocols as measurement trees.
//
// A Round is a local instrument applied by one party to some of its
// subsystems; its children are indexed by Kraus outcome, so classical
// communication is implicit in the branching. A Leaf carries the final
// guess. Trees are evaluated exactly by enumerating every branch.

#include "loccsim/fidelity.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace loccsim {

/// Branches whose per-member probability falls below this are dropped.
inline constexpr double kPruneThreshold = 1e-12;

struct Instrument {
  std::string party;
  /// Global subsystem indices acted on, in the order the Kraus operators'
  /// tensor factors are listed. Must be held by `party`.
  std::vector<int> targets;
  std::vector<Matrix> kraus;
};

struct ProtocolNode;

struct Leaf {
  /// Ensemble member index, or an explicit state on the joint space.
  std::variant<std::size_t, StateVector> guess = std::size_t{0};
};

struct Round {
  Instrument instrument;
  std::vector<ProtocolNode> children;
};

struct ProtocolNode {
  std::variant<Leaf, Round> body;

  bool is_leaf() const { return std::holds_alternative<Leaf>(body); }
  const Leaf& leaf() const { return std::get<Leaf>(body); }
  const Round& round() const { return std::get<Round>(body); }
  Leaf& leaf() { return std::get<Leaf>(body); }
  Round& round() { return std::get<Round>(body); }
};

using ProtocolTree = ProtocolNode;

inline ProtocolNode make_leaf(std::size_t member) { return ProtocolNode{Leaf{member}}; }
inline ProtocolNode make_leaf(StateVector guess) { return ProtocolNode{Leaf{std::move(guess)}}; }
inline ProtocolNode make_round(Instrument inst, std::vector<ProtocolNode> children) {
  return ProtocolNode{Round{std::move(inst), std::move(children)}};
}

// ---------------------------------------------------------------------------
// Joint problems

struct Resource {
  StateVector state;
  PartyLayout layout;
};

namespace detail {

struct Merge {
  PartyLayout layout;
  std::vector<int> perm;              // joint subsystem k <- kron(resource, unknown) subsystem perm[k]
  std::vector<int> unknown_to_joint;  // ensemble subsystem -> joint index
  std::vector<int> resource_to_joint;
};

inline Merge merge_layouts(const PartyLayout& ens, const PartyLayout& res) {
  for (const auto& p : res.parties()) {
    if (!ens.has_party(p.name)) throw std::invalid_argument("resource party '" + p.name + "' is not a party of the ensemble");
  }
  const int r = res.num_subsystems();
  Merge m;
  m.unknown_to_joint.assign(static_cast<std::size_t>(ens.num_subsystems()), -1);
  m.resource_to_joint.assign(static_cast<std::size_t>(r), -1);
  std::vector<Party> parties;
  for (const auto& p : ens.parties()) {
    Party q{p.name, {}};
    if (auto ri = res.find(p.name)) {
      for (int s : res.parties()[*ri].subsystems) {
        m.resource_to_joint[static_cast<std::size_t>(s)] = static_cast<int>(m.perm.size());
        q.subsystems.push_back(static_cast<int>(m.perm.size()));
        m.perm.push_back(s);
      }
    }
    for (int s : p.subsystems) {
      m.unknown_to_joint[static_cast<std::size_t>(s)] = static_cast<int>(m.perm.size());
      q.subsystems.push_back(static_cast<int>(m.perm.size()));
      m.perm.push_back(r + s);
    }
    parties.push_back(std::move(q));
  }
  m.layout = PartyLayout(std::move(parties), static_cast<int>(m.perm.size()));
  return m;
}

}  // namespace detail

/// Each member becomes |Psi> (x) |psi_i>, regrouped so every party holds its
/// resource subsystems followed by its share of the unknown state.
inline Ensemble attach_resource(const Ensemble& ens, const StateVector& resource, const PartyLayout& resource_layout) {
  if (resource_layout.num_subsystems() != resource.num_subsystems()) {
    throw std::invalid_argument("attach_resource: resource layout does not match resource state");
  }
  const auto m = detail::merge_layouts(ens.layout(), resource_layout);
  std::vector<Member> out;
  for (const auto& mem : ens.members()) out.push_back({mem.prior, permute_subsystems(kron(resource, mem.state), m.perm)});
  return Ensemble(m.layout, std::move(out));
}

class JointProblem {
 public:
  explicit JointProblem(Ensemble ens, std::optional<Resource> res = std::nullopt)
      : ensemble_(std::move(ens)), resource_(std::move(res)), joint_(ensemble_) {
    if (resource_) {
      if (resource_->layout.num_subsystems() != resource_->state.num_subsystems()) {
        throw std::invalid_argument("resource layout does not match resource state");
      }
      const auto m = detail::merge_layouts(ensemble_.layout(), resource_->layout);
      joint_ = attach_resource(ensemble_, resource_->state, resource_->layout);
      unknown_to_joint_ = m.unknown_to_joint;
      resource_to_joint_ = m.resource_to_joint;
    } else {
      for (int s = 0; s < ensemble_.layout().num_subsystems(); ++s) unknown_to_joint_.push_back(s);
    }
  }

  const Ensemble& ensemble() const { return ensemble_; }
  const std::optional<Resource>& resource() const { return resource_; }
  /// The ensemble actually discriminated: members on the merged layout.
  const Ensemble& joint() const { return joint_; }
  const PartyLayout& layout() const { return joint_.layout(); }
  const Dims& dims() const { return joint_.dims(); }

  int unknown_index(int s) const { return unknown_to_joint_.at(static_cast<std::size_t>(s)); }
  int resource_index(int r) const { return resource_to_joint_.at(static_cast<std::size_t>(r)); }

  /// Same problem with parties merged per `grouping`; subsystem indices are
  /// unchanged so existing trees stay addressable.
  JointProblem coarsened(const std::map<std::string, std::string>& grouping) const {
    JointProblem p = *this;
    p.joint_ = joint_.with_layout(coarsen(joint_.layout(), grouping));
    p.ensemble_ = ensemble_.with_layout(coarsen(ensemble_.layout(), grouping));
    if (resource_) {
      std::map<std::string, std::string> sub;
      for (const auto& party : resource_->layout.parties()) sub[party.name] = grouping.at(party.name);
      p.resource_->layout = coarsen(resource_->layout, sub);
    }
    return p;
  }

 private:
  Ensemble ensemble_;
  std::optional<Resource> resource_;
  Ensemble joint_;
  std::vector<int> unknown_to_joint_;
  std::vector<int> resource_to_joint_;
};

// ---------------------------------------------------------------------------
// Validation

inline double instrument_completeness_residual(const Instrument& inst) {
  if (inst.kraus.empty()) return std::numeric_limits<double>::infinity();
  const auto k = inst.kraus.front().rows();
  Matrix sum = Matrix::Zero(k, k);
  for (const auto& op : inst.kraus) sum += op.adjoint() * op;
  return (sum - Matrix::Identity(k, k)).norm();
}

inline void validate_instrument(const Instrument& inst, const PartyLayout& layout, const Dims& dims) {
  const auto& party = layout.party(inst.party);
  if (inst.targets.empty()) throw std::invalid_argument("instrument has no target subsystems");
  std::size_t local = 1;
  for (int t : inst.targets) {
    if (std::find(party.subsystems.begin(), party.subsystems.end(), t) == party.subsystems.end()) {
      throw std::invalid_argument("instrument of party '" + inst.party + "' targets subsystem " + std::to_string(t) +
                                  " it does not hold");
    }
    local *= static_cast<std::size_t>(dims[static_cast<std::size_t>(t)]);
  }
  for (const auto& op : inst.kraus) {
    if (static_cast<std::size_t>(op.rows()) != local || op.rows() != op.cols()) {
      throw std::invalid_argument("Kraus operator size does not match target dims");
    }
  }
  if (instrument_completeness_residual(inst) > kTolerance) {
    throw std::invalid_argument("instrument of party '" + inst.party + "' is incomplete (sum K^dag K != I)");
  }
}

/// Throws on any structural problem: unknown party, non-local targets,
/// incomplete instrument, child/outcome mismatch, bad leaf guess.
inline void validate_tree(const ProtocolTree& tree, const JointProblem& problem) {
  const auto& layout = problem.layout();
  const auto& dims = problem.dims();
  std::function<void(const ProtocolNode&)> rec = [&](const ProtocolNode& n) {
    if (n.is_leaf()) {
      const auto& g = n.leaf().guess;
      if (auto* idx = std::get_if<std::size_t>(&g)) {
        if (*idx >= problem.joint().size()) throw std::out_of_range("leaf guesses a nonexistent member");
      } else if (std::get<StateVector>(g).dims() != dims) {
        throw std::invalid_argument("leaf guess has wrong dims");
      }
      return;
    }
    const auto& r = n.round();
    validate_instrument(r.instrument, layout, dims);
    if (r.children.size() != r.instrument.kraus.size()) throw std::invalid_argument("round needs one child per Kraus operator");
    for (const auto& c : r.children) rec(c);
  };
  rec(tree);
}

/// True iff along every root-to-leaf path the acting parties appear in
/// non-decreasing position within `order` (e.g. A's rounds, then B's).
inline bool validate_one_way(const ProtocolTree& tree, const std::vector<std::string>& order) {
  std::function<bool(const ProtocolNode&, std::size_t)> rec = [&](const ProtocolNode& n, std::size_t lowest) {
    if (n.is_leaf()) return true;
    const auto& r = n.round();
    auto it = std::find(order.begin(), order.end(), r.instrument.party);
    if (it == order.end()) return false;
    const auto pos = static_cast<std::size_t>(it - order.begin());
    if (pos < lowest) return false;
    for (const auto& c : r.children) {
      if (!rec(c, pos)) return false;
    }
    return true;
  };
  return rec(tree, 0);
}

// ---------------------------------------------------------------------------
// Evaluation

struct BranchRecord {
  std::vector<int> path;          // Kraus outcome taken at every round so far
  int measurement_rounds = 0;     // rounds on the path with more than one outcome
  std::vector<std::size_t> survivors;
  double probability = 0.0;       // prior-weighted probability of reaching this node
  bool leaf = false;
  std::optional<std::size_t> guessed_member;
};

struct RunResult {
  double fidelity = 0.0;
  std::vector<BranchRecord> branches;  // one record per node below the root
  std::vector<double> member_leaf_mass;  // sum over leaves of each member's branch probability
};

namespace detail {

struct Live {
  std::size_t member;
  Vector v;  // unnormalized branch state K_b |psi_i>
};

/// Depth-first walk over all branches with per-member pruning. `visit` is
/// called at every node after the incoming outcome has been applied.
inline void walk(const ProtocolNode& node, const JointProblem& problem, std::vector<Live> live, std::vector<int>& path,
                 int rounds, const std::function<void(const ProtocolNode&, const std::vector<Live>&, const std::vector<int>&, int)>& visit) {
  visit(node, live, path, rounds);
  if (node.is_leaf()) return;
  const auto& r = node.round();
  const int next_rounds = rounds + (r.instrument.kraus.size() > 1 ? 1 : 0);
  for (std::size_t k = 0; k < r.instrument.kraus.size(); ++k) {
    std::vector<Live> child;
    for (const auto& l : live) {
      Vector v = apply_local(r.instrument.kraus[k], r.instrument.targets, problem.dims(), l.v);
      if (v.squaredNorm() >= kPruneThreshold) child.push_back({l.member, std::move(v)});
    }
    path.push_back(static_cast<int>(k));
    walk(r.children[k], problem, std::move(child), path, next_rounds, visit);
    path.pop_back();
  }
}

inline std::vector<Live> initial(const JointProblem& problem) {
  std::vector<Live> live;
  for (std::size_t i = 0; i < problem.joint().size(); ++i) live.push_back({i, problem.joint()[i].state.amps()});
  return live;
}

inline const Vector& guess_vector(const Leaf& leaf, const JointProblem& problem) {
  if (auto* idx = std::get_if<std::size_t>(&leaf.guess)) return problem.joint()[*idx].state.amps();
  return std::get<StateVector>(leaf.guess).amps();
}

}  // namespace detail

/// Exact fidelity of a fixed protocol: sum over members i and leaves b of
/// p_i ||K_b psi_i||^2 |<psi_i|phi_b>|^2, with psi_i the joint member.
inline RunResult run_protocol(const JointProblem& problem, const ProtocolTree& tree) {
  validate_tree(tree, problem);
  RunResult res;
  res.member_leaf_mass.assign(problem.joint().size(), 0.0);
  std::vector<int> path;
  detail::walk(tree, problem, detail::initial(problem), path, 0,
               [&](const ProtocolNode& n, const std::vector<detail::Live>& live, const std::vector<int>& p, int rounds) {
                 if (!p.empty()) {
                   BranchRecord rec;
                   rec.path = p;
                   rec.measurement_rounds = rounds;
                   rec.leaf = n.is_leaf();
                   for (const auto& l : live) {
                     rec.survivors.push_back(l.member);
                     rec.probability += problem.joint()[l.member].prior * l.v.squaredNorm();
                   }
                   if (rec.leaf) {
                     if (auto* idx = std::get_if<std::size_t>(&n.leaf().guess)) rec.guessed_member = *idx;
                   }
                   res.branches.push_back(std::move(rec));
                 }
                 if (!n.is_leaf()) return;
                 const Vector& phi = detail::guess_vector(n.leaf(), problem);
                 for (const auto& l : live) {
                   const auto& mem = problem.joint()[l.member];
                   const double prob = l.v.squaredNorm();
                   res.member_leaf_mass[l.member] += prob;
                   res.fidelity += mem.prior * prob * std::norm(mem.state.amps().dot(phi));
                 }
               });
  return res;
}

/// Normalized post-measurement states of the members surviving along `path`.
inline std::vector<std::pair<std::size_t, StateVector>> branch_states(const JointProblem& problem, const ProtocolTree& tree,
                                                                      const std::vector<int>& path) {
  auto live = detail::initial(problem);
  const ProtocolNode* node = &tree;
  for (int k : path) {
    if (node->is_leaf()) throw std::invalid_argument("branch_states: path runs past a leaf");
    const auto& r = node->round();
    if (k < 0 || static_cast<std::size_t>(k) >= r.children.size()) throw std::out_of_range("branch_states: bad outcome");
    std::vector<detail::Live> next;
    for (auto& l : live) {
      Vector v = apply_local(r.instrument.kraus[static_cast<std::size_t>(k)], r.instrument.targets, problem.dims(), l.v);
      if (v.squaredNorm() >= kPruneThreshold) next.push_back({l.member, std::move(v)});
    }
    live = std::move(next);
    node = &r.children[static_cast<std::size_t>(k)];
  }
  std::vector<std::pair<std::size_t, StateVector>> out;
  for (auto& l : live) out.emplace_back(l.member, StateVector::normalized(problem.dims(), l.v));
  return out;
}

/// Every leaf's guess is replaced: by the member index when one member holds
/// posterior weight > 1 - 1e-9 at that leaf, otherwise by the optimal guess
/// (principal eigenvector of the leaf's weighted member mixture).
inline ProtocolTree assign_leaf_guesses(const JointProblem& problem, ProtocolTree tree) {
  std::vector<Vector> members;
  for (const auto& m : problem.joint().members()) members.push_back(m.state.amps());
  std::function<void(ProtocolNode&, std::vector<detail::Live>)> rec = [&](ProtocolNode& n, std::vector<detail::Live> live) {
    if (n.is_leaf()) {
      std::vector<double> w(members.size(), 0.0);
      double total = 0.0;
      for (const auto& l : live) {
        w[l.member] = problem.joint()[l.member].prior * l.v.squaredNorm();
        total += w[l.member];
      }
      if (total <= 0.0) {
        n.leaf().guess = std::size_t{0};
        return;
      }
      const auto best = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
      if (w[best] / total > 1.0 - kTolerance) {
        n.leaf().guess = best;
      } else {
        n.leaf().guess = StateVector(problem.dims(), principal_eigenvector_of_mixture(members, w));
      }
      return;
    }
    auto& r = n.round();
    for (std::size_t k = 0; k < r.instrument.kraus.size(); ++k) {
      std::vector<detail::Live> child;
      for (const auto& l : live) {
        Vector v = apply_local(r.instrument.kraus[k], r.instrument.targets, problem.dims(), l.v);
        if (v.squaredNorm() >= kPruneThreshold) child.push_back({l.member, std::move(v)});
      }
      rec(r.children[k], std::move(child));
    }
  };
  rec(tree, detail::initial(problem));
  return tree;
}

/// Renames acting parties per `grouping`; targets are unchanged.
inline ProtocolTree coarsen_tree(ProtocolTree tree, const std::map<std::string, std::string>& grouping) {
  std::function<void(ProtocolNode&)> rec = [&](ProtocolNode& n) {
    if (n.is_leaf()) return;
    auto& r = n.round();
    r.instrument.party = grouping.at(r.instrument.party);
    for (auto& c : r.children) rec(c);
  };
  rec(tree);
  return tree;
}

struct FlatProtocol {
  Povm povm;
  GuessStrategy guesses;
};

/// One POVM element K_b^dag K_b per root-to-leaf branch (nothing pruned),
/// embedded in the joint space, paired with that leaf's guess.
inline FlatProtocol flatten_to_povm(const JointProblem& problem, const ProtocolTree& tree) {
  validate_tree(tree, problem);
  const auto& dims = problem.dims();
  const auto side = static_cast<Eigen::Index>(total_dim(dims));
  std::vector<Matrix> elements;
  GuessStrategy g;
  std::function<void(const ProtocolNode&, const Matrix&)> rec = [&](const ProtocolNode& n, const Matrix& k) {
    if (n.is_leaf()) {
      elements.push_back(k.adjoint() * k);
      g.guesses.emplace_back(dims, detail::guess_vector(n.leaf(), problem));
      return;
    }
    const auto& r = n.round();
    for (std::size_t o = 0; o < r.instrument.kraus.size(); ++o) {
      Matrix next(side, side);
      for (Eigen::Index c = 0; c < side; ++c) next.col(c) = apply_local(r.instrument.kraus[o], r.instrument.targets, dims, k.col(c));
      rec(r.children[o], next);
    }
  };
  rec(tree, Matrix::Identity(side, side));
  return FlatProtocol{Povm(dims, std::move(elements)), std::move(g)};
}

inline std::size_t count_leaves(const ProtocolTree& tree) {
  if (tree.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : tree.round().children) n += count_leaves(c);
  return n;
}

}  // namespace loccsim
