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

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace loccsim;
using namespace testutil;

namespace {

Instrument random_instrument(std::mt19937_64& rng, std::string party, std::vector<int> targets, Eigen::Index side, int outcomes) {
  const Matrix u = random_unitary(rng, side * outcomes);
  Instrument inst{std::move(party), std::move(targets), {}};
  for (int a = 0; a < outcomes; ++a) inst.kraus.push_back(u.block(a * side, 0, side, side));
  return inst;
}

/// sum over leaves of p_i ||K_b psi_i||^2 |<psi_i|phi_b>|^2 with every
/// K_b formed as a dense product of embedded operators.
double dense_fidelity(const JointProblem& problem, const ProtocolNode& n, const Matrix& acc) {
  if (n.is_leaf()) {
    const auto& g = n.leaf().guess;
    const Vector phi = std::holds_alternative<std::size_t>(g) ? problem.joint()[std::get<std::size_t>(g)].state.amps()
                                                              : std::get<StateVector>(g).amps();
    double f = 0.0;
    for (const auto& m : problem.joint().members()) {
      f += m.prior * (acc * m.state.amps()).squaredNorm() * overlap2(m.state.amps(), phi);
    }
    return f;
  }
  const auto& r = n.round();
  double f = 0.0;
  for (std::size_t k = 0; k < r.children.size(); ++k) {
    f += dense_fidelity(problem, r.children[k], embed(r.instrument.kraus[k], r.instrument.targets, problem.dims()) * acc);
  }
  return f;
}

TEST(JointProblem, AttachResourceIsPartyMajor) {
  // Bell basis on A, B with a Bell-pair resource: A = {rA, uA}, B = {rB, uB}
  JointProblem p(bell_basis(), Resource{bell_states()[0], PartyLayout::one_per_party(2)});
  EXPECT_EQ(p.layout().party("A").subsystems, (std::vector<int>{0, 1}));
  EXPECT_EQ(p.layout().party("B").subsystems, (std::vector<int>{2, 3}));
  EXPECT_EQ(p.resource_index(0), 0);
  EXPECT_EQ(p.unknown_index(0), 1);
  EXPECT_EQ(p.resource_index(1), 2);
  EXPECT_EQ(p.unknown_index(1), 3);
  // member 0 = Phi+_{rA rB} Phi+_{uA uB}: amplitude 1/2 on |rA uA rB uB> = |0000>, |0101>, |1010>, |1111>
  const auto& v = p.joint()[0].state.amps();
  for (int x : {0b0000, 0b0101, 0b1010, 0b1111}) EXPECT_NEAR(v[x].real(), 0.5, kTol);
  EXPECT_NEAR(v.squaredNorm(), 1.0, kTol);
}

TEST(JointProblem, ResourcePartiesMustExist) {
  EXPECT_THROW(JointProblem(bell_basis(), Resource{bell_states()[0], PartyLayout({{"A", {0}}, {"Q", {1}}}, 2)}),
               std::invalid_argument);
}

TEST(Validation, RejectsNonLocalAndIncompleteInstruments) {
  const JointProblem p(bell_basis());
  const Matrix z = pauli_z();
  Instrument bad_target{"A", {1}, {Matrix::Identity(2, 2)}};
  EXPECT_THROW(validate_tree(make_round(bad_target, {make_leaf(std::size_t{0})}), p), std::invalid_argument);
  Instrument incomplete{"A", {0}, {Matrix(0.5 * Matrix::Identity(2, 2))}};
  EXPECT_THROW(validate_tree(make_round(incomplete, {make_leaf(std::size_t{0})}), p), std::invalid_argument);
  Instrument ok{"A", {0}, {Matrix::Identity(2, 2)}};
  EXPECT_THROW(validate_tree(make_round(ok, {}), p), std::invalid_argument);
  EXPECT_THROW(validate_tree(make_round(ok, {make_leaf(std::size_t{9})}), p), std::out_of_range);
  EXPECT_THROW(validate_tree(make_leaf(StateVector::basis({2}, 0)), p), std::invalid_argument);
  Instrument unknown_party{"Q", {0}, {Matrix::Identity(2, 2)}};
  EXPECT_ANY_THROW(validate_tree(make_round(unknown_party, {make_leaf(std::size_t{0})}), p));
  EXPECT_NO_THROW(validate_tree(make_round(ok, {make_leaf(std::size_t{0})}), p));
}

TEST(Validation, OneWayOrder) {
  const auto tree = teleportation_protocol(bell_basis(), "A", "B").tree;
  EXPECT_TRUE(validate_one_way(tree, {"A", "B"}));
  EXPECT_FALSE(validate_one_way(tree, {"B", "A"}));
  EXPECT_FALSE(validate_one_way(example4_protocol().tree, {"A", "B"}));
  EXPECT_TRUE(validate_one_way(example4_protocol().tree, {"A", "B", "C"}));
}

TEST(RunProtocol, SingleLeafIsThePriorOfTheGuess) {
  std::vector<Member> ms{{0.7, bell_states()[0]}, {0.3, bell_states()[1]}};
  const JointProblem p(Ensemble(PartyLayout::one_per_party(2), ms));
  EXPECT_NEAR(run_protocol(p, make_leaf(std::size_t{0})).fidelity, 0.7, kTol);
  EXPECT_NEAR(run_protocol(p, make_leaf(std::size_t{1})).fidelity, 0.3, kTol);
}

TEST(RunProtocol, MatchesDenseOracleOnRandomTrees) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<StateVector> s;
    for (int i = 0; i < 5; ++i) s.push_back(random_state(rng, {2, 3, 2}));
    const JointProblem p(Ensemble::equiprobable(PartyLayout({{"A", {0, 2}}, {"B", {1}}}, 3), s));
    // A measures {0,2} with 3 outcomes, then B measures {1} with 2 outcomes, then A again on {0}
    std::vector<ProtocolNode> a_children;
    for (int a = 0; a < 3; ++a) {
      std::vector<ProtocolNode> b_children;
      for (int b = 0; b < 2; ++b) {
        auto inst = random_instrument(rng, "A", {0}, 2, 2);
        b_children.push_back(make_round(inst, {make_leaf(random_state(rng, {2, 3, 2})), make_leaf(std::size_t(a + b))}));
      }
      a_children.push_back(make_round(random_instrument(rng, "B", {1}, 3, 2), std::move(b_children)));
    }
    const auto tree = make_round(random_instrument(rng, "A", {2, 0}, 4, 3), std::move(a_children));
    const auto res = run_protocol(p, tree);
    EXPECT_NEAR(res.fidelity, dense_fidelity(p, tree, Matrix::Identity(12, 12)), 1e-10);
    for (double m : res.member_leaf_mass) EXPECT_NEAR(m, 1.0, 1e-10);
    EXPECT_EQ(count_leaves(tree), 12u);
    // flattened POVM gives the same number
    const auto fp = flatten_to_povm(p, tree);
    EXPECT_EQ(fp.povm.size(), 12u);
    EXPECT_NEAR(average_fidelity(p.joint(), fp.povm, fp.guesses), res.fidelity, 1e-10);
    // optimal leaf guesses never hurt
    const auto best = assign_leaf_guesses(p, tree);
    EXPECT_GE(run_protocol(p, best).fidelity, res.fidelity - 1e-12);
    EXPECT_NEAR(run_protocol(p, best).fidelity, optimal_guess(p.joint(), fp.povm).fidelity, 1e-10);
  }
}

TEST(RunProtocol, BranchRecordsTrackSurvivors) {
  const auto bp = computational_protocol(bell_basis());
  const auto res = bp.run();
  // A's outcome 0 keeps Phi_1, Phi_2 (|00>, |11> components) and Phi_3, Phi_4
  for (const auto& b : res.branches) {
    if (b.path.size() == 1) EXPECT_EQ(b.survivors.size(), 4u);
    if (b.path.size() == 2) {
      EXPECT_EQ(b.survivors.size(), 2u);
      EXPECT_EQ(b.measurement_rounds, 2);
      EXPECT_NEAR(b.probability, 0.25, kTol);
      EXPECT_TRUE(b.leaf);
    }
  }
  const auto st = branch_states(bp.problem, bp.tree, {0, 1});
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[0].first, 2u);
  EXPECT_EQ(st[1].first, 3u);
  EXPECT_NEAR(std::abs(st[0].second.amps()[1]), 1.0, kTol);
  EXPECT_THROW(branch_states(bp.problem, bp.tree, {0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(branch_states(bp.problem, bp.tree, {7}), std::out_of_range);
}

TEST(Coarsen, MergingPartiesKeepsFidelity) {
  const auto bp = ghz_partitioned_protocol(3, {2, 1});
  const std::map<std::string, std::string> g{{"A", "AB"}, {"B", "AB"}};
  const auto coarse = bp.problem.coarsened(g);
  EXPECT_EQ(coarse.layout().num_parties(), 1u);
  EXPECT_NEAR(run_protocol(coarse, coarsen_tree(bp.tree, g)).fidelity, bp.fidelity(), kTol);
  // unmapped party
  EXPECT_ANY_THROW(coarsen_tree(bp.tree, {{"A", "AB"}}));
}

TEST(ProtocolJson, RoundTripPreservesFidelity) {
  const auto bp = example4_protocol();
  const auto j = tree_to_json(bp.tree);
  const auto back = tree_from_json(json::parse(j.dump()));
  EXPECT_EQ(count_leaves(back), count_leaves(bp.tree));
  EXPECT_NEAR(run_protocol(bp.problem, back).fidelity, bp.fidelity(), 1e-12);
  const auto lp = lattice_partial_teleport(1, 1);
  EXPECT_NEAR(run_protocol(lp.problem, tree_from_json(tree_to_json(lp.tree))).fidelity, lp.fidelity(), 1e-12);
  EXPECT_THROW(tree_from_json(json{{"type", "bogus"}}), std::invalid_argument);
  EXPECT_THROW(tree_from_json(json{{"type", "leaf"}}), std::invalid_argument);
}

}  // namespace
