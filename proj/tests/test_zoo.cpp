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

const double kS = 1.0 / std::sqrt(2.0);

TEST(Weyl, QubitOrderAndBellStates) {
  Matrix xz = pauli_x() * pauli_z();
  EXPECT_LT((weyl(2, 0) - Matrix::Identity(2, 2)).norm(), kTol);
  EXPECT_LT((weyl(2, 1) - pauli_x()).norm(), kTol);
  EXPECT_LT((weyl(2, 2) - pauli_z()).norm(), kTol);
  EXPECT_LT((weyl(2, 3) - xz).norm(), kTol);
  // Phi+, Psi+, Phi-, Psi- up to phase
  const auto b = bell_states();
  const std::vector<std::size_t> want{0, 2, 1, 3};
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(overlap2(generalized_bell_state(2, t), b[want[static_cast<std::size_t>(t)]].amps()), 1.0, kTol);
}

TEST(Weyl, GeneralizedBellBasisIsOrthonormal) {
  for (int d : {2, 3, 4}) {
    Matrix g(d * d, d * d);
    for (int s = 0; s < d * d; ++s) {
      for (int t = 0; t < d * d; ++t) g(s, t) = generalized_bell_state(d, s).dot(generalized_bell_state(d, t));
    }
    EXPECT_LT((g - Matrix::Identity(d * d, d * d)).norm(), 1e-12);
    for (int t = 0; t < d * d; ++t) EXPECT_LT((weyl(d, t).adjoint() * weyl(d, t) - Matrix::Identity(d, d)).norm(), 1e-12);
  }
}

TEST(Instruments, CompletionAndFanout) {
  Vector plus(2);
  plus << kS, kS;
  const auto inst = projective_instrument("A", {0}, {plus});
  EXPECT_EQ(inst.kraus.size(), 2u);
  EXPECT_LT(instrument_completeness_residual(inst), kTol);
  // fan-out on |1,0,0> gives |1,1,1>
  const Matrix f = cnot_fanout(2);
  EXPECT_NEAR(std::abs(f(7, 4)), 1.0, kTol);
  EXPECT_NEAR(std::abs(f(3, 3)), 1.0, kTol);
  EXPECT_LT((f.adjoint() * f - Matrix::Identity(8, 8)).norm(), kTol);
}

TEST(Teleportation, PerfectOnOrthonormalBipartiteBases) {
  EXPECT_NEAR(teleportation_protocol(bell_basis(), "A", "B").fidelity(), 1.0, kTol);
  EXPECT_NEAR(teleportation_protocol(bell_basis(), "B", "A").fidelity(), 1.0, kTol);
  std::mt19937_64 rng(55);
  // random orthonormal basis of C^2 (x) C^3 from a unitary's columns
  const Matrix u = random_unitary(rng, 6);
  std::vector<StateVector> s;
  for (int c = 0; c < 6; ++c) s.emplace_back(Dims{2, 3}, u.col(c));
  const auto ens = Ensemble::equiprobable(PartyLayout::one_per_party(2), s);
  EXPECT_NEAR(teleportation_protocol(ens, "A", "B").fidelity(), 1.0, kTol);
  EXPECT_NEAR(teleportation_protocol(ens, "B", "A").fidelity(), 1.0, kTol);
  EXPECT_THROW(teleportation_protocol(ghz_basis(3, {1, 1, 1}), "A", "B"), std::invalid_argument);
  EXPECT_THROW(teleportation_protocol(bell_basis(), "A", "A"), std::invalid_argument);
}

TEST(Lattice, PartialTeleportationValues) {
  for (int n = 1; n <= 2; ++n) {
    EXPECT_NEAR(computational_protocol(lattice_basis(n)).fidelity(), std::ldexp(1.0, -n), kTol);
    for (int m = 1; m <= n; ++m) EXPECT_NEAR(lattice_partial_teleport(n, m).fidelity(), std::ldexp(1.0, m - n), kTol) << n << m;
  }
  EXPECT_THROW(lattice_partial_teleport(2, 0), std::invalid_argument);
  EXPECT_THROW(lattice_partial_teleport(2, 3), std::invalid_argument);
}

TEST(Ghz, SequentialBellSchemeIsExact) {
  for (int n = 2; n <= 4; ++n) {
    const auto r = appendix_a_protocol(n).run();
    EXPECT_NEAR(r.fidelity, 1.0, kTol) << n;
  }
  EXPECT_NEAR(appendix_a_protocol(3, {2, 0, 1}).fidelity(), 1.0, kTol);
  EXPECT_THROW(appendix_a_protocol(3, {0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(appendix_a_protocol(1), std::invalid_argument);
}

TEST(Ghz, EliminationHalvesTheSurvivors) {
  // Independent count: after party j's Bell round (j >= 2, not last) the
  // branch keeps 2^(N-j+1) members; the last round isolates one.
  const int n = 4;
  const auto r = appendix_a_protocol(n).run();
  int checked = 0;
  for (const auto& b : r.branches) {
    if (b.measurement_rounds < 2 || b.probability <= 0.0) continue;
    const std::size_t want = b.measurement_rounds >= n ? 1 : std::size_t{1} << (n - b.measurement_rounds + 1);
    EXPECT_EQ(b.survivors.size(), want);
    ++checked;
  }
  EXPECT_GT(checked, 0);
  // First round keeps everything: a Bell measurement on one GHZ qubit and one
  // unknown qubit reveals nothing on its own.
  for (const auto& b : r.branches) {
    if (b.measurement_rounds == 1) EXPECT_EQ(b.survivors.size(), std::size_t{1} << n);
  }
}

TEST(Ghz, PartitionedProtocol) {
  for (auto [n, sizes] : std::vector<std::pair<int, std::vector<int>>>{{3, {2, 1}}, {3, {1, 2}}, {4, {2, 2}}, {4, {3, 1}}}) {
    EXPECT_NEAR(ghz_partitioned_protocol(n, sizes).fidelity(), 1.0, kTol);
  }
  EXPECT_NEAR(computational_protocol(ghz_basis(3, {1, 1, 1})).fidelity(), 0.5, kTol);
  EXPECT_THROW(ghz_partitioned_protocol(3, {2, 2}), std::invalid_argument);
}

TEST(GraphDecode, PerfectWithUniformMultiplicity) {
  for (const auto& g : {Graph::path(3), Graph::complete(3), Graph(2, {{0, 1}}), Graph(3, {})}) {
    const auto gp = graph_decode_protocol(g);
    const int n = g.vertex_count();
    EXPECT_NEAR(gp.protocol.fidelity(), 1.0, kTol);
    std::vector<int> hits(std::size_t{1} << n, 0);
    for (auto x : gp.decode_table) ++hits[x];
    for (int h : hits) EXPECT_EQ(h, 1 << n);
  }
}

TEST(GraphDecode, TableAgreesWithPauliAlgebra) {
  // Outcome sigma_k on vertex k maps the resource to prod_k sigma_k |Psi_G>.
  // X_a acts on |Psi_G> like prod_{b ~ a} Z_b, so the member index is the
  // Z-pattern: z_k from Z factors plus neighbours' X factors (mod 2).
  const auto g = Graph::path(3);
  const auto gp = graph_decode_protocol(g);
  for (std::size_t t = 0; t < gp.decode_table.size(); ++t) {
    std::vector<int> z(3, 0);
    for (int k = 0; k < 3; ++k) {
      const int w = static_cast<int>((t >> (2 * (2 - k))) & 3U);
      const int a = w % 2, b = w / 2;
      z[static_cast<std::size_t>(k)] ^= b;
      for (int q = 0; q < 3; ++q) {
        if (a && g.adjacent(k, q)) z[static_cast<std::size_t>(q)] ^= 1;
      }
    }
    EXPECT_EQ(gp.decode_table[t], static_cast<std::size_t>(z[0] * 4 + z[1] * 2 + z[2])) << t;
  }
}

TEST(Example4, PerfectAndWithoutResourceHalf) {
  EXPECT_NEAR(example4_protocol().fidelity(), 1.0, kTol);
  EXPECT_NEAR(computational_protocol(example4_ensemble()).fidelity(), 0.5, kTol);
}

TEST(Example4, IntermediateBellStatesOnBC) {
  const auto bp = example4_protocol();
  // joint layout: A {uA}=0, B {rB, uB}={1,2}, C {rC, uC}={3,4}
  ASSERT_EQ(bp.problem.unknown_index(1), 2);
  ASSERT_EQ(bp.problem.unknown_index(2), 4);
  const auto b = bell_states();
  // Phi_1 -> Phi+, Phi_2 -> Phi-, Phi_3 -> Psi+, Phi_4 -> Psi-
  const std::vector<std::size_t> mapping{0, 1, 2, 3};
  for (int a : {0, 1}) {
    const auto st = branch_states(bp.problem, bp.tree, {a, 0});
    ASSERT_EQ(st.size(), 4u);
    for (const auto& [member, psi] : st) {
      const Matrix rho = naive_partial_trace(psi.amps(), psi.dims(), {2, 4});
      const Vector& want = b[mapping[member]].amps();
      EXPECT_NEAR(want.dot(rho * want).real(), 1.0, kTol) << "A outcome " << a << " member " << member;
    }
  }
}

TEST(Vidal, FallbackComposition) {
  const auto fb = computational_protocol(bell_basis());
  const auto r = vidal_then_fallback(bell_basis(), Resource{make_state({2, 2}, {{0, std::sqrt(0.8)}, {3, std::sqrt(0.2)}}), PartyLayout::one_per_party(2)},
                                     2, fb.tree);
  EXPECT_NEAR(r.conversion_probability, 0.4, kTol);
  EXPECT_NEAR(r.f_opt, 1.0, kTol);
  EXPECT_NEAR(r.f_fallback, 0.5, kTol);
  EXPECT_NEAR(r.fidelity, 0.7, kTol);
  const auto none = vidal_then_fallback(bell_basis(), Resource{StateVector::basis({2, 2}, 0), PartyLayout::one_per_party(2)}, 2, fb.tree);
  EXPECT_NEAR(none.fidelity, 0.5, kTol);
}

}  // namespace
