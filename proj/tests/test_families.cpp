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

Vector literal(std::size_t n, std::initializer_list<std::pair<std::size_t, double>> terms) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  for (auto [i, a] : terms) v[static_cast<Eigen::Index>(i)] = a;
  return v;
}

TEST(PartyLayout, Validation) {
  EXPECT_THROW(PartyLayout({{"A", {0}}, {"B", {0}}}, 2), std::invalid_argument);
  EXPECT_THROW(PartyLayout({{"A", {0}}, {"A", {1}}}, 2), std::invalid_argument);
  EXPECT_THROW(PartyLayout({{"A", {0}}}, 2), std::invalid_argument);
  EXPECT_THROW(PartyLayout({{"A", {0}}, {"B", {2}}}, 2), std::out_of_range);
  const auto l = PartyLayout::contiguous({2, 1, 3});
  EXPECT_EQ(l.names(), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(l.party("C").subsystems, (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(l.subsystems_of({"A", "C"}), (std::vector<int>{0, 1, 3, 4, 5}));
}

TEST(PartyLayout, CutsAndCoarsening) {
  for (int m = 2; m <= 5; ++m) {
    EXPECT_EQ(all_party_cuts(PartyLayout::one_per_party(m)).size(), (std::size_t{1} << (m - 1)) - 1);
  }
  const auto c = coarsen(PartyLayout::one_per_party(3), {{"A", "AB"}, {"B", "AB"}, {"C", "C"}});
  EXPECT_EQ(c.names(), (std::vector<std::string>{"AB", "C"}));
  EXPECT_EQ(c.party("AB").subsystems, (std::vector<int>{0, 1}));
  EXPECT_THROW(coarsen(PartyLayout::one_per_party(2), {{"A", "X"}}), std::invalid_argument);
}

TEST(Ensemble, Validation) {
  const auto l = PartyLayout::one_per_party(2);
  const auto s = StateVector::basis({2, 2}, 0);
  EXPECT_THROW(Ensemble(l, {}), std::invalid_argument);
  EXPECT_THROW(Ensemble(l, {{0.5, s}}), std::invalid_argument);
  EXPECT_THROW(Ensemble(l, {{-0.5, s}, {1.5, s}}), std::invalid_argument);
  EXPECT_THROW(Ensemble(l, {{0.5, s}, {0.5, StateVector::basis({2, 3}, 0)}}), std::invalid_argument);
  EXPECT_THROW(Ensemble(PartyLayout::one_per_party(3), {{1.0, s}}), std::invalid_argument);
}

TEST(Bell, LiteralAmplitudes) {
  const auto b = bell_states();
  EXPECT_LT((b[0].amps() - qubits2(kS, 0, 0, kS)).norm(), kTol);
  EXPECT_LT((b[1].amps() - qubits2(kS, 0, 0, -kS)).norm(), kTol);
  EXPECT_LT((b[2].amps() - qubits2(0, kS, kS, 0)).norm(), kTol);
  EXPECT_LT((b[3].amps() - qubits2(0, kS, -kS, 0)).norm(), kTol);
  EXPECT_TRUE(bell_basis().is_complete_basis());
  for (const auto& s : b) EXPECT_TRUE(is_maximally_entangled(s, Cut{{0}, {1}}));
}

TEST(Ghz, ThreeQubitListMatchesTheWrittenOrder) {
  const auto e = ghz_basis(3, {1, 1, 1});
  ASSERT_EQ(e.size(), 8u);
  // (000 +/- 111), (001 +/- 110), (010 +/- 101), (011 +/- 100)
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0b000, 0b111}, {0b001, 0b110}, {0b010, 0b101}, {0b011, 0b100}};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LT((e[2 * k].state.amps() - literal(8, {{pairs[k].first, kS}, {pairs[k].second, kS}})).norm(), kTol);
    EXPECT_LT((e[2 * k + 1].state.amps() - literal(8, {{pairs[k].first, kS}, {pairs[k].second, -kS}})).norm(), kTol);
  }
  EXPECT_TRUE(e.is_complete_basis());
}

TEST(Ghz, BasisProperties) {
  for (int n = 2; n <= 5; ++n) {
    const auto e = ghz_basis(n, std::vector<int>(static_cast<std::size_t>(n), 1));
    EXPECT_EQ(e.size(), std::size_t{1} << n);
    EXPECT_TRUE(e.is_complete_basis());
    for (const auto& pc : all_party_cuts(e.layout())) {
      for (const auto& m : e.members()) EXPECT_NEAR(entanglement_entropy(m.state, to_cut(e.layout(), pc)), 1.0, kTol);
    }
  }
  EXPECT_THROW(ghz_basis(4, {2, 1}), std::invalid_argument);
  EXPECT_THROW(ghz_basis(3, {3}), std::invalid_argument);
  EXPECT_THROW(ghz_basis(3, {0, 3}), std::invalid_argument);
  const auto g = ghz_state(4);
  EXPECT_NEAR(std::abs(g.amps()[0]), kS, kTol);
  EXPECT_NEAR(std::abs(g.amps()[15]), kS, kTol);
}

TEST(Lattice, MemberIndexingAndCompleteness) {
  for (int n = 1; n <= 3; ++n) {
    const auto e = lattice_basis(n);
    EXPECT_EQ(e.size(), std::size_t{1} << (2 * n));
    EXPECT_TRUE(e.is_complete_basis());
  }
  // member 1 of n = 2 is Phi_1 (x) Phi_2 on (a1 b1 a2 b2)
  const auto e = lattice_basis(2);
  Vector want = Vector::Zero(16);
  want[0b0000] = 0.5;
  want[0b0011] = -0.5;
  want[0b1100] = 0.5;
  want[0b1111] = -0.5;
  EXPECT_LT((e[1].state.amps() - want).norm(), kTol);
  EXPECT_EQ(e.layout().party("A").subsystems, (std::vector<int>{0, 2}));
  // every member carries n ebits across A|B
  for (const auto& m : e.members()) EXPECT_NEAR(entanglement_entropy(m.state, Cut{{0, 2}, {1, 3}}), 2.0, kTol);
}

/// K_a built from 2x2 factors by explicit Kronecker products.
Matrix stabilizer_oracle(const Graph& g, int a) {
  const int n = g.vertex_count();
  Matrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const Matrix f = q == a ? x : (g.adjacent(a, q) ? z : Matrix(Matrix::Identity(2, 2)));
    out = kron(out, f);
  }
  return out;
}

TEST(GraphState, StabilizerEigenrelations) {
  for (const auto& g : {Graph::path(3), Graph::complete(3), Graph::star(4), Graph::cycle(4), Graph(3, {{0, 2}})}) {
    const auto gb = graph_state_basis(g);
    const int n = g.vertex_count();
    ASSERT_EQ(gb.ensemble.size(), std::size_t{1} << n);
    EXPECT_TRUE(gb.ensemble.is_complete_basis());
    for (int a = 0; a < n; ++a) {
      const Matrix k = stabilizer_oracle(g, a);
      EXPECT_LT((k - gb.stabilizers[static_cast<std::size_t>(a)].matrix()).norm(), kTol);
      for (std::size_t x = 0; x < gb.ensemble.size(); ++x) {
        const double sign = ((x >> (n - 1 - a)) & 1U) ? -1.0 : 1.0;
        const Vector& v = gb.ensemble[x].state.amps();
        EXPECT_LT((k * v - sign * v).norm(), kTol) << "vertex " << a << " member " << x;
      }
    }
    EXPECT_LT((gb.resource.amps() - gb.ensemble[0].state.amps().conjugate()).norm(), kTol);
  }
}

TEST(GraphState, PathOfThreeLiteral) {
  // CZ_{01} CZ_{12} |+++>: sign (-1)^(x0 x1 + x1 x2)
  const auto gb = graph_state_basis(Graph::path(3));
  const double h = 1.0 / std::sqrt(8.0);
  for (std::size_t i = 0; i < 8; ++i) {
    const int b0 = (i >> 2) & 1, b1 = (i >> 1) & 1, b2 = i & 1;
    const double want = ((b0 & b1) ^ (b1 & b2)) ? -h : h;
    EXPECT_NEAR(gb.ensemble[0].state.amps()[static_cast<Eigen::Index>(i)].real(), want, kTol);
  }
}

TEST(Graph, Validation) {
  EXPECT_THROW(Graph(2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 2}}), std::out_of_range);
  EXPECT_EQ(Graph::cycle(4).edges().size(), 4u);
  EXPECT_EQ(Graph::complete(4).edges().size(), 6u);
  EXPECT_EQ(Graph::star(4).edges().size(), 3u);
  EXPECT_TRUE(Graph::star(4).adjacent(3, 0));
}

TEST(Parametric, LiteralAmplitudes) {
  const double a = 0.9, g = 0.8;
  const double b = std::sqrt(1 - a * a), d = std::sqrt(1 - g * g);
  const auto e = parametric_basis(a, g);
  EXPECT_LT((e[0].state.amps() - qubits2(a, 0, 0, b)).norm(), kTol);
  EXPECT_LT((e[1].state.amps() - qubits2(b, 0, 0, -a)).norm(), kTol);
  EXPECT_LT((e[2].state.amps() - qubits2(0, g, d, 0)).norm(), kTol);
  EXPECT_LT((e[3].state.amps() - qubits2(0, d, -g, 0)).norm(), kTol);
  EXPECT_TRUE(e.is_complete_basis());
}

TEST(Parametric, EndpointsAndRange) {
  const auto bell = parametric_basis(kS, kS);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(overlap2(bell[i].state.amps(), bell_states()[i].amps()), 1.0, kTol);
  const auto prod = parametric_basis(1.0, 1.0);
  for (const auto& m : prod.members()) EXPECT_NEAR(entanglement_entropy(m.state, Cut{{0}, {1}}), 0.0, kTol);
  EXPECT_THROW(parametric_basis(0.5, 0.9), std::invalid_argument);
  EXPECT_THROW(parametric_basis(0.9, 1.1), std::invalid_argument);
}

}  // namespace
