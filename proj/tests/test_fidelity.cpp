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

/// sum_a lambda_max(sum_i p_i <psi_i|M_a|psi_i> |psi_i><psi_i|), dense.
double optimum_oracle(const Ensemble& ens, const Povm& m) {
  double f = 0.0;
  const auto side = static_cast<Eigen::Index>(ens.dim());
  for (const auto& e : m.elements()) {
    Matrix rho = Matrix::Zero(side, side);
    for (const auto& mem : ens.members()) {
      const Vector& v = mem.state.amps();
      rho += mem.prior * v.dot(e * v).real() * v * v.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    f += es.eigenvalues().maxCoeff();
  }
  return f;
}

Povm random_povm(std::mt19937_64& rng, Eigen::Index side, std::size_t outcomes) {
  // Columns of a random isometry into side*outcomes, folded into elements.
  const Matrix u = random_unitary(rng, side * static_cast<Eigen::Index>(outcomes));
  std::vector<Matrix> es;
  for (std::size_t a = 0; a < outcomes; ++a) {
    const Matrix block = u.block(static_cast<Eigen::Index>(a) * side, 0, side, side);
    es.push_back(block.adjoint() * block);
  }
  Dims d{static_cast<int>(side)};
  return Povm(d, es);
}

TEST(Povm, Validation) {
  EXPECT_THROW(Povm({2}, {}), std::invalid_argument);
  EXPECT_THROW(Povm({2}, {Matrix::Identity(2, 2) * 0.5}), std::invalid_argument);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 2.0;
  neg(1, 1) = -1.0;
  Matrix rest = Matrix::Identity(2, 2) - neg;
  EXPECT_THROW(Povm({2}, {neg, rest}), std::invalid_argument);
  EXPECT_NO_THROW(Povm::computational({2, 3}));
}

TEST(AverageFidelity, ComputationalBasisIsPerfect) {
  std::vector<StateVector> s;
  for (std::size_t i = 0; i < 6; ++i) s.push_back(StateVector::basis({2, 3}, i));
  const auto ens = Ensemble::equiprobable(PartyLayout::one_per_party(2), s);
  EXPECT_NEAR(average_fidelity(ens, Povm::computational({2, 3}), GuessStrategy{s}), 1.0, kTol);
}

TEST(AverageFidelity, MatchesBruteForceSum) {
  std::mt19937_64 rng(31);
  std::vector<Member> ms;
  const std::vector<double> pri{0.1, 0.2, 0.3, 0.4};
  for (double p : pri) ms.push_back({p, random_state(rng, {3})});
  const Ensemble ens(PartyLayout::one_per_party(1), ms);
  const auto m = random_povm(rng, 3, 4);
  GuessStrategy g;
  for (int a = 0; a < 4; ++a) g.guesses.push_back(random_state(rng, {3}));
  double want = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    for (const auto& mem : ens.members()) {
      const Vector& v = mem.state.amps();
      want += mem.prior * (v.adjoint() * m.elements()[a] * v)(0, 0).real() * overlap2(v, g.guesses[a].amps());
    }
  }
  EXPECT_NEAR(average_fidelity(ens, m, g), want, 1e-12);
  EXPECT_THROW(average_fidelity(ens, m, GuessStrategy{{g.guesses[0]}}), std::invalid_argument);
}

TEST(OptimalGuess, MatchesLargestEigenvalueOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<StateVector> s;
    for (int i = 0; i < 5; ++i) s.push_back(random_state(rng, {4}));
    const auto ens = Ensemble::equiprobable(PartyLayout::one_per_party(1), s);
    const auto m = random_povm(rng, 4, 3);
    const auto og = optimal_guess(ens, m);
    EXPECT_NEAR(og.fidelity, optimum_oracle(ens, m), 1e-10);
    // no random guess beats it
    GuessStrategy g;
    for (int a = 0; a < 3; ++a) g.guesses.push_back(random_state(rng, {4}));
    EXPECT_LE(average_fidelity(ens, m, g), og.fidelity + 1e-12);
  }
}

TEST(OptimalGuess, BellBasisComputationalMeasurementReachesHalf) {
  const auto ens = bell_basis();
  const auto og = optimal_guess(ens, Povm::computational({2, 2}));
  EXPECT_NEAR(og.fidelity, 0.5, kTol);
  EXPECT_NEAR(og.fidelity, mes_bound(4, 2), kTol);
  EXPECT_NEAR(optimal_guess(ens, Povm::projective(bell_states())).fidelity, 1.0, kTol);
}

TEST(Bounds, MesBound) {
  EXPECT_NEAR(mes_bound(4, 2), 0.5, 0);
  EXPECT_NEAR(mes_bound(16, 4), 0.25, 0);
  EXPECT_NEAR(mes_bound(9, 3), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(mes_bound(0, 2), std::invalid_argument);
  EXPECT_THROW(mes_bound(4, 1), std::invalid_argument);
}

TEST(Bounds, SchmidtCoefficientSeparableBound) {
  const PartyCut ab{{"A"}, {"B"}};
  EXPECT_DOUBLE_EQ(schmidt_coeff_sep_bound(bell_basis(), ab), 0.5);
  EXPECT_DOUBLE_EQ(schmidt_coeff_sep_bound(parametric_basis(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)), ab), 0.5);
  EXPECT_THROW(schmidt_coeff_sep_bound(parametric_basis(0.9, 0.8), ab), std::domain_error);
  const auto ghz = ghz_basis(3, {1, 1, 1});
  for (const auto& pc : all_party_cuts(ghz.layout())) EXPECT_DOUBLE_EQ(schmidt_coeff_sep_bound(ghz, pc), 0.5);
  const auto partial = Ensemble::equiprobable(PartyLayout::one_per_party(2), {bell_states()[0], bell_states()[1]});
  EXPECT_THROW(schmidt_coeff_sep_bound(partial, ab), std::invalid_argument);
  EXPECT_DOUBLE_EQ(bipartition_min_bound({{"A|BC", 0.5}, {"AB|C", 0.25}}), 0.25);
  EXPECT_THROW(bipartition_min_bound({}), std::invalid_argument);
}

TEST(Bounds, EntropyCheckOnGhzBases) {
  for (int n = 3; n <= 4; ++n) {
    const auto ens = ghz_basis(n, std::vector<int>(static_cast<std::size_t>(n), 1));
    const auto rep = entropy_bound_check(ghz_state(n), PartyLayout::one_per_party(n), ens);
    EXPECT_TRUE(rep.applicable);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.requires_all_parties);
    for (const auto& r : rep.rows) {
      EXPECT_NEAR(r.resource_entropy, 1.0, kTol);
      EXPECT_NEAR(r.mean_member_entropy, 1.0, kTol);
    }
  }
}

TEST(Bounds, EntropyCheckRejectsAResourceMissingAParty) {
  const auto ens = ghz_basis(3, {1, 1, 1});
  const auto rep = entropy_bound_check(bell_states()[0], PartyLayout({{"A", {0}}, {"B", {1}}}, 2), ens);
  EXPECT_TRUE(rep.applicable);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.resource_spans_all_cuts);
  EXPECT_THROW(entropy_bound_check(bell_states()[0], PartyLayout({{"A", {0}}, {"Z", {1}}}, 2), ens), std::invalid_argument);
}

TEST(Bounds, Vidal) {
  const Cut c{{0}, {1}};
  EXPECT_NEAR(vidal_conversion_probability(bell_states()[0], c, 2), 1.0, kTol);
  EXPECT_NEAR(vidal_conversion_probability(StateVector::basis({2, 2}, 0), c, 2), 0.0, kTol);
  // two-qubit closed form: 2 * lambda_min
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const auto psi = random_state(rng, {2, 2});
    const auto lam = schmidt(psi, c).squared();
    EXPECT_NEAR(vidal_conversion_probability(psi, c, 2), 2.0 * lam.back(), 1e-10);
  }
  // two Bell pairs: certain conversion to rank 4, and to rank 2
  const auto two = kron(bell_states()[0], bell_states()[0]);
  EXPECT_NEAR(vidal_conversion_probability(two, Cut{{0, 2}, {1, 3}}, 4), 1.0, kTol);
  EXPECT_NEAR(vidal_conversion_probability(two, Cut{{0, 2}, {1, 3}}, 2), 1.0, kTol);
  // rank beyond the Schmidt rank is impossible
  EXPECT_NEAR(vidal_conversion_probability(bell_states()[0], c, 3), 0.0, kTol);
  EXPECT_THROW(vidal_conversion_probability(bell_states()[0], c, 1), std::invalid_argument);
}

TEST(Bounds, MixedStrategy) {
  EXPECT_DOUBLE_EQ(mixed_strategy_fidelity(0.4, 1.0, 0.5), 0.7);
  EXPECT_THROW(mixed_strategy_fidelity(1.5, 1.0, 0.5), std::invalid_argument);
}

}  // namespace
