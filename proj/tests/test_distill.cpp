// Copyright 2026 The GME Activation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gme/distill.hpp"
#include "gme/entanglement.hpp"
#include "gme/protocols.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

using namespace gme;
using namespace gme::distill;
using testing_support::expect_matrix_near;
using testing_support::from_oracle;
using testing_support::to_oracle;

const PartyDims kTwoQubits{2, 2};

DensityOperator isotropic(double f) { return DensityOperator(kTwoQubits, from_oracle(oracle::isotropic(f))); }

/// (2/3) phi+ + (1/3) |10><10|.
oracle::Mat residual_oracle() {
  const double r = 1.0 / std::sqrt(2.0);
  return oracle::add(oracle::outer({r, 0, 0, r}), oracle::outer(oracle::basis(4, 2)), 2.0 / 3, 1.0 / 3);
}

/// Bilateral-CNOT round by brute force on the 16-dimensional oracle space.
struct OracleRound {
  double probability;
  oracle::Mat post;
};

OracleRound oracle_recurrence(const oracle::Mat& rho) {
  const oracle::Mat joint = oracle::kron(rho, rho);  // (A1, B1, A2, B2)
  const std::vector<std::size_t> dims{2, 2, 2, 2};
  oracle::Mat u = oracle::zeros(16);
  for (std::size_t i = 0; i < 16; ++i) {
    auto d = oracle::digits(i, dims);
    d[2] ^= d[0];
    d[3] ^= d[1];
    u[oracle::index_of(d, dims)][i] = 1.0;
  }
  const oracle::Mat evolved = oracle::mul(oracle::mul(u, joint), oracle::dagger(u));
  oracle::Mat kept = oracle::zeros(16);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      const auto di = oracle::digits(i, dims), dj = oracle::digits(j, dims);
      if (di[2] == di[3] && dj[2] == dj[3]) kept[i][j] = evolved[i][j];
    }
  }
  const double prob = oracle::trace(kept).real();
  oracle::Mat post = oracle::partial_trace(kept, dims, {2, 3});
  for (auto& row : post)
    for (auto& e : row) e /= prob;
  return {prob, post};
}

TEST(FilterPair, RejectsIncompleteKraus) {
  EXPECT_THROW(FilterPair(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), std::invalid_argument);
  Matrix too_big = Matrix::Identity(2, 2) * 1.5;
  EXPECT_THROW(FilterPair::from_success_operator(too_big), std::invalid_argument);
}

TEST(LocalFilter, IdentityFilterLeavesInput) {
  std::mt19937_64 gen(3);
  const auto rho = testing_support::random_mixed(kTwoQubits, gen);
  const FilterPair id(Matrix::Identity(2, 2), Matrix::Zero(2, 2));
  const auto branches = local_filter(rho, 0, id);
  EXPECT_NEAR(branches[0].probability, 1.0, 1e-12);
  EXPECT_TRUE(branches[1].is_null());
  expect_matrix_near(to_oracle(*branches[0].post_state), to_oracle(rho), 1e-12);
}

TEST(LocalFilter, ProcrusteanFilterOnSchmidtPair) {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.8, 0.6}, {0.6, 0.8}, {0.95, std::sqrt(1 - 0.9025)}}) {
    const auto pair = DensityOperator::from_pure(states::ghz_like(2, a, b));
    const auto branches = local_filter(pair, 0, procrustean_filter(a, b));
    // Direct Kraus application: K0 = diag(b, a) / max(a, b) on party 0.
    const double m = std::max(a, b);
    const oracle::Vec filtered{a * b / m, 0, 0, a * b / m};
    const double expected_prob = std::norm(filtered[0]) + std::norm(filtered[3]);
    EXPECT_NEAR(expected_prob, 2 * std::min(a * a, b * b), 1e-12);
    EXPECT_NEAR(branches[0].probability, expected_prob, 1e-12);
    EXPECT_NEAR(bell_fidelity(*branches[0].post_state), 1.0, 1e-12);
  }
}

TEST(LocalFilter, FilterDoesNotLowerNegativityOfResidual) {
  const DensityOperator rho(kTwoQubits, from_oracle(residual_oracle()));
  const double before = oracle::negativity(residual_oracle(), {2, 2}, {0});
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = 0.5;
  for (std::size_t party = 0; party < 2; ++party) {
    const auto branches = local_filter(rho, party, FilterPair::from_success_operator(k0));
    const double after = oracle::negativity(to_oracle(*branches[0].post_state), {2, 2}, {0});
    if (party == 0) {
      EXPECT_GE(after, before - 1e-12);
    }
  }
}

TEST(RecurrenceRound, ClosedFormAtThreeQuarters) {
  const auto result = recurrence_round(isotropic(0.75));
  EXPECT_NEAR(bell_fidelity(result.post_state), oracle::recurrence_fidelity(0.75), 1e-12);
  EXPECT_NEAR(bell_fidelity(result.post_state), 0.78846153846153844, 1e-9);
  EXPECT_NEAR(result.success_probability, oracle::recurrence_acceptance(0.75), 1e-12);
}

TEST(RecurrenceRound, PureBellIsFixedPoint) {
  const auto result = recurrence_round(DensityOperator::from_pure(states::phi_plus()));
  EXPECT_NEAR(bell_fidelity(result.post_state), 1.0, 1e-12);
  EXPECT_NEAR(result.success_probability, 1.0, 1e-12);
}

TEST(RecurrenceRound, NoGainAtThreshold) {
  const auto result = recurrence_round(isotropic(0.5));
  EXPECT_LE(bell_fidelity(result.post_state), 0.5 + 1e-9);
}

TEST(RecurrenceRound, MatchesBruteForceOnArbitraryInputs) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = testing_support::random_mixed(kTwoQubits, gen, 2);
    const auto lib = recurrence_round(rho);
    const auto ref = oracle_recurrence(to_oracle(rho));
    EXPECT_NEAR(lib.success_probability, ref.probability, 1e-12);
    expect_matrix_near(to_oracle(lib.post_state), ref.post, 1e-10);
  }
}

TEST(Twirl, InvariantInputs) {
  const auto bell = DensityOperator::from_pure(states::phi_plus());
  expect_matrix_near(to_oracle(twirl_to_isotropic(bell)), to_oracle(bell), 1e-12);
  const DensityOperator mixed(kTwoQubits, Matrix::Identity(4, 4) / 4.0);
  expect_matrix_near(to_oracle(twirl_to_isotropic(mixed)), to_oracle(mixed), 1e-12);
}

TEST(Twirl, ResidualBecomesIsotropicWithSameFidelity) {
  const DensityOperator rho(kTwoQubits, from_oracle(residual_oracle()));
  const double f = bell_fidelity(rho);
  EXPECT_NEAR(f, 2.0 / 3, 1e-12);
  expect_matrix_near(to_oracle(twirl_to_isotropic(rho)), oracle::isotropic(f), 1e-12);
}

TEST(Twirl, CliffordGroupHasTwentyFourDistinctElements) {
  const auto& group = clifford_group();
  ASSERT_EQ(group.size(), 24u);
  for (std::size_t i = 0; i < group.size(); ++i) {
    EXPECT_TRUE(is_unitary(group[i]));
    for (std::size_t j = 0; j < i; ++j) {
      const Complex overlap = (group[i].adjoint() * group[j]).trace();
      EXPECT_LT(std::abs(overlap), 2.0 - 1e-6) << i << " vs " << j;
    }
  }
}

TEST(Pipeline, ResidualAtHalfStrictlyIncreases) {
  const DensityOperator rho(kTwoQubits, from_oracle(residual_oracle()));
  const auto result = distill_pipeline(rho, 3);
  EXPECT_EQ(result.status, PipelineStatus::kDistilling);
  ASSERT_EQ(result.trajectory.size(), 4u);
  double f = 2.0 / 3;
  double cumulative = 1.0;
  EXPECT_NEAR(result.trajectory[0].fidelity, f, 1e-12);
  for (int k = 1; k <= 3; ++k) {
    cumulative *= oracle::recurrence_acceptance(f);
    f = oracle::recurrence_fidelity(f);
    EXPECT_NEAR(result.trajectory[k].fidelity, f, 1e-10);
    EXPECT_NEAR(result.trajectory[k].cumulative_probability, cumulative, 1e-10);
    EXPECT_GT(result.trajectory[k].fidelity, result.trajectory[k - 1].fidelity);
  }
}

TEST(Pipeline, ZeroRoundsRejected) {
  EXPECT_THROW(distill_pipeline(isotropic(0.8), 0), std::invalid_argument);
}

TEST(Pipeline, HighFidelityImproves) {
  const auto result = distill_pipeline(isotropic(0.99), 2);
  EXPECT_GT(result.trajectory.back().fidelity, 0.99);
}

TEST(Pipeline, AlignsPauliRotatedInput) {
  const auto rho = apply_local_unitary(DensityOperator(kTwoQubits, from_oracle(residual_oracle())), gates::pauli_x(), {0});
  const auto result = distill_pipeline(rho, 1);
  EXPECT_EQ(result.alignment, "X");
  EXPECT_NEAR(result.trajectory[0].fidelity, 2.0 / 3, 1e-12);
}

TEST(Pipeline, FiltersWeakMixedState) {
  // 0.6 (a|00> + b|11>) + 0.4 |01><01| with a^2 = 0.9: entangled, yet every
  // Pauli alignment leaves F <= 1/2 (the best is 0.6 (a + b)^2 / 2 = 0.48).
  const double a = std::sqrt(0.9), b = std::sqrt(0.1);
  const oracle::Mat rho_o = oracle::add(oracle::outer({a, 0, 0, b}), oracle::outer(oracle::basis(4, 1)), 0.6, 0.4);
  EXPECT_GT(oracle::negativity(rho_o, {2, 2}, {0}), 0.0);
  const auto result = distill_pipeline(DensityOperator(kTwoQubits, from_oracle(rho_o)), 1);
  EXPECT_EQ(result.status, PipelineStatus::kDistilling);
  ASSERT_TRUE(result.filter_party.has_value());
  EXPECT_GT(result.filter_probability, 0.0);
  EXPECT_LT(result.filter_probability, 1.0);
  EXPECT_GT(result.trajectory.front().fidelity, 0.5);
  EXPECT_GT(result.trajectory.back().fidelity, result.trajectory.front().fidelity);
}

TEST(Pipeline, SeparableInputReportsBelowThreshold) {
  const auto result = distill_pipeline(DensityOperator::from_pure(basis_ket(kTwoQubits, {0, 0})), 2);
  EXPECT_EQ(result.status, PipelineStatus::kBelowThreshold);
}

// ---------------------------------------------------------------------------
// Properties

class IsotropicGrid : public ::testing::TestWithParam<double> {};

TEST_P(IsotropicGrid, RecurrenceMatchesClosedForm) {
  const double f = GetParam();
  const auto result = recurrence_round(isotropic(f));
  EXPECT_NEAR(bell_fidelity(result.post_state), oracle::recurrence_fidelity(f), 1e-9);
  EXPECT_NEAR(result.success_probability, oracle::recurrence_acceptance(f), 1e-9);
  EXPECT_GT(bell_fidelity(result.post_state), f);
}

INSTANTIATE_TEST_SUITE_P(Fidelities, IsotropicGrid, ::testing::Values(0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95));

TEST(RecurrenceEndpoints, EqualityAtHalfAndOne) {
  for (double f : {0.5, 1.0}) {
    const auto result = recurrence_round(isotropic(f));
    EXPECT_NEAR(bell_fidelity(result.post_state), f, 1e-9);
  }
}

class RandomTwoQubit : public ::testing::TestWithParam<int> {};

TEST_P(RandomTwoQubit, FilterBranchesSumToOne) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()));
  const auto rho = testing_support::random_mixed(kTwoQubits, gen);
  const Matrix k0 = testing_support::random_unitary(2, gen) * 0.7;
  const auto branches = local_filter(rho, static_cast<std::size_t>(GetParam() % 2), FilterPair::from_success_operator(k0));
  double total = 0.0;
  for (const auto& b : branches) {
    total += b.probability;
    if (!b.is_null()) {
      EXPECT_NEAR(b.post_state->matrix().trace().real(), 1.0, 1e-9);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST_P(RandomTwoQubit, TwirlPreservesFidelityAndCommutesWithGroup) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()) + 77);
  const auto rho = testing_support::random_mixed(kTwoQubits, gen);
  const auto twirled = twirl_to_isotropic(rho);
  EXPECT_NEAR(bell_fidelity(twirled), bell_fidelity(rho), 1e-9);
  for (const auto& c : clifford_group()) {
    Matrix cc(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) cc(2 * i + k, 2 * j + l) = c(i, j) * std::conj(c(k, l));
    const Matrix m = twirled.matrix();
    EXPECT_LT((cc * m - m * cc).cwiseAbs().maxCoeff(), 1e-9);
  }
  expect_matrix_near(to_oracle(twirled), oracle::isotropic(bell_fidelity(rho)), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTwoQubit, ::testing::Range(1, 7));

}  // namespace
