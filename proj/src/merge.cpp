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
#include <functional>

#include <Eigen/SVD>

#include "gme/protocols.hpp"

namespace gme::protocols {

namespace {

// Pair k of the chain occupies qubits 2k and 2k+1. Internal party k holds
// qubits 2k-1 and 2k; qubit 2k-1 is the one measured out.
std::size_t discarded_qubit(std::size_t internal_party) { return 2 * internal_party - 1; }

ProjectiveMeasurement parity_measurement(std::size_t internal_party) {
  const std::size_t q = discarded_qubit(internal_party);
  return ProjectiveMeasurement({q, q + 1}, {basis_projector(4, {0, 3}), basis_projector(4, {1, 2})}, "parity");
}

ProjectiveMeasurement sign_measurement(std::size_t internal_party) {
  Vector plus(2), minus(2);
  const double r = 1.0 / std::sqrt(2.0);
  plus << r, r;
  minus << r, -r;
  return ProjectiveMeasurement({discarded_qubit(internal_party)}, {projector(plus), projector(minus)}, "sign");
}

}  // namespace

SchmidtAlignment schmidt_align(const PureState& pair, std::string label) {
  if (!(pair.dims() == PartyDims{2, 2}) || !pair.is_normalized()) {
    throw std::invalid_argument("schmidt_align needs a normalized two-qubit state");
  }
  Matrix m(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) m(i, j) = pair.amplitudes()[2 * i + j];
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix left = svd.matrixU().adjoint();
  const Matrix right = svd.matrixV().transpose();
  const std::array<std::size_t, 1> a_party{0};
  const std::array<std::size_t, 1> b_party{1};
  auto aligned = apply_local_unitary(apply_local_unitary(pair, left, a_party), right, b_party);

  const double a = svd.singularValues()[0];
  const double b = svd.singularValues()[1];
  const Vector& amp = aligned.amplitudes();
  if (std::abs(amp[0] - Complex(a)) > kStructuralTol || std::abs(amp[3] - Complex(b)) > kStructuralTol ||
      std::abs(amp[1]) > kStructuralTol || std::abs(amp[2]) > kStructuralTol) {
    throw InvariantViolation("Schmidt alignment did not reach a|00> + b|11>");
  }
  return SchmidtAlignment{std::move(label), a, b, left, right, std::move(aligned)};
}

std::string MergeBranch::label() const {
  if (parity_outcomes.empty()) return "direct";
  std::string out;
  for (std::size_t k = 0; k < parity_outcomes.size(); ++k) {
    if (k > 0) out += ",";
    out += parity_outcomes[k] == 0 ? "P1" : "P2";
    out += sign_outcomes[k] == 0 ? "+" : "-";
  }
  return out;
}

MergeResult merge_chain_to_ghz(std::span<const PureState> pairs) {
  if (pairs.empty()) throw std::invalid_argument("merge needs at least one pair");
  const std::size_t m = pairs.size();

  std::vector<SchmidtAlignment> alignments;
  double prod_a = 1.0, prod_b = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    alignments.push_back(schmidt_align(pairs[k], entanglement::party_label(k) + entanglement::party_label(k + 1)));
    prod_a *= alignments.back().a;
    prod_b *= alignments.back().b;
  }
  if (prod_b <= kZeroProbability) {
    throw std::invalid_argument("every pair in the chain must be entangled");
  }

  PureState chain = alignments[0].aligned;
  for (std::size_t k = 1; k < m; ++k) chain = tensor(chain, alignments[k].aligned);

  const auto target = states::ghz_like(m + 1, prod_a, prod_b);
  std::vector<std::size_t> discard;
  for (std::size_t k = 1; k < m; ++k) discard.push_back(discarded_qubit(k));

  std::vector<MergeBranch> branches;
  std::vector<std::size_t> parities, signs;

  std::function<void(const PureState&, double, std::size_t)> walk = [&](const PureState& state, double prob,
                                                                         std::size_t k) {
    if (k == m) {
      auto raw = discard.empty() ? state : trace_out_pure(state, discard);
      std::vector<LocalCorrection> corrections;
      auto corrected = raw;
      std::size_t cumulative = 0;
      for (std::size_t j = 1; j < m; ++j) {
        cumulative ^= parities[j - 1];
        if (cumulative != 0) corrections.push_back({j, "X"});
      }
      if (cumulative != 0) corrections.push_back({m, "X"});
      std::size_t minus_count = 0;
      for (auto s : signs) minus_count += s;
      if (minus_count % 2 == 1) corrections.push_back({0, "Z"});
      for (const auto& c : corrections) {
        const std::array<std::size_t, 1> t{c.party};
        corrected = apply_local_unitary(corrected, c.gate == "X" ? gates::pauli_x() : gates::pauli_z(), t);
      }
      const double fid = overlap_fidelity(corrected, target);
      branches.push_back(MergeBranch{parities, signs, prob, std::move(raw), std::move(corrections),
                                     std::move(corrected), fid});
      return;
    }
    for (auto& parity : measure(state, parity_measurement(k))) {
      if (parity.is_null()) continue;
      for (auto& sign : measure(*parity.post_state, sign_measurement(k))) {
        if (sign.is_null()) continue;
        parities.push_back(parity.outcome_index);
        signs.push_back(sign.outcome_index);
        walk(*sign.post_state, prob * parity.probability * sign.probability, k + 1);
        parities.pop_back();
        signs.pop_back();
      }
    }
  };
  walk(chain, 1.0, 1);

  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw InvariantViolation("merge branch probabilities sum to " + std::to_string(total));
  }
  return MergeResult{std::move(alignments), std::move(branches), target};
}

}  // namespace gme::protocols
