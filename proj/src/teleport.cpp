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

#include <array>
#include <cmath>

#include "gme/protocols.hpp"

namespace gme::protocols {

namespace {

struct BellEntry {
  const char* label;
  PureState (*state)();
  const char* correction;
};

const std::array<BellEntry, 4>& bell_table() {
  static const std::array<BellEntry, 4> table{{
      {"phi+", &states::phi_plus, "I"},
      {"phi-", &states::phi_minus, "Z"},
      {"psi+", &states::psi_plus, "X"},
      {"psi-", &states::psi_minus, "ZX"},
  }};
  return table;
}

PureState apply_correction(const PureState& s, std::size_t party, const std::string& correction) {
  const std::array<std::size_t, 1> t{party};
  PureState out = s;
  // Rightmost gate acts first.
  for (auto it = correction.rbegin(); it != correction.rend(); ++it) {
    if (*it == 'X') out = apply_local_unitary(out, gates::pauli_x(), t);
    if (*it == 'Z') out = apply_local_unitary(out, gates::pauli_z(), t);
  }
  return out;
}

}  // namespace

TeleportResult teleport(const PureState& state, std::size_t qubit, const PureState& resource) {
  const std::size_t n = state.num_parties();
  if (qubit >= n || state.dims()[qubit] != 2) {
    throw std::invalid_argument("teleport: party " + std::to_string(qubit) + " is not a qubit of the input");
  }
  if (!(resource.dims() == PartyDims{2, 2}) || !resource.is_normalized()) {
    throw std::invalid_argument("teleport: resource must be a normalized two-qubit state");
  }
  if (overlap_fidelity(resource, states::phi_plus()) < 1.0 - kStructuralTol) {
    throw std::invalid_argument("teleport: resource must be |phi+>");
  }

  const auto joint = tensor(state, resource);
  std::vector<Matrix> projectors;
  for (const auto& entry : bell_table()) projectors.push_back(projector(entry.state().amplitudes()));
  const ProjectiveMeasurement bell({qubit, n}, projectors, "bell");

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < qubit) order.push_back(k);
    else if (k == qubit) order.push_back(n - 1);
    else order.push_back(k - 1);
  }

  TeleportResult result;
  const std::array<std::size_t, 2> measured{qubit, n};
  for (auto& outcome : measure(joint, bell)) {
    if (outcome.is_null()) continue;
    const auto& entry = bell_table()[outcome.outcome_index];
    auto reduced = trace_out_pure(*outcome.post_state, measured);
    auto corrected = apply_correction(reduced, n - 1, entry.correction);
    auto placed = permute_parties(corrected, order);
    const double fid = overlap_fidelity(placed, state.normalized());
    result.branches.push_back(
        TeleportBranch{outcome.outcome_index, entry.label, outcome.probability, entry.correction, placed, fid});
  }
  return result;
}

std::vector<DistributionBranch> distribute_via_teleportation(const PureState& local_state,
                                                             const PureState& pair_ab,
                                                             const PureState& pair_bc) {
  if (!(local_state.dims() == PartyDims{2, 2, 2})) {
    throw std::invalid_argument("distribution expects a three-qubit state held by Bob");
  }
  // Bob sends from his half of each pair; the pair A-B is flipped so Bob's
  // qubit is the sender slot.
  const std::array<std::size_t, 2> swap{1, 0};
  const auto ab_from_bob = permute_parties(pair_ab, swap);

  std::vector<DistributionBranch> out;
  for (const auto& first : teleport(local_state, 0, ab_from_bob).branches) {
    for (const auto& second : teleport(first.state, 2, pair_bc).branches) {
      DistributionBranch branch{
          .bell_outcomes = {first.bell_outcome, second.bell_outcome},
          .probability = first.probability * second.probability,
          .corrections = {"A:" + first.correction, "C:" + second.correction},
          .state = second.state,
          .fidelity = overlap_fidelity(second.state, local_state.normalized()),
          .is_gme = entanglement::certify_gme_pure(second.state).is_gme,
      };
      out.push_back(std::move(branch));
    }
  }
  return out;
}

}  // namespace gme::protocols
