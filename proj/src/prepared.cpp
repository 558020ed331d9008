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

#include "protocol_support.hpp"

namespace gme::protocols::detail {

namespace {

PlannedStep make_step(std::string label, int copy, std::string party, const DensityOperator& rho,
                      const ProjectiveMeasurement& m, std::size_t accept) {
  PlannedStep step;
  step.label = std::move(label);
  step.copy_index = copy;
  step.party = std::move(party);
  step.measurement = m.label();
  step.accept = accept;
  step.outcomes = measure(rho, m);
  return step;
}

// Pure two-party residual of an accepted branch, with the surviving levels of
// both parties mapped onto a qubit.
PureState extract_pair(const DensityOperator& post, std::span<const std::size_t> discard,
                       const std::map<std::size_t, std::size_t>& level_map) {
  auto pair = trace_out_pure(to_pure(post), discard);
  pair = relabel_subspace(pair, 0, level_map, 2);
  return relabel_subspace(pair, 1, level_map, 2);
}

void attach_merge_finals(SequentialPlan& plan, const MergeResult& merge) {
  for (const auto& branch : merge.branches) {
    plan.final_labels.push_back("merge:" + branch.label());
    plan.final_probabilities.push_back(branch.probability);
    plan.final_success.push_back(entanglement::certify_gme_pure(branch.corrected_state).is_gme);
  }
}

ProjectiveMeasurement split_measurement(std::size_t party, std::size_t dim, std::initializer_list<std::size_t> low,
                                        std::initializer_list<std::size_t> high, std::string label) {
  return ProjectiveMeasurement({party}, {basis_projector(dim, low), basis_projector(dim, high)}, std::move(label));
}

ProjectiveMeasurement ququart_measurement(std::size_t party) {
  return ProjectiveMeasurement(
      {party}, {basis_projector(4, {0}), basis_projector(4, {1}), basis_projector(4, {2, 3})},
      "{|0><0|, |1><1|, |2><2|+|3><3|}");
}

}  // namespace

std::vector<double> PlannedStep::probabilities() const {
  std::vector<double> out;
  for (const auto& o : outcomes) out.push_back(o.probability);
  return out;
}

const DensityOperator& PlannedStep::accepted_state() const {
  const auto& o = outcomes.at(accept);
  if (o.is_null()) throw InvariantViolation(label + ": accepted outcome has zero probability");
  return *o.post_state;
}

StepRecord PlannedStep::record(std::size_t outcome) const {
  return StepRecord{copy_index, party, measurement, outcome, outcomes.at(outcome).probability, outcome == accept,
                    probabilities()};
}

double expected_repeats(double q, int budget) {
  double expected = 0.0;
  double miss = 1.0;
  for (int k = 1; k <= budget; ++k) {
    expected += k * q * miss;
    miss *= 1.0 - q;
  }
  return expected + budget * miss;
}

Prop1Prepared prepare_prop1(const ProtocolConfig& config) {
  config.validate();
  auto inputs = config.prop1_inputs.value_or(Prop1Inputs::example());
  auto rho = build_prop1_general(inputs.big_phi, inputs.small_phi, inputs.small_psi, inputs.big_psi, config.p);

  const auto charlie_m = ProjectiveMeasurement::with_remainder(
      {2}, {projector(inputs.small_phi.amplitudes())}, "{|phi><phi|, I - |phi><phi|}");
  const auto alice_m = ProjectiveMeasurement::with_remainder(
      {0}, {projector(inputs.small_psi.amplitudes())}, "{|psi><psi|, I - |psi><psi|}");

  SequentialPlan plan;
  plan.steps.push_back(make_step("copy1:C", 1, "C", rho, charlie_m, 0));
  plan.steps.push_back(make_step("copy2:A", 2, "A", rho, alice_m, 0));
  plan.copies_on_success = 2;

  auto charlie = run_prop1_step(rho, inputs.small_phi, 2);
  auto alice = run_prop1_step(rho, inputs.small_psi, 0);
  const bool both = charlie[0].entangled && alice[0].entangled;
  plan.final_labels.push_back(both ? "pairs_entangled" : "residual_separable");
  plan.final_probabilities.push_back(1.0);
  plan.final_success.push_back(both);

  return Prop1Prepared{std::move(inputs), std::move(rho), std::move(charlie), std::move(alice), std::move(plan)};
}

ChainPrepared prepare_prop2(const ProtocolConfig& config) {
  config.validate();
  auto coeffs = config.schmidt_or_uniform(3);
  auto rho = build_prop2_state(coeffs, config.p);
  const char* label = "{|0><0|, |1><1|+|2><2|}";

  SequentialPlan plan;
  plan.steps.push_back(make_step("copy1:C", 1, "C", rho, split_measurement(2, 3, {0}, {1, 2}, label), 1));
  plan.steps.push_back(make_step("copy2:A", 2, "A", rho, split_measurement(0, 3, {0}, {1, 2}, label), 1));
  plan.copies_on_success = 2;

  const std::map<std::size_t, std::size_t> upper{{1, 0}, {2, 1}};
  const std::array<std::size_t, 1> drop_a{0};
  const std::array<std::size_t, 1> drop_c{2};
  std::vector<PureState> pairs{extract_pair(plan.steps[1].accepted_state(), drop_c, upper),
                               extract_pair(plan.steps[0].accepted_state(), drop_a, upper)};
  auto merge = merge_chain_to_ghz(pairs);
  attach_merge_finals(plan, merge);
  return ChainPrepared{std::move(rho), std::move(coeffs), std::move(pairs), std::move(merge), std::move(plan)};
}

ChainPrepared prepare_prop3(const ProtocolConfig& config) {
  config.validate();
  auto coeffs = config.schmidt_or_uniform(4);
  auto rho = build_prop3_state(coeffs, config.weights);

  SequentialPlan plan;
  auto& steps = plan.steps;
  // Copy 1 isolates the C-D pair, copy 2 the A-B pair, copy 3 the B-C pair.
  steps.push_back(make_step("copy1:C", 1, "C", rho, ququart_measurement(2), 2));
  steps.push_back(make_step("copy1:D", 1, "D", steps[0].accepted_state(), ququart_measurement(3), 2));
  steps.push_back(make_step("copy2:A", 2, "A", rho, ququart_measurement(0), 2));
  steps.push_back(make_step("copy2:B", 2, "B", steps[2].accepted_state(), ququart_measurement(1), 2));
  steps.push_back(make_step("copy3:B", 3, "B", rho, ququart_measurement(1), 2));
  steps.push_back(make_step("copy3:C", 3, "C", steps[4].accepted_state(), ququart_measurement(2), 2));
  plan.copies_on_success = 3;

  const std::map<std::size_t, std::size_t> upper{{2, 0}, {3, 1}};
  const std::array<std::size_t, 2> keep_cd{0, 1};
  const std::array<std::size_t, 2> keep_ab{2, 3};
  const std::array<std::size_t, 2> keep_bc{0, 3};
  std::vector<PureState> pairs{extract_pair(steps[3].accepted_state(), keep_ab, upper),
                               extract_pair(steps[5].accepted_state(), keep_bc, upper),
                               extract_pair(steps[1].accepted_state(), keep_cd, upper)};
  auto merge = merge_chain_to_ghz(pairs);
  attach_merge_finals(plan, merge);
  return ChainPrepared{std::move(rho), std::move(coeffs), std::move(pairs), std::move(merge), std::move(plan)};
}

SigmaPrepared prepare_sigma(const ProtocolConfig& config) {
  config.validate();
  auto rho = config.sigma_resource ? build_sigma_prime(*config.sigma_resource, config.p) : build_sigma(config.p);
  const char* label = "{|0><0|+|1><1|, |2><2|}";
  auto alice = make_step("copy:A", 1, "A", rho, split_measurement(0, 3, {0, 1}, {2}, label), 0);
  auto charlie = make_step("copy:C", 1, "C", rho, split_measurement(2, 3, {0, 1}, {2}, label), 0);

  const std::map<std::size_t, std::size_t> lower{{0, 0}, {1, 1}};
  const std::array<std::size_t, 1> drop_a{0};
  const std::array<std::size_t, 1> drop_c{2};
  auto pair_ab = extract_pair(alice.accepted_state(), drop_c, lower);
  auto pair_bc = extract_pair(charlie.accepted_state(), drop_a, lower);

  const auto phi = states::phi_plus();
  const bool maximal = overlap_fidelity(pair_ab, phi) >= 1.0 - kStructuralTol &&
                       overlap_fidelity(pair_bc, phi) >= 1.0 - kStructuralTol;
  auto local = states::ghz(3);
  std::vector<DistributionBranch> distribution;
  std::optional<MergeResult> merge;
  if (maximal) {
    distribution = distribute_via_teleportation(local, pair_ab, pair_bc);
  } else {
    const std::vector<PureState> chain{pair_ab, pair_bc};
    merge = merge_chain_to_ghz(chain);
  }
  return SigmaPrepared{std::move(rho),         maximal,        std::move(alice),        std::move(charlie),
                       std::move(pair_ab),     std::move(pair_bc), std::move(local), std::move(distribution),
                       std::move(merge)};
}

}  // namespace gme::protocols::detail
