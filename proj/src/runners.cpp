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

namespace gme::protocols {

std::string to_string(FirstPair first) {
  switch (first) {
    case FirstPair::kSampled:
      return "sampled";
    case FirstPair::kAliceBob:
      return "ab";
    case FirstPair::kBobCharlie:
      return "bc";
  }
  return "sampled";
}

Prop1Inputs Prop1Inputs::example() {
  return Prop1Inputs{states::phi_plus(), basis_ket(PartyDims{2}, {0}), basis_ket(PartyDims{2}, {1}),
                     states::phi_minus()};
}

void ProtocolConfig::validate() const {
  detail::check_open_probability(p, "p");
  detail::check_weights(weights, 3);
  if (!schmidt_coeffs.empty()) detail::check_schmidt_coefficients(schmidt_coeffs, schmidt_coeffs.size());
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  if (max_copies < 1) throw std::invalid_argument("max_copies must be at least 1");
  if (prop1_outcome > 1) throw std::invalid_argument("prop1 outcome must be 0 or 1");
  if (distill_rounds < 1) throw std::invalid_argument("distillation needs at least one round");
  if (sigma_resource && !(sigma_resource->dims() == PartyDims{2, 2})) {
    throw std::invalid_argument("sigma resource must be a two-qubit state");
  }
}

std::vector<double> ProtocolConfig::schmidt_or_uniform(std::size_t count) const {
  if (!schmidt_coeffs.empty()) return schmidt_coeffs;
  return std::vector<double>(count, 1.0 / std::sqrt(static_cast<double>(count)));
}

double analytic_Pn(double p, int n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("analytic_Pn: p must lie in [0, 1]");
  if (n < 0) throw std::invalid_argument("analytic_Pn: n must be nonnegative");
  return 1.0 - std::pow(1.0 - p, n);
}

std::vector<Prop1Branch> run_prop1_step(const DensityOperator& rho, const PureState& reference,
                                        std::size_t measuring_party) {
  if (rho.num_parties() != 3) throw std::invalid_argument("the one-copy step expects a three-party state");
  rho.dims().check_parties(std::array<std::size_t, 1>{measuring_party});
  if (!(reference.dims() == PartyDims{rho.dims()[measuring_party]}) || !reference.is_normalized()) {
    throw std::invalid_argument("reference must be a normalized state of the measuring party");
  }
  const auto m = ProjectiveMeasurement::with_remainder({measuring_party}, {projector(reference.amplitudes())});
  std::vector<Prop1Branch> out;
  const std::array<std::size_t, 1> first{0};
  for (auto& o : measure(rho, m)) {
    Prop1Branch branch;
    branch.outcome_index = o.outcome_index;
    branch.probability = o.probability;
    if (!o.is_null()) {
      const std::array<std::size_t, 1> discard{measuring_party};
      branch.reduced_state = partial_trace(*o.post_state, discard);
      branch.negativity = entanglement::negativity_over(*branch.reduced_state, first);
      branch.entangled = branch.negativity > kStructuralTol;
    }
    out.push_back(std::move(branch));
  }
  return out;
}

namespace {

double success_mass(const detail::SequentialPlan& plan) {
  double mass = 1.0;
  for (const auto& s : plan.steps) mass *= s.accept_probability();
  double finals = 0.0;
  for (std::size_t i = 0; i < plan.final_probabilities.size(); ++i) {
    if (plan.final_success[i]) finals += plan.final_probabilities[i];
  }
  return mass * finals;
}

// Walks the postselected steps; false if some copy was rejected.
bool walk_steps(const detail::SequentialPlan& plan, OutcomeSelector& selector, ProtocolReport& report) {
  for (const auto& step : plan.steps) {
    const auto probs = step.probabilities();
    const std::size_t o = selector.select(probs, step.accept);
    report.steps.push_back(step.record(o));
    report.copies_consumed = step.copy_index;
    report.metrics[step.label + "_accept_probability"] = step.accept_probability();
    if (o != step.accept) {
      report.notes.push_back(step.label + " rejected with outcome " + std::to_string(o));
      return false;
    }
  }
  report.copies_consumed = plan.copies_on_success;
  return true;
}

void finish_with_merge(const detail::ChainPrepared& prep, OutcomeSelector& selector, ProtocolReport& report) {
  const auto& merge = prep.merge;
  std::vector<double> probs;
  for (const auto& b : merge.branches) probs.push_back(b.probability);
  const std::size_t chosen = selector.select(probs, 0);
  const auto& branch = merge.branches.at(chosen);
  const auto cert = entanglement::certify_gme_pure(branch.corrected_state);
  report.alignments = merge.alignments;
  report.merge = merge;
  report.final_state = branch.corrected_state;
  report.certificates = cert.report;
  report.is_gme = cert.is_gme;
  report.success = cert.is_gme;
  report.metrics["merge_branch_probability"] = branch.probability;
  report.metrics["merge_target_fidelity"] = branch.target_fidelity;
  report.notes.push_back("merge branch " + branch.label());
}

ProtocolReport chain_report(std::string name, const ProtocolConfig& config, const detail::ChainPrepared& prep,
                            OutcomeSelector& selector) {
  ProtocolReport report;
  report.protocol = std::move(name);
  report.config = config;
  report.exact_success_prob = success_mass(prep.plan);
  if (walk_steps(prep.plan, selector, report)) finish_with_merge(prep, selector, report);
  return report;
}

}  // namespace

ProtocolReport run_prop1(const ProtocolConfig& config) {
  const auto prep = detail::prepare_prop1(config);
  ProtocolReport report;
  report.protocol = "prop1";
  report.config = config;
  report.copies_consumed = 2;

  const std::size_t o = config.prop1_outcome;
  report.steps.push_back(prep.plan.steps[0].record(o));
  report.steps.push_back(prep.plan.steps[1].record(0));

  const auto& ab = prep.charlie.at(o);
  const auto& bc = prep.alice.at(0);
  report.metrics["charlie_outcome_probability"] = ab.probability;
  report.metrics["alice_outcome_probability"] = bc.probability;
  report.metrics["ab_negativity"] = ab.negativity;
  report.metrics["bc_negativity"] = bc.negativity;
  if (!config.prop1_inputs && o == 0) {
    report.analytic_success_prob = (1.0 + config.p) / 2.0 * (2.0 - config.p) / 2.0;
  }

  if (!ab.reduced_state) {
    report.notes.push_back("charlie outcome " + std::to_string(o) + " has zero probability");
    report.exact_success_prob = 0.0;
    return report;
  }
  report.final_state = *ab.reduced_state;
  report.certificates = entanglement::certify_entangled_all_cuts(*ab.reduced_state);
  report.metrics["ab_bell_fidelity"] = distill::bell_fidelity(*ab.reduced_state);
  report.success = ab.entangled && bc.entangled;
  report.exact_success_prob = report.success ? ab.probability * bc.probability : 0.0;

  if (ab.entangled) {
    auto pipeline = distill::distill_pipeline(*ab.reduced_state, config.distill_rounds);
    const auto& last = pipeline.trajectory.back();
    report.metrics["distilled_fidelity"] = last.fidelity;
    report.metrics["distill_success_probability"] = pipeline.filter_probability * last.cumulative_probability;
    report.distillation = std::move(pipeline);
  } else {
    report.notes.push_back("A-B residual is separable; nothing to distill");
  }
  return report;
}

ProtocolReport run_prop2(const ProtocolConfig& config) {
  FollowAccepted follow;
  return run_prop2(config, follow);
}

ProtocolReport run_prop2(const ProtocolConfig& config, OutcomeSelector& selector) {
  const auto prep = detail::prepare_prop2(config);
  auto report = chain_report("prop2", config, prep, selector);
  const double tail = prep.coeffs[1] * prep.coeffs[1] + prep.coeffs[2] * prep.coeffs[2];
  report.metrics["copy1:C_accept_analytic"] = (1.0 - config.p) * tail;
  report.metrics["copy2:A_accept_analytic"] = config.p * tail;
  report.analytic_success_prob = (1.0 - config.p) * config.p * tail * tail;
  return report;
}

ProtocolReport run_prop3(const ProtocolConfig& config) {
  FollowAccepted follow;
  return run_prop3(config, follow);
}

ProtocolReport run_prop3(const ProtocolConfig& config, OutcomeSelector& selector) {
  const auto prep = detail::prepare_prop3(config);
  auto report = chain_report("prop3", config, prep, selector);
  const double tail = prep.coeffs[2] * prep.coeffs[2] + prep.coeffs[3] * prep.coeffs[3];
  const auto& w = config.weights;
  report.metrics["copy1_accept_analytic"] = w[2] * tail;
  report.metrics["copy2_accept_analytic"] = w[0] * tail;
  report.metrics["copy3_accept_analytic"] = w[1] * tail;
  report.analytic_success_prob = w[0] * w[1] * w[2] * tail * tail * tail;
  return report;
}

ProtocolReport run_sigma_adaptive(const ProtocolConfig& config, Rng& rng) {
  const auto prep = detail::prepare_sigma(config);
  ProtocolReport report;
  report.protocol = config.sigma_resource ? "sigma_prime" : "sigma";
  report.config = config;

  const auto first_probs = prep.alice.probabilities();
  std::size_t first = 0;
  switch (config.sigma_first_pair) {
    case FirstPair::kAliceBob:
      first = 0;
      report.notes.push_back("first copy conditioned on the A-B outcome");
      break;
    case FirstPair::kBobCharlie:
      first = 1;
      report.notes.push_back("first copy conditioned on the B-C outcome");
      break;
    case FirstPair::kSampled:
      first = rng.sample(first_probs);
      break;
  }
  auto first_record = prep.alice.record(first);
  first_record.accepted = true;
  report.steps.push_back(first_record);
  report.notes.push_back(first == 0 ? "first pair A-B" : "first pair B-C");

  // A-B first: Charlie repeats until B-C appears. B-C first: Alice repeats.
  const auto& repeat = first == 0 ? prep.charlie : prep.alice;
  const double q = repeat.accept_probability();
  const double q_formula = first == 0 ? config.p : 1.0 - config.p;
  const int budget = config.max_copies - 1;

  report.metrics["first_outcome_probability"] = first_probs[first];
  report.metrics["repeat_accept_probability"] = q;
  report.metrics["repeat_accept_analytic"] = q_formula;
  report.metrics["unconditioned_success_analytic"] =
      (1.0 - config.p) * analytic_Pn(config.p, budget) + config.p * analytic_Pn(1.0 - config.p, budget);
  report.analytic_success_prob = analytic_Pn(q_formula, budget);
  report.exact_success_prob = 1.0 - std::pow(1.0 - q, budget);

  report.copies_consumed = 1;
  bool got = false;
  const auto repeat_probs = repeat.probabilities();
  for (int copy = 2; copy <= config.max_copies && !got; ++copy) {
    const std::size_t o = rng.sample(repeat_probs);
    auto rec = repeat.record(o);
    rec.copy_index = copy;
    report.steps.push_back(rec);
    report.copies_consumed = copy;
    got = o == repeat.accept;
  }
  if (!got) {
    report.notes.push_back("copy budget exhausted before the missing pair appeared");
    return report;
  }

  report.alignments.push_back(schmidt_align(prep.pair_ab, "AB"));
  report.alignments.push_back(schmidt_align(prep.pair_bc, "BC"));
  if (prep.maximal) {
    std::vector<double> probs;
    for (const auto& b : prep.distribution) probs.push_back(b.probability);
    const auto& branch = prep.distribution.at(rng.sample(probs));
    const auto cert = entanglement::certify_gme_pure(branch.state);
    report.distribution = prep.distribution;
    report.final_state = branch.state;
    report.certificates = cert.report;
    report.is_gme = cert.is_gme;
    report.success = cert.is_gme;
    report.metrics["teleport_fidelity"] = branch.fidelity;
    report.notes.push_back("Bob teleported two qubits of a local GHZ state");
  } else {
    std::vector<double> probs;
    for (const auto& b : prep.merge->branches) probs.push_back(b.probability);
    const auto& branch = prep.merge->branches.at(rng.sample(probs));
    const auto cert = entanglement::certify_gme_pure(branch.corrected_state);
    report.merge = prep.merge;
    report.final_state = branch.corrected_state;
    report.certificates = cert.report;
    report.is_gme = cert.is_gme;
    report.success = cert.is_gme;
    report.metrics["merge_target_fidelity"] = branch.target_fidelity;
    report.notes.push_back("non-maximal pairs merged at Bob, branch " + branch.label());
  }
  return report;
}

}  // namespace gme::protocols
