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

#ifndef GME_PROTOCOLS_HPP
#define GME_PROTOCOLS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gme/distill.hpp"
#include "gme/entanglement.hpp"
#include "gme/qcore.hpp"
#include "gme/rng.hpp"

/// State families and LOCC protocols for activating genuine multipartite
/// entanglement from copies of biseparable states.
///
/// Copies are handed to the runners one at a time. A runner only ever
/// measures a single copy and feeds the classical outcome forward; there is
/// no API for acting jointly on two copies.
namespace gme::protocols {

// ---------------------------------------------------------------------------
// Configuration

/// Which pair the first copy of sigma yields in the adaptive protocol.
enum class FirstPair { kSampled, kAliceBob, kBobCharlie };
std::string to_string(FirstPair first);

/// Inputs of the general three-qubit rank-2 family
///   p |Phi><Phi|_AB (x) |phi><phi|_C + (1-p) |psi><psi|_A (x) |Psi><Psi|_BC.
struct Prop1Inputs {
  PureState big_phi;    // two qubits, A-B
  PureState small_phi;  // one qubit, C
  PureState small_psi;  // one qubit, A
  PureState big_psi;    // two qubits, B-C

  /// |phi+>, |0>, |1>, |phi->.
  static Prop1Inputs example();
};

struct ProtocolConfig {
  double p = 0.5;
  std::array<double, 3> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  /// Empty means uniform coefficients of the length the protocol needs.
  std::vector<double> schmidt_coeffs;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 42;
  int max_copies = 21;
  FirstPair sigma_first_pair = FirstPair::kSampled;
  /// Non-maximal pair for the sigma' variant; absent means |phi+>.
  std::optional<PureState> sigma_resource;
  std::optional<Prop1Inputs> prop1_inputs;
  /// Outcome of Charlie's measurement followed by the three-qubit runner.
  std::size_t prop1_outcome = 0;
  int distill_rounds = 3;

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
  /// Coefficients of the requested length: the configured ones, or uniform.
  std::vector<double> schmidt_or_uniform(std::size_t count) const;
};

// ---------------------------------------------------------------------------
// Reports

struct StepRecord {
  int copy_index = 0;
  std::string acting_party;
  std::string measurement;
  std::size_t outcome_index = 0;
  double probability = 0.0;
  bool accepted = false;
  /// Probabilities of every outcome of this measurement.
  std::vector<double> branch_probabilities;
};

/// Local unitaries that bring a two-qubit pure state to a|00> + b|11>, a >= b >= 0.
struct SchmidtAlignment {
  std::string pair;
  double a = 0.0;
  double b = 0.0;
  Matrix left_unitary;
  Matrix right_unitary;
  PureState aligned;
};

SchmidtAlignment schmidt_align(const PureState& pair, std::string label = {});

struct LocalCorrection {
  std::size_t party = 0;
  std::string gate;  // "X" or "Z"
};

struct MergeBranch {
  /// Per internal party: 0 for P1 (even parity), 1 for P2 (odd parity).
  std::vector<std::size_t> parity_outcomes;
  /// Per internal party: 0 for |+>, 1 for |->.
  std::vector<std::size_t> sign_outcomes;
  double probability = 0.0;
  PureState raw_state;
  std::vector<LocalCorrection> corrections;
  PureState corrected_state;
  /// Fidelity of the corrected state with normalized prod(a)|0..0> + prod(b)|1..1>.
  double target_fidelity = 0.0;

  std::string label() const;
};

struct MergeResult {
  std::vector<SchmidtAlignment> alignments;
  std::vector<MergeBranch> branches;
  PureState target;
};

/// Merges a chain of two-qubit pure states (pair k links parties k and k+1)
/// into an (m+1)-party GHZ-type state. Every internal party measures the
/// parity of its two qubits, then one qubit in the |+>,|-> basis and discards
/// it. All branches with nonzero probability are returned.
MergeResult merge_chain_to_ghz(std::span<const PureState> pairs);

struct TeleportBranch {
  std::size_t bell_outcome = 0;
  std::string bell_label;
  double probability = 0.0;
  std::string correction;
  PureState state;
  double fidelity = 0.0;
};

struct TeleportResult {
  std::vector<TeleportBranch> branches;
};

/// Teleports qubit `qubit` of `state` through `resource`, which must be
/// |phi+>. The receiver's qubit takes the input's party slot in the output.
TeleportResult teleport(const PureState& state, std::size_t qubit, const PureState& resource);

struct DistributionBranch {
  std::array<std::size_t, 2> bell_outcomes{};
  double probability = 0.0;
  std::vector<std::string> corrections;
  PureState state;
  double fidelity = 0.0;
  bool is_gme = false;
};

/// Bob holds all three qubits of `local_state`; qubit 0 goes to Alice
/// through `pair_ab` and qubit 2 to Charlie through `pair_bc`.
std::vector<DistributionBranch> distribute_via_teleportation(const PureState& local_state,
                                                             const PureState& pair_ab,
                                                             const PureState& pair_bc);

/// Outcome of the one-copy measurement step on the three-qubit family.
struct Prop1Branch {
  std::size_t outcome_index = 0;
  double probability = 0.0;
  /// Two-party state left after the measuring party is traced out.
  std::optional<DensityOperator> reduced_state;
  double negativity = 0.0;
  bool entangled = false;
};

using FinalState = std::variant<std::monostate, PureState, DensityOperator>;

struct ProtocolReport {
  std::string protocol;
  ProtocolConfig config;
  std::vector<StepRecord> steps;
  int copies_consumed = 0;
  bool success = false;
  /// Closed-form success probability, when one exists.
  std::optional<double> analytic_success_prob;
  /// Product of the accepted-branch probabilities along the simulated path.
  std::optional<double> exact_success_prob;
  FinalState final_state;
  std::optional<entanglement::BipartitionReport> certificates;
  std::optional<bool> is_gme;
  std::vector<SchmidtAlignment> alignments;
  std::optional<MergeResult> merge;
  std::vector<DistributionBranch> distribution;
  std::optional<distill::PipelineResult> distillation;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Outcome selection

/// Picks the outcome a runner follows at each measurement.
class OutcomeSelector {
 public:
  virtual ~OutcomeSelector() = default;
  virtual std::size_t select(std::span<const double> probabilities, std::size_t preferred) = 0;
};

/// Always follows the protocol's accepted outcome.
class FollowAccepted final : public OutcomeSelector {
 public:
  std::size_t select(std::span<const double>, std::size_t preferred) override { return preferred; }
};

/// Draws outcomes with their Born probabilities.
class SampleOutcomes final : public OutcomeSelector {
 public:
  explicit SampleOutcomes(Rng& rng) : rng_(rng) {}
  std::size_t select(std::span<const double> probabilities, std::size_t) override {
    return rng_.sample(probabilities);
  }

 private:
  Rng& rng_;
};

// ---------------------------------------------------------------------------
// Builders

DensityOperator build_prop1_general(const PureState& big_phi, const PureState& small_phi,
                                    const PureState& small_psi, const PureState& big_psi, double p);
/// p |phi+><phi+| (x) |0><0| + (1-p) |1><1| (x) |phi-><phi-|.
DensityOperator build_prop1_example(double p);

/// p |psi><psi| (x) |0><0| + (1-p) |0><0| (x) |psi><psi| on three qutrits,
/// psi = sum_i a_i |ii>.
DensityOperator build_prop2_state(std::span<const double> schmidt_coeffs, double p);

/// p |2><2| (x) |phi+><phi+| + (1-p) |phi+><phi+| (x) |2><2| on [3,2,3].
DensityOperator build_sigma(double p);
/// The same family with a non-maximally entangled two-qubit pair.
DensityOperator build_sigma_prime(const PureState& phi_prime, double p);

/// p1 |psi>_AB|0>_C|0>_D + p2 |0>_A|psi>_BC|1>_D + p3 |1>_A|1>_B|psi>_CD
/// (as projectors) on four ququarts, psi = sum_i a_i |ii>.
DensityOperator build_prop3_state(std::span<const double> schmidt_coeffs, std::span<const double> weights);

// ---------------------------------------------------------------------------
// Runners

/// Party `measuring_party` (2 for Charlie, 0 for Alice) measures
/// {|ref><ref|, I - |ref><ref|}; each branch is traced over that party.
std::vector<Prop1Branch> run_prop1_step(const DensityOperator& rho, const PureState& reference,
                                        std::size_t measuring_party = 2);

/// Charlie's step on the three-qubit family, Alice's symmetric step on a
/// second copy, and the distillation pipeline on the followed A-B residual.
ProtocolReport run_prop1(const ProtocolConfig& config);

ProtocolReport run_prop2(const ProtocolConfig& config);
ProtocolReport run_prop2(const ProtocolConfig& config, OutcomeSelector& selector);

ProtocolReport run_prop3(const ProtocolConfig& config);
ProtocolReport run_prop3(const ProtocolConfig& config, OutcomeSelector& selector);

/// First copy: Alice measures {P1, P2}; both outcomes leave a Bell pair.
/// Further copies are measured until the missing pair appears or
/// max_copies is exhausted.
ProtocolReport run_sigma_adaptive(const ProtocolConfig& config, Rng& rng);

/// 1 - (1 - p)^n.
double analytic_Pn(double p, int n);

// ---------------------------------------------------------------------------
// Monte Carlo

struct BranchTally {
  std::string label;
  std::uint64_t count = 0;
  double frequency = 0.0;
  double exact_probability = 0.0;
};

struct StepTally {
  std::string label;
  std::uint64_t attempts = 0;
  std::uint64_t accepts = 0;
  double rate = 0.0;
  double exact_rate = 0.0;
};

struct MonteCarloSummary {
  std::string protocol;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double exact_success_rate = 0.0;
  double mean_copies = 0.0;
  double exact_mean_copies = 0.0;
  std::vector<BranchTally> branches;
  std::vector<StepTally> steps;
};

/// Protocol names: "prop1", "prop2", "prop3", "sigma". Shot i draws from
/// Rng::for_shot(seed, i), so the result depends only on (config, shots,
/// seed), not on `threads` (0 = hardware concurrency).
MonteCarloSummary monte_carlo(std::string_view protocol, const ProtocolConfig& config, std::uint64_t shots,
                              std::uint64_t seed, unsigned threads = 0);

struct SigmaScanRow {
  double p = 0.0;
  int n = 0;
  double analytic = 0.0;
  double empirical = 0.0;
  double abs_error = 0.0;
};

/// Repeat-phase success law of the adaptive sigma protocol, with the first
/// copy conditioned on the A-B outcome. For each p, every shot runs up to
/// n_max repeat copies; the n-row counts shots that succeeded within n.
std::vector<SigmaScanRow> sigma_scan(std::span<const double> p_values, int n_max, std::uint64_t shots,
                                     std::uint64_t seed, unsigned threads = 0);

}  // namespace gme::protocols

#endif  // GME_PROTOCOLS_HPP
