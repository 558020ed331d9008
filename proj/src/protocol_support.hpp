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

#ifndef GME_SRC_PROTOCOL_SUPPORT_HPP
#define GME_SRC_PROTOCOL_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gme/protocols.hpp"

namespace gme::protocols::detail {

inline std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

inline void check_open_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1), got " + format_real(p));
  }
}

inline void check_schmidt_coefficients(std::span<const double> coeffs, std::size_t expected) {
  if (coeffs.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " Schmidt coefficients, got " +
                                std::to_string(coeffs.size()));
  }
  double sum = 0.0;
  for (double c : coeffs) {
    if (!(c > 0.0)) throw std::invalid_argument("Schmidt coefficients must be positive");
    sum += c * c;
  }
  if (std::abs(sum - 1.0) > kStructuralTol) {
    throw std::invalid_argument("squares of the Schmidt coefficients sum to " + format_real(sum) + ", not 1");
  }
}

inline void check_weights(std::span<const double> weights, std::size_t expected) {
  if (weights.size() != expected) throw std::invalid_argument("wrong number of mixing weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("mixing weights must lie in (0, 1)");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStructuralTol) {
    throw std::invalid_argument("mixing weights sum to " + format_real(sum) + ", not 1");
  }
}

/// One measurement on one copy. Probabilities are conditional on every
/// earlier step of the same plan having been accepted.
struct PlannedStep {
  std::string label;
  int copy_index = 0;
  std::string party;
  std::string measurement;
  std::size_t accept = 0;
  std::vector<MeasurementOutcome<DensityOperator>> outcomes;

  std::vector<double> probabilities() const;
  double accept_probability() const { return outcomes.at(accept).probability; }
  const DensityOperator& accepted_state() const;
  StepRecord record(std::size_t outcome) const;
};

/// Postselected sequence: the run fails at the first rejected step, and a
/// run that passes every step ends in one of the final branches.
struct SequentialPlan {
  std::vector<PlannedStep> steps;
  std::vector<std::string> final_labels;
  std::vector<double> final_probabilities;
  std::vector<bool> final_success;
  int copies_on_success = 0;
};

struct Prop1Prepared {
  Prop1Inputs inputs;
  DensityOperator rho;
  std::vector<Prop1Branch> charlie;
  std::vector<Prop1Branch> alice;
  SequentialPlan plan;
};

struct ChainPrepared {
  DensityOperator rho;
  std::vector<double> coeffs;
  std::vector<PureState> pairs;
  MergeResult merge;
  SequentialPlan plan;
};

struct SigmaPrepared {
  DensityOperator rho;
  bool maximal = true;
  /// Alice: outcome 0 leaves an A-B pair, outcome 1 a B-C pair.
  PlannedStep alice;
  /// Charlie: outcome 0 leaves a B-C pair.
  PlannedStep charlie;
  PureState pair_ab;
  PureState pair_bc;
  PureState local_state;
  std::vector<DistributionBranch> distribution;
  std::optional<MergeResult> merge;
};

Prop1Prepared prepare_prop1(const ProtocolConfig& config);
ChainPrepared prepare_prop2(const ProtocolConfig& config);
ChainPrepared prepare_prop3(const ProtocolConfig& config);
SigmaPrepared prepare_sigma(const ProtocolConfig& config);

/// Expected number of repeat copies when each succeeds with probability q
/// and at most `budget` are available.
double expected_repeats(double q, int budget);

/// Branch table of a protocol plus a shot sampler that walks it with the
/// probabilities obtained from the density-matrix simulation.
class ProtocolModel {
 public:
  virtual ~ProtocolModel() = default;

  struct Branch {
    std::string label;
    double exact_probability = 0.0;
    bool success = false;
  };

  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<std::string>& step_labels() const { return step_labels_; }
  const std::vector<double>& exact_step_rates() const { return step_rates_; }
  double exact_mean_copies() const { return exact_mean_copies_; }

  struct Shot {
    std::size_t branch = 0;
    int copies = 0;
  };

  /// attempts/accepts are indexed like step_labels().
  virtual Shot sample(Rng& rng, std::span<std::uint64_t> attempts, std::span<std::uint64_t> accepts) const = 0;

 protected:
  std::vector<Branch> branches_;
  std::vector<std::string> step_labels_;
  std::vector<double> step_rates_;
  double exact_mean_copies_ = 0.0;
};

std::unique_ptr<ProtocolModel> make_model(std::string_view protocol, const ProtocolConfig& config);

}  // namespace gme::protocols::detail

#endif  // GME_SRC_PROTOCOL_SUPPORT_HPP
