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

#ifndef GME_DISTILL_HPP
#define GME_DISTILL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gme/qcore.hpp"

/// Two-qubit entanglement distillation at desk scale: local filtering,
/// isotropic twirling, and exact two-copy recurrence rounds.
namespace gme::distill {

/// Two-outcome single-qubit generalized measurement {K0, K1} with
/// K0^dagger K0 + K1^dagger K1 = I. K0 is the success branch.
class FilterPair {
 public:
  FilterPair(Matrix k0, Matrix k1);

  /// Completes K0 with K1 = sqrt(I - K0^dagger K0). Requires ||K0|| <= 1.
  static FilterPair from_success_operator(const Matrix& k0);

  const Matrix& k0() const { return k0_; }
  const Matrix& k1() const { return k1_; }

 private:
  Matrix k0_;
  Matrix k1_;
};

/// diag(b, a) / max(a, b): maps a|00> + b|11> to |phi+> on success.
FilterPair procrustean_filter(double a, double b);

struct FilterBranch {
  std::size_t kraus_index = 0;
  double probability = 0.0;
  std::optional<DensityOperator> post_state;  // absent for null branches

  bool is_null() const { return !post_state.has_value(); }
};

std::vector<FilterBranch> local_filter(const DensityOperator& rho, std::size_t party, const FilterPair& filter);

/// <phi+| rho |phi+> for a two-qubit state.
double bell_fidelity(const DensityOperator& rho);

/// Exact average of (C (x) C*) rho (C (x) C*)^dagger over the 24-element
/// single-qubit Clifford group. The result is F |phi+><phi+| + (1-F)/3 (I - |phi+><phi+|).
DensityOperator twirl_to_isotropic(const DensityOperator& rho);

/// The 24 single-qubit Cliffords modulo global phase.
const std::vector<Matrix>& clifford_group();

struct RecurrenceResult {
  double success_probability = 0.0;
  DensityOperator post_state;
};

/// One recurrence round on rho (x) rho ordered (A1, B1, A2, B2): bilateral
/// CNOTs A1->A2 and B1->B2, both targets measured in the computational basis,
/// kept when the outcomes agree. Returns the renormalized source pair.
RecurrenceResult recurrence_round(const DensityOperator& rho);

enum class PipelineStatus { kDistilling, kBelowThreshold };
std::string to_string(PipelineStatus status);

struct TrajectoryPoint {
  double fidelity = 0.0;
  double cumulative_probability = 1.0;
};

struct PipelineResult {
  PipelineStatus status = PipelineStatus::kBelowThreshold;
  /// Pauli applied on party 0 to bring the state closest to |phi+>.
  std::string alignment = "I";
  /// Set when a filter was needed to push the fidelity above 1/2.
  std::optional<std::size_t> filter_party;
  std::optional<FilterPair> filter;
  double filter_probability = 1.0;
  /// Point 0 is the twirled input; point k follows round k.
  std::vector<TrajectoryPoint> trajectory;
};

/// Align -> (filter if F <= 1/2) -> twirl -> rounds x (recurrence, twirl).
/// rounds must be >= 1.
PipelineResult distill_pipeline(const DensityOperator& rho, int rounds);

}  // namespace gme::distill

#endif  // GME_DISTILL_HPP
