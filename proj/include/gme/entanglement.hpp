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

#ifndef GME_ENTANGLEMENT_HPP
#define GME_ENTANGLEMENT_HPP

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gme/qcore.hpp"

namespace gme::entanglement {

/// Split of n parties into `left` and its complement. Stored canonically:
/// `left` never contains the highest-index party, so each split has exactly
/// one representation.
class Bipartition {
 public:
  /// `side` may be either half; it is canonicalized.
  Bipartition(std::vector<std::size_t> side, std::size_t num_parties);

  const std::vector<std::size_t>& left() const { return left_; }
  std::vector<std::size_t> right() const;
  std::size_t num_parties() const { return n_; }
  /// Smaller side first, e.g. "A|BC", "C|AB", "AB|CD".
  std::string label() const;

  auto operator<=>(const Bipartition&) const = default;

 private:
  std::vector<std::size_t> left_;
  std::size_t n_;
};

/// Letter label for a party (A, B, C, ...).
std::string party_label(std::size_t party);

/// All 2^(n-1) - 1 canonical bipartitions of n >= 2 parties.
std::vector<Bipartition> enumerate_bipartitions(std::size_t num_parties);

struct SchmidtData {
  std::vector<double> coefficients;  // nonincreasing
  std::size_t rank = 0;              // count above kStructuralTol
};

SchmidtData schmidt(const PureState& state, const Bipartition& cut);

/// Partial transpose over `parties`.
Matrix partial_transpose(const DensityOperator& rho, std::span<const std::size_t> parties);

/// Sum of |negative eigenvalues| of the partial transpose over the listed parties.
double negativity_over(const DensityOperator& rho, std::span<const std::size_t> parties);
double negativity(const DensityOperator& rho, const Bipartition& cut);

struct CutRecord {
  Bipartition cut;
  double negativity = 0.0;
  std::optional<std::size_t> schmidt_rank;  // pure inputs only
  std::vector<double> schmidt_coefficients;
};

struct BipartitionReport {
  std::vector<CutRecord> cuts;
  bool all_cuts_entangled = false;
};

/// NPT certificate for every bipartition: all_cuts_entangled iff every
/// negativity exceeds kStructuralTol.
BipartitionReport certify_entangled_all_cuts(const DensityOperator& rho);

struct GmeCertificate {
  bool is_gme = false;
  BipartitionReport report;
};

/// A pure state is genuinely multipartite entangled iff its Schmidt rank is
/// at least 2 across every bipartition. Negativities in the report come from
/// the Schmidt coefficients, ((sum s_k)^2 - 1) / 2.
GmeCertificate certify_gme_pure(const PureState& state);

// Svetlichny functional for three qubits:
//   S = ABC + AB'C + ABC' - AB'C' + A'BC - A'B'C - A'BC' - A'B'C'
// Hybrid local models obey |S| <= 4; quantum states reach 4*sqrt(2).

inline constexpr double kSvetlichnyClassicalBound = 4.0;
inline const double kSvetlichnyQuantumBound = 4.0 * std::sqrt(2.0);

struct SvetlichnySettings {
  Matrix a, a_prime, b, b_prime, c, c_prime;
};

/// cos(angle) X + sin(angle) Y.
Matrix equatorial_observable(double angle);
/// Observable n . sigma along the unit vector at polar angle theta, azimuth phi.
Matrix bloch_observable(double theta, double phi);

/// Angles in the order (a, a', b, b', c, c').
SvetlichnySettings equatorial_settings(const std::array<double, 6>& angles);

/// Angles (0, pi/2, -pi/4, pi/4, 0, pi/2), which give 4*sqrt(2) on
/// (|000> + |111>)/sqrt(2).
std::array<double, 6> ghz_optimal_angles();
SvetlichnySettings ghz_optimal_settings();

/// Throws std::invalid_argument for non-three-qubit states or for settings
/// that are not Hermitian, traceless, and square to the identity.
double svetlichny_value(const PureState& state, const SvetlichnySettings& settings);

}  // namespace gme::entanglement

#endif  // GME_ENTANGLEMENT_HPP
