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

#ifndef GME_QCORE_HPP
#define GME_QCORE_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

/// Dense linear algebra over multiparty Hilbert spaces.
///
/// Index convention: party 0 is the most significant digit of a basis index,
/// so |i_0 i_1 ... i_{n-1}> sits at i_0 * (d_1 ... d_{n-1}) + ... + i_{n-1}.
/// Every value type here is immutable after construction.
namespace gme {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Tolerance for structural invariants (norm, trace, Hermiticity, PSD).
inline constexpr double kStructuralTol = 1e-9;
/// Outcomes at or below this probability are treated as impossible.
inline constexpr double kZeroProbability = 1e-12;
inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// A numeric object failed one of its structural invariants.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local dimension of every party, party 0 first.
class PartyDims {
 public:
  PartyDims(std::initializer_list<std::size_t> dims);
  explicit PartyDims(std::vector<std::size_t> dims,
                     std::size_t cap = kDefaultDimensionCap);

  std::size_t num_parties() const { return dims_.size(); }
  std::size_t total() const { return total_; }
  std::size_t operator[](std::size_t party) const { return dims_.at(party); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  PartyDims concat(const PartyDims& other) const;
  /// Dimensions of the listed parties, in the listed order.
  PartyDims subset(std::span<const std::size_t> parties) const;
  PartyDims with_dim(std::size_t party, std::size_t new_dim) const;

  std::vector<std::size_t> digits(std::size_t index) const;
  std::size_t index(std::span<const std::size_t> digits) const;

  /// Throws std::invalid_argument unless every entry is a distinct valid party.
  void check_parties(std::span<const std::size_t> parties) const;
  std::vector<std::size_t> complement(std::span<const std::size_t> parties) const;

  bool operator==(const PartyDims& other) const { return dims_ == other.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

std::string to_string(const PartyDims& dims);

enum class Normalization { kNormalized, kUnnormalized };

/// Amplitude vector over a multiparty space. Normalized unless constructed
/// with Normalization::kUnnormalized, in which case is_normalized() is false
/// and no norm is enforced.
class PureState {
 public:
  PureState(PartyDims dims, Vector amplitudes,
            Normalization normalization = Normalization::kNormalized);

  const PartyDims& dims() const { return dims_; }
  const Vector& amplitudes() const { return amplitudes_; }
  bool is_normalized() const { return normalized_; }
  std::size_t num_parties() const { return dims_.num_parties(); }
  double norm() const { return amplitudes_.norm(); }

  /// Throws std::invalid_argument for a zero vector.
  PureState normalized() const;

 private:
  PartyDims dims_;
  Vector amplitudes_;
  bool normalized_;
};

/// Hermitian, PSD, unit-trace operator. Invariants are checked on
/// construction; violations throw InvariantViolation.
class DensityOperator {
 public:
  DensityOperator(PartyDims dims, Matrix matrix);

  static DensityOperator from_pure(const PureState& state);

  const PartyDims& dims() const { return dims_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t num_parties() const { return dims_.num_parties(); }

  /// Ascending eigenvalues of the Hermitian part.
  std::vector<double> eigenvalues() const;
  std::size_t rank(double tol = kStructuralTol) const;
  double purity() const;

 private:
  PartyDims dims_;
  Matrix matrix_;
};

/// Complete set of orthogonal projectors on the joint space of
/// `target_parties` (in the listed order).
class ProjectiveMeasurement {
 public:
  ProjectiveMeasurement(std::vector<std::size_t> target_parties,
                        std::vector<Matrix> projectors, std::string label = {});

  /// Builds {P_1, ..., P_k, I - sum P_i}.
  static ProjectiveMeasurement with_remainder(std::vector<std::size_t> target_parties,
                                              std::vector<Matrix> projectors,
                                              std::string label = {});

  const std::vector<std::size_t>& target_parties() const { return targets_; }
  const std::vector<Matrix>& projectors() const { return projectors_; }
  std::size_t num_outcomes() const { return projectors_.size(); }
  std::size_t target_dim() const { return static_cast<std::size_t>(projectors_.front().rows()); }
  const std::string& label() const { return label_; }

 private:
  std::vector<std::size_t> targets_;
  std::vector<Matrix> projectors_;
  std::string label_;
};

template <typename State>
struct MeasurementOutcome {
  std::size_t outcome_index = 0;
  double probability = 0.0;
  /// Absent when the outcome is null (probability <= kZeroProbability).
  std::optional<State> post_state;

  bool is_null() const { return !post_state.has_value(); }
};

struct WeightedState {
  double weight;
  DensityOperator state;
};

// Construction.
PureState ket(const Vector& amplitudes, const PartyDims& dims);
PureState ket(std::span<const Complex> amplitudes, const PartyDims& dims);
PureState basis_ket(const PartyDims& dims, std::span<const std::size_t> levels);
PureState basis_ket(const PartyDims& dims, std::initializer_list<std::size_t> levels);

PureState tensor(const PureState& x, const PureState& y);
DensityOperator tensor(const DensityOperator& x, const DensityOperator& y);

DensityOperator mix(std::span<const WeightedState> terms);
DensityOperator mix(std::initializer_list<WeightedState> terms);

DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> discard);
DensityOperator partial_trace(const DensityOperator& rho,
                              std::initializer_list<std::size_t> discard);

std::vector<MeasurementOutcome<PureState>> measure(const PureState& state,
                                                   const ProjectiveMeasurement& m);
std::vector<MeasurementOutcome<DensityOperator>> measure(const DensityOperator& rho,
                                                         const ProjectiveMeasurement& m);

PureState apply_local_unitary(const PureState& state, const Matrix& unitary,
                              std::span<const std::size_t> targets);
PureState apply_local_unitary(const PureState& state, const Matrix& unitary,
                              std::initializer_list<std::size_t> targets);
DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& unitary,
                                    std::span<const std::size_t> targets);
DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& unitary,
                                    std::initializer_list<std::size_t> targets);

/// op applied to the target parties of a vector; no unitarity required.
Vector apply_local_operator(const PartyDims& dims, const Vector& amplitudes,
                            const Matrix& op, std::span<const std::size_t> targets);
/// K rho K^dagger with K acting on `targets`; the result is not renormalized.
Matrix conjugate_local(const PartyDims& dims, const Matrix& rho, const Matrix& op,
                       std::span<const std::size_t> targets);

/// Moves the populated levels of `party` through `level_map` into a space
/// of dimension `new_dim`. Population outside the map's domain above
/// kZeroProbability is an error.
PureState relabel_subspace(const PureState& state, std::size_t party,
                           const std::map<std::size_t, std::size_t>& level_map,
                           std::size_t new_dim);
DensityOperator relabel_subspace(const DensityOperator& rho, std::size_t party,
                                 const std::map<std::size_t, std::size_t>& level_map,
                                 std::size_t new_dim);

/// <target| rho |target>.
double fidelity_pure(const DensityOperator& rho, const PureState& target);
/// |<x|y>|^2 for normalized inputs.
double overlap_fidelity(const PureState& x, const PureState& y);

/// Removes `parties` from a pure state in which they factor out as a pure
/// product. Throws InvariantViolation when they are entangled with the rest.
PureState trace_out_pure(const PureState& state, std::span<const std::size_t> parties);

/// Party `order[k]` of the input becomes party k of the output.
PureState permute_parties(const PureState& state, std::span<const std::size_t> order);

/// The pure state behind a rank-one density operator (global phase fixed so
/// the largest amplitude is real positive). Throws InvariantViolation if
/// purity deviates from 1 by more than kStructuralTol.
PureState to_pure(const DensityOperator& rho);

bool is_unitary(const Matrix& u, double tol = kStructuralTol);

/// |v><v|.
Matrix projector(const Vector& v);
/// Sum of |l><l| over the listed computational levels.
Matrix basis_projector(std::size_t dim, std::initializer_list<std::size_t> levels);

namespace gates {
Matrix identity(std::size_t dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();
}  // namespace gates

namespace states {
PureState phi_plus();
PureState phi_minus();
PureState psi_plus();
PureState psi_minus();
/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
PureState ghz(std::size_t num_qubits);
/// Normalized a|0...0> + b|1...1> on n qubits.
PureState ghz_like(std::size_t num_qubits, double a, double b);
}  // namespace states

}  // namespace gme

#endif  // GME_QCORE_HPP
