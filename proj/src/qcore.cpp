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

#include "gme/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "index_map.hpp"

namespace gme {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

void check_square(const Matrix& m, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
    std::ostringstream msg;
    msg << what << ": expected a " << dim << "x" << dim << " matrix, got " << m.rows() << "x"
        << m.cols();
    throw std::invalid_argument(msg.str());
  }
}

// Rotates the global phase so the largest-magnitude entry is real positive.
Vector fix_phase(Vector v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const double mag = std::abs(v[arg]);
  if (mag > 0) v *= std::conj(v[arg]) / mag;
  return v;
}

// Applies op to each column of `columns`, acting on the target digits.
Matrix apply_on_columns(const PartyDims& dims, const Matrix& columns, const Matrix& op,
                        std::span<const std::size_t> targets) {
  const auto split = detail::split_index(dims, targets);
  check_square(op, split.target_dim, "local operator");
  Matrix out(columns.rows(), columns.cols());
  Vector block(static_cast<Eigen::Index>(split.target_dim));
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    for (std::size_t r = 0; r < split.rest_dim; ++r) {
      for (std::size_t t = 0; t < split.target_dim; ++t) {
        block[static_cast<Eigen::Index>(t)] = columns(static_cast<Eigen::Index>(split.at(r, t)), c);
      }
      const Vector image = op * block;
      for (std::size_t t = 0; t < split.target_dim; ++t) {
        out(static_cast<Eigen::Index>(split.at(r, t)), c) = image[static_cast<Eigen::Index>(t)];
      }
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PartyDims

PartyDims::PartyDims(std::initializer_list<std::size_t> dims)
    : PartyDims(std::vector<std::size_t>(dims)) {}

PartyDims::PartyDims(std::vector<std::size_t> dims, std::size_t cap) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("PartyDims: at least one party is required");
  total_ = 1;
  for (auto d : dims_) {
    if (d < 2) throw std::invalid_argument("PartyDims: every local dimension must be >= 2");
    if (total_ > cap / d) {
      throw std::invalid_argument("PartyDims: total dimension exceeds the cap of " +
                                  std::to_string(cap));
    }
    total_ *= d;
  }
}

PartyDims PartyDims::concat(const PartyDims& other) const {
  auto joined = dims_;
  joined.insert(joined.end(), other.dims_.begin(), other.dims_.end());
  return PartyDims(std::move(joined));
}

PartyDims PartyDims::subset(std::span<const std::size_t> parties) const {
  check_parties(parties);
  std::vector<std::size_t> out;
  out.reserve(parties.size());
  for (auto p : parties) out.push_back(dims_[p]);
  return PartyDims(std::move(out));
}

PartyDims PartyDims::with_dim(std::size_t party, std::size_t new_dim) const {
  auto out = dims_;
  out.at(party) = new_dim;
  return PartyDims(std::move(out));
}

std::vector<std::size_t> PartyDims::digits(std::size_t index) const {
  std::vector<std::size_t> d(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    d[k] = index % dims_[k];
    index /= dims_[k];
  }
  return d;
}

std::size_t PartyDims::index(std::span<const std::size_t> digits) const {
  if (digits.size() != dims_.size()) throw std::invalid_argument("PartyDims::index: digit count");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] >= dims_[k]) throw std::invalid_argument("PartyDims::index: digit out of range");
    idx = idx * dims_[k] + digits[k];
  }
  return idx;
}

void PartyDims::check_parties(std::span<const std::size_t> parties) const {
  std::vector<bool> seen(dims_.size(), false);
  for (auto p : parties) {
    if (p >= dims_.size()) {
      throw std::invalid_argument("party index " + std::to_string(p) + " out of range for " +
                                  std::to_string(dims_.size()) + " parties");
    }
    if (seen[p]) throw std::invalid_argument("party index " + std::to_string(p) + " repeated");
    seen[p] = true;
  }
}

std::vector<std::size_t> PartyDims::complement(std::span<const std::size_t> parties) const {
  std::vector<bool> in(dims_.size(), false);
  for (auto p : parties) in.at(p) = true;
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    if (!in[p]) out.push_back(p);
  }
  return out;
}

std::string to_string(const PartyDims& dims) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < dims.num_parties(); ++k) out << (k ? "," : "") << dims[k];
  out << ']';
  return out.str();
}

// ---------------------------------------------------------------------------
// PureState / DensityOperator

PureState::PureState(PartyDims dims, Vector amplitudes, Normalization normalization)
    : dims_(std::move(dims)),
      amplitudes_(std::move(amplitudes)),
      normalized_(normalization == Normalization::kNormalized) {
  if (static_cast<std::size_t>(amplitudes_.size()) != dims_.total()) {
    throw std::invalid_argument("PureState: amplitude count " + std::to_string(amplitudes_.size()) +
                                " does not match total dimension " +
                                std::to_string(dims_.total()));
  }
  if (normalized_ && std::abs(amplitudes_.norm() - 1.0) > kStructuralTol) {
    throw InvariantViolation("PureState: norm deviates from 1 by more than tolerance");
  }
}

PureState PureState::normalized() const {
  const double n = amplitudes_.norm();
  if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero vector");
  return PureState(dims_, amplitudes_ / n);
}

DensityOperator::DensityOperator(PartyDims dims, Matrix matrix) : dims_(std::move(dims)) {
  check_square(matrix, dims_.total(), "DensityOperator");
  if (max_abs(matrix - matrix.adjoint()) > kStructuralTol) {
    throw InvariantViolation("DensityOperator: matrix is not Hermitian");
  }
  const Complex tr = matrix.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kStructuralTol) {
    throw InvariantViolation("DensityOperator: trace deviates from 1");
  }
  matrix_ = hermitian_part(matrix);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
    throw InvariantViolation("DensityOperator: negative eigenvalue below tolerance");
  }
}

DensityOperator DensityOperator::from_pure(const PureState& state) {
  if (!state.is_normalized()) {
    throw std::invalid_argument("DensityOperator::from_pure: state is flagged unnormalized");
  }
  return DensityOperator(state.dims(), projector(state.amplitudes()));
}

std::vector<double> DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::size_t DensityOperator::rank(double tol) const {
  const auto ev = eigenvalues();
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [tol](double x) { return x > tol; }));
}

double DensityOperator::purity() const { return (matrix_ * matrix_).trace().real(); }

// ---------------------------------------------------------------------------
// ProjectiveMeasurement

ProjectiveMeasurement::ProjectiveMeasurement(std::vector<std::size_t> target_parties,
                                             std::vector<Matrix> projectors, std::string label)
    : targets_(std::move(target_parties)), projectors_(std::move(projectors)), label_(std::move(label)) {
  if (targets_.empty()) throw std::invalid_argument("ProjectiveMeasurement: no target parties");
  if (projectors_.empty()) throw std::invalid_argument("ProjectiveMeasurement: no projectors");
  const auto dim = static_cast<std::size_t>(projectors_.front().rows());
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < projectors_.size(); ++i) {
    const auto& p = projectors_[i];
    check_square(p, dim, "ProjectiveMeasurement projector");
    if (max_abs(p - p.adjoint()) > kStructuralTol) {
      throw InvariantViolation("ProjectiveMeasurement: projector " + std::to_string(i) + " is not Hermitian");
    }
    if (max_abs(p * p - p) > kStructuralTol) {
      throw InvariantViolation("ProjectiveMeasurement: projector " + std::to_string(i) + " is not idempotent");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (max_abs(p * projectors_[j]) > kStructuralTol) {
        throw InvariantViolation("ProjectiveMeasurement: projectors " + std::to_string(j) +
                                    " and " + std::to_string(i) + " are not orthogonal");
      }
    }
    sum += p;
  }
  if (max_abs(sum - Matrix::Identity(sum.rows(), sum.cols())) > kStructuralTol) {
    throw InvariantViolation("ProjectiveMeasurement: projectors do not sum to the identity");
  }
}

ProjectiveMeasurement ProjectiveMeasurement::with_remainder(std::vector<std::size_t> target_parties,
                                                            std::vector<Matrix> projectors,
                                                            std::string label) {
  if (projectors.empty()) throw std::invalid_argument("with_remainder: no projectors");
  Matrix rest = Matrix::Identity(projectors.front().rows(), projectors.front().cols());
  for (const auto& p : projectors) rest -= p;
  projectors.push_back(std::move(rest));
  return ProjectiveMeasurement(std::move(target_parties), std::move(projectors), std::move(label));
}

// ---------------------------------------------------------------------------
// Construction

PureState ket(const Vector& amplitudes, const PartyDims& dims) {
  if (static_cast<std::size_t>(amplitudes.size()) != dims.total()) {
    throw std::invalid_argument("ket: amplitude count " + std::to_string(amplitudes.size()) +
                                " does not match total dimension " + std::to_string(dims.total()));
  }
  return PureState(dims, amplitudes, Normalization::kUnnormalized).normalized();
}

PureState ket(std::span<const Complex> amplitudes, const PartyDims& dims) {
  Vector v(static_cast<Eigen::Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) v[static_cast<Eigen::Index>(i)] = amplitudes[i];
  return ket(v, dims);
}

PureState basis_ket(const PartyDims& dims, std::span<const std::size_t> levels) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
  v[static_cast<Eigen::Index>(dims.index(levels))] = 1.0;
  return PureState(dims, v);
}

PureState basis_ket(const PartyDims& dims, std::initializer_list<std::size_t> levels) {
  return basis_ket(dims, std::span<const std::size_t>(levels.begin(), levels.size()));
}

PureState tensor(const PureState& x, const PureState& y) {
  const auto dims = x.dims().concat(y.dims());
  Vector v(static_cast<Eigen::Index>(dims.total()));
  const auto ny = y.amplitudes().size();
  for (Eigen::Index i = 0; i < x.amplitudes().size(); ++i) {
    v.segment(i * ny, ny) = x.amplitudes()[i] * y.amplitudes();
  }
  const bool normalized = x.is_normalized() && y.is_normalized();
  return PureState(dims, v, normalized ? Normalization::kNormalized : Normalization::kUnnormalized);
}

DensityOperator tensor(const DensityOperator& x, const DensityOperator& y) {
  const auto dims = x.dims().concat(y.dims());
  const auto n = y.matrix().rows();
  Matrix m(static_cast<Eigen::Index>(dims.total()), static_cast<Eigen::Index>(dims.total()));
  for (Eigen::Index i = 0; i < x.matrix().rows(); ++i) {
    for (Eigen::Index j = 0; j < x.matrix().cols(); ++j) {
      m.block(i * n, j * n, n, n) = x.matrix()(i, j) * y.matrix();
    }
  }
  return DensityOperator(dims, m);
}

DensityOperator mix(std::span<const WeightedState> terms) {
  if (terms.empty()) throw std::invalid_argument("mix: no terms");
  const auto& dims = terms.front().state.dims();
  double total = 0.0;
  Matrix m = Matrix::Zero(terms.front().state.matrix().rows(), terms.front().state.matrix().cols());
  for (const auto& term : terms) {
    if (!(term.weight > 0.0)) throw std::invalid_argument("mix: weights must be positive");
    if (!(term.state.dims() == dims)) throw std::invalid_argument("mix: party dimensions differ");
    total += term.weight;
    m += term.weight * term.state.matrix();
  }
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw std::invalid_argument("mix: weights sum to " + std::to_string(total) + ", not 1");
  }
  return DensityOperator(dims, m);
}

DensityOperator mix(std::initializer_list<WeightedState> terms) {
  return mix(std::span<const WeightedState>(terms.begin(), terms.size()));
}

// ---------------------------------------------------------------------------
// Reduction and measurement

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> discard) {
  const auto& dims = rho.dims();
  dims.check_parties(discard);
  if (discard.empty() || discard.size() == dims.num_parties()) {
    throw std::invalid_argument("partial_trace: discard set must be a nonempty proper subset");
  }
  const auto keep = dims.complement(discard);
  const auto split = detail::split_index(dims, keep);
  const auto kd = static_cast<Eigen::Index>(split.target_dim);
  Matrix out = Matrix::Zero(kd, kd);
  const auto& m = rho.matrix();
  for (std::size_t r = 0; r < split.rest_dim; ++r) {
    for (std::size_t a = 0; a < split.target_dim; ++a) {
      const auto ia = static_cast<Eigen::Index>(split.at(r, a));
      for (std::size_t b = 0; b < split.target_dim; ++b) {
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            m(ia, static_cast<Eigen::Index>(split.at(r, b)));
      }
    }
  }
  return DensityOperator(dims.subset(keep), out);
}

DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::size_t> discard) {
  return partial_trace(rho, std::span<const std::size_t>(discard.begin(), discard.size()));
}

Vector apply_local_operator(const PartyDims& dims, const Vector& amplitudes, const Matrix& op,
                            std::span<const std::size_t> targets) {
  return apply_on_columns(dims, amplitudes, op, targets);
}

Matrix conjugate_local(const PartyDims& dims, const Matrix& rho, const Matrix& op,
                       std::span<const std::size_t> targets) {
  const Matrix left = apply_on_columns(dims, rho, op, targets);
  return apply_on_columns(dims, left.adjoint(), op, targets).adjoint();
}

namespace {

void check_measurement_fits(const PartyDims& dims, const ProjectiveMeasurement& m) {
  dims.check_parties(m.target_parties());
  if (dims.subset(m.target_parties()).total() != m.target_dim()) {
    throw std::invalid_argument("measure: projector dimension " + std::to_string(m.target_dim()) +
                                " does not match the target parties");
  }
}

void check_probability_sum(double total) {
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw InvariantViolation("measure: outcome probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

std::vector<MeasurementOutcome<PureState>> measure(const PureState& state,
                                                   const ProjectiveMeasurement& m) {
  if (!state.is_normalized()) throw std::invalid_argument("measure: input state is unnormalized");
  check_measurement_fits(state.dims(), m);
  std::vector<MeasurementOutcome<PureState>> outcomes;
  double total = 0.0;
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    const Vector projected =
        apply_local_operator(state.dims(), state.amplitudes(), m.projectors()[i], m.target_parties());
    MeasurementOutcome<PureState> outcome;
    outcome.outcome_index = i;
    outcome.probability = projected.squaredNorm();
    total += outcome.probability;
    if (outcome.probability > kZeroProbability) {
      outcome.post_state.emplace(state.dims(), projected / std::sqrt(outcome.probability));
    }
    outcomes.push_back(std::move(outcome));
  }
  check_probability_sum(total);
  return outcomes;
}

std::vector<MeasurementOutcome<DensityOperator>> measure(const DensityOperator& rho,
                                                         const ProjectiveMeasurement& m) {
  check_measurement_fits(rho.dims(), m);
  std::vector<MeasurementOutcome<DensityOperator>> outcomes;
  double total = 0.0;
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    const Matrix projected = conjugate_local(rho.dims(), rho.matrix(), m.projectors()[i], m.target_parties());
    MeasurementOutcome<DensityOperator> outcome;
    outcome.outcome_index = i;
    outcome.probability = projected.trace().real();
    total += outcome.probability;
    if (outcome.probability > kZeroProbability) {
      outcome.post_state.emplace(rho.dims(), projected / outcome.probability);
    }
    outcomes.push_back(std::move(outcome));
  }
  check_probability_sum(total);
  return outcomes;
}

// ---------------------------------------------------------------------------
// Local transformations

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

PureState apply_local_unitary(const PureState& state, const Matrix& unitary,
                              std::span<const std::size_t> targets) {
  if (!is_unitary(unitary)) throw std::invalid_argument("apply_local_unitary: matrix is not unitary");
  const auto normalization =
      state.is_normalized() ? Normalization::kNormalized : Normalization::kUnnormalized;
  return PureState(state.dims(), apply_local_operator(state.dims(), state.amplitudes(), unitary, targets),
                   normalization);
}

PureState apply_local_unitary(const PureState& state, const Matrix& unitary,
                              std::initializer_list<std::size_t> targets) {
  return apply_local_unitary(state, unitary, std::span<const std::size_t>(targets.begin(), targets.size()));
}

DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& unitary,
                                    std::span<const std::size_t> targets) {
  if (!is_unitary(unitary)) throw std::invalid_argument("apply_local_unitary: matrix is not unitary");
  return DensityOperator(rho.dims(), conjugate_local(rho.dims(), rho.matrix(), unitary, targets));
}

DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& unitary,
                                    std::initializer_list<std::size_t> targets) {
  return apply_local_unitary(rho, unitary, std::span<const std::size_t>(targets.begin(), targets.size()));
}

namespace {

void check_level_map(const PartyDims& dims, std::size_t party,
                     const std::map<std::size_t, std::size_t>& level_map, std::size_t new_dim) {
  if (party >= dims.num_parties()) throw std::invalid_argument("relabel_subspace: party out of range");
  if (level_map.empty()) throw std::invalid_argument("relabel_subspace: empty level map");
  std::vector<bool> used(new_dim, false);
  for (auto [from, to] : level_map) {
    if (from >= dims[party]) throw std::invalid_argument("relabel_subspace: source level out of range");
    if (to >= new_dim) throw std::invalid_argument("relabel_subspace: target level out of range");
    if (used[to]) throw std::invalid_argument("relabel_subspace: level map is not injective");
    used[to] = true;
  }
}

// Old full index -> new full index, or nullopt when the party's level is unmapped.
std::vector<std::optional<std::size_t>> relabel_table(const PartyDims& dims, const PartyDims& new_dims,
                                                      std::size_t party,
                                                      const std::map<std::size_t, std::size_t>& level_map) {
  std::vector<std::optional<std::size_t>> table(dims.total());
  for (std::size_t i = 0; i < dims.total(); ++i) {
    auto d = dims.digits(i);
    const auto it = level_map.find(d[party]);
    if (it == level_map.end()) continue;
    d[party] = it->second;
    table[i] = new_dims.index(d);
  }
  return table;
}

}  // namespace

PureState relabel_subspace(const PureState& state, std::size_t party,
                           const std::map<std::size_t, std::size_t>& level_map, std::size_t new_dim) {
  check_level_map(state.dims(), party, level_map, new_dim);
  const auto new_dims = state.dims().with_dim(party, new_dim);
  const auto table = relabel_table(state.dims(), new_dims, party, level_map);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(new_dims.total()));
  double outside = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Complex a = state.amplitudes()[static_cast<Eigen::Index>(i)];
    if (table[i]) {
      out[static_cast<Eigen::Index>(*table[i])] = a;
    } else {
      outside += std::norm(a);
    }
  }
  if (outside > kZeroProbability) {
    throw std::invalid_argument("relabel_subspace: population " + std::to_string(outside) +
                                " lies outside the mapped levels");
  }
  // Dropped population is below the prune threshold; renormalize away the residue.
  if (state.is_normalized()) return PureState(new_dims, out, Normalization::kUnnormalized).normalized();
  return PureState(new_dims, out, Normalization::kUnnormalized);
}

DensityOperator relabel_subspace(const DensityOperator& rho, std::size_t party,
                                 const std::map<std::size_t, std::size_t>& level_map,
                                 std::size_t new_dim) {
  check_level_map(rho.dims(), party, level_map, new_dim);
  const auto new_dims = rho.dims().with_dim(party, new_dim);
  const auto table = relabel_table(rho.dims(), new_dims, party, level_map);
  const auto n = static_cast<Eigen::Index>(new_dims.total());
  Matrix out = Matrix::Zero(n, n);
  double outside = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!table[i]) {
      outside += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
      continue;
    }
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (table[j]) {
        out(static_cast<Eigen::Index>(*table[i]), static_cast<Eigen::Index>(*table[j])) =
            rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  if (outside > kZeroProbability) {
    throw std::invalid_argument("relabel_subspace: population " + std::to_string(outside) +
                                " lies outside the mapped levels");
  }
  return DensityOperator(new_dims, out / out.trace().real());
}

double fidelity_pure(const DensityOperator& rho, const PureState& target) {
  if (!(rho.dims() == target.dims())) throw std::invalid_argument("fidelity_pure: dims mismatch");
  if (!target.is_normalized()) throw std::invalid_argument("fidelity_pure: target is unnormalized");
  const auto& v = target.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

double overlap_fidelity(const PureState& x, const PureState& y) {
  if (!(x.dims() == y.dims())) throw std::invalid_argument("overlap_fidelity: dims mismatch");
  return std::norm(x.amplitudes().dot(y.amplitudes()));
}

PureState trace_out_pure(const PureState& state, std::span<const std::size_t> parties) {
  const auto& dims = state.dims();
  dims.check_parties(parties);
  if (parties.empty() || parties.size() == dims.num_parties()) {
    throw std::invalid_argument("trace_out_pure: parties must be a nonempty proper subset");
  }
  std::vector<std::size_t> sorted(parties.begin(), parties.end());
  std::sort(sorted.begin(), sorted.end());
  const auto split = detail::split_index(dims, sorted);
  Matrix block(static_cast<Eigen::Index>(split.rest_dim), static_cast<Eigen::Index>(split.target_dim));
  for (std::size_t r = 0; r < split.rest_dim; ++r) {
    for (std::size_t t = 0; t < split.target_dim; ++t) {
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) =
          state.amplitudes()[static_cast<Eigen::Index>(split.at(r, t))];
    }
  }
  Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double weight = s.squaredNorm();
  if (weight <= 0.0) throw std::invalid_argument("trace_out_pure: zero state");
  if ((weight - s[0] * s[0]) > kStructuralTol * weight) {
    throw InvariantViolation("trace_out_pure: parties are entangled with the remainder");
  }
  const Vector factor = fix_phase(svd.matrixV().col(0));
  const Vector rest = block * factor;
  const auto normalization =
      state.is_normalized() ? Normalization::kNormalized : Normalization::kUnnormalized;
  if (state.is_normalized()) {
    return PureState(dims.subset(dims.complement(sorted)), rest / rest.norm(), normalization);
  }
  return PureState(dims.subset(dims.complement(sorted)), rest, normalization);
}

PureState permute_parties(const PureState& state, std::span<const std::size_t> order) {
  const auto& dims = state.dims();
  if (order.size() != dims.num_parties()) throw std::invalid_argument("permute_parties: wrong length");
  dims.check_parties(order);
  const auto new_dims = dims.subset(order);
  Vector out(static_cast<Eigen::Index>(dims.total()));
  std::vector<std::size_t> nd(order.size());
  for (std::size_t i = 0; i < dims.total(); ++i) {
    const auto d = dims.digits(i);
    for (std::size_t k = 0; k < order.size(); ++k) nd[k] = d[order[k]];
    out[static_cast<Eigen::Index>(new_dims.index(nd))] = state.amplitudes()[static_cast<Eigen::Index>(i)];
  }
  const auto normalization =
      state.is_normalized() ? Normalization::kNormalized : Normalization::kUnnormalized;
  return PureState(new_dims, out, normalization);
}

PureState to_pure(const DensityOperator& rho) {
  if (std::abs(rho.purity() - 1.0) > kStructuralTol) {
    throw InvariantViolation("to_pure: state is not pure (purity " + std::to_string(rho.purity()) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix());
  const Vector top = solver.eigenvectors().col(solver.eigenvectors().cols() - 1);
  return PureState(rho.dims(), fix_phase(top / top.norm()));
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Matrix basis_projector(std::size_t dim, std::initializer_list<std::size_t> levels) {
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (auto l : levels) {
    if (l >= dim) throw std::invalid_argument("basis_projector: level out of range");
    p(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) = 1.0;
  }
  return p;
}

namespace gates {

Matrix identity(std::size_t dim) {
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

}  // namespace gates

namespace states {

namespace {
PureState two_qubit(Complex a00, Complex a01, Complex a10, Complex a11) {
  Vector v(4);
  v << a00, a01, a10, a11;
  return ket(v, PartyDims{2, 2});
}
}  // namespace

PureState phi_plus() { return two_qubit(1, 0, 0, 1); }
PureState phi_minus() { return two_qubit(1, 0, 0, -1); }
PureState psi_plus() { return two_qubit(0, 1, 1, 0); }
PureState psi_minus() { return two_qubit(0, 1, -1, 0); }

PureState ghz(std::size_t num_qubits) { return ghz_like(num_qubits, 1.0, 1.0); }

PureState ghz_like(std::size_t num_qubits, double a, double b) {
  const PartyDims dims(std::vector<std::size_t>(num_qubits, 2));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
  v[0] = a;
  v[v.size() - 1] = b;
  return ket(v, dims);
}

}  // namespace states

}  // namespace gme
