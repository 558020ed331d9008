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

#include "gme/distill.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>

namespace gme::distill {

namespace {

const PartyDims& two_qubits() {
  static const PartyDims dims{2, 2};
  return dims;
}

void check_two_qubit(const DensityOperator& rho, const char* what) {
  if (!(rho.dims() == two_qubits())) {
    throw std::invalid_argument(std::string(what) + ": expected a two-qubit state, got " + to_string(rho.dims()));
  }
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// Two Cliffords are the same element when they agree up to a global phase.
bool same_up_to_phase(const Matrix& x, const Matrix& y) {
  return std::abs(std::abs(x.cwiseProduct(y.conjugate()).sum()) - 2.0) < 1e-9;
}

}  // namespace

FilterPair::FilterPair(Matrix k0, Matrix k1) : k0_(std::move(k0)), k1_(std::move(k1)) {
  if (k0_.rows() != 2 || k0_.cols() != 2 || k1_.rows() != 2 || k1_.cols() != 2) {
    throw std::invalid_argument("FilterPair: Kraus operators must be 2x2");
  }
  const Matrix completeness = k0_.adjoint() * k0_ + k1_.adjoint() * k1_;
  if ((completeness - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::invalid_argument("FilterPair: K0^dagger K0 + K1^dagger K1 != I");
  }
}

FilterPair FilterPair::from_success_operator(const Matrix& k0) {
  if (k0.rows() != 2 || k0.cols() != 2) throw std::invalid_argument("FilterPair: K0 must be 2x2");
  const Matrix rest = Matrix::Identity(2, 2) - k0.adjoint() * k0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver((rest + rest.adjoint()) * 0.5);
  if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
    throw std::invalid_argument("FilterPair: K0 has operator norm above 1");
  }
  const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix k1 = solver.eigenvectors() * roots.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
  return FilterPair(k0, k1);
}

FilterPair procrustean_filter(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("procrustean_filter: coefficients must be positive");
  const double top = std::max(a, b);
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = b / top;
  k0(1, 1) = a / top;
  return FilterPair::from_success_operator(k0);
}

std::vector<FilterBranch> local_filter(const DensityOperator& rho, std::size_t party, const FilterPair& filter) {
  check_two_qubit(rho, "local_filter");
  if (party > 1) throw std::invalid_argument("local_filter: party must be 0 or 1");
  const std::array<std::size_t, 1> target{party};
  std::vector<FilterBranch> branches;
  double total = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix& kraus = k == 0 ? filter.k0() : filter.k1();
    const Matrix image = conjugate_local(rho.dims(), rho.matrix(), kraus, target);
    FilterBranch branch;
    branch.kraus_index = k;
    branch.probability = image.trace().real();
    total += branch.probability;
    if (branch.probability > kZeroProbability) branch.post_state.emplace(rho.dims(), image / branch.probability);
    branches.push_back(std::move(branch));
  }
  if (std::abs(total - 1.0) > kStructuralTol) throw InvariantViolation("local_filter: branch probabilities do not sum to 1");
  return branches;
}

double bell_fidelity(const DensityOperator& rho) {
  check_two_qubit(rho, "bell_fidelity");
  return fidelity_pure(rho, states::phi_plus());
}

const std::vector<Matrix>& clifford_group() {
  static const std::vector<Matrix> group = [] {
    Matrix s = Matrix::Identity(2, 2);
    s(1, 1) = Complex(0.0, 1.0);
    const std::array<Matrix, 2> generators{gates::hadamard(), s};
    std::vector<Matrix> found{Matrix::Identity(2, 2)};
    std::deque<Matrix> frontier{Matrix::Identity(2, 2)};
    while (!frontier.empty()) {
      const Matrix current = frontier.front();
      frontier.pop_front();
      for (const auto& g : generators) {
        const Matrix next = g * current;
        const bool known = std::any_of(found.begin(), found.end(), [&](const Matrix& m) { return same_up_to_phase(m, next); });
        if (!known) {
          found.push_back(next);
          frontier.push_back(next);
        }
      }
    }
    return found;
  }();
  return group;
}

DensityOperator twirl_to_isotropic(const DensityOperator& rho) {
  check_two_qubit(rho, "twirl_to_isotropic");
  const auto& group = clifford_group();
  Matrix sum = Matrix::Zero(4, 4);
  for (const auto& c : group) {
    Matrix u(4, 4);
    const Matrix cc = c.conjugate();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) u.block(2 * i, 2 * j, 2, 2) = c(i, j) * cc;
    }
    sum += u * rho.matrix() * u.adjoint();
  }
  return DensityOperator(rho.dims(), sum / static_cast<double>(group.size()));
}

RecurrenceResult recurrence_round(const DensityOperator& rho) {
  check_two_qubit(rho, "recurrence_round");
  const auto pair = tensor(rho, rho);  // A1 B1 A2 B2
  const std::array<std::size_t, 2> alice{0, 2};
  const std::array<std::size_t, 2> bob{1, 3};
  auto after = apply_local_unitary(pair, cnot(), alice);
  after = apply_local_unitary(after, cnot(), bob);
  const ProjectiveMeasurement parity({2, 3}, {basis_projector(4, {0, 3}), basis_projector(4, {1, 2})},
                                     "target parity");
  auto outcomes = measure(after, parity);
  auto& kept = outcomes[0];
  if (kept.is_null()) throw InvariantViolation("recurrence_round: agreement outcome has zero probability");
  return {kept.probability, partial_trace(*kept.post_state, {2, 3})};
}

std::string to_string(PipelineStatus status) {
  switch (status) {
    case PipelineStatus::kDistilling:
      return "distilling";
    case PipelineStatus::kBelowThreshold:
      return "below_threshold";
  }
  return "unknown";
}

PipelineResult distill_pipeline(const DensityOperator& rho, int rounds) {
  check_two_qubit(rho, "distill_pipeline");
  if (rounds < 1) throw std::invalid_argument("distill_pipeline: rounds must be >= 1");

  PipelineResult result;
  const std::array<std::pair<const char*, Matrix>, 4> paulis{{{"I", gates::identity(2)},
                                                              {"X", gates::pauli_x()},
                                                              {"Y", gates::pauli_y()},
                                                              {"Z", gates::pauli_z()}}};
  DensityOperator state = rho;
  double best = bell_fidelity(rho);
  for (const auto& [name, pauli] : paulis) {
    auto candidate = apply_local_unitary(rho, pauli, {0});
    const double f = bell_fidelity(candidate);
    if (f > best + kStructuralTol) {
      best = f;
      state = std::move(candidate);
      result.alignment = name;
    }
  }

  if (best <= 0.5 + kStructuralTol) {
    // Scan diagonal filters on either side for a success branch above 1/2.
    double best_filtered = best;
    for (std::size_t party = 0; party < 2; ++party) {
      for (int step = 1; step < 20; ++step) {
        const double x = 0.05 * step;
        for (int flip = 0; flip < 2; ++flip) {
          Matrix k0 = Matrix::Zero(2, 2);
          k0(0, 0) = flip ? x : 1.0;
          k0(1, 1) = flip ? 1.0 : x;
          auto filter = FilterPair::from_success_operator(k0);
          auto branches = local_filter(state, party, filter);
          if (branches[0].is_null()) continue;
          const double f = bell_fidelity(*branches[0].post_state);
          if (f > best_filtered + kStructuralTol) {
            best_filtered = f;
            result.filter_party = party;
            result.filter = filter;
            result.filter_probability = branches[0].probability;
          }
        }
      }
    }
    if (best_filtered <= 0.5 + kStructuralTol) {
      result.status = PipelineStatus::kBelowThreshold;
      result.trajectory.push_back({best, 1.0});
      return result;
    }
    state = *local_filter(state, *result.filter_party, *result.filter)[0].post_state;
  }

  state = twirl_to_isotropic(state);
  double cumulative = result.filter_probability;
  result.trajectory.push_back({bell_fidelity(state), cumulative});
  for (int r = 0; r < rounds; ++r) {
    auto round = recurrence_round(state);
    cumulative *= round.success_probability;
    result.trajectory.push_back({bell_fidelity(round.post_state), cumulative});
    state = twirl_to_isotropic(round.post_state);
  }
  result.status = PipelineStatus::kDistilling;
  return result;
}

}  // namespace gme::distill
