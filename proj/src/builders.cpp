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
#include <numeric>

#include "gme/protocols.hpp"
#include "protocol_support.hpp"

namespace gme::protocols {

namespace {

PureState schmidt_form(std::span<const double> coeffs) {
  detail::check_schmidt_coefficients(coeffs, coeffs.size());
  const std::size_t d = coeffs.size();
  const PartyDims dims{d, d};
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) v[static_cast<Eigen::Index>(i * d + i)] = coeffs[i];
  return PureState(dims, v);
}

// Places a two-qubit state on the {0,1} levels of a (3,2) or (2,3) space.
PureState embed_pair(const PureState& pair, const PartyDims& dims) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::array<std::size_t, 2> digits{i, j};
      v[static_cast<Eigen::Index>(dims.index(digits))] = pair.amplitudes()[static_cast<Eigen::Index>(2 * i + j)];
    }
  }
  return PureState(dims, v);
}

DensityOperator sigma_family(const PureState& pair, double p) {
  detail::check_open_probability(p, "p");
  const auto qutrit_two = basis_ket(PartyDims{3}, {2});
  const auto bc = embed_pair(pair, PartyDims{2, 3});
  const auto ab = embed_pair(pair, PartyDims{3, 2});
  return mix({{p, DensityOperator::from_pure(tensor(qutrit_two, bc))},
              {1 - p, DensityOperator::from_pure(tensor(ab, qutrit_two))}});
}

void check_two_qubit_entangled(const PureState& s, const char* name) {
  if (!(s.dims() == PartyDims{2, 2})) {
    throw std::invalid_argument(std::string(name) + " must be a two-qubit state");
  }
  const auto data = entanglement::schmidt(s, entanglement::Bipartition({0}, 2));
  if (data.rank < 2) {
    throw std::invalid_argument(std::string(name) + " must be entangled (Schmidt rank 2)");
  }
}

void check_qubit(const PureState& s, const char* name) {
  if (!(s.dims() == PartyDims{2}) || !s.is_normalized()) {
    throw std::invalid_argument(std::string(name) + " must be a normalized single-qubit state");
  }
}

}  // namespace

DensityOperator build_prop1_general(const PureState& big_phi, const PureState& small_phi,
                                    const PureState& small_psi, const PureState& big_psi, double p) {
  detail::check_open_probability(p, "p");
  check_two_qubit_entangled(big_phi, "Phi");
  check_two_qubit_entangled(big_psi, "Psi");
  check_qubit(small_phi, "phi");
  check_qubit(small_psi, "psi");
  return mix({{p, DensityOperator::from_pure(tensor(big_phi, small_phi))},
              {1 - p, DensityOperator::from_pure(tensor(small_psi, big_psi))}});
}

DensityOperator build_prop1_example(double p) {
  const auto in = Prop1Inputs::example();
  return build_prop1_general(in.big_phi, in.small_phi, in.small_psi, in.big_psi, p);
}

DensityOperator build_prop2_state(std::span<const double> schmidt_coeffs, double p) {
  detail::check_open_probability(p, "p");
  detail::check_schmidt_coefficients(schmidt_coeffs, 3);
  const auto psi = schmidt_form(schmidt_coeffs);
  const auto zero = basis_ket(PartyDims{3}, {0});
  return mix({{p, DensityOperator::from_pure(tensor(psi, zero))},
              {1 - p, DensityOperator::from_pure(tensor(zero, psi))}});
}

DensityOperator build_sigma(double p) { return sigma_family(states::phi_plus(), p); }

DensityOperator build_sigma_prime(const PureState& phi_prime, double p) {
  check_two_qubit_entangled(phi_prime, "phi'");
  const auto data = entanglement::schmidt(phi_prime, entanglement::Bipartition({0}, 2));
  if (std::abs(data.coefficients[0] - data.coefficients[1]) <= kStructuralTol) {
    throw std::invalid_argument("phi' must be non-maximally entangled; use build_sigma for |phi+>");
  }
  return sigma_family(phi_prime, p);
}

DensityOperator build_prop3_state(std::span<const double> schmidt_coeffs, std::span<const double> weights) {
  detail::check_schmidt_coefficients(schmidt_coeffs, 4);
  detail::check_weights(weights, 3);
  const auto psi = schmidt_form(schmidt_coeffs);
  const PartyDims one{4};
  const auto zero = basis_ket(one, {0});
  const auto one_level = basis_ket(one, {1});
  return mix({{weights[0], DensityOperator::from_pure(tensor(tensor(psi, zero), zero))},
              {weights[1], DensityOperator::from_pure(tensor(tensor(zero, psi), one_level))},
              {weights[2], DensityOperator::from_pure(tensor(tensor(one_level, one_level), psi))}});
}

}  // namespace gme::protocols
