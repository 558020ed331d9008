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

#include "gme/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "index_map.hpp"

namespace gme::entanglement {

std::string party_label(std::size_t party) {
  if (party < 26) return std::string(1, static_cast<char>('A' + party));
  return "P" + std::to_string(party);
}

Bipartition::Bipartition(std::vector<std::size_t> side, std::size_t num_parties) : n_(num_parties) {
  if (num_parties < 2) throw std::invalid_argument("Bipartition: need at least two parties");
  std::sort(side.begin(), side.end());
  if (std::adjacent_find(side.begin(), side.end()) != side.end()) {
    throw std::invalid_argument("Bipartition: repeated party");
  }
  if (side.empty() || side.size() >= num_parties || side.back() >= num_parties) {
    throw std::invalid_argument("Bipartition: side must be a nonempty proper subset of the parties");
  }
  left_ = std::move(side);
  if (left_.back() == n_ - 1) left_ = right();
}

std::vector<std::size_t> Bipartition::right() const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < n_; ++p) {
    if (!std::binary_search(left_.begin(), left_.end(), p)) out.push_back(p);
  }
  return out;
}

std::string Bipartition::label() const {
  // Smaller side first, so single-party cuts always read "X|...".
  const auto rest = right();
  const auto& first = rest.size() < left_.size() ? rest : left_;
  const auto& second = rest.size() < left_.size() ? left_ : rest;
  std::string out;
  for (auto p : first) out += party_label(p);
  out += '|';
  for (auto p : second) out += party_label(p);
  return out;
}

std::vector<Bipartition> enumerate_bipartitions(std::size_t num_parties) {
  if (num_parties < 2) throw std::invalid_argument("enumerate_bipartitions: need n >= 2");
  if (num_parties > 30) throw std::invalid_argument("enumerate_bipartitions: too many parties");
  std::vector<Bipartition> out;
  const std::size_t count = (std::size_t{1} << (num_parties - 1)) - 1;
  out.reserve(count);
  for (std::size_t mask = 1; mask <= count; ++mask) {
    std::vector<std::size_t> side;
    for (std::size_t p = 0; p + 1 < num_parties; ++p) {
      if (mask & (std::size_t{1} << p)) side.push_back(p);
    }
    out.emplace_back(std::move(side), num_parties);
  }
  return out;
}

namespace {

void check_cut(const PartyDims& dims, const Bipartition& cut) {
  if (cut.num_parties() != dims.num_parties()) {
    throw std::invalid_argument("bipartition has " + std::to_string(cut.num_parties()) +
                                " parties but the state has " + std::to_string(dims.num_parties()));
  }
}

double negativity_from_schmidt(const std::vector<double>& coefficients) {
  const double sum = std::accumulate(coefficients.begin(), coefficients.end(), 0.0);
  return std::max(0.0, (sum * sum - 1.0) / 2.0);
}

}  // namespace

SchmidtData schmidt(const PureState& state, const Bipartition& cut) {
  if (!state.is_normalized()) throw std::invalid_argument("schmidt: input state is unnormalized");
  check_cut(state.dims(), cut);
  const auto split = detail::split_index(state.dims(), cut.left());
  // Rows: left index; columns: right index.
  Matrix reshaped(static_cast<Eigen::Index>(split.target_dim), static_cast<Eigen::Index>(split.rest_dim));
  for (std::size_t r = 0; r < split.rest_dim; ++r) {
    for (std::size_t t = 0; t < split.target_dim; ++t) {
      reshaped(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(r)) =
          state.amplitudes()[static_cast<Eigen::Index>(split.at(r, t))];
    }
  }
  Eigen::JacobiSVD<Matrix> svd(reshaped);
  SchmidtData data;
  const auto& s = svd.singularValues();
  data.coefficients.assign(s.data(), s.data() + s.size());
  data.rank = static_cast<std::size_t>(
      std::count_if(data.coefficients.begin(), data.coefficients.end(), [](double x) { return x > kStructuralTol; }));
  return data;
}

Matrix partial_transpose(const DensityOperator& rho, std::span<const std::size_t> parties) {
  const auto split = detail::split_index(rho.dims(), parties);
  const auto& m = rho.matrix();
  Matrix out(m.rows(), m.cols());
  // <r1 t1| rho^T |r2 t2> = <r1 t2| rho |r2 t1>
  for (std::size_t r1 = 0; r1 < split.rest_dim; ++r1) {
    for (std::size_t t1 = 0; t1 < split.target_dim; ++t1) {
      const auto row = static_cast<Eigen::Index>(split.at(r1, t1));
      for (std::size_t r2 = 0; r2 < split.rest_dim; ++r2) {
        for (std::size_t t2 = 0; t2 < split.target_dim; ++t2) {
          out(row, static_cast<Eigen::Index>(split.at(r2, t2))) =
              m(static_cast<Eigen::Index>(split.at(r1, t2)), static_cast<Eigen::Index>(split.at(r2, t1)));
        }
      }
    }
  }
  return out;
}

double negativity_over(const DensityOperator& rho, std::span<const std::size_t> parties) {
  const Matrix pt = partial_transpose(rho, parties);
  Eigen::SelfAdjointEigenSolver<Matrix> solver((pt + pt.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double ev = solver.eigenvalues()[i];
    if (ev < 0.0) total -= ev;
  }
  return total;
}

double negativity(const DensityOperator& rho, const Bipartition& cut) {
  check_cut(rho.dims(), cut);
  return negativity_over(rho, cut.left());
}

BipartitionReport certify_entangled_all_cuts(const DensityOperator& rho) {
  BipartitionReport report;
  if (rho.num_parties() < 2) throw std::invalid_argument("certify_entangled_all_cuts: need >= 2 parties");
  report.all_cuts_entangled = true;
  for (auto& cut : enumerate_bipartitions(rho.num_parties())) {
    CutRecord record{cut, negativity(rho, cut), std::nullopt, {}};
    report.all_cuts_entangled = report.all_cuts_entangled && record.negativity > kStructuralTol;
    report.cuts.push_back(std::move(record));
  }
  return report;
}

GmeCertificate certify_gme_pure(const PureState& state) {
  if (!state.is_normalized()) throw std::invalid_argument("certify_gme_pure: input state is unnormalized");
  if (state.num_parties() < 2) throw std::invalid_argument("certify_gme_pure: need >= 2 parties");
  GmeCertificate cert;
  cert.is_gme = true;
  cert.report.all_cuts_entangled = true;
  for (auto& cut : enumerate_bipartitions(state.num_parties())) {
    auto data = schmidt(state, cut);
    const bool entangled = data.rank >= 2;
    cert.is_gme = cert.is_gme && entangled;
    CutRecord record{cut, negativity_from_schmidt(data.coefficients), data.rank, std::move(data.coefficients)};
    cert.report.all_cuts_entangled = cert.report.all_cuts_entangled && entangled;
    cert.report.cuts.push_back(std::move(record));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Svetlichny

Matrix equatorial_observable(double angle) {
  return std::cos(angle) * gates::pauli_x() + std::sin(angle) * gates::pauli_y();
}

Matrix bloch_observable(double theta, double phi) {
  return std::sin(theta) * std::cos(phi) * gates::pauli_x() +
         std::sin(theta) * std::sin(phi) * gates::pauli_y() + std::cos(theta) * gates::pauli_z();
}

SvetlichnySettings equatorial_settings(const std::array<double, 6>& angles) {
  return {equatorial_observable(angles[0]), equatorial_observable(angles[1]),
          equatorial_observable(angles[2]), equatorial_observable(angles[3]),
          equatorial_observable(angles[4]), equatorial_observable(angles[5])};
}

std::array<double, 6> ghz_optimal_angles() {
  constexpr double kPi = 3.14159265358979323846;
  return {0.0, kPi / 2, -kPi / 4, kPi / 4, 0.0, kPi / 2};
}

SvetlichnySettings ghz_optimal_settings() { return equatorial_settings(ghz_optimal_angles()); }

namespace {

void check_observable(const Matrix& o, const char* name) {
  if (o.rows() != 2 || o.cols() != 2) {
    throw std::invalid_argument(std::string("svetlichny: observable ") + name + " is not 2x2");
  }
  const double tol = kStructuralTol;
  if ((o - o.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string("svetlichny: observable ") + name + " is not Hermitian");
  }
  if (std::abs(o.trace()) > tol) {
    throw std::invalid_argument(std::string("svetlichny: observable ") + name + " is not traceless");
  }
  if ((o * o - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string("svetlichny: observable ") + name + " does not square to I");
  }
}

double correlator(const PureState& state, const Matrix& a, const Matrix& b, const Matrix& c) {
  Vector v = state.amplitudes();
  const std::array<std::size_t, 1> p0{0}, p1{1}, p2{2};
  v = apply_local_operator(state.dims(), v, a, p0);
  v = apply_local_operator(state.dims(), v, b, p1);
  v = apply_local_operator(state.dims(), v, c, p2);
  return state.amplitudes().dot(v).real();
}

}  // namespace

double svetlichny_value(const PureState& state, const SvetlichnySettings& s) {
  if (!(state.dims() == PartyDims{2, 2, 2})) {
    throw std::invalid_argument("svetlichny: state must be three qubits, got " + to_string(state.dims()));
  }
  if (!state.is_normalized()) throw std::invalid_argument("svetlichny: input state is unnormalized");
  check_observable(s.a, "A");
  check_observable(s.a_prime, "A'");
  check_observable(s.b, "B");
  check_observable(s.b_prime, "B'");
  check_observable(s.c, "C");
  check_observable(s.c_prime, "C'");
  return correlator(state, s.a, s.b, s.c) + correlator(state, s.a, s.b_prime, s.c) +
         correlator(state, s.a, s.b, s.c_prime) - correlator(state, s.a, s.b_prime, s.c_prime) +
         correlator(state, s.a_prime, s.b, s.c) - correlator(state, s.a_prime, s.b_prime, s.c) -
         correlator(state, s.a_prime, s.b, s.c_prime) - correlator(state, s.a_prime, s.b_prime, s.c_prime);
}

}  // namespace gme::entanglement
