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

#ifndef GME_TESTS_SUPPORT_HPP
#define GME_TESTS_SUPPORT_HPP

#include <random>

#include <gtest/gtest.h>

#include "gme/qcore.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Vec to_oracle(const gme::PureState& s) {
  oracle::Vec v(static_cast<std::size_t>(s.amplitudes().size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.amplitudes()[static_cast<Eigen::Index>(i)];
  return v;
}

inline oracle::Mat to_oracle(const gme::Matrix& m) {
  oracle::Mat out = oracle::zeros(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline oracle::Mat to_oracle(const gme::DensityOperator& rho) { return to_oracle(rho.matrix()); }

inline gme::Matrix from_oracle(const oracle::Mat& m) {
  gme::Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m[i][j];
  return out;
}

inline gme::Vector from_oracle(const oracle::Vec& v) {
  gme::Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

inline void expect_matrix_near(const oracle::Mat& a, const oracle::Mat& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      EXPECT_NEAR(std::abs(a[i][j] - b[i][j]), 0.0, tol) << "entry (" << i << ", " << j << ")";
}

inline void expect_vector_near(const oracle::Vec& a, const oracle::Vec& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, tol) << "entry " << i;
}

/// Haar-ish random unitary from QR of a Gaussian matrix.
inline gme::Matrix random_unitary(std::size_t dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  gme::Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = gme::Complex(n(gen), n(gen));
  Eigen::HouseholderQR<gme::Matrix> qr(g);
  return qr.householderQ() * gme::Matrix::Identity(g.rows(), g.cols());
}

inline gme::PureState random_state(const gme::PartyDims& dims, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  gme::Vector v(static_cast<Eigen::Index>(dims.total()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gme::Complex(n(gen), n(gen));
  return gme::ket(v, dims);
}

inline gme::DensityOperator random_mixed(const gme::PartyDims& dims, std::mt19937_64& gen, int terms = 3) {
  std::vector<gme::WeightedState> parts;
  for (int t = 0; t < terms; ++t) {
    parts.push_back({1.0 / terms, gme::DensityOperator::from_pure(random_state(dims, gen))});
  }
  return gme::mix(parts);
}

}  // namespace testing_support

#endif  // GME_TESTS_SUPPORT_HPP
