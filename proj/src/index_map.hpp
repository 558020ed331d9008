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

#ifndef GME_SRC_INDEX_MAP_HPP
#define GME_SRC_INDEX_MAP_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gme/qcore.hpp"

namespace gme::detail {

/// Factorization of the full index space into (rest, target) blocks.
/// full[r * target_dim + t] is the full index whose target digits (in the
/// listed target order) encode t and whose remaining digits (ascending
/// party order) encode r.
struct SplitIndex {
  std::size_t target_dim = 1;
  std::size_t rest_dim = 1;
  std::vector<std::size_t> full;

  std::size_t at(std::size_t rest, std::size_t target) const {
    return full[rest * target_dim + target];
  }
};

inline SplitIndex split_index(const PartyDims& dims, std::span<const std::size_t> targets) {
  dims.check_parties(targets);
  const auto rest = dims.complement(targets);
  SplitIndex split;
  for (auto p : targets) split.target_dim *= dims[p];
  for (auto p : rest) split.rest_dim *= dims[p];
  split.full.resize(dims.total());
  for (std::size_t i = 0; i < dims.total(); ++i) {
    const auto d = dims.digits(i);
    std::size_t t = 0;
    for (auto p : targets) t = t * dims[p] + d[p];
    std::size_t r = 0;
    for (auto p : rest) r = r * dims[p] + d[p];
    split.full[r * split.target_dim + t] = i;
  }
  return split;
}

}  // namespace gme::detail

#endif  // GME_SRC_INDEX_MAP_HPP
