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

#ifndef GME_TOOLS_JSON_IO_HPP
#define GME_TOOLS_JSON_IO_HPP

#include <string>
#include <variant>

#include <json.hpp>

#include "gme/distill.hpp"
#include "gme/entanglement.hpp"
#include "gme/protocols.hpp"
#include "gme/qcore.hpp"

namespace gme::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0.0";

/// Indented JSON with every floating-point number written as %.17g.
std::string dump(const Json& value);

/// Malformed state files.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using LoadedState = std::variant<PureState, DensityOperator>;

/// {"dims": [...], "kind": "pure"|"density", "amplitudes"|"matrix": [[re, im], ...]}.
LoadedState parse_state(const Json& doc);
LoadedState load_state_file(const std::string& path);

Json to_json(const PureState& state);
Json to_json(const DensityOperator& rho);
Json to_json(const protocols::FinalState& state);
Json to_json(const entanglement::BipartitionReport& report);
Json to_json(const protocols::StepRecord& step);
Json to_json(const protocols::SchmidtAlignment& alignment);
Json to_json(const protocols::MergeResult& merge);
Json to_json(const protocols::DistributionBranch& branch);
Json to_json(const distill::PipelineResult& pipeline);
Json to_json(const protocols::ProtocolReport& report);
Json to_json(const protocols::MonteCarloSummary& summary);

}  // namespace gme::io

#endif  // GME_TOOLS_JSON_IO_HPP
