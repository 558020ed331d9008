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

#include "json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gme::io {

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void dump_into(const Json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      if (flat || (v.size() == 2 && v[0].is_number() && v[1].is_number())) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) out += ", ";
          dump_into(v[i], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        dump_into(v[i], depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

Json complex_pair(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json flat_matrix(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(complex_pair(m(r, c)));
  }
  return out;
}

std::vector<Complex> read_pairs(const Json& arr, std::size_t expected, const char* field) {
  if (!arr.is_array() || arr.size() != expected) {
    throw FormatError(std::string(field) + " must hold " + std::to_string(expected) + " [re, im] pairs");
  }
  std::vector<Complex> out;
  out.reserve(expected);
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw FormatError(std::string(field) + " entries must be [re, im] number pairs");
    }
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

std::string dump(const Json& value) {
  std::string out;
  dump_into(value, 0, out);
  out += "\n";
  return out;
}

LoadedState parse_state(const Json& doc) {
  try {
    if (!doc.is_object()) throw FormatError("state file must hold a JSON object");
    if (!doc.contains("dims") || !doc["dims"].is_array()) throw FormatError("state file needs a dims array");
    std::vector<std::size_t> dims;
    for (const auto& d : doc["dims"]) {
      if (!d.is_number_integer() || d.get<long long>() < 0) throw FormatError("dims must be positive integers");
      dims.push_back(d.get<std::size_t>());
    }
    const PartyDims party_dims(dims);
    const std::string kind = doc.value("kind", "");
    if (kind == "pure") {
      if (!doc.contains("amplitudes")) throw FormatError("pure state file needs amplitudes");
      auto amps = read_pairs(doc["amplitudes"], party_dims.total(), "amplitudes");
      const Vector v = Eigen::Map<const Vector>(amps.data(), static_cast<Eigen::Index>(amps.size()));
      // Normalized input is kept bit for bit; anything else is rescaled.
      if (std::abs(v.norm() - 1.0) <= kStructuralTol) return PureState(party_dims, v);
      return ket(v, party_dims);
    }
    if (kind == "density") {
      if (!doc.contains("matrix")) throw FormatError("density state file needs matrix");
      const std::size_t n = party_dims.total();
      auto entries = read_pairs(doc["matrix"], n * n, "matrix");
      Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries[r * n + c];
      }
      return DensityOperator(party_dims, m);
    }
    throw FormatError("kind must be \"pure\" or \"density\"");
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid state: ") + e.what());
  }
}

LoadedState load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open state file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw FormatError("state file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_state(doc);
}

Json to_json(const PureState& state) {
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < state.amplitudes().size(); ++i) amps.push_back(complex_pair(state.amplitudes()[i]));
  return Json{{"dims", state.dims().dims()}, {"kind", "pure"}, {"amplitudes", std::move(amps)}};
}

Json to_json(const DensityOperator& rho) {
  return Json{{"dims", rho.dims().dims()}, {"kind", "density"}, {"matrix", flat_matrix(rho.matrix())}};
}

Json to_json(const protocols::FinalState& state) {
  if (const auto* pure = std::get_if<PureState>(&state)) return to_json(*pure);
  if (const auto* rho = std::get_if<DensityOperator>(&state)) return to_json(*rho);
  return nullptr;
}

Json to_json(const entanglement::BipartitionReport& report) {
  Json cuts = Json::array();
  for (const auto& c : report.cuts) {
    cuts.push_back(Json{{"cut", c.cut.label()},
                        {"left", c.cut.left()},
                        {"negativity", c.negativity},
                        {"schmidt_rank", c.schmidt_rank ? Json(*c.schmidt_rank) : Json(nullptr)},
                        {"schmidt_coefficients", c.schmidt_coefficients}});
  }
  return Json{{"all_cuts_entangled", report.all_cuts_entangled}, {"cuts", std::move(cuts)}};
}

Json to_json(const protocols::StepRecord& step) {
  return Json{{"copy_index", step.copy_index},
              {"acting_party", step.acting_party},
              {"measurement", step.measurement},
              {"outcome_index", step.outcome_index},
              {"probability", step.probability},
              {"accepted", step.accepted},
              {"branch_probabilities", step.branch_probabilities}};
}

Json to_json(const protocols::SchmidtAlignment& alignment) {
  return Json{{"pair", alignment.pair},
              {"a", alignment.a},
              {"b", alignment.b},
              {"left_unitary", flat_matrix(alignment.left_unitary)},
              {"right_unitary", flat_matrix(alignment.right_unitary)}};
}

Json to_json(const protocols::MergeResult& merge) {
  Json branches = Json::array();
  for (const auto& b : merge.branches) {
    Json corrections = Json::array();
    for (const auto& c : b.corrections) corrections.push_back(Json{{"party", c.party}, {"gate", c.gate}});
    branches.push_back(Json{{"label", b.label()},
                            {"probability", b.probability},
                            {"parity_outcomes", b.parity_outcomes},
                            {"sign_outcomes", b.sign_outcomes},
                            {"corrections", std::move(corrections)},
                            {"target_fidelity", b.target_fidelity},
                            {"corrected_state", to_json(b.corrected_state)}});
  }
  return Json{{"target", to_json(merge.target)}, {"branches", std::move(branches)}};
}

Json to_json(const protocols::DistributionBranch& branch) {
  return Json{{"bell_outcomes", branch.bell_outcomes},
              {"probability", branch.probability},
              {"corrections", branch.corrections},
              {"fidelity", branch.fidelity},
              {"is_gme", branch.is_gme}};
}

Json to_json(const distill::PipelineResult& pipeline) {
  Json trajectory = Json::array();
  for (const auto& t : pipeline.trajectory) {
    trajectory.push_back(Json{{"fidelity", t.fidelity}, {"cumulative_probability", t.cumulative_probability}});
  }
  Json filter = nullptr;
  if (pipeline.filter) filter = Json{{"k0", flat_matrix(pipeline.filter->k0())}, {"k1", flat_matrix(pipeline.filter->k1())}};
  return Json{{"status", distill::to_string(pipeline.status)},
              {"alignment", pipeline.alignment},
              {"filter_party", pipeline.filter_party ? Json(*pipeline.filter_party) : Json(nullptr)},
              {"filter", std::move(filter)},
              {"filter_probability", pipeline.filter_probability},
              {"trajectory", std::move(trajectory)}};
}

Json to_json(const protocols::ProtocolReport& report) {
  Json steps = Json::array();
  for (const auto& s : report.steps) steps.push_back(to_json(s));
  Json alignments = Json::array();
  for (const auto& a : report.alignments) alignments.push_back(to_json(a));
  Json distribution = Json::array();
  for (const auto& d : report.distribution) distribution.push_back(to_json(d));
  Json metrics = Json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = v;
  return Json{{"protocol", report.protocol},
              {"success", report.success},
              {"copies_consumed", report.copies_consumed},
              {"analytic_success_prob", optional_number(report.analytic_success_prob)},
              {"exact_success_prob", optional_number(report.exact_success_prob)},
              {"is_gme", report.is_gme ? Json(*report.is_gme) : Json(nullptr)},
              {"steps", std::move(steps)},
              {"final_state", to_json(report.final_state)},
              {"certificates", report.certificates ? to_json(*report.certificates) : Json(nullptr)},
              {"alignments", std::move(alignments)},
              {"merge", report.merge ? to_json(*report.merge) : Json(nullptr)},
              {"distribution", std::move(distribution)},
              {"distillation", report.distillation ? to_json(*report.distillation) : Json(nullptr)},
              {"metrics", std::move(metrics)},
              {"notes", report.notes}};
}

Json to_json(const protocols::MonteCarloSummary& summary) {
  Json branches = Json::array();
  for (const auto& b : summary.branches) {
    branches.push_back(Json{{"label", b.label},
                            {"count", b.count},
                            {"frequency", b.frequency},
                            {"exact_probability", b.exact_probability}});
  }
  Json steps = Json::array();
  for (const auto& s : summary.steps) {
    steps.push_back(Json{{"label", s.label},
                         {"attempts", s.attempts},
                         {"accepts", s.accepts},
                         {"rate", s.rate},
                         {"exact_rate", s.exact_rate}});
  }
  return Json{{"protocol", summary.protocol},
              {"shots", summary.shots},
              {"seed", summary.seed},
              {"success_rate", summary.success_rate},
              {"exact_success_rate", summary.exact_success_rate},
              {"mean_copies", summary.mean_copies},
              {"exact_mean_copies", summary.exact_mean_copies},
              {"branches", std::move(branches)},
              {"steps", std::move(steps)}};
}

}  // namespace gme::io
