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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gme/distill.hpp"
#include "gme/entanglement.hpp"
#include "gme/protocols.hpp"
#include "json_io.hpp"

#ifndef GME_VERSION
#define GME_VERSION "0.0.0"
#endif

namespace gme::cli {

namespace {

using io::Json;
namespace pr = gme::protocols;
namespace ent = gme::entanglement;

// Options every subcommand accepts.
struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  bool stamp = false;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--out", c.out, "Write the report to this path instead of stdout");
  if (with_seed) {
    sub->add_option("--seed", c.seed, "64-bit seed (falls back to GME_SEED, then 42)");
    sub->add_option("--threads", c.threads, "Monte Carlo worker threads (0 = all cores); never changes results");
  }
  sub->add_flag("--stamp", c.stamp, "Record the wall-clock time in the manifest");
}

struct ResolvedSeed {
  std::uint64_t value;
  std::string source;
};

ResolvedSeed resolve_seed(const Common& c) {
  if (c.seed) return {*c.seed, "flag"};
  if (const char* env = std::getenv("GME_SEED"); env != nullptr && *env != '\0') {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != std::string(env).size()) throw std::invalid_argument("GME_SEED must be an unsigned integer");
    return {static_cast<std::uint64_t>(v), "env"};
  }
  return {42, "default"};
}

Json timestamp(bool stamp) {
  std::time_t t = 0;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde != nullptr && *sde != '\0') {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else if (stamp) {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  } else {
    return nullptr;
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Output {
  Json config = Json::object();
  Json result;
  std::vector<std::string> manifest_notes;
  std::optional<std::string> csv;
};

Json manifest(const std::string& subcommand, const Output& o, const std::optional<ResolvedSeed>& seed, bool stamp) {
  Json m{{"subcommand", subcommand}, {"config", o.config}};
  m["seed"] = seed ? Json(seed->value) : Json(nullptr);
  m["seed_source"] = seed ? Json(seed->source) : Json(nullptr);
  m["version"] = GME_VERSION;
  m["timestamp"] = timestamp(stamp);
  m["notes"] = o.manifest_notes;
  return m;
}

std::vector<double> normalized_positive(const std::vector<double>& raw, const char* name) {
  double sum = 0.0;
  for (double x : raw) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(name) + " entries must be positive");
    sum += x * x;
  }
  std::vector<double> out;
  for (double x : raw) out.push_back(x / std::sqrt(sum));
  return out;
}

double parse_real(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
  return v;
}

// Each entry is "re" or "re:im".
PureState parse_amplitudes(const std::vector<std::string>& entries, const PartyDims& dims, const char* name) {
  if (entries.size() != dims.total()) {
    throw std::invalid_argument(std::string(name) + " needs " + std::to_string(dims.total()) + " amplitudes");
  }
  std::vector<Complex> amps;
  for (const auto& e : entries) {
    const auto colon = e.find(':');
    if (colon == std::string::npos) {
      amps.emplace_back(parse_real(e, name), 0.0);
    } else {
      amps.emplace_back(parse_real(e.substr(0, colon), name), parse_real(e.substr(colon + 1), name));
    }
  }
  return ket(std::span<const Complex>(amps), dims);
}

Json schmidt_config(const std::vector<double>& raw, const std::vector<double>& used, Output& o) {
  if (!raw.empty()) {
    o.manifest_notes.push_back("Schmidt coefficients normalized to unit norm");
    return Json{{"input", raw}, {"normalized", used}};
  }
  o.manifest_notes.push_back("Schmidt coefficients defaulted to uniform");
  return Json{{"input", nullptr}, {"normalized", used}};
}

std::vector<double> resolve_schmidt(const std::vector<double>& raw, std::size_t count) {
  if (raw.empty()) return std::vector<double>(count, 1.0 / std::sqrt(static_cast<double>(count)));
  if (raw.size() != count) {
    throw std::invalid_argument("--schmidt needs " + std::to_string(count) + " coefficients, got " +
                                std::to_string(raw.size()));
  }
  return normalized_positive(raw, "--schmidt");
}

Json with_monte_carlo(Json result, const char* protocol, const pr::ProtocolConfig& config, std::uint64_t shots,
                      std::uint64_t seed, unsigned threads) {
  result["monte_carlo"] = shots > 0 ? io::to_json(pr::monte_carlo(protocol, config, shots, seed, threads)) : Json(nullptr);
  return result;
}

// ---------------------------------------------------------------------------
// Built-in states for certify / svetlichny / distill.

struct BuiltinArgs {
  std::string name;
  double p = 0.5;
  std::vector<double> schmidt;
  std::vector<double> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<std::string> phi_prime;
};

PureState merged_ghz(const std::vector<double>& schmidt, Json& config, Output& o) {
  const auto ab = resolve_schmidt(schmidt, 2);
  config["schmidt"] = schmidt_config(schmidt, ab, o);
  const auto pair = states::ghz_like(2, ab[0], ab[1]);
  const std::vector<PureState> chain{pair, pair};
  return pr::merge_chain_to_ghz(chain).branches.front().corrected_state;
}

PureState default_phi_prime() { return states::ghz_like(2, 2.0, 1.0); }

io::LoadedState builtin_state(const BuiltinArgs& b, Json& config, Output& o) {
  config["builtin"] = b.name;
  if (b.name == "ghz") return states::ghz(3);
  if (b.name == "product") return basis_ket(PartyDims{2, 2, 2}, {0, 0, 0});
  if (b.name == "merged") return merged_ghz(b.schmidt, config, o);
  config["p"] = b.p;
  if (b.name == "prop1") return pr::build_prop1_example(b.p);
  if (b.name == "sigma") return pr::build_sigma(b.p);
  if (b.name == "sigma-prime") {
    const auto phi = b.phi_prime.empty() ? default_phi_prime() : parse_amplitudes(b.phi_prime, PartyDims{2, 2}, "--phi-prime");
    config["phi_prime"] = io::to_json(phi);
    return pr::build_sigma_prime(phi, b.p);
  }
  if (b.name == "prop2") {
    const auto a = resolve_schmidt(b.schmidt, 3);
    config["schmidt"] = schmidt_config(b.schmidt, a, o);
    return pr::build_prop2_state(a, b.p);
  }
  if (b.name == "prop3") {
    config.erase("p");
    const auto a = resolve_schmidt(b.schmidt, 4);
    config["schmidt"] = schmidt_config(b.schmidt, a, o);
    config["weights"] = b.weights;
    return pr::build_prop3_state(a, b.weights);
  }
  throw std::invalid_argument("unknown builtin '" + b.name + "'");
}

void add_builtin_options(CLI::App* sub, BuiltinArgs& b, std::string& state_path, const std::vector<std::string>& names) {
  auto* file = sub->add_option("--state", state_path, "JSON state file");
  auto* builtin = sub->add_option("--builtin", b.name, "Built-in state")->check(CLI::IsMember(names));
  file->excludes(builtin);
  sub->add_option("--p", b.p, "Mixing weight of the built-in family");
  sub->add_option("--schmidt", b.schmidt, "Schmidt coefficients (normalized before use)")->delimiter(',');
  sub->add_option("--weights", b.weights, "Mixing weights p1,p2,p3 of the four-party family")->delimiter(',');
  sub->add_option("--phi-prime", b.phi_prime, "Amplitudes re[:im] of the non-maximal pair")->delimiter(',');
}

io::LoadedState resolve_state(const BuiltinArgs& b, const std::string& path, const std::string& fallback, Output& o) {
  if (!path.empty()) {
    o.config["state_file"] = path;
    return io::load_state_file(path);
  }
  BuiltinArgs copy = b;
  if (copy.name.empty()) {
    copy.name = fallback;
    o.manifest_notes.push_back("no state given; builtin '" + fallback + "' applied");
  }
  return builtin_state(copy, o.config, o);
}

PureState require_pure(const io::LoadedState& s, const char* what) {
  if (const auto* pure = std::get_if<PureState>(&s)) return *pure;
  const auto& rho = std::get<DensityOperator>(s);
  if (std::abs(rho.purity() - 1.0) > kStructuralTol) {
    throw std::invalid_argument(std::string(what) + " needs a pure state");
  }
  return to_pure(rho);
}

Json state_json(const io::LoadedState& s) {
  return std::visit([](const auto& v) { return io::to_json(v); }, s);
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Prop1Args {
  double p = 0.5;
  int rounds = 3;
  std::size_t charlie_outcome = 0;
  std::vector<std::string> big_phi, small_phi, small_psi, big_psi;
  std::uint64_t shots = 100000;
};

Output cmd_prop1(const Prop1Args& a, std::uint64_t seed, unsigned threads) {
  Output o;
  pr::ProtocolConfig config;
  config.p = a.p;
  config.distill_rounds = a.rounds;
  config.prop1_outcome = a.charlie_outcome;
  config.seed = seed;
  const bool custom = !(a.big_phi.empty() && a.small_phi.empty() && a.small_psi.empty() && a.big_psi.empty());
  auto inputs = pr::Prop1Inputs::example();
  if (custom) {
    if (!a.big_phi.empty()) inputs.big_phi = parse_amplitudes(a.big_phi, PartyDims{2, 2}, "--Phi");
    if (!a.small_phi.empty()) inputs.small_phi = parse_amplitudes(a.small_phi, PartyDims{2}, "--phi");
    if (!a.small_psi.empty()) inputs.small_psi = parse_amplitudes(a.small_psi, PartyDims{2}, "--psi");
    if (!a.big_psi.empty()) inputs.big_psi = parse_amplitudes(a.big_psi, PartyDims{2, 2}, "--Psi");
    config.prop1_inputs = inputs;
  }
  o.config = Json{{"p", a.p},
                  {"rounds", a.rounds},
                  {"charlie_outcome", a.charlie_outcome},
                  {"inputs",
                   Json{{"Phi", io::to_json(inputs.big_phi)},
                        {"phi", io::to_json(inputs.small_phi)},
                        {"psi", io::to_json(inputs.small_psi)},
                        {"Psi", io::to_json(inputs.big_psi)}}},
                  {"shots", a.shots}};
  if (!custom) o.manifest_notes.push_back("inputs defaulted to Phi=phi+, phi=|0>, psi=|1>, Psi=phi-");
  auto report = pr::run_prop1(config);
  Json result = io::to_json(report);
  result["residual_separable"] = !report.success && report.metrics["ab_negativity"] <= kStructuralTol;
  o.result = with_monte_carlo(std::move(result), "prop1", config, a.shots, seed, threads);
  return o;
}

struct ChainArgs {
  double p = 0.5;
  std::vector<double> schmidt;
  std::vector<double> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::uint64_t shots = 100000;
};

Output cmd_prop2(const ChainArgs& a, std::uint64_t seed, unsigned threads) {
  Output o;
  pr::ProtocolConfig config;
  config.p = a.p;
  config.schmidt_coeffs = resolve_schmidt(a.schmidt, 3);
  config.seed = seed;
  o.config = Json{{"p", a.p}, {"schmidt", schmidt_config(a.schmidt, config.schmidt_coeffs, o)}, {"shots", a.shots}};
  o.result = with_monte_carlo(io::to_json(pr::run_prop2(config)), "prop2", config, a.shots, seed, threads);
  return o;
}

Output cmd_prop3(const ChainArgs& a, std::uint64_t seed, unsigned threads) {
  Output o;
  pr::ProtocolConfig config;
  if (a.weights.size() != 3) throw std::invalid_argument("--weights needs three values");
  std::copy(a.weights.begin(), a.weights.end(), config.weights.begin());
  config.schmidt_coeffs = resolve_schmidt(a.schmidt, 4);
  config.seed = seed;
  o.config = Json{{"weights", a.weights},
                  {"schmidt", schmidt_config(a.schmidt, config.schmidt_coeffs, o)},
                  {"shots", a.shots}};
  o.result = with_monte_carlo(io::to_json(pr::run_prop3(config)), "prop3", config, a.shots, seed, threads);
  return o;
}

struct SigmaArgs {
  double p = 0.5;
  int max_copies = 21;
  std::string first_pair = "sampled";
  std::vector<std::string> phi_prime;
  std::uint64_t shots = 100000;
};

Output cmd_sigma(const SigmaArgs& a, std::uint64_t seed, unsigned threads) {
  Output o;
  pr::ProtocolConfig config;
  config.p = a.p;
  config.max_copies = a.max_copies;
  config.seed = seed;
  config.sigma_first_pair = a.first_pair == "ab"   ? pr::FirstPair::kAliceBob
                            : a.first_pair == "bc" ? pr::FirstPair::kBobCharlie
                                                   : pr::FirstPair::kSampled;
  if (!a.phi_prime.empty()) config.sigma_resource = parse_amplitudes(a.phi_prime, PartyDims{2, 2}, "--phi-prime");
  o.config = Json{{"p", a.p},
                  {"max_copies", a.max_copies},
                  {"first_pair", a.first_pair},
                  {"phi_prime", config.sigma_resource ? io::to_json(*config.sigma_resource) : Json(nullptr)},
                  {"shots", a.shots}};
  Rng rng(seed);
  o.result = with_monte_carlo(io::to_json(pr::run_sigma_adaptive(config, rng)), "sigma", config, a.shots, seed,
                              threads);
  return o;
}

struct ScanArgs {
  std::vector<double> p_list{0.1, 0.3, 0.5, 0.7};
  int n_max = 20;
  std::uint64_t shots = 100000;
  std::string format = "csv";
};

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Output cmd_sigma_scan(const ScanArgs& a, std::uint64_t seed, unsigned threads) {
  Output o;
  o.config = Json{{"p_list", a.p_list}, {"n_max", a.n_max}, {"shots", a.shots}, {"format", a.format}};
  o.manifest_notes.push_back("first copy conditioned on the A-B outcome");
  if (a.shots < 1) throw std::invalid_argument("--shots must be at least 1");
  const auto rows = pr::sigma_scan(a.p_list, a.n_max, a.shots, seed, threads);
  Json table = Json::array();
  std::string csv = "p,n,analytic,empirical,abs_error\n";
  double max_error = 0.0;
  for (const auto& r : rows) {
    table.push_back(Json{{"p", r.p}, {"n", r.n}, {"analytic", r.analytic}, {"empirical", r.empirical},
                         {"abs_error", r.abs_error}});
    csv += csv_number(r.p) + "," + std::to_string(r.n) + "," + csv_number(r.analytic) + "," +
           csv_number(r.empirical) + "," + csv_number(r.abs_error) + "\n";
    max_error = std::max(max_error, r.abs_error);
  }
  o.result = Json{{"rows", std::move(table)}, {"max_abs_error", max_error}};
  if (a.format == "csv") o.csv = std::move(csv);
  return o;
}

Output cmd_certify(const BuiltinArgs& b, const std::string& path) {
  Output o;
  const auto state = resolve_state(b, path, "ghz", o);
  Json result{{"state", state_json(state)}};
  if (const auto* pure = std::get_if<PureState>(&state)) {
    const auto cert = ent::certify_gme_pure(*pure);
    result["report"] = io::to_json(cert.report);
    result["is_gme"] = cert.is_gme;
  } else {
    result["report"] = io::to_json(ent::certify_entangled_all_cuts(std::get<DensityOperator>(state)));
    result["is_gme"] = nullptr;
  }
  o.result = std::move(result);
  return o;
}

Output cmd_svetlichny(const BuiltinArgs& b, const std::string& path, const std::vector<double>& settings) {
  Output o;
  const auto state = require_pure(resolve_state(b, path, "ghz", o), "svetlichny");
  std::array<double, 6> angles = ent::ghz_optimal_angles();
  if (settings.empty()) {
    o.manifest_notes.push_back("settings defaulted to the GHZ-optimal equatorial angles");
  } else if (settings.size() != 6) {
    throw std::invalid_argument("--settings needs six angles a,a',b,b',c,c'");
  } else {
    std::copy(settings.begin(), settings.end(), angles.begin());
  }
  o.config["settings"] = angles;
  const double value = ent::svetlichny_value(state, ent::equatorial_settings(angles));
  o.result = Json{{"state", io::to_json(state)},
                  {"value", value},
                  {"classical_bound", ent::kSvetlichnyClassicalBound},
                  {"quantum_bound", ent::kSvetlichnyQuantumBound},
                  {"exceeds_classical", std::abs(value) > ent::kSvetlichnyClassicalBound + kStructuralTol}};
  return o;
}

Output cmd_distill(double p, const std::string& path, int rounds) {
  Output o;
  std::optional<DensityOperator> rho;
  o.config["rounds"] = rounds;
  if (!path.empty()) {
    o.config["state_file"] = path;
    const auto loaded = io::load_state_file(path);
    rho = std::holds_alternative<PureState>(loaded) ? DensityOperator::from_pure(std::get<PureState>(loaded))
                                                    : std::get<DensityOperator>(loaded);
  } else {
    o.config["builtin"] = "prop1-residual";
    o.config["p"] = p;
    const auto branches = pr::run_prop1_step(pr::build_prop1_example(p), basis_ket(PartyDims{2}, {0}), 2);
    rho = *branches.at(0).reduced_state;
  }
  if (!(rho->dims() == PartyDims{2, 2})) throw std::invalid_argument("distill needs a two-qubit state");
  const std::array<std::size_t, 1> left{0};
  o.result = Json{{"input_fidelity", distill::bell_fidelity(*rho)},
                  {"input_negativity", ent::negativity_over(*rho, left)},
                  {"pipeline", io::to_json(distill::distill_pipeline(*rho, rounds))}};
  return o;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot write '" + path + "'");
  file << text;
  if (!file) throw std::invalid_argument("failed writing '" + path + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and certify GME activation protocols", "gme"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GME_VERSION);

  Common common;
  Prop1Args prop1;
  ChainArgs prop2, prop3;
  SigmaArgs sigma;
  ScanArgs scan;
  BuiltinArgs certify_b, svet_b;
  std::string certify_path, svet_path, distill_path;
  std::vector<double> settings;
  double distill_p = 0.5;
  int distill_rounds = 3;

  auto* s_prop1 = app.add_subcommand("prop1", "Three-qubit rank-2 family: measurement step and distillation");
  add_common(s_prop1, common, true);
  s_prop1->add_option("--p", prop1.p, "Mixing weight")->capture_default_str();
  s_prop1->add_option("--rounds", prop1.rounds, "Recurrence rounds")->capture_default_str();
  s_prop1->add_option("--charlie-outcome", prop1.charlie_outcome, "Charlie outcome to follow (0 or 1)")
      ->capture_default_str();
  s_prop1->add_option("--Phi", prop1.big_phi, "A-B pair amplitudes re[:im]")->delimiter(',');
  s_prop1->add_option("--phi", prop1.small_phi, "Charlie's qubit amplitudes")->delimiter(',');
  s_prop1->add_option("--psi", prop1.small_psi, "Alice's qubit amplitudes")->delimiter(',');
  s_prop1->add_option("--Psi", prop1.big_psi, "B-C pair amplitudes")->delimiter(',');
  s_prop1->add_option("--shots", prop1.shots, "Monte Carlo shots (0 disables)")->capture_default_str();

  auto* s_prop2 = app.add_subcommand("prop2", "Two-copy three-qutrit activation");
  add_common(s_prop2, common, true);
  s_prop2->add_option("--p", prop2.p, "Mixing weight")->capture_default_str();
  s_prop2->add_option("--schmidt", prop2.schmidt, "Three Schmidt coefficients")->delimiter(',');
  s_prop2->add_option("--shots", prop2.shots, "Monte Carlo shots (0 disables)")->capture_default_str();

  auto* s_prop3 = app.add_subcommand("prop3", "Three-copy four-party activation");
  add_common(s_prop3, common, true);
  s_prop3->add_option("--weights", prop3.weights, "Mixing weights p1,p2,p3")->delimiter(',');
  s_prop3->add_option("--schmidt", prop3.schmidt, "Four Schmidt coefficients")->delimiter(',');
  s_prop3->add_option("--shots", prop3.shots, "Monte Carlo shots (0 disables)")->capture_default_str();

  auto* s_sigma = app.add_subcommand("sigma", "Adaptive protocol on sigma (or sigma')");
  add_common(s_sigma, common, true);
  s_sigma->add_option("--p", sigma.p, "Mixing weight")->capture_default_str();
  s_sigma->add_option("--max-copies", sigma.max_copies, "Copy budget including the first copy")
      ->capture_default_str();
  s_sigma->add_option("--first-pair", sigma.first_pair, "First-copy outcome")
      ->check(CLI::IsMember({"sampled", "ab", "bc"}))
      ->capture_default_str();
  s_sigma->add_option("--phi-prime", sigma.phi_prime, "Non-maximal pair amplitudes re[:im]")->delimiter(',');
  s_sigma->add_option("--shots", sigma.shots, "Monte Carlo shots (0 disables)")->capture_default_str();

  auto* s_scan = app.add_subcommand("sigma-scan", "Success law of the repeat phase versus copies");
  add_common(s_scan, common, true);
  s_scan->add_option("--p-list", scan.p_list, "Comma-separated p values")->delimiter(',');
  s_scan->add_option("--n-max", scan.n_max, "Largest repeat count")->capture_default_str();
  s_scan->add_option("--shots", scan.shots, "Shots per p value")->capture_default_str();
  s_scan->add_option("--format", scan.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  const std::vector<std::string> certify_names{"ghz",   "product", "merged", "prop1",
                                               "prop2", "prop3",   "sigma",  "sigma-prime"};
  auto* s_certify = app.add_subcommand("certify", "Negativity and Schmidt data across every bipartition");
  add_common(s_certify, common, false);
  add_builtin_options(s_certify, certify_b, certify_path, certify_names);

  auto* s_svet = app.add_subcommand("svetlichny", "Svetlichny value of a three-qubit pure state");
  add_common(s_svet, common, false);
  add_builtin_options(s_svet, svet_b, svet_path, {"ghz", "product", "merged"});
  s_svet->add_option("--settings", settings, "Equatorial angles a,a',b,b',c,c' in radians")->delimiter(',');

  auto* s_distill = app.add_subcommand("distill", "Filter, twirl and recurrence rounds on a two-qubit state");
  add_common(s_distill, common, false);
  s_distill->add_option("--state", distill_path, "JSON two-qubit state file");
  s_distill->add_option("--p", distill_p, "Mixing weight of the built-in residual")->capture_default_str();
  s_distill->add_option("--rounds", distill_rounds, "Recurrence rounds")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    const bool seeded = name != "certify" && name != "svetlichny" && name != "distill";
    std::optional<ResolvedSeed> seed;
    if (seeded) seed = resolve_seed(common);
    const std::uint64_t s = seed ? seed->value : 0;

    Output o;
    if (name == "prop1") o = cmd_prop1(prop1, s, common.threads);
    else if (name == "prop2") o = cmd_prop2(prop2, s, common.threads);
    else if (name == "prop3") o = cmd_prop3(prop3, s, common.threads);
    else if (name == "sigma") o = cmd_sigma(sigma, s, common.threads);
    else if (name == "sigma-scan") o = cmd_sigma_scan(scan, s, common.threads);
    else if (name == "certify") o = cmd_certify(certify_b, certify_path);
    else if (name == "svetlichny") o = cmd_svetlichny(svet_b, svet_path, settings);
    else o = cmd_distill(distill_p, distill_path, distill_rounds);

    const Json m = manifest(name, o, seed, common.stamp);
    if (o.csv) {
      emit(*o.csv, common.out, out);
      // CSV stays a bare table; the manifest travels next to it.
      const Json sidecar{{"schema_version", io::kSchemaVersion}, {"manifest", m}};
      if (common.out.empty()) err << io::dump(sidecar);
      else emit(io::dump(sidecar), common.out + ".manifest.json", out);
    } else {
      const Json doc{{"schema_version", io::kSchemaVersion}, {"manifest", m}, {"result", o.result}};
      emit(io::dump(doc), common.out, out);
    }
    return kExitOk;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace gme::cli
