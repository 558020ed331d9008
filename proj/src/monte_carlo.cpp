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

#include <algorithm>
#include <cmath>
#include <thread>

#include "protocol_support.hpp"

namespace gme::protocols {

namespace detail {

namespace {

class SequentialModel final : public ProtocolModel {
 public:
  explicit SequentialModel(const SequentialPlan& plan) : copies_on_success_(plan.copies_on_success) {
    double alive = 1.0;
    for (const auto& step : plan.steps) {
      const double acc = step.accept_probability();
      step_labels_.push_back(step.label);
      step_rates_.push_back(acc);
      probabilities_.push_back(step.probabilities());
      accepts_.push_back(step.accept);
      copies_.push_back(step.copy_index);
      branches_.push_back({"reject:" + step.label, alive * (1.0 - acc), false});
      exact_mean_copies_ += alive * (1.0 - acc) * step.copy_index;
      alive *= acc;
    }
    final_offset_ = branches_.size();
    final_probabilities_ = plan.final_probabilities;
    for (std::size_t i = 0; i < plan.final_labels.size(); ++i) {
      branches_.push_back({plan.final_labels[i], alive * plan.final_probabilities[i], plan.final_success[i]});
    }
    exact_mean_copies_ += alive * copies_on_success_;
  }

  Shot sample(Rng& rng, std::span<std::uint64_t> attempts, std::span<std::uint64_t> accepts) const override {
    for (std::size_t i = 0; i < probabilities_.size(); ++i) {
      ++attempts[i];
      if (rng.sample(probabilities_[i]) != accepts_[i]) return {i, copies_[i]};
      ++accepts[i];
    }
    return {final_offset_ + rng.sample(final_probabilities_), copies_on_success_};
  }

 private:
  std::vector<std::vector<double>> probabilities_;
  std::vector<std::size_t> accepts_;
  std::vector<int> copies_;
  std::vector<double> final_probabilities_;
  std::size_t final_offset_ = 0;
  int copies_on_success_ = 0;
};

class SigmaModel final : public ProtocolModel {
 public:
  SigmaModel(const SigmaPrepared& prep, const ProtocolConfig& config)
      : first_pair_(config.sigma_first_pair),
        first_probs_(prep.alice.probabilities()),
        charlie_probs_(prep.charlie.probabilities()),
        alice_probs_(prep.alice.probabilities()),
        budget_(config.max_copies - 1) {
    double f_ab = first_probs_[0];
    double f_bc = first_probs_[1];
    if (first_pair_ == FirstPair::kAliceBob) f_ab = 1.0, f_bc = 0.0;
    if (first_pair_ == FirstPair::kBobCharlie) f_ab = 0.0, f_bc = 1.0;
    const double q_ab = prep.charlie.accept_probability();
    const double q_bc = prep.alice.accept_probability();
    const double s_ab = 1.0 - std::pow(1.0 - q_ab, budget_);
    const double s_bc = 1.0 - std::pow(1.0 - q_bc, budget_);
    branches_ = {{"ab_first:success", f_ab * s_ab, true},
                 {"ab_first:exhausted", f_ab * (1.0 - s_ab), false},
                 {"bc_first:success", f_bc * s_bc, true},
                 {"bc_first:exhausted", f_bc * (1.0 - s_bc), false}};
    step_labels_ = {"copy1:A", "repeat:C", "repeat:A"};
    step_rates_ = {1.0, q_ab, q_bc};
    exact_mean_copies_ = 1.0 + f_ab * expected_repeats(q_ab, budget_) + f_bc * expected_repeats(q_bc, budget_);
  }

  Shot sample(Rng& rng, std::span<std::uint64_t> attempts, std::span<std::uint64_t> accepts) const override {
    std::size_t first = 0;
    if (first_pair_ == FirstPair::kBobCharlie) first = 1;
    if (first_pair_ == FirstPair::kSampled) first = rng.sample(first_probs_);
    ++attempts[0];
    ++accepts[0];
    const std::size_t step = first == 0 ? 1 : 2;
    const auto& probs = first == 0 ? charlie_probs_ : alice_probs_;
    for (int k = 1; k <= budget_; ++k) {
      ++attempts[step];
      if (rng.sample(probs) == 0) {
        ++accepts[step];
        return {2 * first, 1 + k};
      }
    }
    return {2 * first + 1, 1 + budget_};
  }

 private:
  FirstPair first_pair_;
  std::vector<double> first_probs_;
  std::vector<double> charlie_probs_;
  std::vector<double> alice_probs_;
  int budget_;
};

// Splits [0, shots) into contiguous chunks, one per thread.
template <typename Body>
void parallel_chunks(std::uint64_t shots, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, shots));
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (shots + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = t * chunk;
    const std::uint64_t end = std::min(shots, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, t, begin, end] { body(t, begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::unique_ptr<ProtocolModel> make_model(std::string_view protocol, const ProtocolConfig& config) {
  if (protocol == "prop1") return std::make_unique<SequentialModel>(prepare_prop1(config).plan);
  if (protocol == "prop2") return std::make_unique<SequentialModel>(prepare_prop2(config).plan);
  if (protocol == "prop3") return std::make_unique<SequentialModel>(prepare_prop3(config).plan);
  if (protocol == "sigma") return std::make_unique<SigmaModel>(prepare_sigma(config), config);
  throw std::invalid_argument("unknown protocol '" + std::string(protocol) + "'");
}

}  // namespace detail

MonteCarloSummary monte_carlo(std::string_view protocol, const ProtocolConfig& config, std::uint64_t shots,
                              std::uint64_t seed, unsigned threads) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  const auto model = detail::make_model(protocol, config);
  const std::size_t nb = model->branches().size();
  const std::size_t ns = model->step_labels().size();

  struct Counters {
    std::vector<std::uint64_t> branches, attempts, accepts;
    std::uint64_t copies = 0;
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Counters> per_thread(threads, Counters{std::vector<std::uint64_t>(nb), std::vector<std::uint64_t>(ns),
                                                     std::vector<std::uint64_t>(ns), 0});
  detail::parallel_chunks(shots, threads, [&](unsigned t, std::uint64_t begin, std::uint64_t end) {
    auto& c = per_thread[t];
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      auto rng = Rng::for_shot(seed, shot);
      const auto result = model->sample(rng, c.attempts, c.accepts);
      ++c.branches[result.branch];
      c.copies += static_cast<std::uint64_t>(result.copies);
    }
  });

  Counters total{std::vector<std::uint64_t>(nb), std::vector<std::uint64_t>(ns), std::vector<std::uint64_t>(ns), 0};
  for (const auto& c : per_thread) {
    for (std::size_t i = 0; i < nb; ++i) total.branches[i] += c.branches[i];
    for (std::size_t i = 0; i < ns; ++i) total.attempts[i] += c.attempts[i], total.accepts[i] += c.accepts[i];
    total.copies += c.copies;
  }

  MonteCarloSummary summary;
  summary.protocol = std::string(protocol);
  summary.shots = shots;
  summary.seed = seed;
  const double n = static_cast<double>(shots);
  std::uint64_t successes = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& b = model->branches()[i];
    summary.branches.push_back({b.label, total.branches[i], total.branches[i] / n, b.exact_probability});
    if (b.success) {
      successes += total.branches[i];
      summary.exact_success_rate += b.exact_probability;
    }
  }
  summary.success_rate = successes / n;
  summary.mean_copies = total.copies / n;
  summary.exact_mean_copies = model->exact_mean_copies();
  for (std::size_t i = 0; i < ns; ++i) {
    const double rate = total.attempts[i] > 0 ? static_cast<double>(total.accepts[i]) / total.attempts[i] : 0.0;
    summary.steps.push_back(
        {model->step_labels()[i], total.attempts[i], total.accepts[i], rate, model->exact_step_rates()[i]});
  }
  return summary;
}

std::vector<SigmaScanRow> sigma_scan(std::span<const double> p_values, int n_max, std::uint64_t shots,
                                     std::uint64_t seed, unsigned threads) {
  if (p_values.empty()) throw std::invalid_argument("sigma scan needs at least one p value");
  if (n_max < 1) throw std::invalid_argument("sigma scan needs n_max >= 1");
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<SigmaScanRow> rows;
  for (std::size_t j = 0; j < p_values.size(); ++j) {
    ProtocolConfig config;
    config.p = p_values[j];
    config.sigma_first_pair = FirstPair::kAliceBob;
    config.max_copies = n_max + 1;
    const auto charlie = detail::prepare_sigma(config).charlie.probabilities();
    const std::uint64_t run_seed = splitmix64(seed + 0x9E3779B97F4A7C15ULL * (j + 1));

    // hits[t][k]: shots of thread t whose missing pair appeared at repeat k.
    std::vector<std::vector<std::uint64_t>> hits(threads, std::vector<std::uint64_t>(n_max + 1));
    detail::parallel_chunks(shots, threads, [&](unsigned t, std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t shot = begin; shot < end; ++shot) {
        auto rng = Rng::for_shot(run_seed, shot);
        for (int k = 1; k <= n_max; ++k) {
          if (rng.sample(charlie) == 0) {
            ++hits[t][k];
            break;
          }
        }
      }
    });

    std::uint64_t cumulative = 0;
    for (int n = 0; n <= n_max; ++n) {
      for (const auto& h : hits) cumulative += h[n];
      const double empirical = static_cast<double>(cumulative) / shots;
      const double analytic = analytic_Pn(config.p, n);
      rows.push_back({config.p, n, analytic, empirical, std::abs(empirical - analytic)});
    }
  }
  return rows;
}

}  // namespace gme::protocols
