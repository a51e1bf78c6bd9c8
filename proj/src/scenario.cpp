// Copyright 2026 The blindspot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "blindspot/scenario.hpp"

#include <cmath>

#include "blindspot/rng.hpp"

namespace blindspot {

namespace {

const std::vector<Label>& mode_labels() {
  static const std::vector<Label> labels = {"clarify", "direct_answer", "refuse",
                                            "constrained_alternative"};
  return labels;
}

}  // namespace

const Label& label_for(BehaviorMode mode) {
  return mode_labels()[static_cast<std::size_t>(mode)];
}

BehaviorMode mode_from_label(const Label& label) {
  const std::vector<Label>& labels = mode_labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<BehaviorMode>(i);
  throw ValidationError("unknown behavior mode label '" + label + "'");
}

void ScenarioConfig::validate() const {
  if (prompt_count < 1) throw ValidationError("scenario: prompt_count must be at least 1");
  if (ambiguity_flags.size() != prompt_count)
    throw ValidationError("scenario: ambiguity_flags must cover every prompt exactly once");
  for (const ModeProbabilities* probs : {&ambiguous_modes, &unambiguous_modes}) {
    double total = 0.0;
    for (double p : probs->probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ValidationError("scenario: mode probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > kInputTolerance)
      throw ValidationError("scenario: mode probabilities must sum to 1 within 1e-9");
  }
}

Kernel interpretive_policy(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<Label, Distribution>> rows;
  rows.reserve(cfg.prompt_count);
  for (const auto& [prompt, ambiguous] : cfg.ambiguity_flags) {
    const ModeProbabilities& probs = ambiguous ? cfg.ambiguous_modes : cfg.unambiguous_modes;
    rows.emplace_back(prompt,
                      Distribution::make(mode_labels(),
                                         {probs.probs.begin(), probs.probs.end()},
                                         NormalizationPolicy::renormalize));
  }
  return Kernel::make(mode_labels(), std::move(rows));
}

Kernel corpus_kernel_variant(const Kernel& k, const Suppression& suppression) {
  for (double s : suppression)
    if (!(s >= 0.0 && s <= 1.0))
      throw ValidationError("corpus_kernel_variant: suppression factors must lie in [0, 1]");

  std::vector<std::pair<Label, Distribution>> rows;
  rows.reserve(k.row_count());
  for (const Label& x : k.prompts()) {
    const Distribution& row = k.row(x);
    std::vector<double> weights(row.weights());
    double total = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const BehaviorMode mode = mode_from_label(row.support()[i]);
      const double factor = 1.0 - suppression[static_cast<std::size_t>(mode)];
      if (factor != 1.0 && weights[i] != 0.0) {
        weights[i] *= factor;
        changed = true;
      }
      total += weights[i];
    }
    if (total <= 0.0)
      throw ValidationError("corpus_kernel_variant: suppression removes all mass at prompt '" +
                            x + "'");
    // Rows suppression does not touch are reused bit-for-bit.
    if (!changed) {
      rows.emplace_back(x, row);
      continue;
    }
    rows.emplace_back(x, Distribution::make(row.support(), std::move(weights),
                                            NormalizationPolicy::renormalize));
  }
  return Kernel::make(k.alphabet(), std::move(rows));
}

namespace {

BoundedLoss demo_loss_table(const ScenarioConfig& cfg, const DemoLossSpec& spec,
                            const std::vector<Label>& prompts) {
  if (spec.penalized_modes.empty())
    throw ValidationError("demo: loss spec must penalize at least one mode");
  if (!(spec.l_max > 0.0)) throw ValidationError("demo: l_max must be positive");

  std::array<bool, kBehaviorModeCount> penalized{};
  for (BehaviorMode m : spec.penalized_modes) penalized[static_cast<std::size_t>(m)] = true;

  std::vector<double> values;
  values.reserve(prompts.size() * kBehaviorModeCount);
  for (const Label& x : prompts) {
    const bool applies = !spec.ambiguous_only || cfg.ambiguity_flags.at(x);
    for (std::size_t m = 0; m < kBehaviorModeCount; ++m)
      values.push_back(applies && penalized[m] ? spec.l_max : 0.0);
  }
  return BoundedLoss::make(prompts, mode_labels(), std::move(values), 0.0, spec.l_max);
}

double penalized_mass(const JointLaw& j, const BoundedLoss& loss) {
  // Joint mass on the cells the loss penalizes; equals risk / l_max for an
  // indicator-style loss but is reported in mass units for the narrative.
  double mass = 0.0;
  for (const Label& x : j.prompt_support())
    for (const Label& y : j.response_alphabet())
      if (loss.value(x, y) > 0.0) mass += j.mass(x, y);
  return mass;
}

}  // namespace

DemoReport blind_spot_demo(const ScenarioConfig& cfg, const Suppression& suppression,
                           const DemoLossSpec& loss_spec) {
  cfg.validate();

  const Kernel policy = interpretive_policy(cfg);
  const Kernel corpus = corpus_kernel_variant(policy, suppression);

  std::vector<Label> prompts;
  prompts.reserve(cfg.prompt_count);
  for (const auto& [prompt, _] : cfg.ambiguity_flags) prompts.push_back(prompt);
  const Distribution rho = Distribution::make(
      prompts, std::vector<double>(prompts.size(), 1.0), NormalizationPolicy::renormalize);

  const JointLaw p = joint(rho, policy, Regime::on_policy);
  const JointLaw q = joint(rho, corpus, Regime::off_policy);
  const BoundedLoss loss = demo_loss_table(cfg, loss_spec, prompts);

  DemoReport demo;
  demo.report = audit(p, q, loss);
  demo.config = cfg;
  demo.suppression = suppression;
  demo.loss_spec = loss_spec;
  demo.on_policy_penalized_mass = penalized_mass(p, loss);
  demo.off_policy_penalized_mass = penalized_mass(q, loss);
  demo.signed_witness_gap =
      blind_spot_gap(p, q, witness_loss(p, q, loss_spec.l_max, LossClass::signed_sup_norm));
  demo.nonnegative_witness_gap =
      blind_spot_gap(p, q, witness_loss(p, q, loss_spec.l_max, LossClass::nonnegative));
  demo.headline_met =
      demo.report.r_gen - demo.report.r_disc >= demo.headline_threshold * loss_spec.l_max;
  demo.off_policy_risk_low =
      demo.report.r_disc <= demo.off_policy_low_threshold * loss_spec.l_max;
  return demo;
}

ScenarioConfig default_demo_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.prompt_count = 4;
  cfg.seed = seed;
  // A model that usually answers ambiguous prompts directly instead of
  // clarifying; plain prompts it mostly just answers.
  cfg.ambiguous_modes[BehaviorMode::clarify] = 0.25;
  cfg.ambiguous_modes[BehaviorMode::direct_answer] = 0.60;
  cfg.ambiguous_modes[BehaviorMode::refuse] = 0.10;
  cfg.ambiguous_modes[BehaviorMode::constrained_alternative] = 0.05;
  cfg.unambiguous_modes[BehaviorMode::clarify] = 0.05;
  cfg.unambiguous_modes[BehaviorMode::direct_answer] = 0.85;
  cfg.unambiguous_modes[BehaviorMode::refuse] = 0.05;
  cfg.unambiguous_modes[BehaviorMode::constrained_alternative] = 0.05;
  cfg.ambiguity_flags = {{"ambiguous_1", true},
                         {"ambiguous_2", true},
                         {"plain_1", false},
                         {"plain_2", false}};
  return cfg;
}

Suppression default_demo_suppression(double factor) {
  Suppression s{};
  s[static_cast<std::size_t>(BehaviorMode::direct_answer)] = factor;
  return s;
}

DemoLossSpec default_demo_loss() {
  DemoLossSpec spec;
  spec.penalized_modes = {BehaviorMode::direct_answer};
  spec.ambiguous_only = true;
  spec.l_max = 1.0;
  return spec;
}

std::vector<Trajectory> multiturn_rollout(const Distribution& initial_prompts, const Kernel& k,
                                          std::size_t turns, const ContextMap& context_map,
                                          std::size_t trajectories, std::uint64_t seed) {
  if (turns < 1) throw ValidationError("multiturn_rollout: turns must be at least 1");
  if (trajectories < 1) throw ValidationError("multiturn_rollout: need at least one trajectory");

  std::vector<Trajectory> result;
  result.reserve(trajectories);
  for (std::size_t t = 0; t < trajectories; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, t);
    Trajectory trajectory;
    trajectory.reserve(turns);

    auto draw = [&rng](const Distribution& d) {
      const double u = rng.next_double();
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        acc += d.weights()[i];
        if (u < acc) return d.support()[i];
      }
      return d.support()[d.size() - 1];
    };

    Label prompt = draw(initial_prompts);
    for (std::size_t turn = 0; turn < turns; ++turn) {
      const Label response = draw(k.row(prompt));
      trajectory.push_back({prompt, response});
      if (turn + 1 < turns) {
        auto next = context_map.find({prompt, response});
        if (next == context_map.end())
          throw ValidationError("multiturn_rollout: context map has no transition for ('" +
                                prompt + "', '" + response + "')");
        prompt = next->second;
      }
    }
    result.push_back(std::move(trajectory));
  }
  return result;
}

SampleSet turn_samples(const std::vector<Trajectory>& trajectories, std::size_t turn,
                       Regime regime, std::uint64_t seed) {
  SampleSet s;
  s.seed = seed;
  s.source_regime = regime;
  s.records.reserve(trajectories.size());
  for (const Trajectory& trajectory : trajectories) {
    if (turn >= trajectory.size())
      throw ValidationError("turn_samples: trajectory has no turn " + std::to_string(turn));
    s.records.emplace_back(trajectory[turn].prompt, trajectory[turn].response);
  }
  return s;
}

}  // namespace blindspot
