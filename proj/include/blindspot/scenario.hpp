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

#ifndef BLINDSPOT_SCENARIO_HPP
#define BLINDSPOT_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blindspot/estimation.hpp"
#include "blindspot/measure.hpp"
#include "blindspot/risk.hpp"

namespace blindspot {

/// The response categories through which a model's interpretive choices
/// become observable. Each response label of a scenario kernel carries
/// exactly one mode.
enum class BehaviorMode : std::size_t {
  clarify = 0,
  direct_answer = 1,
  refuse = 2,
  constrained_alternative = 3,
};

inline constexpr std::size_t kBehaviorModeCount = 4;

const Label& label_for(BehaviorMode mode);
BehaviorMode mode_from_label(const Label& label);

/// One probability per behavior mode; must sum to 1 within 1e-9.
struct ModeProbabilities {
  std::array<double, kBehaviorModeCount> probs{};

  double& operator[](BehaviorMode m) { return probs[static_cast<std::size_t>(m)]; }
  double operator[](BehaviorMode m) const { return probs[static_cast<std::size_t>(m)]; }
};

/// Per-mode corpus suppression factors in [0, 1]; 1 removes the mode.
using Suppression = std::array<double, kBehaviorModeCount>;

/// A synthetic interpretive policy: prompts split into an ambiguous and an
/// unambiguous class, each with its own mode distribution.
struct ScenarioConfig {
  std::size_t prompt_count = 0;
  ModeProbabilities ambiguous_modes;
  ModeProbabilities unambiguous_modes;
  std::map<Label, bool> ambiguity_flags;  // one entry per prompt
  std::uint64_t seed = 0;

  void validate() const;
};

/// The kernel realizing a scenario config: response alphabet is the four
/// mode labels and each row reproduces its class's mode probabilities
/// exactly (construction, not sampling).
Kernel interpretive_policy(const ScenarioConfig& cfg);

/// A corpus-flavored variant of a kernel: each mode's mass is scaled by
/// (1 - suppression[mode]) and rows are renormalized. Models a corpus
/// construction process that under-represents certain behaviors. Suppressing
/// everything a row contains is an error.
Kernel corpus_kernel_variant(const Kernel& k, const Suppression& suppression);

/// Which behavior the demo's loss penalizes, and where.
struct DemoLossSpec {
  std::vector<BehaviorMode> penalized_modes;
  bool ambiguous_only = true;
  double l_max = 1.0;
};

/// A gap report plus the narrative that makes the blind spot legible.
struct DemoReport {
  GapReport report;
  ScenarioConfig config;
  Suppression suppression{};
  DemoLossSpec loss_spec;

  double on_policy_penalized_mass = 0.0;   // joint mass the loss actually hits
  double off_policy_penalized_mass = 0.0;  // same mass as the corpus sees it
  double signed_witness_gap = 0.0;
  double nonnegative_witness_gap = 0.0;

  // Headline thresholds are demo conventions, not derived constants.
  double headline_threshold = 0.25;  // required (r_gen - r_disc) / l_max
  double off_policy_low_threshold = 0.1;
  bool headline_met = false;
  bool off_policy_risk_low = false;
};

/// Builds rho (uniform over the config's prompts), the policy kernel, the
/// suppressed corpus kernel, and the penalizing loss, then audits the pair.
DemoReport blind_spot_demo(const ScenarioConfig& cfg, const Suppression& suppression,
                           const DemoLossSpec& loss_spec);

// The shipped demo: a model that usually answers ambiguous prompts directly
// instead of clarifying, audited against a corpus whose construction
// replaced every direct answer.
ScenarioConfig default_demo_config(std::uint64_t seed);
Suppression default_demo_suppression(double factor = 1.0);
DemoLossSpec default_demo_loss();

struct Turn {
  Label prompt;
  Label response;
  bool operator==(const Turn&) const = default;
};
using Trajectory = std::vector<Turn>;

/// Maps (prompt, sampled response) to the next turn's prompt.
using ContextMap = std::map<std::pair<Label, Label>, Label>;

/// Deterministic-context multi-turn rollouts: trajectory t uses substream t
/// of `seed`; turn k's prompt is context_map of turn k-1. With turns = 1 the
/// records coincide with sample_joint(joint(rho, k), n, seed). A transition
/// missing from the map is an error.
std::vector<Trajectory> multiturn_rollout(const Distribution& initial_prompts,
                                          const Kernel& k, std::size_t turns,
                                          const ContextMap& context_map,
                                          std::size_t trajectories, std::uint64_t seed);

/// The records of turn `turn` (0-based) across trajectories, as a SampleSet
/// ready for empirical_kernel / plug_in_tv.
SampleSet turn_samples(const std::vector<Trajectory>& trajectories, std::size_t turn,
                       Regime regime, std::uint64_t seed);

}  // namespace blindspot

#endif  // BLINDSPOT_SCENARIO_HPP
