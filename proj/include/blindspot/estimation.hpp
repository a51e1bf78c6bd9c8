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

#ifndef BLINDSPOT_ESTIMATION_HPP
#define BLINDSPOT_ESTIMATION_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "blindspot/measure.hpp"
#include "blindspot/risk.hpp"

namespace blindspot {

/// Records drawn from a joint law, with the seed that produced them.
struct SampleSet {
  std::vector<std::pair<Label, Label>> records;  // (prompt, response)
  std::uint64_t seed = 0;
  Regime source_regime = Regime::on_policy;
};

/// A point estimate with a confidence interval. ci_low <= value <= ci_high.
struct Estimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  double confidence = 0.0;
};

/// n i.i.d. draws from a joint law. Record i is generated from substream i of
/// `seed` (prompt draw first, then response), so output is deterministic in
/// (j, n, seed) and records are independent of each other's order.
SampleSet sample_joint(const JointLaw& j, std::size_t n, std::uint64_t seed);

/// Sample-mean risk with a Hoeffding interval: half-width
/// (upper - lower) * sqrt(ln(2 / (1 - confidence)) / (2n)). Valid at every n
/// for losses respecting their declared bounds; kept unclamped so the
/// half-width scales exactly as 1/sqrt(n).
Estimate mc_risk(const SampleSet& s, const BoundedLoss& loss, double confidence);

enum class MissingPromptPolicy {
  drop,   // prompts with no observations are omitted from the kernel
  error,  // any unobserved prompt from the alphabet is an error
};

/// Empirical conditional response frequencies per observed prompt.
Kernel empirical_kernel(const SampleSet& s, const std::vector<Label>& prompt_alphabet,
                        const std::vector<Label>& response_alphabet,
                        MissingPromptPolicy policy = MissingPromptPolicy::drop);

struct BootstrapOptions {
  std::size_t resamples = 1000;  // 0 skips the interval (point estimate only)
  double confidence = 0.95;
  /// Bootstrap substream seed; defaults to mixing the two sample-set seeds.
  std::optional<std::uint64_t> seed;
};

/// Plug-in total variation: half-L1 between the empirical joint frequencies
/// of the two sample sets, with a percentile-bootstrap interval. The plug-in
/// value is biased upward at small n (it never underestimates sampling
/// noise); this is reported rather than corrected, and the note travels with
/// CLI reports.
Estimate plug_in_tv(const SampleSet& sp, const SampleSet& sq,
                    const BootstrapOptions& options = {});

}  // namespace blindspot

#endif  // BLINDSPOT_ESTIMATION_HPP
