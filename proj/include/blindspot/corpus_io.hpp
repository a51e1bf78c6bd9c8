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

#ifndef BLINDSPOT_CORPUS_IO_HPP
#define BLINDSPOT_CORPUS_IO_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blindspot/discretion.hpp"
#include "blindspot/estimation.hpp"
#include "blindspot/measure.hpp"
#include "blindspot/risk.hpp"
#include "blindspot/scenario.hpp"

namespace blindspot {

// All file formats are UTF-8 JSON Lines: one JSON object per line, LF
// terminated. Serializers emit keys in a fixed order and numbers in shortest
// round-trip decimal form, so serialize(parse(text)) is byte-stable.
//
//   corpus       {"prompt","candidate_a","candidate_b","chosen"}
//                plus optional "annotator_id" and "id", in that key order
//   distribution {"label","weight"}, in support order
//   kernel       {"prompt","response","weight"}, rows grouped by prompt
//   joint        header {"regime"}, then marginal lines, then kernel lines
//   loss         header {"lower","upper"}, then {"prompt","response","value"}
//   samples      header {"regime","seed"}, then {"prompt","response"}
//   trajectories {"trajectory","turn","prompt","response"}

/// A parsed paired-preference corpus with a prompt index for kernel
/// construction diagnostics. record_lines[i] is the 1-based source line of
/// records[i] (i + 1 for programmatically built corpora).
struct PreferenceCorpus {
  std::vector<PreferencePair> records;
  std::map<Label, std::vector<std::size_t>> prompt_index;
  std::vector<std::size_t> record_lines;
  std::string source_name;
  std::string version;
};

PreferenceCorpus parse_corpus(std::istream& in, const std::string& source_name = "");
PreferenceCorpus parse_corpus_text(const std::string& text, const std::string& source_name = "");
std::string serialize_corpus(const PreferenceCorpus& corpus);

/// How a corpus of discrete pairs induces response probabilities: score both
/// completions of every pair (the default), or only the chosen ones.
enum class CorpusMode { both_candidates, chosen_only };

const char* to_string(CorpusMode m);

/// The off-policy joint induced by a corpus: prompt marginal exactly `rho`,
/// response kernel the empirical distribution over candidate responses at
/// each prompt (duplicate candidate text accumulates weight). Every prompt
/// in rho's support must have corpus records; corpus prompts outside rho are
/// ignored with a warning (rho defines the audit population).
JointLaw corpus_to_offpolicy(const PreferenceCorpus& corpus, const Distribution& rho,
                             CorpusMode mode, std::vector<std::string>* warnings = nullptr);

/// Result of validating the equal-prompt-marginal assumption. Failures are
/// results, not exceptions: every offending prompt is listed with both
/// weights (or absence).
struct MarginalCheck {
  struct Issue {
    Label prompt;
    std::optional<double> p_weight;
    std::optional<double> q_weight;
  };
  bool passed = false;
  std::vector<Issue> issues;

  std::string describe() const;
};

MarginalCheck check_equal_marginal(const JointLaw& p, const JointLaw& q, double tol);

// Line-format loaders and serializers. Loaders throw IoError for unreadable
// paths and ValidationError (with line numbers) for malformed content.

Distribution load_distribution(const std::string& path);
std::string serialize_distribution(const Distribution& d);

Kernel load_kernel(const std::string& path);
std::string serialize_kernel(const Kernel& k);

BoundedLoss load_loss(const std::string& path);
std::string serialize_loss(const BoundedLoss& loss);

PreferenceCorpus load_corpus(const std::string& path);

JointLaw parse_joint_text(const std::string& text);
std::string serialize_joint(const JointLaw& j);

SampleSet parse_samples_text(const std::string& text);
std::string serialize_samples(const SampleSet& s);

std::vector<Trajectory> parse_trajectories_text(const std::string& text);
std::string serialize_trajectories(const std::vector<Trajectory>& trajectories);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace blindspot

#endif  // BLINDSPOT_CORPUS_IO_HPP
