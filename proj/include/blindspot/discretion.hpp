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

#ifndef BLINDSPOT_DISCRETION_HPP
#define BLINDSPOT_DISCRETION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blindspot/measure.hpp"

namespace blindspot {

enum class ChosenSide { a, b };

/// One paired-preference record: a prompt, two distinct candidate responses,
/// and the side the final label picked.
struct PreferencePair {
  Label prompt;
  std::string candidate_a;
  std::string candidate_b;
  ChosenSide chosen = ChosenSide::a;
  std::optional<std::string> annotator_id;
  std::optional<std::string> id;  // stable record identifier, unique when present

  bool operator==(const PreferencePair&) const = default;
};

enum class Verdict { prefers_a, prefers_b, no_preference };

/// A deterministic rule evaluating which candidate a principle favors.
/// no_preference means the principle is not decisively relevant to the pair;
/// relevance is entirely the judge's own abstention convention.
struct PrincipleJudge {
  std::string name;
  std::function<Verdict(const PreferencePair&)> verdict;
};

/// Partition of pairs by how the judge set relates to them:
/// consensus   - at least one expressed preference and all expressed
///               preferences agree,
/// conflict    - some judge prefers a while another prefers b,
/// indifference- every judge abstains.
enum class Category { consensus, conflict, indifference };

const char* to_string(Category c);

/// Exact rational rate; keeps partition identities free of float noise.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long num, long long den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Category classify_pair(const PreferencePair& pair, const std::vector<PrincipleJudge>& judges);

/// Pairwise principle supremacy. Entry (i, j) is the fraction of pairs on
/// which judges i and j disagree whose final label sides with judge i;
/// entries with no conflicts (including the diagonal) are undefined.
/// Defined entries satisfy (i, j) + (j, i) = 1 exactly.
struct SupremacyMatrix {
  std::vector<std::string> judge_names;
  std::vector<std::vector<std::optional<Rational>>> rates;
  std::vector<std::vector<std::size_t>> conflict_counts;
};

SupremacyMatrix supremacy_matrix(const std::vector<PreferencePair>& pairs,
                                 const std::vector<PrincipleJudge>& judges);

/// Among consensus pairs, the fraction whose final label contradicts the
/// consensus preference. Undefined when no pair reaches consensus.
std::optional<Rational> arbitrariness_rate(const std::vector<PreferencePair>& pairs,
                                           const std::vector<PrincipleJudge>& judges);

struct CategorySummary {
  std::size_t consensus = 0;
  std::size_t conflict = 0;
  std::size_t indifference = 0;
  std::size_t total = 0;

  Rational consensus_rate() const;
  Rational conflict_rate() const;
  Rational indifference_rate() const;
};

CategorySummary category_summary(const std::vector<PreferencePair>& pairs,
                                 const std::vector<PrincipleJudge>& judges);

/// The built-in rule judges, in their canonical order:
///   concise       - prefers the strictly shorter candidate text
///   clarify_first - prefers the candidate tagged "clarify:" when exactly one is
///   avoid_harm    - disprefers the candidate flagged "[harm]" when exactly one is
/// All three abstain when their feature does not separate the candidates.
std::vector<PrincipleJudge> builtin_judges();

/// Look up built-in judges by name; unknown names raise ValidationError
/// listing the available judges.
std::vector<PrincipleJudge> judges_by_name(const std::vector<std::string>& names);

}  // namespace blindspot

#endif  // BLINDSPOT_DISCRETION_HPP
