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

#include "blindspot/discretion.hpp"

#include <numeric>

namespace blindspot {

const char* to_string(Category c) {
  switch (c) {
    case Category::consensus: return "consensus";
    case Category::conflict: return "conflict";
    case Category::indifference: return "indifference";
  }
  return "?";
}

Rational Rational::of(long long num, long long den) {
  if (den == 0) throw ValidationError("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

namespace {

struct VerdictTally {
  bool any_a = false;
  bool any_b = false;
  bool any_expressed = false;
};

VerdictTally tally(const PreferencePair& pair, const std::vector<PrincipleJudge>& judges) {
  VerdictTally t;
  for (const PrincipleJudge& judge : judges) {
    switch (judge.verdict(pair)) {
      case Verdict::prefers_a:
        t.any_a = true;
        t.any_expressed = true;
        break;
      case Verdict::prefers_b:
        t.any_b = true;
        t.any_expressed = true;
        break;
      case Verdict::no_preference:
        break;
    }
  }
  return t;
}

}  // namespace

Category classify_pair(const PreferencePair& pair, const std::vector<PrincipleJudge>& judges) {
  if (judges.empty()) throw ValidationError("classify_pair: empty judge list");
  const VerdictTally t = tally(pair, judges);
  if (t.any_a && t.any_b) return Category::conflict;
  if (!t.any_expressed) return Category::indifference;
  // All expressed preferences agree and at least one exists; abstentions do
  // not block consensus.
  return Category::consensus;
}

SupremacyMatrix supremacy_matrix(const std::vector<PreferencePair>& pairs,
                                 const std::vector<PrincipleJudge>& judges) {
  if (judges.size() < 2) throw ValidationError("supremacy_matrix: need at least 2 judges");

  const std::size_t n = judges.size();
  SupremacyMatrix m;
  m.judge_names.reserve(n);
  for (const PrincipleJudge& j : judges) m.judge_names.push_back(j.name);
  std::vector<std::vector<long long>> wins(n, std::vector<long long>(n, 0));
  std::vector<std::vector<long long>> conflicts(n, std::vector<long long>(n, 0));

  std::vector<Verdict> verdicts(n);
  for (const PreferencePair& pair : pairs) {
    for (std::size_t i = 0; i < n; ++i) verdicts[i] = judges[i].verdict(pair);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool i_a = verdicts[i] == Verdict::prefers_a;
        const bool j_a = verdicts[j] == Verdict::prefers_a;
        const bool i_b = verdicts[i] == Verdict::prefers_b;
        const bool j_b = verdicts[j] == Verdict::prefers_b;
        if (!((i_a && j_b) || (i_b && j_a))) continue;  // not a pairwise conflict
        ++conflicts[i][j];
        ++conflicts[j][i];
        const bool chosen_a = pair.chosen == ChosenSide::a;
        const bool i_wins = (i_a && chosen_a) || (i_b && !chosen_a);
        if (i_wins)
          ++wins[i][j];
        else
          ++wins[j][i];
      }
    }
  }

  m.rates.assign(n, std::vector<std::optional<Rational>>(n));
  m.conflict_counts.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.conflict_counts[i][j] = static_cast<std::size_t>(conflicts[i][j]);
      if (i != j && conflicts[i][j] > 0)
        m.rates[i][j] = Rational::of(wins[i][j], conflicts[i][j]);
    }
  }
  return m;
}

std::optional<Rational> arbitrariness_rate(const std::vector<PreferencePair>& pairs,
                                           const std::vector<PrincipleJudge>& judges) {
  if (judges.empty()) throw ValidationError("arbitrariness_rate: empty judge list");
  long long consensus_pairs = 0;
  long long contradicted = 0;
  for (const PreferencePair& pair : pairs) {
    const VerdictTally t = tally(pair, judges);
    if (t.any_a && t.any_b) continue;   // conflict
    if (!t.any_expressed) continue;     // indifference
    ++consensus_pairs;
    const ChosenSide consensus_side = t.any_a ? ChosenSide::a : ChosenSide::b;
    if (pair.chosen != consensus_side) ++contradicted;
  }
  if (consensus_pairs == 0) return std::nullopt;
  return Rational::of(contradicted, consensus_pairs);
}

CategorySummary category_summary(const std::vector<PreferencePair>& pairs,
                                 const std::vector<PrincipleJudge>& judges) {
  if (judges.empty()) throw ValidationError("category_summary: empty judge list");
  CategorySummary s;
  for (const PreferencePair& pair : pairs) {
    switch (classify_pair(pair, judges)) {
      case Category::consensus: ++s.consensus; break;
      case Category::conflict: ++s.conflict; break;
      case Category::indifference: ++s.indifference; break;
    }
  }
  s.total = pairs.size();
  return s;
}

namespace {

Rational rate_of(std::size_t count, std::size_t total) {
  if (total == 0) return Rational{0, 1};
  return Rational::of(static_cast<long long>(count), static_cast<long long>(total));
}

bool has_clarify_tag(const std::string& text) { return text.rfind("clarify:", 0) == 0; }

bool has_harm_flag(const std::string& text) { return text.find("[harm]") != std::string::npos; }

}  // namespace

Rational CategorySummary::consensus_rate() const { return rate_of(consensus, total); }
Rational CategorySummary::conflict_rate() const { return rate_of(conflict, total); }
Rational CategorySummary::indifference_rate() const { return rate_of(indifference, total); }

std::vector<PrincipleJudge> builtin_judges() {
  std::vector<PrincipleJudge> judges;
  judges.push_back({"concise", [](const PreferencePair& p) {
                      if (p.candidate_a.size() < p.candidate_b.size()) return Verdict::prefers_a;
                      if (p.candidate_b.size() < p.candidate_a.size()) return Verdict::prefers_b;
                      return Verdict::no_preference;
                    }});
  judges.push_back({"clarify_first", [](const PreferencePair& p) {
                      const bool a = has_clarify_tag(p.candidate_a);
                      const bool b = has_clarify_tag(p.candidate_b);
                      if (a == b) return Verdict::no_preference;
                      return a ? Verdict::prefers_a : Verdict::prefers_b;
                    }});
  judges.push_back({"avoid_harm", [](const PreferencePair& p) {
                      const bool a = has_harm_flag(p.candidate_a);
                      const bool b = has_harm_flag(p.candidate_b);
                      if (a == b) return Verdict::no_preference;
                      return a ? Verdict::prefers_b : Verdict::prefers_a;
                    }});
  return judges;
}

std::vector<PrincipleJudge> judges_by_name(const std::vector<std::string>& names) {
  if (names.empty()) throw ValidationError("judges_by_name: need at least one judge name");
  std::vector<PrincipleJudge> all = builtin_judges();
  std::vector<PrincipleJudge> selected;
  for (const std::string& name : names) {
    bool found = false;
    for (const PrincipleJudge& judge : all) {
      if (judge.name == name) {
        selected.push_back(judge);
        found = true;
        break;
      }
    }
    if (!found) {
      std::string available;
      for (const PrincipleJudge& judge : all) {
        if (!available.empty()) available += ", ";
        available += judge.name;
      }
      throw ValidationError("unknown judge '" + name + "'; available judges: " + available);
    }
  }
  return selected;
}

}  // namespace blindspot
