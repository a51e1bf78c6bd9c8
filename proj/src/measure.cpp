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

#include "blindspot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace blindspot {

const char* to_string(Regime r) {
  return r == Regime::on_policy ? "on_policy" : "off_policy";
}

Regime regime_from_string(const std::string& s) {
  if (s == "on_policy") return Regime::on_policy;
  if (s == "off_policy") return Regime::off_policy;
  throw ValidationError("unknown regime tag: '" + s + "'");
}

Distribution::Distribution(std::vector<Label> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  index_.reserve(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) index_.emplace(support_[i], i);
}

Distribution Distribution::make(std::vector<Label> labels, std::vector<double> weights,
                                NormalizationPolicy policy) {
  if (labels.size() != weights.size())
    throw ValidationError("distribution: " + std::to_string(labels.size()) + " labels but " +
                          std::to_string(weights.size()) + " weights");
  if (labels.empty()) throw ValidationError("distribution: empty support");

  std::unordered_set<Label> seen;
  for (const Label& l : labels) {
    if (l.empty()) throw ValidationError("distribution: empty label");
    if (!seen.insert(l).second)
      throw ValidationError("distribution: duplicate label '" + l + "'");
  }

  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]))
      throw ValidationError("distribution: non-finite weight at label '" + labels[i] + "'");
    if (weights[i] < 0.0)
      throw ValidationError("distribution: negative weight at label '" + labels[i] + "'");
    total += weights[i];
  }
  if (total <= 0.0) throw ValidationError("distribution: zero total mass");

  if (policy == NormalizationPolicy::strict) {
    if (std::abs(total - 1.0) > kInputTolerance)
      throw ValidationError("distribution: weights sum to " + std::to_string(total) +
                            ", expected 1 within 1e-9 (use renormalize to rescale)");
  } else {
    for (double& w : weights) w /= total;
  }
  return Distribution(std::move(labels), std::move(weights));
}

Distribution make_distribution(std::vector<Label> labels, std::vector<double> weights,
                               NormalizationPolicy policy) {
  return Distribution::make(std::move(labels), std::move(weights), policy);
}

Kernel Kernel::make(std::vector<Label> response_alphabet,
                    const std::vector<std::pair<Label, Distribution>>& rows) {
  if (response_alphabet.empty()) throw ValidationError("kernel: empty response alphabet");
  if (rows.empty()) throw ValidationError("kernel: no rows");

  std::unordered_map<Label, std::size_t> alpha_index;
  for (std::size_t i = 0; i < response_alphabet.size(); ++i) {
    if (response_alphabet[i].empty()) throw ValidationError("kernel: empty response label");
    if (!alpha_index.emplace(response_alphabet[i], i).second)
      throw ValidationError("kernel: duplicate response label '" + response_alphabet[i] + "'");
  }

  Kernel k;
  k.alphabet_ = std::move(response_alphabet);
  for (const auto& [prompt, dist] : rows) {
    if (k.row_index_.count(prompt))
      throw ValidationError("kernel: duplicate row for prompt '" + prompt + "'");
    // Re-align the row onto the shared alphabet; absent labels get weight 0.
    std::vector<double> aligned(k.alphabet_.size(), 0.0);
    for (std::size_t i = 0; i < dist.support().size(); ++i) {
      auto it = alpha_index.find(dist.support()[i]);
      if (it == alpha_index.end())
        throw ValidationError("kernel: row for prompt '" + prompt + "' uses label '" +
                              dist.support()[i] + "' outside the response alphabet");
      aligned[it->second] = dist.weights()[i];
    }
    k.row_index_.emplace(prompt, k.prompts_.size());
    k.prompts_.push_back(prompt);
    k.rows_.push_back(Distribution::make(k.alphabet_, std::move(aligned),
                                         NormalizationPolicy::strict));
  }
  return k;
}

const Distribution& Kernel::row(const Label& prompt) const {
  auto it = row_index_.find(prompt);
  if (it == row_index_.end())
    throw ValidationError("kernel: no row for prompt '" + prompt + "'");
  return rows_[it->second];
}

bool Kernel::operator==(const Kernel& other) const {
  return alphabet_ == other.alphabet_ && prompts_ == other.prompts_ && rows_ == other.rows_;
}

JointLaw JointLaw::make(Distribution prompt_marginal, Kernel kernel, Regime regime) {
  double total = 0.0;
  for (std::size_t i = 0; i < prompt_marginal.size(); ++i) {
    const Label& x = prompt_marginal.support()[i];
    if (!kernel.has_row(x))
      throw ValidationError("joint: missing kernel row for prompt '" + x + "'");
    double row_total = 0.0;
    for (double w : kernel.row(x).weights()) row_total += w;
    total += prompt_marginal.weights()[i] * row_total;
  }
  if (std::abs(total - 1.0) > kInputTolerance)
    throw ValidationError("joint: induced mass sums to " + std::to_string(total));
  return JointLaw(std::move(prompt_marginal), std::move(kernel), regime);
}

JointLaw joint(const Distribution& rho, const Kernel& k, Regime regime) {
  return JointLaw::make(rho, k, regime);
}

Distribution marginal_prompt(const JointLaw& j) { return j.prompt_marginal(); }

double tv_distributions(const Distribution& p, const Distribution& q) {
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    l1 += std::abs(p.weights()[i] - q.weight_of(p.support()[i]));
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!p.contains(q.support()[i])) l1 += q.weights()[i];
  return 0.5 * l1;
}

namespace {

bool same_label_set(const std::vector<Label>& a, const std::vector<Label>& b) {
  if (a.size() != b.size()) return false;
  std::unordered_set<Label> sa(a.begin(), a.end());
  for (const Label& l : b)
    if (!sa.count(l)) return false;
  return true;
}

bool bitwise_equal_marginals(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Label& x = a.support()[i];
    if (!b.contains(x)) return false;
    if (a.weights()[i] != b.weight_of(x)) return false;
  }
  return true;
}

}  // namespace

double tv_joint(const JointLaw& p, const JointLaw& q) {
  if (!same_label_set(p.prompt_support(), q.prompt_support()))
    throw ValidationError("tv_joint: prompt alphabet mismatch");
  if (!same_label_set(p.response_alphabet(), q.response_alphabet()))
    throw ValidationError("tv_joint: response alphabet mismatch");

  double l1 = 0.0;
  for (const Label& x : p.prompt_support())
    for (const Label& y : p.response_alphabet()) l1 += std::abs(p.mass(x, y) - q.mass(x, y));
  const double flat = 0.5 * l1;

  // With exactly equal marginals the conditional decomposition must agree;
  // the two routes differ only in summation order, so 1e-12 is ample.
  if (bitwise_equal_marginals(p.prompt_marginal(), q.prompt_marginal())) {
    double conditional = 0.0;
    for (std::size_t i = 0; i < p.prompt_support().size(); ++i) {
      const Label& x = p.prompt_support()[i];
      conditional +=
          p.prompt_marginal().weights()[i] * tv_distributions(p.kernel().row(x), q.kernel().row(x));
    }
    if (std::abs(flat - conditional) > kIdentityTolerance)
      throw ValidationError("tv_joint: flat and conditional routes disagree beyond 1e-12");
  }
  return flat;
}

}  // namespace blindspot
