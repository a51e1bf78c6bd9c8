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

#ifndef BLINDSPOT_MEASURE_HPP
#define BLINDSPOT_MEASURE_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blindspot/errors.hpp"

namespace blindspot {

/// Symbols of the finite prompt/response alphabets. Non-empty, unique within
/// one alphabet.
using Label = std::string;

enum class NormalizationPolicy {
  strict,       // weights must already sum to 1 within 1e-9
  renormalize,  // weights are scaled to sum to 1
};

enum class Regime {
  on_policy,   // responses drawn from the model's own kernel
  off_policy,  // responses fixed by a corpus construction process
};

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// A probability vector over an ordered, finite alphabet of labels.
///
/// Supports are ordered so iteration, serialization, and sampling are
/// deterministic. Weights are validated at construction: non-negative,
/// finite, distinct labels, total mass 1 within 1e-9 (strict) or rescaled
/// (renormalize). Instances are immutable.
class Distribution {
 public:
  static Distribution make(std::vector<Label> labels, std::vector<double> weights,
                           NormalizationPolicy policy);

  const std::vector<Label>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  bool contains(const Label& label) const { return index_.count(label) != 0; }

  /// Weight of `label`, 0 if the label is outside the support.
  double weight_of(const Label& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? 0.0 : weights_[it->second];
  }

  bool operator==(const Distribution& other) const {
    return support_ == other.support_ && weights_ == other.weights_;
  }

 private:
  Distribution(std::vector<Label> support, std::vector<double> weights);

  std::vector<Label> support_;
  std::vector<double> weights_;
  std::unordered_map<Label, std::size_t> index_;
};

/// A Markov kernel: one response Distribution per prompt, all rows over the
/// same ordered response alphabet. Row weights are the conditional densities
/// with respect to counting measure on the response alphabet.
class Kernel {
 public:
  /// Rows may list a subset of the alphabet; they are re-aligned to the full
  /// alphabet with implicit zeros. Row order is preserved.
  static Kernel make(std::vector<Label> response_alphabet,
                     const std::vector<std::pair<Label, Distribution>>& rows);

  const std::vector<Label>& alphabet() const { return alphabet_; }
  const std::vector<Label>& prompts() const { return prompts_; }
  std::size_t row_count() const { return prompts_.size(); }

  bool has_row(const Label& prompt) const { return row_index_.count(prompt) != 0; }
  const Distribution& row(const Label& prompt) const;

  bool operator==(const Kernel& other) const;

 private:
  Kernel() = default;

  std::vector<Label> alphabet_;
  std::vector<Label> prompts_;
  std::vector<Distribution> rows_;
  std::unordered_map<Label, std::size_t> row_index_;
};

/// A joint law over prompt x response, factored as a prompt marginal and a
/// response kernel. Mass at (x, y) is marginal(x) * kernel(y | x).
///
/// The prompt marginal is stored as constructed, so `marginal_prompt` returns
/// it exactly and equal-marginal checks on two joints built from the same
/// marginal pass at tolerance 0.
class JointLaw {
 public:
  static JointLaw make(Distribution prompt_marginal, Kernel kernel, Regime regime);

  const Distribution& prompt_marginal() const { return prompt_marginal_; }
  const Kernel& kernel() const { return kernel_; }
  Regime regime() const { return regime_; }

  const std::vector<Label>& prompt_support() const { return prompt_marginal_.support(); }
  const std::vector<Label>& response_alphabet() const { return kernel_.alphabet(); }

  double mass(const Label& prompt, const Label& response) const {
    return prompt_marginal_.weight_of(prompt) * kernel_.row(prompt).weight_of(response);
  }

 private:
  JointLaw(Distribution m, Kernel k, Regime r)
      : prompt_marginal_(std::move(m)), kernel_(std::move(k)), regime_(r) {}

  Distribution prompt_marginal_;
  Kernel kernel_;
  Regime regime_;
};

Distribution make_distribution(std::vector<Label> labels, std::vector<double> weights,
                               NormalizationPolicy policy);

/// The joint law rho (x) k. Every prompt listed in rho's support needs a
/// kernel row.
JointLaw joint(const Distribution& rho, const Kernel& k, Regime regime);

/// The prompt marginal of a joint; equals the distribution passed to joint().
Distribution marginal_prompt(const JointLaw& j);

/// Total variation distance, half the L1 distance between weight vectors.
/// Distributions over different supports are compared over the support union
/// with implicit zeros. Symmetric, in [0, 1], zero iff equal.
double tv_distributions(const Distribution& p, const Distribution& q);

/// Total variation distance between two joint laws sharing prompt and
/// response alphabets (as sets; order may differ). Computed as the flat
/// half-L1 over the product alphabet. When the prompt marginals are exactly
/// equal the conditional decomposition
///     TV(P, Q) = E_{x~rho}[ TV(P(.|x), Q(.|x)) ]
/// is evaluated as well and both routes must agree within 1e-12.
double tv_joint(const JointLaw& p, const JointLaw& q);

}  // namespace blindspot

#endif  // BLINDSPOT_MEASURE_HPP
