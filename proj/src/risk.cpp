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

#include "blindspot/risk.hpp"

#include <algorithm>
#include <cmath>

#include "blindspot/corpus_io.hpp"

namespace blindspot {

const char* to_string(LossClass c) {
  return c == LossClass::nonnegative ? "nonnegative" : "signed_sup_norm";
}

BoundedLoss BoundedLoss::make(std::vector<Label> prompts, std::vector<Label> responses,
                              std::vector<double> values, double lower, double upper) {
  if (prompts.empty() || responses.empty())
    throw ValidationError("loss: empty alphabet");
  if (!(lower <= upper)) throw ValidationError("loss: lower bound exceeds upper bound");
  if (values.size() != prompts.size() * responses.size())
    throw ValidationError("loss: table has " + std::to_string(values.size()) +
                          " cells, alphabets require " +
                          std::to_string(prompts.size() * responses.size()));

  BoundedLoss loss;
  for (std::size_t i = 0; i < prompts.size(); ++i)
    if (!loss.prompt_index_.emplace(prompts[i], i).second)
      throw ValidationError("loss: duplicate prompt label '" + prompts[i] + "'");
  for (std::size_t i = 0; i < responses.size(); ++i)
    if (!loss.response_index_.emplace(responses[i], i).second)
      throw ValidationError("loss: duplicate response label '" + responses[i] + "'");

  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValidationError("loss: non-finite value");
    if (values[i] < lower || values[i] > upper)
      throw ValidationError("loss: value " + std::to_string(values[i]) +
                            " outside declared bounds [" + std::to_string(lower) + ", " +
                            std::to_string(upper) + "]");
  }

  loss.prompts_ = std::move(prompts);
  loss.responses_ = std::move(responses);
  loss.values_ = std::move(values);
  loss.lower_ = lower;
  loss.upper_ = upper;
  return loss;
}

BoundedLoss BoundedLoss::shifted(double c) const {
  std::vector<double> shifted_values(values_);
  for (double& v : shifted_values) v += c;
  return make(prompts_, responses_, std::move(shifted_values), lower_ + c, upper_ + c);
}

double BoundedLoss::sup_norm_bound() const {
  return std::max(std::abs(lower_), std::abs(upper_));
}

bool BoundedLoss::covers(const Label& prompt, const Label& response) const {
  return prompt_index_.count(prompt) != 0 && response_index_.count(response) != 0;
}

double BoundedLoss::value(const Label& prompt, const Label& response) const {
  auto pi = prompt_index_.find(prompt);
  auto ri = response_index_.find(response);
  if (pi == prompt_index_.end() || ri == response_index_.end())
    throw ValidationError("loss: cell (" + prompt + ", " + response + ") is not covered");
  return values_[pi->second * responses_.size() + ri->second];
}

double risk(const JointLaw& j, const BoundedLoss& loss) {
  double acc = 0.0;
  for (const Label& x : j.prompt_support()) {
    for (const Label& y : j.response_alphabet()) {
      const double m = j.mass(x, y);
      if (m == 0.0) continue;  // uncovered cells matter only under positive mass
      acc += m * loss.value(x, y);
    }
  }
  return acc;
}

double tv_variational_gap(const JointLaw& p, const JointLaw& q, const BoundedLoss& f) {
  if (f.lower() < -1.0 || f.upper() > 1.0)
    throw ValidationError("tv_variational_gap: test function bounds exceed [-1, 1]");
  return risk(p, f) - risk(q, f);
}

double blind_spot_gap(const JointLaw& p, const JointLaw& q, const BoundedLoss& loss) {
  MarginalCheck check = check_equal_marginal(p, q, kInputTolerance);
  if (!check.passed)
    throw ValidationError("blind_spot_gap: prompt marginals differ beyond 1e-9\n" +
                          check.describe());

  const double flat = std::abs(risk(p, loss) - risk(q, loss));

  // Per-prompt route: rho-weighted difference of conditional expectations.
  double per_prompt = 0.0;
  for (std::size_t i = 0; i < p.prompt_support().size(); ++i) {
    const Label& x = p.prompt_support()[i];
    const Distribution& row_p = p.kernel().row(x);
    const Distribution& row_q = q.kernel().row(x);
    double ep = 0.0;
    for (std::size_t r = 0; r < row_p.size(); ++r)
      if (row_p.weights()[r] != 0.0) ep += row_p.weights()[r] * loss.value(x, row_p.support()[r]);
    double eq = 0.0;
    for (std::size_t r = 0; r < row_q.size(); ++r)
      if (row_q.weights()[r] != 0.0) eq += row_q.weights()[r] * loss.value(x, row_q.support()[r]);
    per_prompt += p.prompt_marginal().weights()[i] * (ep - eq);
  }
  per_prompt = std::abs(per_prompt);

  if (std::abs(flat - per_prompt) > kIdentityTolerance)
    throw ValidationError(
        "blind_spot_gap: flat and per-prompt routes disagree beyond 1e-12; "
        "prompt marginals are equal only approximately, not exactly");
  return flat;
}

double tv_bound(const JointLaw& p, const JointLaw& q, double l_max) {
  if (!(l_max > 0.0)) throw ValidationError("tv_bound: l_max must be positive");
  return 2.0 * l_max * tv_joint(p, q);
}

double worst_case_gap(const JointLaw& p, const JointLaw& q, double l_max) {
  if (!(l_max > 0.0)) throw ValidationError("worst_case_gap: l_max must be positive");
  return 2.0 * l_max * tv_joint(p, q);
}

BoundedLoss witness_loss(const JointLaw& p, const JointLaw& q, double l_max, LossClass cls) {
  if (!(l_max > 0.0)) throw ValidationError("witness_loss: l_max must be positive");
  // Reuses tv_joint's alphabet validation.
  (void)tv_joint(p, q);

  const std::vector<Label>& prompts = p.prompt_support();
  const std::vector<Label>& responses = p.response_alphabet();
  std::vector<double> values;
  values.reserve(prompts.size() * responses.size());
  for (const Label& x : prompts) {
    for (const Label& y : responses) {
      const double diff = p.mass(x, y) - q.mass(x, y);
      if (cls == LossClass::signed_sup_norm) {
        values.push_back(diff < 0.0 ? -l_max : l_max);  // ties get +l_max
      } else {
        values.push_back(diff > 0.0 ? l_max : 0.0);
      }
    }
  }
  const double lower = cls == LossClass::signed_sup_norm ? -l_max : 0.0;
  return BoundedLoss::make(prompts, responses, std::move(values), lower, l_max);
}

GapReport audit(const JointLaw& p, const JointLaw& q, const BoundedLoss& loss) {
  GapReport report;
  report.r_gen = risk(p, loss);
  report.r_disc = risk(q, loss);
  report.gap = blind_spot_gap(p, q, loss);
  report.tv = tv_joint(p, q);
  report.bound = 2.0 * loss.sup_norm_bound() * report.tv;
  report.bound_satisfied = report.gap <= report.bound + kIdentityTolerance;
  report.slack = report.bound - report.gap;
  return report;
}

}  // namespace blindspot
