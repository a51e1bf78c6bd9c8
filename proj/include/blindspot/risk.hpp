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

#ifndef BLINDSPOT_RISK_HPP
#define BLINDSPOT_RISK_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "blindspot/measure.hpp"

namespace blindspot {

/// The two loss classes the worst-case theory distinguishes. Their tight
/// constants differ by a factor of two: over signed losses with sup-norm at
/// most L the worst-case risk gap is exactly 2*L*TV, over losses in [0, L]
/// the sign witness is unavailable and the indicator witness achieves L*TV.
enum class LossClass {
  signed_sup_norm,  // values in [-L, L]
  nonnegative,      // values in [0, L]
};

const char* to_string(LossClass c);

/// A misalignment loss tabulated densely over a prompt x response alphabet,
/// with declared bounds. Dense tables make coverage errors detectable at
/// construction rather than at evaluation time.
class BoundedLoss {
 public:
  /// `values` is row-major over prompts x responses; every value must lie in
  /// [lower, upper] and lower <= upper.
  static BoundedLoss make(std::vector<Label> prompts, std::vector<Label> responses,
                          std::vector<double> values, double lower, double upper);

  /// Same table with every cell shifted by c (bounds shift too).
  BoundedLoss shifted(double c) const;

  const std::vector<Label>& prompts() const { return prompts_; }
  const std::vector<Label>& responses() const { return responses_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  /// max(|lower|, |upper|): the sup-norm radius of the declared class.
  double sup_norm_bound() const;

  LossClass loss_class() const {
    return lower_ >= 0.0 ? LossClass::nonnegative : LossClass::signed_sup_norm;
  }

  bool covers(const Label& prompt, const Label& response) const;
  double value(const Label& prompt, const Label& response) const;

 private:
  BoundedLoss() = default;

  std::vector<Label> prompts_;
  std::vector<Label> responses_;
  std::vector<double> values_;  // row-major
  double lower_ = 0.0;
  double upper_ = 0.0;
  std::unordered_map<Label, std::size_t> prompt_index_;
  std::unordered_map<Label, std::size_t> response_index_;
};

/// Everything an audit of one (P, Q, loss) triple produces.
/// `bound` is 2 * L_max * TV(P, Q) with L_max the loss's sup-norm radius;
/// `gap <= bound + 1e-12` holds whenever the loss respects its declared
/// bounds, and `slack = bound - gap`.
struct GapReport {
  double r_gen = 0.0;
  double r_disc = 0.0;
  double gap = 0.0;
  double tv = 0.0;
  double bound = 0.0;
  bool bound_satisfied = false;
  double slack = 0.0;
};

/// Expected loss under a joint law: sum over (x, y) of mass * loss.
/// The loss must cover every cell of the joint's alphabets.
double risk(const JointLaw& j, const BoundedLoss& loss);

/// E_P[f] - E_Q[f] for a test function with sup-norm at most 1 (declared
/// bounds within [-1, 1]). Its absolute value never exceeds 2 * TV(P, Q);
/// the sign witness attains the bound.
double tv_variational_gap(const JointLaw& p, const JointLaw& q, const BoundedLoss& f);

/// |risk(P, loss) - risk(Q, loss)| for joints with equal prompt marginals
/// (within 1e-9; unequal marginals are a hard error). Evaluated both as the
/// flat risk difference and as the per-prompt conditional difference
///     | E_{x~rho}[ E_P[loss | x] - E_Q[loss | x] ] |,
/// which must agree within 1e-12.
double blind_spot_gap(const JointLaw& p, const JointLaw& q, const BoundedLoss& loss);

/// The distribution-shift bound 2 * l_max * TV(P, Q); l_max must be positive.
double tv_bound(const JointLaw& p, const JointLaw& q, double l_max);

/// The worst-case gap over all losses with sup-norm at most l_max. Equals
/// 2 * l_max * TV(P, Q); zero iff P = Q.
double worst_case_gap(const JointLaw& p, const JointLaw& q, double l_max);

/// A loss achieving the worst case, built from the sign of P - Q.
///
/// signed_sup_norm: +l_max where P > Q, -l_max where P < Q, +l_max at ties
/// (tie cells carry no signed mass, so the choice is a determinism
/// convention); achieves gap 2 * l_max * TV.
/// nonnegative: l_max where P > Q, 0 elsewhere; achieves gap l_max * TV,
/// which certifies the 2*l_max*TV bound is sound but not tight for the
/// [0, l_max] class.
BoundedLoss witness_loss(const JointLaw& p, const JointLaw& q, double l_max,
                         LossClass cls);

/// One-call audit: risks, gap, TV, bound, and slack for a fixed loss.
GapReport audit(const JointLaw& p, const JointLaw& q, const BoundedLoss& loss);

}  // namespace blindspot

#endif  // BLINDSPOT_RISK_HPP
