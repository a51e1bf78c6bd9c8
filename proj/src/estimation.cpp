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

#include "blindspot/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "blindspot/rng.hpp"

namespace blindspot {

namespace {

/// Inverse-CDF draw over a weight vector: the first index whose cumulative
/// weight exceeds u. Weights sum to 1 within construction tolerance; any
/// residual rounding falls onto the last index.
std::size_t draw_index(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

SampleSet sample_joint(const JointLaw& j, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample_joint: n must be at least 1");
  SampleSet s;
  s.seed = seed;
  s.source_regime = j.regime();
  s.records.reserve(n);
  const Distribution& rho = j.prompt_marginal();
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = SplitMix64::substream(seed, i);
    const std::size_t xi = draw_index(rho.weights(), rng.next_double());
    const Label& x = rho.support()[xi];
    const Distribution& row = j.kernel().row(x);
    const std::size_t yi = draw_index(row.weights(), rng.next_double());
    s.records.emplace_back(x, row.support()[yi]);
  }
  return s;
}

Estimate mc_risk(const SampleSet& s, const BoundedLoss& loss, double confidence) {
  if (s.records.empty()) throw ValidationError("mc_risk: empty sample set");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ValidationError("mc_risk: confidence must lie in (0, 1)");

  double sum = 0.0;
  for (const auto& [x, y] : s.records) sum += loss.value(x, y);
  const double n = static_cast<double>(s.records.size());
  const double mean = sum / n;

  const double delta = 1.0 - confidence;
  const double range = loss.upper() - loss.lower();
  const double half_width = range * std::sqrt(std::log(2.0 / delta) / (2.0 * n));

  Estimate e;
  e.value = mean;
  e.ci_low = mean - half_width;
  e.ci_high = mean + half_width;
  e.n = s.records.size();
  e.confidence = confidence;
  return e;
}

Kernel empirical_kernel(const SampleSet& s, const std::vector<Label>& prompt_alphabet,
                        const std::vector<Label>& response_alphabet,
                        MissingPromptPolicy policy) {
  if (s.records.empty()) throw ValidationError("empirical_kernel: empty sample set");

  std::unordered_map<Label, std::size_t> prompt_pos;
  for (std::size_t i = 0; i < prompt_alphabet.size(); ++i) prompt_pos.emplace(prompt_alphabet[i], i);
  std::unordered_map<Label, std::size_t> response_pos;
  for (std::size_t i = 0; i < response_alphabet.size(); ++i)
    response_pos.emplace(response_alphabet[i], i);

  std::vector<std::vector<double>> counts(prompt_alphabet.size(),
                                          std::vector<double>(response_alphabet.size(), 0.0));
  std::vector<double> totals(prompt_alphabet.size(), 0.0);
  for (const auto& [x, y] : s.records) {
    auto px = prompt_pos.find(x);
    auto py = response_pos.find(y);
    if (px == prompt_pos.end())
      throw ValidationError("empirical_kernel: sampled prompt '" + x + "' outside the alphabet");
    if (py == response_pos.end())
      throw ValidationError("empirical_kernel: sampled response '" + y + "' outside the alphabet");
    counts[px->second][py->second] += 1.0;
    totals[px->second] += 1.0;
  }

  std::vector<std::pair<Label, Distribution>> rows;
  for (std::size_t i = 0; i < prompt_alphabet.size(); ++i) {
    if (totals[i] == 0.0) {
      if (policy == MissingPromptPolicy::error)
        throw ValidationError("empirical_kernel: no observations for prompt '" +
                              prompt_alphabet[i] + "'");
      continue;
    }
    rows.emplace_back(prompt_alphabet[i], Distribution::make(response_alphabet, counts[i],
                                                             NormalizationPolicy::renormalize));
  }
  if (rows.empty()) throw ValidationError("empirical_kernel: every prompt was dropped");
  return Kernel::make(response_alphabet, std::move(rows));
}

namespace {

struct PairFrequencies {
  // Distinct observed (prompt, response) pairs in first-appearance order
  // across both sample sets, with per-set record-to-pair-id mappings.
  std::vector<std::size_t> ids_p;
  std::vector<std::size_t> ids_q;
  std::size_t distinct = 0;
};

PairFrequencies index_pairs(const SampleSet& sp, const SampleSet& sq) {
  PairFrequencies f;
  std::map<std::pair<Label, Label>, std::size_t> ids;
  auto id_of = [&ids](const std::pair<Label, Label>& rec) {
    auto [it, inserted] = ids.emplace(rec, ids.size());
    return it->second;
  };
  f.ids_p.reserve(sp.records.size());
  for (const auto& rec : sp.records) f.ids_p.push_back(id_of(rec));
  f.ids_q.reserve(sq.records.size());
  for (const auto& rec : sq.records) f.ids_q.push_back(id_of(rec));
  f.distinct = ids.size();
  return f;
}

double half_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
  return 0.5 * l1;
}

std::vector<double> frequencies(const std::vector<std::size_t>& ids, std::size_t distinct) {
  std::vector<double> freq(distinct, 0.0);
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (std::size_t id : ids) freq[id] += inv;
  return freq;
}

// Type-7 (linear interpolation) quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

Estimate plug_in_tv(const SampleSet& sp, const SampleSet& sq, const BootstrapOptions& options) {
  if (sp.records.empty() || sq.records.empty())
    throw ValidationError("plug_in_tv: empty sample set");
  if (!(options.confidence > 0.0 && options.confidence < 1.0))
    throw ValidationError("plug_in_tv: confidence must lie in (0, 1)");

  const PairFrequencies f = index_pairs(sp, sq);
  const double point = half_l1(frequencies(f.ids_p, f.distinct), frequencies(f.ids_q, f.distinct));

  Estimate e;
  e.value = point;
  e.ci_low = point;
  e.ci_high = point;
  e.n = sp.records.size() + sq.records.size();
  e.confidence = options.confidence;
  if (options.resamples == 0) return e;

  const std::uint64_t seed =
      options.seed.value_or(SplitMix64::mix64(sp.seed) ^ SplitMix64::mix64(~sq.seed));
  std::vector<double> stats;
  stats.reserve(options.resamples);
  std::vector<double> fp(f.distinct), fq(f.distinct);
  for (std::size_t b = 0; b < options.resamples; ++b) {
    SplitMix64 rng = SplitMix64::substream(seed, b);
    std::fill(fp.begin(), fp.end(), 0.0);
    std::fill(fq.begin(), fq.end(), 0.0);
    const double inv_p = 1.0 / static_cast<double>(f.ids_p.size());
    for (std::size_t i = 0; i < f.ids_p.size(); ++i)
      fp[f.ids_p[rng.next_index(f.ids_p.size())]] += inv_p;
    const double inv_q = 1.0 / static_cast<double>(f.ids_q.size());
    for (std::size_t i = 0; i < f.ids_q.size(); ++i)
      fq[f.ids_q[rng.next_index(f.ids_q.size())]] += inv_q;
    stats.push_back(half_l1(fp, fq));
  }
  std::sort(stats.begin(), stats.end());
  const double delta = 1.0 - options.confidence;
  // Percentile interval, widened to contain the point estimate so the
  // ci_low <= value <= ci_high contract survives skewed resamples.
  e.ci_low = std::min(point, quantile_sorted(stats, delta / 2.0));
  e.ci_high = std::max(point, quantile_sorted(stats, 1.0 - delta / 2.0));
  return e;
}

}  // namespace blindspot
