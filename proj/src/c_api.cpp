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

#include "blindspot.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "blindspot/corpus_io.hpp"
#include "blindspot/discretion.hpp"
#include "blindspot/estimation.hpp"
#include "blindspot/measure.hpp"
#include "blindspot/report.hpp"
#include "blindspot/risk.hpp"
#include "blindspot/rng.hpp"
#include "blindspot/scenario.hpp"
#include "blindspot/version.hpp"

// Opaque handle definitions: each wraps one immutable core object.
struct bs_distribution {
  blindspot::Distribution value;
};
struct bs_kernel {
  blindspot::Kernel value;
};
struct bs_joint {
  blindspot::JointLaw value;
};
struct bs_loss {
  blindspot::BoundedLoss value;
};
struct bs_corpus {
  blindspot::PreferenceCorpus value;
};

namespace {

thread_local std::string g_last_error;

bs_status fail(bs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
bs_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BS_OK;
  } catch (const blindspot::IoError& e) {
    return fail(BS_ERR_IO, e.what());
  } catch (const blindspot::ValidationError& e) {
    return fail(BS_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(BS_ERR_VALIDATION, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bs_status require(bool ok, const char* message) {
  return ok ? BS_OK : fail(BS_ERR_VALIDATION, message);
}

blindspot::ReportFormat to_format(bs_format f) {
  return f == BS_FORMAT_STRUCTURED ? blindspot::ReportFormat::structured
                                   : blindspot::ReportFormat::text;
}

}  // namespace

extern "C" {

const char* bs_version(void) { return blindspot::kVersion; }

const char* bs_last_error(void) { return g_last_error.c_str(); }

void bs_string_free(char* s) { delete[] s; }

bs_status bs_distribution_load(const char* path, bs_distribution** out) {
  if (require(path && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = new bs_distribution{blindspot::load_distribution(path)}; });
}

bs_status bs_distribution_make(const char* const* labels, const double* weights, size_t n,
                               int renormalize, bs_distribution** out) {
  if (require(labels && weights && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    std::vector<blindspot::Label> l(labels, labels + n);
    std::vector<double> w(weights, weights + n);
    *out = new bs_distribution{blindspot::make_distribution(
        std::move(l), std::move(w),
        renormalize ? blindspot::NormalizationPolicy::renormalize
                    : blindspot::NormalizationPolicy::strict)};
  });
}

void bs_distribution_free(bs_distribution* d) { delete d; }

bs_status bs_kernel_load(const char* path, bs_kernel** out) {
  if (require(path && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = new bs_kernel{blindspot::load_kernel(path)}; });
}

void bs_kernel_free(bs_kernel* k) { delete k; }

bs_status bs_loss_load(const char* path, bs_loss** out) {
  if (require(path && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = new bs_loss{blindspot::load_loss(path)}; });
}

void bs_loss_free(bs_loss* l) { delete l; }

bs_status bs_corpus_load(const char* path, bs_corpus** out) {
  if (require(path && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = new bs_corpus{blindspot::load_corpus(path)}; });
}

void bs_corpus_free(bs_corpus* c) { delete c; }

bs_status bs_joint_make(const bs_distribution* rho, const bs_kernel* k, bs_regime regime,
                        bs_joint** out) {
  if (require(rho && k && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    *out = new bs_joint{blindspot::joint(rho->value, k->value,
                                         regime == BS_ON_POLICY
                                             ? blindspot::Regime::on_policy
                                             : blindspot::Regime::off_policy)};
  });
}

bs_status bs_corpus_to_offpolicy(const bs_corpus* corpus, const bs_distribution* rho,
                                 bs_corpus_mode mode, bs_joint** out) {
  if (require(corpus && rho && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    *out = new bs_joint{blindspot::corpus_to_offpolicy(
        corpus->value, rho->value,
        mode == BS_BOTH_CANDIDATES ? blindspot::CorpusMode::both_candidates
                                   : blindspot::CorpusMode::chosen_only)};
  });
}

void bs_joint_free(bs_joint* j) { delete j; }

bs_status bs_tv_joint(const bs_joint* p, const bs_joint* q, double* out) {
  if (require(p && q && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = blindspot::tv_joint(p->value, q->value); });
}

bs_status bs_risk(const bs_joint* j, const bs_loss* loss, double* out) {
  if (require(j && loss && out, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] { *out = blindspot::risk(j->value, loss->value); });
}

bs_status bs_check_equal_marginal(const bs_joint* p, const bs_joint* q, double tol, int* passed,
                                  char** diagnostics) {
  if (require(p && q && passed, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    blindspot::MarginalCheck check = blindspot::check_equal_marginal(p->value, q->value, tol);
    *passed = check.passed ? 1 : 0;
    if (diagnostics) *diagnostics = dup_string(check.describe());
  });
}

bs_status bs_audit_exact(const bs_joint* p, const bs_joint* q, const bs_loss* loss,
                         const char* q_mode, bs_format format, char** report) {
  if (require(p && q && loss && report, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    blindspot::GapReport gap = blindspot::audit(p->value, q->value, loss->value);
    blindspot::Provenance prov;
    prov.command = "audit";
    prov.mode = "exact";
    if (q_mode) prov.q_mode = q_mode;
    prov.loss_class = blindspot::to_string(loss->value.loss_class());
    prov.tolerance = blindspot::kInputTolerance;
    *report = dup_string(blindspot::render_audit(prov, gap, to_format(format)));
  });
}

bs_status bs_audit_sampled(const bs_joint* p, const bs_joint* q, const bs_loss* loss, uint64_t n,
                           uint64_t seed, double confidence, const char* q_mode, bs_format format,
                           char** report) {
  if (require(p && q && loss && report, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    using namespace blindspot;
    // Independent substreams per regime; the bootstrap gets its own.
    SampleSet sp = sample_joint(p->value, n, SplitMix64::substream(seed, 0).next_u64());
    SampleSet sq = sample_joint(q->value, n, SplitMix64::substream(seed, 1).next_u64());

    SampledAudit audit;
    audit.n = n;
    audit.seed = seed;
    audit.confidence = confidence;
    audit.r_gen = mc_risk(sp, loss->value, confidence);
    audit.r_disc = mc_risk(sq, loss->value, confidence);

    // Gap interval by adding half-widths; joint confidence is at least
    // 1 - 2 * (1 - confidence) by union bound.
    audit.gap.value = std::abs(audit.r_gen.value - audit.r_disc.value);
    const double hw = (audit.r_gen.ci_high - audit.r_gen.value) +
                      (audit.r_disc.ci_high - audit.r_disc.value);
    audit.gap.ci_low = std::max(0.0, audit.gap.value - hw);
    audit.gap.ci_high = audit.gap.value + hw;
    audit.gap.n = n;
    audit.gap.confidence = std::max(0.0, 1.0 - 2.0 * (1.0 - confidence));

    BootstrapOptions boot;
    boot.confidence = confidence;
    boot.seed = SplitMix64::substream(seed, 2).next_u64();
    audit.tv = plug_in_tv(sp, sq, boot);

    Provenance prov;
    prov.command = "audit";
    prov.mode = "sampled";
    if (q_mode) prov.q_mode = q_mode;
    prov.loss_class = to_string(loss->value.loss_class());
    prov.seed = seed;
    prov.tolerance = kInputTolerance;
    prov.notes.push_back(
        "plug-in tv estimate and its bootstrap interval are toolkit additions; "
        "the plug-in value is biased upward at small n");
    prov.notes.push_back("gap interval is conservative: half-widths add, confidence is joint");
    *report = dup_string(render_sampled_audit(prov, audit, to_format(format)));
  });
}

bs_status bs_demo(uint64_t seed, double suppression, bs_format format, char** report) {
  if (require(report != nullptr, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    using namespace blindspot;
    ScenarioConfig cfg = default_demo_config(seed);
    Suppression sup = default_demo_suppression(suppression);
    DemoLossSpec loss_spec = default_demo_loss();
    DemoReport demo = blind_spot_demo(cfg, sup, loss_spec);

    const Kernel policy = interpretive_policy(cfg);
    const Kernel corpus = corpus_kernel_variant(policy, sup);
    std::vector<Label> prompts;
    for (const auto& [prompt, flag] : cfg.ambiguity_flags) prompts.push_back(prompt);
    const Distribution rho = make_distribution(
        prompts, std::vector<double>(prompts.size(), 1.0), NormalizationPolicy::renormalize);
    const JointLaw p = joint(rho, policy, Regime::on_policy);
    const JointLaw q = joint(rho, corpus, Regime::off_policy);

    Provenance prov;
    prov.command = "demo";
    prov.mode = "exact";
    prov.q_mode = "synthetic_suppression";
    prov.loss_class = to_string(LossClass::nonnegative);
    prov.seed = seed;
    prov.tolerance = kInputTolerance;
    prov.notes.push_back(
        "headline thresholds (gap >= 0.25*l_max, off-policy risk <= 0.1*l_max) "
        "are demo conventions, not derived constants");
    *report = dup_string(
        render_demo(prov, demo, witness_loss(p, q, loss_spec.l_max, LossClass::signed_sup_norm),
                    witness_loss(p, q, loss_spec.l_max, LossClass::nonnegative),
                    to_format(format)));
  });
}

bs_status bs_classify(const bs_corpus* corpus, const char* const* judge_names, size_t n_judges,
                      bs_format format, char** report) {
  if (require(corpus && report, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    using namespace blindspot;
    std::vector<PrincipleJudge> judges;
    if (judge_names == nullptr || n_judges == 0) {
      judges = builtin_judges();
    } else {
      std::vector<std::string> names(judge_names, judge_names + n_judges);
      judges = judges_by_name(names);
    }

    ClassifyReport result;
    for (const PrincipleJudge& j : judges) result.judge_names.push_back(j.name);
    result.summary = category_summary(corpus->value.records, judges);
    result.supremacy = judges.size() >= 2
                           ? supremacy_matrix(corpus->value.records, judges)
                           : SupremacyMatrix{result.judge_names, {}, {}};
    result.arbitrariness = arbitrariness_rate(corpus->value.records, judges);

    Provenance prov;
    prov.command = "classify";
    prov.mode = "exact";
    prov.tolerance = kInputTolerance;
    prov.notes.push_back("judge relevance is each judge's own abstention convention");
    *report = dup_string(render_classify(prov, result, to_format(format)));
  });
}

bs_status bs_sample(const bs_joint* j, uint64_t n, uint64_t seed, char** records) {
  if (require(j && records, "null argument") != BS_OK) return BS_ERR_VALIDATION;
  return guarded([&] {
    blindspot::SampleSet s = blindspot::sample_joint(j->value, n, seed);
    *records = dup_string(blindspot::serialize_samples(s));
  });
}

}  // extern "C"
