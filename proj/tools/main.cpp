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

// blindspot CLI. Talks to the core exclusively through the C API in
// blindspot.h, the same surface other language bindings would use.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blindspot.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code(bs_status status) {
  switch (status) {
    case BS_OK: return kExitOk;
    case BS_ERR_VALIDATION: return kExitValidation;
    case BS_ERR_IO: return kExitIo;
  }
  return kExitValidation;
}

int report_failure(bs_status status) {
  std::cerr << "error: " << bs_last_error() << "\n";
  return exit_code(status);
}

// Owning wrappers so every early return still frees its handles.
using DistributionPtr = std::unique_ptr<bs_distribution, decltype(&bs_distribution_free)>;
using KernelPtr = std::unique_ptr<bs_kernel, decltype(&bs_kernel_free)>;
using JointPtr = std::unique_ptr<bs_joint, decltype(&bs_joint_free)>;
using LossPtr = std::unique_ptr<bs_loss, decltype(&bs_loss_free)>;
using CorpusPtr = std::unique_ptr<bs_corpus, decltype(&bs_corpus_free)>;

struct StringOut {
  char* value = nullptr;
  ~StringOut() { bs_string_free(value); }
};

int write_output(const std::string& out_path, const char* content) {
  if (out_path.empty()) {
    std::cout << content;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return kExitIo;
  }
  out << content;
  if (!out) {
    std::cerr << "error: failed writing '" << out_path << "'\n";
    return kExitIo;
  }
  return kExitOk;
}

struct CommonOptions {
  std::string rho_path;
  std::string policy_path;
  std::string corpus_path;
  std::string loss_path;
  std::string mode = "both";
  std::string format = "text";
  std::string out_path;
  std::uint64_t seed = 0;
  double confidence = 0.95;
};

bs_format parse_format(const std::string& format) {
  return format == "structured" ? BS_FORMAT_STRUCTURED : BS_FORMAT_TEXT;
}

bs_corpus_mode parse_mode(const std::string& mode) {
  return mode == "chosen" ? BS_CHOSEN_ONLY : BS_BOTH_CANDIDATES;
}

const char* mode_name(const std::string& mode) {
  return mode == "chosen" ? "chosen_only" : "both_candidates";
}

int run_audit(const CommonOptions& opt, bool exact, std::uint64_t samples) {
  DistributionPtr rho(nullptr, bs_distribution_free);
  {
    bs_distribution* raw = nullptr;
    if (bs_status s = bs_distribution_load(opt.rho_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    rho.reset(raw);
  }
  KernelPtr policy(nullptr, bs_kernel_free);
  {
    bs_kernel* raw = nullptr;
    if (bs_status s = bs_kernel_load(opt.policy_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    policy.reset(raw);
  }
  CorpusPtr corpus(nullptr, bs_corpus_free);
  {
    bs_corpus* raw = nullptr;
    if (bs_status s = bs_corpus_load(opt.corpus_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    corpus.reset(raw);
  }
  LossPtr loss(nullptr, bs_loss_free);
  {
    bs_loss* raw = nullptr;
    if (bs_status s = bs_loss_load(opt.loss_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    loss.reset(raw);
  }

  JointPtr p(nullptr, bs_joint_free);
  {
    bs_joint* raw = nullptr;
    if (bs_status s = bs_joint_make(rho.get(), policy.get(), BS_ON_POLICY, &raw); s != BS_OK)
      return report_failure(s);
    p.reset(raw);
  }
  JointPtr q(nullptr, bs_joint_free);
  {
    bs_joint* raw = nullptr;
    if (bs_status s = bs_corpus_to_offpolicy(corpus.get(), rho.get(), parse_mode(opt.mode), &raw);
        s != BS_OK)
      return report_failure(s);
    q.reset(raw);
  }

  StringOut report;
  bs_status s;
  if (exact) {
    s = bs_audit_exact(p.get(), q.get(), loss.get(), mode_name(opt.mode),
                       parse_format(opt.format), &report.value);
  } else {
    s = bs_audit_sampled(p.get(), q.get(), loss.get(), samples, opt.seed, opt.confidence,
                         mode_name(opt.mode), parse_format(opt.format), &report.value);
  }
  if (s != BS_OK) return report_failure(s);
  return write_output(opt.out_path, report.value);
}

int run_demo(const CommonOptions& opt, double suppression) {
  StringOut report;
  if (bs_status s = bs_demo(opt.seed, suppression, parse_format(opt.format), &report.value);
      s != BS_OK)
    return report_failure(s);
  return write_output(opt.out_path, report.value);
}

int run_classify(const CommonOptions& opt, const std::vector<std::string>& judges) {
  CorpusPtr corpus(nullptr, bs_corpus_free);
  {
    bs_corpus* raw = nullptr;
    if (bs_status s = bs_corpus_load(opt.corpus_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    corpus.reset(raw);
  }
  std::vector<const char*> names;
  names.reserve(judges.size());
  for (const std::string& j : judges) names.push_back(j.c_str());

  StringOut report;
  if (bs_status s = bs_classify(corpus.get(), names.empty() ? nullptr : names.data(),
                                names.size(), parse_format(opt.format), &report.value);
      s != BS_OK)
    return report_failure(s);
  return write_output(opt.out_path, report.value);
}

int run_sample(const CommonOptions& opt, std::uint64_t samples) {
  DistributionPtr rho(nullptr, bs_distribution_free);
  {
    bs_distribution* raw = nullptr;
    if (bs_status s = bs_distribution_load(opt.rho_path.c_str(), &raw); s != BS_OK)
      return report_failure(s);
    rho.reset(raw);
  }

  JointPtr j(nullptr, bs_joint_free);
  if (!opt.policy_path.empty()) {
    KernelPtr policy(nullptr, bs_kernel_free);
    bs_kernel* raw_kernel = nullptr;
    if (bs_status s = bs_kernel_load(opt.policy_path.c_str(), &raw_kernel); s != BS_OK)
      return report_failure(s);
    policy.reset(raw_kernel);
    bs_joint* raw = nullptr;
    if (bs_status s = bs_joint_make(rho.get(), policy.get(), BS_ON_POLICY, &raw); s != BS_OK)
      return report_failure(s);
    j.reset(raw);
  } else {
    CorpusPtr corpus(nullptr, bs_corpus_free);
    bs_corpus* raw_corpus = nullptr;
    if (bs_status s = bs_corpus_load(opt.corpus_path.c_str(), &raw_corpus); s != BS_OK)
      return report_failure(s);
    corpus.reset(raw_corpus);
    bs_joint* raw = nullptr;
    if (bs_status s = bs_corpus_to_offpolicy(corpus.get(), rho.get(), parse_mode(opt.mode), &raw);
        s != BS_OK)
      return report_failure(s);
    j.reset(raw);
  }

  StringOut records;
  if (bs_status s = bs_sample(j.get(), samples, opt.seed, &records.value); s != BS_OK)
    return report_failure(s);
  return write_output(opt.out_path, records.value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"audits the gap between deployment-induced and corpus-induced "
               "evaluation of finite-alphabet policies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bs_version()));

  CommonOptions opt;
  bool exact = false;
  std::uint64_t samples = 0;
  double suppression = 1.0;
  std::vector<std::string> judges;

  CLI::App* audit = app.add_subcommand("audit", "exact or sampled audit of policy vs corpus");
  audit->add_option("--rho", opt.rho_path, "prompt marginal (jsonl)")->required();
  audit->add_option("--policy", opt.policy_path, "policy kernel (jsonl)")->required();
  audit->add_option("--corpus", opt.corpus_path, "preference corpus (jsonl)")->required();
  audit->add_option("--loss", opt.loss_path, "loss table (jsonl)")->required();
  audit->add_option("--mode", opt.mode, "corpus candidates: both|chosen (default both)")
      ->check(CLI::IsMember({"both", "chosen"}));
  auto* exact_flag = audit->add_flag("--exact", exact, "exact audit (default)");
  auto* samples_opt =
      audit->add_option("--samples", samples, "sampled audit with this many draws per regime");
  exact_flag->excludes(samples_opt);
  audit->add_option("--seed", opt.seed, "sampling seed (default 0)");
  audit->add_option("--confidence", opt.confidence, "interval confidence (default 0.95)")
      ->check(CLI::Range(0.0, 1.0));
  audit->add_option("--format", opt.format, "text|structured (default text)")
      ->check(CLI::IsMember({"text", "structured"}));
  audit->add_option("--out", opt.out_path, "write the report here instead of stdout");

  CLI::App* demo = app.add_subcommand("demo", "shipped blind-spot demonstration");
  demo->add_option("--seed", opt.seed, "scenario seed (default 0)");
  demo->add_option("--suppression", suppression,
                   "how thoroughly the corpus removes the penalized behavior (default 1)")
      ->check(CLI::Range(0.0, 1.0));
  demo->add_option("--format", opt.format, "text|structured (default text)")
      ->check(CLI::IsMember({"text", "structured"}));
  demo->add_option("--out", opt.out_path, "write the report here instead of stdout");

  CLI::App* classify = app.add_subcommand("classify", "discretion audit of a preference corpus");
  classify->add_option("--corpus", opt.corpus_path, "preference corpus (jsonl)")->required();
  classify->add_option("--judges", judges,
                       "comma-separated judge names (default: all built-ins)")
      ->delimiter(',');
  classify->add_option("--format", opt.format, "text|structured (default text)")
      ->check(CLI::IsMember({"text", "structured"}));
  classify->add_option("--out", opt.out_path, "write the report here instead of stdout");

  CLI::App* sample = app.add_subcommand("sample", "draw records from a joint law");
  sample->add_option("--rho", opt.rho_path, "prompt marginal (jsonl)")->required();
  auto* sample_policy = sample->add_option("--policy", opt.policy_path, "policy kernel (jsonl)");
  auto* sample_corpus = sample->add_option("--corpus", opt.corpus_path,
                                           "preference corpus (jsonl), sampled off-policy");
  sample_policy->excludes(sample_corpus);
  sample->add_option("--mode", opt.mode, "corpus candidates: both|chosen (default both)")
      ->check(CLI::IsMember({"both", "chosen"}));
  sample->add_option("--samples", samples, "number of draws")->required();
  sample->add_option("--seed", opt.seed, "sampling seed (default 0)");
  sample->add_option("--out", opt.out_path, "write records here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  if (audit->parsed()) {
    const bool sampled = samples_opt->count() > 0;
    if (sampled && samples == 0) {
      std::cerr << "error: --samples must be at least 1\n";
      return kExitValidation;
    }
    return run_audit(opt, !sampled, samples);
  }
  if (demo->parsed()) return run_demo(opt, suppression);
  if (classify->parsed()) return run_classify(opt, judges);
  if (sample->parsed()) {
    if (opt.policy_path.empty() == opt.corpus_path.empty()) {
      std::cerr << "error: sample needs exactly one of --policy or --corpus\n";
      return kExitValidation;
    }
    return run_sample(opt, samples);
  }
  return kExitValidation;
}
