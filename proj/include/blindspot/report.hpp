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

#ifndef BLINDSPOT_REPORT_HPP
#define BLINDSPOT_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blindspot/discretion.hpp"
#include "blindspot/estimation.hpp"
#include "blindspot/risk.hpp"
#include "blindspot/scenario.hpp"

namespace blindspot {

enum class ReportFormat { text, structured };

ReportFormat report_format_from_string(const std::string& s);

/// The header every report carries: enough to rerun the command and to know
/// which conventions produced the numbers. Reports are byte-stable given the
/// same inputs; doubles render in shortest round-trip decimal form.
struct Provenance {
  std::string command;                  // audit | demo | classify | sample
  std::string mode;                     // exact | sampled | n/a
  std::optional<std::string> q_mode;    // how Q was constructed
  std::optional<std::string> loss_class;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-9;
  std::vector<std::string> notes;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

std::string render_audit(const Provenance& prov, const GapReport& report, ReportFormat fmt);

struct SampledAudit {
  Estimate r_gen;
  Estimate r_disc;
  Estimate gap;     // conservative: half-widths add, confidence is joint
  Estimate tv;      // plug-in estimate; toolkit addition, flagged in notes
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double confidence = 0.0;
};

std::string render_sampled_audit(const Provenance& prov, const SampledAudit& audit,
                                 ReportFormat fmt);

std::string render_demo(const Provenance& prov, const DemoReport& demo,
                        const BoundedLoss& signed_witness,
                        const BoundedLoss& nonnegative_witness, ReportFormat fmt);

struct ClassifyReport {
  std::vector<std::string> judge_names;
  CategorySummary summary;
  SupremacyMatrix supremacy;
  std::optional<Rational> arbitrariness;
};

std::string render_classify(const Provenance& prov, const ClassifyReport& report,
                            ReportFormat fmt);

}  // namespace blindspot

#endif  // BLINDSPOT_REPORT_HPP
