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

#include "blindspot/report.hpp"

#include <charconv>

#include <json.hpp>

#include "blindspot/version.hpp"

namespace blindspot {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "text") return ReportFormat::text;
  if (s == "structured") return ReportFormat::structured;
  throw ValidationError("unknown report format '" + s + "' (expected text or structured)");
}

namespace {

ordered_json provenance_json(const Provenance& prov) {
  ordered_json obj;
  obj["schema_version"] = kReportSchemaVersion;
  obj["tool_version"] = kVersion;
  obj["command"] = prov.command;
  obj["mode"] = prov.mode;
  obj["q_mode"] = prov.q_mode ? ordered_json(*prov.q_mode) : ordered_json(nullptr);
  obj["loss_class"] = prov.loss_class ? ordered_json(*prov.loss_class) : ordered_json(nullptr);
  obj["seed"] = prov.seed ? ordered_json(*prov.seed) : ordered_json(nullptr);
  obj["tolerance"] = prov.tolerance;
  obj["notes"] = prov.notes;
  return obj;
}

std::string provenance_text(const Provenance& prov) {
  std::string out;
  out += "# blindspot " + prov.command + " report (schema " + kReportSchemaVersion + ", tool " +
         kVersion + ")\n";
  out += "# mode: " + prov.mode + "\n";
  out += "# q_mode: " + (prov.q_mode ? *prov.q_mode : "none") + "\n";
  out += "# loss_class: " + (prov.loss_class ? *prov.loss_class : "none") + "\n";
  out += "# seed: " + (prov.seed ? std::to_string(*prov.seed) : "none") + "\n";
  out += "# tolerance: " + format_double(prov.tolerance) + "\n";
  for (const std::string& note : prov.notes) out += "# note: " + note + "\n";
  return out;
}

std::string finish_json(ordered_json obj) { return obj.dump(2) + "\n"; }

ordered_json gap_report_json(const GapReport& r) {
  ordered_json obj;
  obj["r_gen"] = r.r_gen;
  obj["r_disc"] = r.r_disc;
  obj["gap"] = r.gap;
  obj["tv"] = r.tv;
  obj["bound"] = r.bound;
  obj["bound_satisfied"] = r.bound_satisfied;
  obj["slack"] = r.slack;
  return obj;
}

std::string gap_report_text(const GapReport& r) {
  std::string out;
  out += "r_gen            " + format_double(r.r_gen) + "\n";
  out += "r_disc           " + format_double(r.r_disc) + "\n";
  out += "gap              " + format_double(r.gap) + "\n";
  out += "tv               " + format_double(r.tv) + "\n";
  out += "bound            " + format_double(r.bound) + "\n";
  out += std::string("bound_satisfied  ") + (r.bound_satisfied ? "yes" : "no") + "\n";
  out += "slack            " + format_double(r.slack) + "\n";
  return out;
}

ordered_json estimate_json(const Estimate& e) {
  ordered_json obj;
  obj["value"] = e.value;
  obj["ci_low"] = e.ci_low;
  obj["ci_high"] = e.ci_high;
  obj["n"] = e.n;
  obj["confidence"] = e.confidence;
  return obj;
}

std::string estimate_text(const std::string& name, const Estimate& e) {
  return name + "  " + format_double(e.value) + "  [" + format_double(e.ci_low) + ", " +
         format_double(e.ci_high) + "]  n=" + std::to_string(e.n) +
         "  confidence=" + format_double(e.confidence) + "\n";
}

ordered_json rational_json(const Rational& r) {
  ordered_json obj;
  obj["num"] = r.num;
  obj["den"] = r.den;
  obj["value"] = r.value();
  return obj;
}

std::string rational_text(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den) + " (" + format_double(r.value()) +
         ")";
}

ordered_json loss_table_json(const BoundedLoss& loss) {
  ordered_json cells = ordered_json::array();
  for (const Label& x : loss.prompts()) {
    for (const Label& y : loss.responses()) {
      ordered_json cell;
      cell["prompt"] = x;
      cell["response"] = y;
      cell["value"] = loss.value(x, y);
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace

std::string render_audit(const Provenance& prov, const GapReport& report, ReportFormat fmt) {
  if (fmt == ReportFormat::structured) {
    ordered_json obj = provenance_json(prov);
    obj["report"] = gap_report_json(report);
    return finish_json(obj);
  }
  return provenance_text(prov) + gap_report_text(report);
}

std::string render_sampled_audit(const Provenance& prov, const SampledAudit& audit,
                                 ReportFormat fmt) {
  if (fmt == ReportFormat::structured) {
    ordered_json obj = provenance_json(prov);
    obj["n"] = audit.n;
    obj["confidence"] = audit.confidence;
    ordered_json est;
    est["r_gen"] = estimate_json(audit.r_gen);
    est["r_disc"] = estimate_json(audit.r_disc);
    est["gap"] = estimate_json(audit.gap);
    est["tv_plug_in"] = estimate_json(audit.tv);
    obj["estimates"] = est;
    return finish_json(obj);
  }
  std::string out = provenance_text(prov);
  out += "n per regime     " + std::to_string(audit.n) + "\n";
  out += estimate_text("r_gen      ", audit.r_gen);
  out += estimate_text("r_disc     ", audit.r_disc);
  out += estimate_text("gap        ", audit.gap);
  out += estimate_text("tv_plug_in ", audit.tv);
  return out;
}

std::string render_demo(const Provenance& prov, const DemoReport& demo,
                        const BoundedLoss& signed_witness,
                        const BoundedLoss& nonnegative_witness, ReportFormat fmt) {
  std::vector<Label> penalized;
  for (BehaviorMode m : demo.loss_spec.penalized_modes) penalized.push_back(label_for(m));

  if (fmt == ReportFormat::structured) {
    ordered_json obj = provenance_json(prov);

    ordered_json scenario;
    ordered_json prompts;
    for (const auto& [prompt, ambiguous] : demo.config.ambiguity_flags)
      prompts[prompt] = ambiguous ? "ambiguous" : "plain";
    scenario["prompts"] = prompts;
    ordered_json mode_probs;
    for (const char* cls : {"ambiguous", "plain"}) {
      const ModeProbabilities& probs = std::string(cls) == "ambiguous"
                                           ? demo.config.ambiguous_modes
                                           : demo.config.unambiguous_modes;
      ordered_json row;
      for (std::size_t m = 0; m < kBehaviorModeCount; ++m)
        row[label_for(static_cast<BehaviorMode>(m))] = probs.probs[m];
      mode_probs[cls] = row;
    }
    scenario["mode_probabilities"] = mode_probs;
    ordered_json suppression;
    for (std::size_t m = 0; m < kBehaviorModeCount; ++m)
      suppression[label_for(static_cast<BehaviorMode>(m))] = demo.suppression[m];
    scenario["suppression"] = suppression;
    scenario["penalized_modes"] = penalized;
    scenario["penalized_scope"] = demo.loss_spec.ambiguous_only ? "ambiguous_only" : "all_prompts";
    scenario["l_max"] = demo.loss_spec.l_max;
    obj["scenario"] = scenario;

    obj["report"] = gap_report_json(demo.report);

    ordered_json mass;
    mass["on_policy_penalized"] = demo.on_policy_penalized_mass;
    mass["off_policy_penalized"] = demo.off_policy_penalized_mass;
    obj["penalized_mass"] = mass;

    ordered_json witness;
    witness["signed_gap"] = demo.signed_witness_gap;
    witness["nonnegative_gap"] = demo.nonnegative_witness_gap;
    witness["signed_table"] = loss_table_json(signed_witness);
    witness["nonnegative_table"] = loss_table_json(nonnegative_witness);
    obj["witness"] = witness;

    ordered_json headline;
    headline["gap_threshold"] = demo.headline_threshold;
    headline["met"] = demo.headline_met;
    headline["off_policy_risk_threshold"] = demo.off_policy_low_threshold;
    headline["off_policy_risk_low"] = demo.off_policy_risk_low;
    obj["headline"] = headline;
    return finish_json(obj);
  }

  std::string out = provenance_text(prov);
  out += "prompts:\n";
  for (const auto& [prompt, ambiguous] : demo.config.ambiguity_flags)
    out += "  " + prompt + "  " + (ambiguous ? "ambiguous" : "plain") + "\n";
  out += "penalized modes:";
  for (const Label& l : penalized) out += " " + l;
  out += demo.loss_spec.ambiguous_only ? "  (ambiguous prompts only)\n" : "  (all prompts)\n";
  out += "suppression:\n";
  for (std::size_t m = 0; m < kBehaviorModeCount; ++m)
    out += "  " + label_for(static_cast<BehaviorMode>(m)) + "  " +
           format_double(demo.suppression[m]) + "\n";
  out += gap_report_text(demo.report);
  out += "penalized mass   on_policy=" + format_double(demo.on_policy_penalized_mass) +
         "  off_policy=" + format_double(demo.off_policy_penalized_mass) + "\n";
  out += "witness gaps     signed=" + format_double(demo.signed_witness_gap) +
         "  nonnegative=" + format_double(demo.nonnegative_witness_gap) + "\n";
  for (const auto& [name, witness] :
       {std::pair<const char*, const BoundedLoss&>{"signed", signed_witness},
        {"nonnegative", nonnegative_witness}}) {
    out += std::string("witness table (") + name + "):\n";
    for (const Label& x : witness.prompts()) {
      out += "  " + x + ":";
      for (const Label& y : witness.responses())
        out += " " + y + "=" + format_double(witness.value(x, y));
      out += "\n";
    }
  }
  out += "headline         gap >= " + format_double(demo.headline_threshold) +
         "*l_max: " + (demo.headline_met ? "yes" : "no") + "; off-policy risk <= " +
         format_double(demo.off_policy_low_threshold) +
         "*l_max: " + (demo.off_policy_risk_low ? "yes" : "no") + "\n";
  return out;
}

std::string render_classify(const Provenance& prov, const ClassifyReport& report,
                            ReportFormat fmt) {
  const CategorySummary& s = report.summary;
  if (fmt == ReportFormat::structured) {
    ordered_json obj = provenance_json(prov);
    obj["judges"] = report.judge_names;

    ordered_json categories;
    categories["consensus"] = s.consensus;
    categories["conflict"] = s.conflict;
    categories["indifference"] = s.indifference;
    categories["total"] = s.total;
    if (s.total > 0) {
      ordered_json rates;
      rates["consensus"] = rational_json(s.consensus_rate());
      rates["conflict"] = rational_json(s.conflict_rate());
      rates["indifference"] = rational_json(s.indifference_rate());
      categories["rates"] = rates;
    } else {
      categories["rates"] = nullptr;
    }
    obj["categories"] = categories;

    ordered_json supremacy = ordered_json::array();
    const std::size_t n = report.supremacy.judge_names.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        ordered_json entry;
        entry["judge"] = report.supremacy.judge_names[i];
        entry["versus"] = report.supremacy.judge_names[j];
        entry["conflicts"] = report.supremacy.conflict_counts[i][j];
        entry["rate"] = report.supremacy.rates[i][j]
                            ? rational_json(*report.supremacy.rates[i][j])
                            : ordered_json(nullptr);
        supremacy.push_back(entry);
      }
    }
    obj["supremacy"] = supremacy;
    obj["arbitrariness"] =
        report.arbitrariness ? rational_json(*report.arbitrariness) : ordered_json(nullptr);
    return finish_json(obj);
  }

  std::string out = provenance_text(prov);
  out += "judges:";
  for (const std::string& name : report.judge_names) out += " " + name;
  out += "\n";
  out += "consensus        " + std::to_string(s.consensus) + "\n";
  out += "conflict         " + std::to_string(s.conflict) + "\n";
  out += "indifference     " + std::to_string(s.indifference) + "\n";
  out += "total            " + std::to_string(s.total) + "\n";
  if (s.total > 0) {
    out += "consensus_rate   " + rational_text(s.consensus_rate()) + "\n";
    out += "conflict_rate    " + rational_text(s.conflict_rate()) + "\n";
    out += "indifference_rate " + rational_text(s.indifference_rate()) + "\n";
  }
  out += "supremacy (judge over versus, on their shared conflicts):\n";
  const std::size_t n = report.supremacy.judge_names.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      out += "  " + report.supremacy.judge_names[i] + " over " +
             report.supremacy.judge_names[j] + ": ";
      if (report.supremacy.rates[i][j])
        out += rational_text(*report.supremacy.rates[i][j]) + " of " +
               std::to_string(report.supremacy.conflict_counts[i][j]) + " conflicts\n";
      else
        out += "undefined (no conflicts)\n";
    }
  }
  out += "arbitrariness    ";
  out += report.arbitrariness ? rational_text(*report.arbitrariness)
                              : std::string("undefined (no consensus pairs)");
  out += "\n";
  return out;
}

}  // namespace blindspot
