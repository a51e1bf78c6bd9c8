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

#include "blindspot/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace blindspot {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + what);
}

ordered_json parse_line(const std::string& line, std::size_t line_no) {
  ordered_json obj = ordered_json::parse(line, nullptr, false);
  if (obj.is_discarded()) line_error(line_no, "malformed JSON");
  if (!obj.is_object()) line_error(line_no, "expected a JSON object");
  return obj;
}

std::string require_string(const ordered_json& obj, const char* field, std::size_t line_no) {
  if (!obj.contains(field)) line_error(line_no, std::string("missing required field '") + field + "'");
  if (!obj[field].is_string()) line_error(line_no, std::string("field '") + field + "' must be a string");
  std::string value = obj[field].get<std::string>();
  if (value.empty()) line_error(line_no, std::string("field '") + field + "' must be non-empty");
  return value;
}

double require_number(const ordered_json& obj, const char* field, std::size_t line_no) {
  if (!obj.contains(field)) line_error(line_no, std::string("missing required field '") + field + "'");
  if (!obj[field].is_number()) line_error(line_no, std::string("field '") + field + "' must be a number");
  return obj[field].get<double>();
}

}  // namespace

const char* to_string(CorpusMode m) {
  return m == CorpusMode::both_candidates ? "both_candidates" : "chosen_only";
}

PreferenceCorpus parse_corpus(std::istream& in, const std::string& source_name) {
  PreferenceCorpus corpus;
  corpus.source_name = source_name;
  corpus.version = "1";

  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json obj = parse_line(line, line_no);

    PreferencePair pair;
    pair.prompt = require_string(obj, "prompt", line_no);
    pair.candidate_a = require_string(obj, "candidate_a", line_no);
    pair.candidate_b = require_string(obj, "candidate_b", line_no);
    if (pair.candidate_a == pair.candidate_b)
      line_error(line_no, "candidates must be distinct");
    const std::string chosen = require_string(obj, "chosen", line_no);
    if (chosen == "a")
      pair.chosen = ChosenSide::a;
    else if (chosen == "b")
      pair.chosen = ChosenSide::b;
    else
      line_error(line_no, "field 'chosen' must be \"a\" or \"b\", got \"" + chosen + "\"");
    if (obj.contains("annotator_id"))
      pair.annotator_id = require_string(obj, "annotator_id", line_no);
    if (obj.contains("id")) {
      pair.id = require_string(obj, "id", line_no);
      if (!seen_ids.insert(*pair.id).second)
        line_error(line_no, "duplicate record identifier '" + *pair.id + "'");
    }

    corpus.prompt_index[pair.prompt].push_back(corpus.records.size());
    corpus.record_lines.push_back(line_no);
    corpus.records.push_back(std::move(pair));
  }
  return corpus;
}

PreferenceCorpus parse_corpus_text(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  return parse_corpus(in, source_name);
}

std::string serialize_corpus(const PreferenceCorpus& corpus) {
  std::string out;
  for (const PreferencePair& pair : corpus.records) {
    ordered_json obj;
    obj["prompt"] = pair.prompt;
    obj["candidate_a"] = pair.candidate_a;
    obj["candidate_b"] = pair.candidate_b;
    obj["chosen"] = pair.chosen == ChosenSide::a ? "a" : "b";
    if (pair.annotator_id) obj["annotator_id"] = *pair.annotator_id;
    if (pair.id) obj["id"] = *pair.id;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

JointLaw corpus_to_offpolicy(const PreferenceCorpus& corpus, const Distribution& rho,
                             CorpusMode mode, std::vector<std::string>* warnings) {
  if (corpus.records.empty())
    throw ValidationError("corpus_to_offpolicy: empty corpus cannot induce a kernel");

  if (warnings) {
    for (const auto& [prompt, record_ids] : corpus.prompt_index) {
      if (rho.contains(prompt)) continue;
      std::string where;
      if (!record_ids.empty() && record_ids[0] < corpus.record_lines.size())
        where = " (first at line " + std::to_string(corpus.record_lines[record_ids[0]]) + ")";
      warnings->push_back("corpus prompt '" + prompt + "'" + where +
                          " is outside the audit population and was ignored");
    }
  }

  // Candidate labels get alphabet positions in first-appearance order:
  // prompts in rho order, records in file order, candidate_a before
  // candidate_b. Duplicate response text at a prompt accumulates weight.
  std::vector<Label> alphabet;
  std::unordered_map<Label, std::size_t> alphabet_index;
  auto intern = [&](const Label& y) {
    auto [it, inserted] = alphabet_index.emplace(y, alphabet.size());
    if (inserted) alphabet.push_back(y);
    return it->second;
  };

  std::vector<std::pair<Label, std::vector<std::pair<std::size_t, double>>>> raw_rows;
  for (const Label& x : rho.support()) {
    auto rec_it = corpus.prompt_index.find(x);
    if (rec_it == corpus.prompt_index.end() || rec_it->second.empty())
      throw ValidationError("corpus_to_offpolicy: prompt '" + x + "' has no corpus records");
    std::vector<std::pair<std::size_t, double>> cells;
    for (std::size_t rec_idx : rec_it->second) {
      const PreferencePair& pair = corpus.records[rec_idx];
      if (mode == CorpusMode::both_candidates) {
        cells.emplace_back(intern(pair.candidate_a), 1.0);
        cells.emplace_back(intern(pair.candidate_b), 1.0);
      } else {
        const std::string& chosen =
            pair.chosen == ChosenSide::a ? pair.candidate_a : pair.candidate_b;
        cells.emplace_back(intern(chosen), 1.0);
      }
    }
    if (cells.empty())
      throw ValidationError("corpus_to_offpolicy: prompt '" + x +
                            "' has no candidates after mode filtering");
    raw_rows.emplace_back(x, std::move(cells));
  }

  std::vector<std::pair<Label, Distribution>> rows;
  rows.reserve(raw_rows.size());
  for (auto& [x, cells] : raw_rows) {
    std::vector<double> weights(alphabet.size(), 0.0);
    for (auto& [idx, w] : cells) weights[idx] += w;
    rows.emplace_back(
        x, Distribution::make(alphabet, std::move(weights), NormalizationPolicy::renormalize));
  }
  return JointLaw::make(rho, Kernel::make(alphabet, std::move(rows)), Regime::off_policy);
}

MarginalCheck check_equal_marginal(const JointLaw& p, const JointLaw& q, double tol) {
  if (tol < 0.0) throw ValidationError("check_equal_marginal: negative tolerance");
  MarginalCheck result;
  const Distribution& mp = p.prompt_marginal();
  const Distribution& mq = q.prompt_marginal();
  for (std::size_t i = 0; i < mp.size(); ++i) {
    const Label& x = mp.support()[i];
    if (!mq.contains(x)) {
      result.issues.push_back({x, mp.weights()[i], std::nullopt});
    } else if (std::abs(mp.weights()[i] - mq.weight_of(x)) > tol) {
      result.issues.push_back({x, mp.weights()[i], mq.weight_of(x)});
    }
  }
  for (std::size_t i = 0; i < mq.size(); ++i) {
    const Label& x = mq.support()[i];
    if (!mp.contains(x)) result.issues.push_back({x, std::nullopt, mq.weights()[i]});
  }
  result.passed = result.issues.empty();
  return result;
}

std::string MarginalCheck::describe() const {
  if (passed) return "prompt marginals agree";
  std::string out = "prompt marginals differ:";
  for (const Issue& issue : issues) {
    out += "\n  prompt '" + issue.prompt + "': ";
    out += issue.p_weight ? "P=" + format_shortest(*issue.p_weight) : "missing from P";
    out += ", ";
    out += issue.q_weight ? "Q=" + format_shortest(*issue.q_weight) : "missing from Q";
  }
  return out;
}

// ---- line-format loaders and serializers ----------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

std::vector<ordered_json> parse_lines(const std::string& text) {
  std::vector<ordered_json> objects;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    objects.push_back(parse_line(line, line_no));
  }
  return objects;
}

}  // namespace

Distribution load_distribution(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<Label> labels;
  std::vector<double> weights;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json obj = parse_line(line, line_no);
    labels.push_back(require_string(obj, "label", line_no));
    weights.push_back(require_number(obj, "weight", line_no));
  }
  if (labels.empty()) throw ValidationError("'" + path + "': no distribution entries");
  try {
    return Distribution::make(std::move(labels), std::move(weights), NormalizationPolicy::strict);
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

std::string serialize_distribution(const Distribution& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    ordered_json obj;
    obj["label"] = d.support()[i];
    obj["weight"] = d.weights()[i];
    out += obj.dump();
    out += '\n';
  }
  return out;
}

Kernel load_kernel(const std::string& path) {
  const std::string text = read_file(path);
  // First appearance fixes both row order and alphabet order.
  std::vector<Label> alphabet;
  std::unordered_set<Label> alphabet_seen;
  std::vector<Label> prompt_order;
  std::unordered_map<Label, std::vector<std::pair<Label, double>>> cells;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json obj = parse_line(line, line_no);
    const Label x = require_string(obj, "prompt", line_no);
    const Label y = require_string(obj, "response", line_no);
    const double w = require_number(obj, "weight", line_no);
    if (!cells.count(x)) prompt_order.push_back(x);
    if (alphabet_seen.insert(y).second) alphabet.push_back(y);
    cells[x].emplace_back(y, w);
  }
  if (prompt_order.empty()) throw ValidationError("'" + path + "': no kernel entries");

  std::unordered_map<Label, std::size_t> alphabet_index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) alphabet_index.emplace(alphabet[i], i);

  std::vector<std::pair<Label, Distribution>> rows;
  for (const Label& x : prompt_order) {
    std::vector<double> weights(alphabet.size(), 0.0);
    for (const auto& [y, w] : cells[x]) weights[alphabet_index[y]] += w;
    try {
      rows.emplace_back(
          x, Distribution::make(alphabet, std::move(weights), NormalizationPolicy::strict));
    } catch (const ValidationError& e) {
      throw ValidationError("'" + path + "', row '" + x + "': " + e.what());
    }
  }
  return Kernel::make(std::move(alphabet), std::move(rows));
}

std::string serialize_kernel(const Kernel& k) {
  std::string out;
  for (const Label& x : k.prompts()) {
    const Distribution& row = k.row(x);
    for (std::size_t i = 0; i < row.size(); ++i) {
      ordered_json obj;
      obj["prompt"] = x;
      obj["response"] = row.support()[i];
      obj["weight"] = row.weights()[i];
      out += obj.dump();
      out += '\n';
    }
  }
  return out;
}

BoundedLoss load_loss(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<ordered_json> lines = parse_lines(text);
  if (lines.empty()) throw ValidationError("'" + path + "': empty loss file");
  const ordered_json& header = lines.front();
  if (!header.contains("lower") || !header.contains("upper"))
    throw ValidationError("'" + path + "': first line must declare {\"lower\", \"upper\"}");
  const double lower = require_number(header, "lower", 1);
  const double upper = require_number(header, "upper", 1);

  std::vector<Label> prompts;
  std::vector<Label> responses;
  std::unordered_map<Label, std::size_t> prompt_index;
  std::unordered_map<Label, std::size_t> response_index;
  struct Cell {
    std::size_t x, y;
    double v;
  };
  std::vector<Cell> parsed;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const Label x = require_string(lines[i], "prompt", line_no);
    const Label y = require_string(lines[i], "response", line_no);
    const double v = require_number(lines[i], "value", line_no);
    auto [px, new_prompt] = prompt_index.emplace(x, prompts.size());
    if (new_prompt) prompts.push_back(x);
    auto [py, new_response] = response_index.emplace(y, responses.size());
    if (new_response) responses.push_back(y);
    parsed.push_back({px->second, py->second, v});
  }
  if (parsed.empty()) throw ValidationError("'" + path + "': loss table has no cells");

  std::vector<double> values(prompts.size() * responses.size(),
                             std::numeric_limits<double>::quiet_NaN());
  for (const Cell& c : parsed) values[c.x * responses.size() + c.y] = c.v;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isnan(values[i]))
      throw ValidationError("'" + path + "': missing cell (" + prompts[i / responses.size()] +
                            ", " + responses[i % responses.size()] + ")");
  try {
    return BoundedLoss::make(std::move(prompts), std::move(responses), std::move(values), lower,
                             upper);
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

std::string serialize_loss(const BoundedLoss& loss) {
  ordered_json header;
  header["lower"] = loss.lower();
  header["upper"] = loss.upper();
  std::string out = header.dump();
  out += '\n';
  for (const Label& x : loss.prompts()) {
    for (const Label& y : loss.responses()) {
      ordered_json obj;
      obj["prompt"] = x;
      obj["response"] = y;
      obj["value"] = loss.value(x, y);
      out += obj.dump();
      out += '\n';
    }
  }
  return out;
}

PreferenceCorpus load_corpus(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_corpus_text(text, path);
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

JointLaw parse_joint_text(const std::string& text) {
  std::vector<ordered_json> lines = parse_lines(text);
  if (lines.empty()) throw ValidationError("joint: empty input");
  const ordered_json& header = lines.front();
  if (!header.contains("regime"))
    throw ValidationError("joint: first line must declare {\"regime\"}");
  const Regime regime = regime_from_string(header["regime"].get<std::string>());

  std::vector<Label> marginal_labels;
  std::vector<double> marginal_weights;
  std::vector<Label> alphabet;
  std::unordered_set<Label> alphabet_seen;
  std::vector<Label> prompt_order;
  std::unordered_map<Label, std::vector<std::pair<Label, double>>> cells;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const ordered_json& obj = lines[i];
    if (obj.contains("label")) {
      marginal_labels.push_back(require_string(obj, "label", line_no));
      marginal_weights.push_back(require_number(obj, "weight", line_no));
    } else {
      const Label x = require_string(obj, "prompt", line_no);
      const Label y = require_string(obj, "response", line_no);
      const double w = require_number(obj, "weight", line_no);
      if (!cells.count(x)) prompt_order.push_back(x);
      if (alphabet_seen.insert(y).second) alphabet.push_back(y);
      cells[x].emplace_back(y, w);
    }
  }
  if (marginal_labels.empty()) throw ValidationError("joint: no marginal lines");
  if (prompt_order.empty()) throw ValidationError("joint: no kernel lines");

  std::unordered_map<Label, std::size_t> alphabet_index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) alphabet_index.emplace(alphabet[i], i);
  std::vector<std::pair<Label, Distribution>> rows;
  for (const Label& x : prompt_order) {
    std::vector<double> weights(alphabet.size(), 0.0);
    for (const auto& [y, w] : cells[x]) weights[alphabet_index[y]] += w;
    rows.emplace_back(x,
                      Distribution::make(alphabet, std::move(weights), NormalizationPolicy::strict));
  }
  return JointLaw::make(Distribution::make(std::move(marginal_labels),
                                           std::move(marginal_weights),
                                           NormalizationPolicy::strict),
                        Kernel::make(std::move(alphabet), std::move(rows)), regime);
}

std::string serialize_joint(const JointLaw& j) {
  ordered_json header;
  header["regime"] = to_string(j.regime());
  std::string out = header.dump();
  out += '\n';
  out += serialize_distribution(j.prompt_marginal());
  out += serialize_kernel(j.kernel());
  return out;
}

SampleSet parse_samples_text(const std::string& text) {
  std::vector<ordered_json> lines = parse_lines(text);
  if (lines.empty()) throw ValidationError("samples: empty input");
  const ordered_json& header = lines.front();
  if (!header.contains("regime") || !header.contains("seed"))
    throw ValidationError("samples: first line must declare {\"regime\", \"seed\"}");
  SampleSet s;
  s.source_regime = regime_from_string(header["regime"].get<std::string>());
  if (!header["seed"].is_number_unsigned())
    throw ValidationError("samples: seed must be a non-negative integer");
  s.seed = header["seed"].get<std::uint64_t>();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    s.records.emplace_back(require_string(lines[i], "prompt", line_no),
                           require_string(lines[i], "response", line_no));
  }
  return s;
}

std::string serialize_samples(const SampleSet& s) {
  ordered_json header;
  header["regime"] = to_string(s.source_regime);
  header["seed"] = s.seed;
  std::string out = header.dump();
  out += '\n';
  for (const auto& [x, y] : s.records) {
    ordered_json obj;
    obj["prompt"] = x;
    obj["response"] = y;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<Trajectory> parse_trajectories_text(const std::string& text) {
  std::vector<ordered_json> lines = parse_lines(text);
  std::vector<Trajectory> trajectories;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const ordered_json& obj = lines[i];
    if (!obj.contains("trajectory") || !obj["trajectory"].is_number_unsigned())
      line_error(line_no, "field 'trajectory' must be a non-negative integer");
    if (!obj.contains("turn") || !obj["turn"].is_number_unsigned())
      line_error(line_no, "field 'turn' must be a non-negative integer");
    const std::size_t t = obj["trajectory"].get<std::size_t>();
    const std::size_t turn = obj["turn"].get<std::size_t>();
    if (t >= trajectories.size()) trajectories.resize(t + 1);
    if (turn != trajectories[t].size())
      line_error(line_no, "turns of trajectory " + std::to_string(t) + " must arrive in order");
    trajectories[t].push_back(
        {require_string(obj, "prompt", line_no), require_string(obj, "response", line_no)});
  }
  return trajectories;
}

std::string serialize_trajectories(const std::vector<Trajectory>& trajectories) {
  std::string out;
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    for (std::size_t turn = 0; turn < trajectories[t].size(); ++turn) {
      ordered_json obj;
      obj["trajectory"] = t;
      obj["turn"] = turn;
      obj["prompt"] = trajectories[t][turn].prompt;
      obj["response"] = trajectories[t][turn].response;
      out += obj.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace blindspot
