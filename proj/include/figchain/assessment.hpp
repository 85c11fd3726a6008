// Copyright 2026 The figchain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Learning objectives, question banks, response ingestion and scoring.
//
// Question bank JSON is either a list of questions or an object
// {"learning_objectives": [...], "questions": [...]}; with the object form
// every lo_link must name a declared objective.
//
//   {"id": "q7", "phase": "formal",
//    "text_variants": {"V0": "...", "V1": "..."},
//    "choices": ["a", "b", "c"],
//    "choice_variants": {"V1": ["a", "b", "c'"]},     // optional
//    "correct_index": 2, "lo_links": ["b-LO5", "b-LO10"],
//    "figure_span": "shown in chart (a)"}              // optional
//
// The fourth choice, index 3, is always "I don't know" and never correct.
//
// Response CSV, header required and in this order:
//
//   participant_id,version_tag,phase,question_id,choice_index,response_time_ms[,correct]
//
// A trailing `correct` column is accepted but never trusted.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "figchain/error.hpp"

namespace figchain {

inline constexpr std::string_view kDontKnow = "I don't know";
inline constexpr int kDontKnowIndex = 3;

enum class Phase { Pre, Formal };

constexpr std::string_view to_string(Phase p) { return p == Phase::Pre ? "pre" : "formal"; }

inline Phase parse_phase(std::string_view s, const std::string& where = {}) {
  if (s == "pre") return Phase::Pre;
  if (s == "formal") return Phase::Formal;
  throw Error(ErrorKind::SchemaError, "phase must be 'pre' or 'formal', got '" + std::string(s) + "'", where);
}

/// Orders "q2" before "q10" and "b-LO5" before "b-LO10".
inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && digit(a[i2])) ++i2;
      while (j2 < b.size() && digit(b[j2])) ++j2;
      auto na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return a.size() - i < b.size() - j;
  return a < b;
}

struct NaturalLess {
  bool operator()(const std::string& a, const std::string& b) const { return natural_less(a, b); }
};

struct LearningObjective {
  std::string id;  // e.g. "a-LO9"
  std::string verb;
  std::string statement;
  std::string chart_ref;

  std::string render() const { return "The viewer will " + verb + " " + statement; }
};

struct Question {
  std::string id;
  Phase phase = Phase::Formal;
  std::map<std::string, std::string> text_variants;  // version tag -> text
  std::array<std::string, 3> choices;
  std::map<std::string, std::array<std::string, 3>> choice_variants;
  int correct_index = 0;
  std::set<std::string, NaturalLess> lo_links;
  std::optional<std::string> figure_span;
  bool needs_review = false;

  /// The three substantive choices for a version, falling back to `choices`.
  const std::array<std::string, 3>& choices_for(const std::string& tag) const {
    auto it = choice_variants.find(tag);
    return it == choice_variants.end() ? choices : it->second;
  }
  /// All four choices as shown to participants.
  std::array<std::string, 4> all_choices(const std::string& tag) const {
    const auto& c = choices_for(tag);
    return {c[0], c[1], c[2], std::string(kDontKnow)};
  }
  /// "b-LO5&b-LO10"
  std::string lo_group() const {
    std::string out;
    for (const auto& l : lo_links) out += (out.empty() ? "" : "&") + l;
    return out;
  }
};

struct QuestionBank {
  std::vector<LearningObjective> objectives;
  std::vector<Question> questions;

  const Question* find(std::string_view id) const {
    for (const auto& q : questions)
      if (q.id == id) return &q;
    return nullptr;
  }
};

namespace detail {

inline void check_question(const Question& q) {
  auto bad = [&](const std::string& why) { throw Error(ErrorKind::InvalidQuestion, why, q.id); };
  if (q.id.empty()) throw Error(ErrorKind::InvalidQuestion, "question id is empty");
  if (q.text_variants.empty()) bad("no text variants");
  if (q.correct_index < 0 || q.correct_index > 2) bad("correct_index must be 0, 1 or 2");
  if (q.lo_links.empty()) bad("lo_links is empty");
  auto check_choices = [&](const std::array<std::string, 3>& c) {
    for (const auto& s : c) {
      if (s.empty()) bad("empty choice text");
      if (s == kDontKnow) bad("'I don't know' is implicit and must not be listed");
    }
  };
  check_choices(q.choices);
  for (const auto& [tag, c] : q.choice_variants) {
    if (!q.text_variants.count(tag)) bad("choice variant '" + tag + "' has no text variant");
    check_choices(c);
  }
}

inline std::array<std::string, 3> choices_from_json(const nlohmann::json& j, const std::string& id) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorKind::InvalidQuestion, "exactly 3 substantive choices are required", id);
  return {j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::string>()};
}

}  // namespace detail

inline Question question_from_json(const nlohmann::json& j) {
  Question q;
  try {
    q.id = j.at("id").get<std::string>();
    q.phase = parse_phase(j.at("phase").get<std::string>(), q.id);
    for (const auto& [tag, text] : j.at("text_variants").items()) q.text_variants[tag] = text.get<std::string>();
    q.choices = detail::choices_from_json(j.at("choices"), q.id);
    if (j.contains("choice_variants"))
      for (const auto& [tag, c] : j.at("choice_variants").items())
        q.choice_variants[tag] = detail::choices_from_json(c, q.id);
    q.correct_index = j.at("correct_index").get<int>();
    for (const auto& l : j.at("lo_links")) q.lo_links.insert(l.get<std::string>());
    if (j.contains("figure_span") && !j.at("figure_span").is_null())
      q.figure_span = j.at("figure_span").get<std::string>();
    q.needs_review = j.value("needs_review", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidQuestion, e.what(), q.id);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidQuestion) throw;
    throw Error(ErrorKind::InvalidQuestion, e.what(), q.id);
  }
  detail::check_question(q);
  return q;
}

inline nlohmann::ordered_json to_json(const Question& q) {
  nlohmann::ordered_json j;
  j["id"] = q.id;
  j["phase"] = std::string(to_string(q.phase));
  j["text_variants"] = nlohmann::ordered_json::object();
  for (const auto& [tag, text] : q.text_variants) j["text_variants"][tag] = text;
  j["choices"] = q.choices;
  if (!q.choice_variants.empty()) {
    j["choice_variants"] = nlohmann::ordered_json::object();
    for (const auto& [tag, c] : q.choice_variants) j["choice_variants"][tag] = c;
  }
  j["correct_index"] = q.correct_index;
  j["lo_links"] = std::vector<std::string>(q.lo_links.begin(), q.lo_links.end());
  if (q.figure_span) j["figure_span"] = *q.figure_span;
  if (q.needs_review) j["needs_review"] = true;
  return j;
}

/// Throws InvalidQuestion.
inline QuestionBank parse_question_bank(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidQuestion, std::string("question bank is not valid JSON: ") + e.what());
  }
  QuestionBank bank;
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("questions")) throw Error(ErrorKind::InvalidQuestion, "missing 'questions' list");
    list = &j.at("questions");
    for (const auto& o : j.value("learning_objectives", nlohmann::json::array())) {
      LearningObjective lo{o.value("id", ""), o.value("verb", ""), o.value("statement", ""),
                           o.value("chart_ref", "")};
      if (lo.id.empty() || lo.verb.empty() || lo.statement.empty())
        throw Error(ErrorKind::InvalidQuestion, "learning objective needs id, verb and statement", lo.id);
      bank.objectives.push_back(std::move(lo));
    }
  }
  if (!list->is_array()) throw Error(ErrorKind::InvalidQuestion, "question bank must be a JSON list");
  std::set<std::string> ids;
  for (const auto& qj : *list) {
    Question q = question_from_json(qj);
    if (!ids.insert(q.id).second) throw Error(ErrorKind::InvalidQuestion, "duplicate question id", q.id);
    bank.questions.push_back(std::move(q));
  }
  if (!bank.objectives.empty()) {
    std::set<std::string> known;
    for (const auto& lo : bank.objectives) known.insert(lo.id);
    for (const auto& q : bank.questions)
      for (const auto& l : q.lo_links)
        if (!known.count(l)) throw Error(ErrorKind::InvalidQuestion, "lo_link '" + l + "' is not declared", q.id);
  }
  return bank;
}

struct ResponseRecord {
  std::string participant_id;
  std::string version_tag;
  Phase phase = Phase::Formal;
  std::string question_id;
  int choice_index = 0;
  bool correct = false;
  long long response_time_ms = 0;
};

struct IngestResult {
  std::vector<ResponseRecord> records;
  std::vector<std::string> warnings;
};

namespace detail {

/// RFC 4180 fields of one CSV line (quotes, doubled quotes).
inline std::vector<std::string> split_csv_line(std::string_view line, const std::string& where) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"' && out.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw Error(ErrorKind::SchemaError, "unterminated quoted field", where);
  return out;
}

inline std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 6> kResponseColumns = {
    "participant_id", "version_tag", "phase", "question_id", "choice_index", "response_time_ms"};

/// Validates every row against the bank and recomputes `correct`.
inline IngestResult ingest_responses(std::string_view csv, const QuestionBank& bank) {
  IngestResult out;
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= csv.size();) {
    auto nl = csv.find('\n', pos);
    auto line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (lines.empty() || lines[0].empty()) throw Error(ErrorKind::SchemaError, "missing header row", "row 1");
  auto header = detail::split_csv_line(lines[0], "row 1");
  bool has_correct = header.size() == 7 && header[6] == "correct";
  bool header_ok = header.size() == 6 || has_correct;
  for (std::size_t k = 0; header_ok && k < 6; ++k) header_ok = header[k] == kResponseColumns[k];
  if (!header_ok)
    throw Error(ErrorKind::SchemaError,
                "expected header 'participant_id,version_tag,phase,question_id,choice_index,response_time_ms'",
                "row 1");
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    std::string where = "row " + std::to_string(r + 1);
    auto f = detail::split_csv_line(lines[r], where);
    if (f.size() != header.size())
      throw Error(ErrorKind::SchemaError,
                  "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()), where);
    ResponseRecord rec;
    rec.participant_id = f[0];
    rec.version_tag = f[1];
    rec.phase = parse_phase(f[2], where);
    rec.question_id = f[3];
    if (rec.participant_id.empty() || rec.version_tag.empty())
      throw Error(ErrorKind::SchemaError, "participant_id and version_tag are required", where);
    const Question* q = bank.find(rec.question_id);
    if (!q) throw Error(ErrorKind::UnknownQuestion, "question '" + rec.question_id + "' is not in the bank", where);
    if (q->phase != rec.phase)
      throw Error(ErrorKind::SchemaError,
                  "phase '" + f[2] + "' does not match question phase '" + std::string(to_string(q->phase)) + "'",
                  where);
    if (!q->text_variants.count(rec.version_tag))
      throw Error(ErrorKind::SchemaError, "question '" + q->id + "' has no variant for '" + rec.version_tag + "'",
                  where);
    auto choice = detail::parse_int(f[4]);
    if (!choice) throw Error(ErrorKind::SchemaError, "choice_index is not an integer", where);
    if (*choice < 0 || *choice > kDontKnowIndex)
      throw Error(ErrorKind::ChoiceOutOfRange, "choice_index " + f[4] + " is outside 0..3", where);
    rec.choice_index = static_cast<int>(*choice);
    auto rt = detail::parse_int(f[5]);
    if (!rt || *rt < 0) throw Error(ErrorKind::SchemaError, "response_time_ms must be a nonnegative integer", where);
    rec.response_time_ms = *rt;
    rec.correct = rec.choice_index == q->correct_index;
    if (has_correct) {
      if (f[6] != "0" && f[6] != "1") throw Error(ErrorKind::SchemaError, "correct must be 0 or 1", where);
      if ((f[6] == "1") != rec.correct)
        out.warnings.push_back(where + ": correct=" + f[6] + " disagrees with the answer key; recomputed to " +
                               (rec.correct ? "1" : "0"));
    }
    if (!seen.emplace(rec.participant_id, rec.question_id).second)
      throw Error(ErrorKind::DuplicateResponse,
                  "participant '" + rec.participant_id + "' answered '" + rec.question_id + "' twice", where);
    out.records.push_back(std::move(rec));
  }
  return out;
}

struct Score {
  double value = 0;
  std::string rule_name;
  std::size_t n_records = 0;
};

/// A pluggable rule: a pure function over one version's records.
struct ScoringRule {
  std::string name;
  std::function<Score(const std::vector<ResponseRecord>&)> apply;
};

/// Mean of `correct` over formal-phase records.
inline ScoringRule mean_accuracy_rule() {
  return {"mean-accuracy", [](const std::vector<ResponseRecord>& records) {
            std::size_t n = 0, k = 0;
            for (const auto& r : records) {
              if (r.phase != Phase::Formal) continue;
              ++n;
              k += r.correct ? 1 : 0;
            }
            if (n == 0) throw Error(ErrorKind::EmptyRecords, "no formal-phase records to score");
            return Score{static_cast<double>(k) / static_cast<double>(n), "mean-accuracy", n};
          }};
}

/// Throws EmptyRecords or MixedVersions.
inline Score score(const std::vector<ResponseRecord>& records, const ScoringRule& rule = mean_accuracy_rule()) {
  if (records.empty()) throw Error(ErrorKind::EmptyRecords, "no records to score");
  for (const auto& r : records)
    if (r.version_tag != records.front().version_tag)
      throw Error(ErrorKind::MixedVersions,
                  "records mix versions '" + records.front().version_tag + "' and '" + r.version_tag + "'");
  return rule.apply(records);
}

/// Version tags in natural order.
inline std::vector<std::string> versions_of(const std::vector<ResponseRecord>& records) {
  std::set<std::string, NaturalLess> tags;
  for (const auto& r : records) tags.insert(r.version_tag);
  return {tags.begin(), tags.end()};
}

inline std::vector<ResponseRecord> records_for(const std::vector<ResponseRecord>& records, const std::string& tag) {
  std::vector<ResponseRecord> out;
  for (const auto& r : records)
    if (r.version_tag == tag) out.push_back(r);
  return out;
}

struct AccuracyCell {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0;
  bool improved = false;  // accuracy above the previous version's cell
};

struct LoAccuracyRow {
  std::string group;  // "b-LO5&b-LO10"
  std::vector<std::string> question_ids;
  std::map<std::string, AccuracyCell, NaturalLess> cells;  // by version tag
};

struct LoAccuracyTable {
  std::vector<std::string> versions;
  std::vector<LoAccuracyRow> rows;  // natural order of group name
};

/// Formal-phase accuracy per exact LO-link set and version.
inline LoAccuracyTable lo_accuracy_table(const std::vector<ResponseRecord>& records, const QuestionBank& bank) {
  LoAccuracyTable table;
  std::map<std::string, LoAccuracyRow, NaturalLess> rows;
  std::set<std::string, NaturalLess> versions;
  for (const auto& r : records) {
    if (r.phase != Phase::Formal) continue;
    const Question* q = bank.find(r.question_id);
    if (!q) throw Error(ErrorKind::UnknownQuestion, "question '" + r.question_id + "' is not in the bank");
    auto& row = rows[q->lo_group()];
    row.group = q->lo_group();
    if (std::find(row.question_ids.begin(), row.question_ids.end(), q->id) == row.question_ids.end())
      row.question_ids.push_back(q->id);
    auto& cell = row.cells[r.version_tag];
    ++cell.total;
    cell.correct += r.correct ? 1 : 0;
    versions.insert(r.version_tag);
  }
  table.versions.assign(versions.begin(), versions.end());
  for (auto& [group, row] : rows) {
    std::sort(row.question_ids.begin(), row.question_ids.end(), natural_less);
    const AccuracyCell* prev = nullptr;
    for (const auto& v : table.versions) {
      auto it = row.cells.find(v);
      if (it == row.cells.end()) continue;
      auto& cell = it->second;
      cell.accuracy = static_cast<double>(cell.correct) / static_cast<double>(cell.total);
      cell.improved = prev && cell.accuracy > prev->accuracy;
      prev = &cell;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct Substitution {
  std::string field;  // "text" or "choice[k]"
  std::string from;
  std::string to;
  std::size_t count = 0;
};

struct AdaptResult {
  Question question;
  std::vector<Substitution> log;
  std::vector<std::string> warnings;  // TermNotFound
};

namespace detail {

/// Single left-to-right pass; at each position the longest matching term
/// wins, so replacements never feed back into later matches.
inline std::string substitute(const std::string& text, const std::vector<std::pair<std::string, std::string>>& terms,
                              const std::string& field, std::vector<Substitution>& log,
                              std::map<std::string, std::size_t>& hits) {
  std::map<std::string, std::size_t> local;
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& t : terms)
      if (!t.first.empty() && text.compare(i, t.first.size(), t.first) == 0 &&
          (!best || t.first.size() > best->first.size()))
        best = &t;
    if (best) {
      out += best->second;
      ++local[best->first];
      i += best->first.size();
    } else {
      out += text[i++];
    }
  }
  for (const auto& t : terms) {
    auto it = local.find(t.first);
    if (it == local.end()) continue;
    log.push_back({field, t.first, t.second, it->second});
    hits[t.first] += it->second;
  }
  return out;
}

}  // namespace detail

/// Produces the `to_tag` variant by exact-phrase substitution over the text
/// and the three choices. Scoring content is untouched.
inline AdaptResult adapt_question(const Question& q, const std::string& from_tag, const std::string& to_tag,
                                  const std::map<std::string, std::string>& terminology) {
  auto it = q.text_variants.find(from_tag);
  if (it == q.text_variants.end())
    throw Error(ErrorKind::InvalidQuestion, "no text variant for '" + from_tag + "'", q.id);
  std::vector<std::pair<std::string, std::string>> terms(terminology.begin(), terminology.end());
  AdaptResult out{q, {}, {}};
  std::map<std::string, std::size_t> hits;
  out.question.text_variants[to_tag] = detail::substitute(it->second, terms, "text", out.log, hits);
  std::array<std::string, 3> choices = q.choices_for(from_tag);
  for (std::size_t k = 0; k < 3; ++k)
    choices[k] = detail::substitute(choices[k], terms, "choice[" + std::to_string(k) + "]", out.log, hits);
  if (choices != q.choices || q.choice_variants.count(from_tag)) out.question.choice_variants[to_tag] = choices;
  else out.question.choice_variants.erase(to_tag);
  for (const auto& [from, to] : terms)
    if (!hits.count(from))
      out.warnings.push_back("TermNotFound: '" + from + "' does not occur in question " + q.id);
  return out;
}

namespace detail {

inline std::string remove_span(const std::string& text, const std::string& span) {
  auto pos = text.find(span);
  if (pos == std::string::npos) return text;
  std::string out = text.substr(0, pos) + text.substr(pos + span.size());
  std::string clean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    char c = out[i];
    if (c == ' ' && (clean.empty() || clean.back() == ' ')) continue;
    if ((c == '?' || c == '.' || c == ',' || c == ':' || c == ';') && !clean.empty() && clean.back() == ' ')
      clean.pop_back();
    clean += c;
  }
  while (!clean.empty() && clean.back() == ' ') clean.pop_back();
  return clean;
}

}  // namespace detail

/// Pre-test question with the annotated figure reference removed. Throws
/// NoAnnotatedSpan when there is nothing to remove.
inline Question derive_pretest(const Question& q) {
  if (q.phase != Phase::Formal) throw Error(ErrorKind::InvalidQuestion, "only formal questions yield pre-tests", q.id);
  if (!q.figure_span || q.figure_span->empty())
    throw Error(ErrorKind::NoAnnotatedSpan, "question has no annotated figure-reference span", q.id);
  Question pre = q;
  pre.id = q.id + "-pre";
  pre.phase = Phase::Pre;
  pre.figure_span.reset();
  pre.needs_review = true;
  bool found = false;
  for (auto& [tag, text] : pre.text_variants) {
    if (text.find(*q.figure_span) == std::string::npos) continue;
    found = true;
    text = detail::remove_span(text, *q.figure_span);
  }
  if (!found)
    throw Error(ErrorKind::NoAnnotatedSpan, "span '" + *q.figure_span + "' does not occur in the question text", q.id);
  return pre;
}

/// Pre-tests for every annotated formal question, in bank order.
inline std::vector<Question> derive_pretests(const QuestionBank& bank) {
  std::vector<Question> out;
  for (const auto& q : bank.questions)
    if (q.phase == Phase::Formal && q.figure_span) out.push_back(derive_pretest(q));
  return out;
}

}  // namespace figchain
