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


// figchain command-line entry point. JSON goes to stdout, prose to stderr.
// Exit status: 0 ok, 1 findings of severity error, 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "figchain/figchain.hpp"

namespace fs = std::filesystem;
using namespace figchain;

namespace {

constexpr int kOk = 0, kFindings = 1, kInput = 2;

void emit(const Json& j) { std::cout << dump(j); }

FigureMap load_map(const std::string& path) { return parse_figure_map(read_file(path)); }
FigureDocument load_svg(const std::string& path) { return parse_figure(read_file(path), path); }

void summarize(const std::vector<LintFinding>& findings) {
  for (const auto& f : findings)
    std::cerr << to_string(f.severity) << " " << to_string(f.rule) << " at " << f.location << ": " << f.message
              << "\n";
}

bool any_errors(const std::vector<LintFinding>& findings) {
  for (const auto& f : findings)
    if (f.severity == Severity::Error) return true;
  return false;
}

// --- assessment plumbing ---------------------------------------------------

struct Responses {
  QuestionBank bank;
  std::vector<ResponseRecord> records;
};

Responses load_responses(const std::string& csv, const std::string& bank_path) {
  Responses r;
  r.bank = parse_question_bank(read_file(bank_path));
  auto in = ingest_responses(read_file(csv), r.bank);
  for (const auto& w : in.warnings) std::cerr << "warning: " << w << "\n";
  r.records = std::move(in.records);
  return r;
}

Json score_json(const Score& s, const std::string& version) {
  return Json{{"version", version}, {"value", s.value}, {"rule", s.rule_name}, {"n_records", s.n_records}};
}

Json table_json(const LoAccuracyTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json cells = Json::object();
    for (const auto& [v, c] : row.cells)
      cells[v] = Json{{"correct", c.correct}, {"total", c.total}, {"accuracy", c.accuracy}, {"improved", c.improved}};
    rows.push_back(Json{{"group", row.group}, {"questions", row.question_ids}, {"cells", cells}});
  }
  return Json{{"versions", t.versions}, {"rows", rows}};
}

/// participant_id,pretest with a header row.
std::map<std::string, double> load_pretest(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::map<std::string, double> out;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (n == 1 || line.empty()) continue;
    auto comma = line.find(',');
    std::string where = "row " + std::to_string(n);
    if (comma == std::string::npos) throw Error(ErrorKind::SchemaError, "expected participant_id,pretest", where);
    std::string id = line.substr(0, comma), value = line.substr(comma + 1);
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw Error(ErrorKind::SchemaError, "pretest is not a number", where);
    if (!out.emplace(id, x).second) throw Error(ErrorKind::SchemaError, "duplicate participant '" + id + "'", where);
  }
  return out;
}

// --- bundle config ---------------------------------------------------------

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path q(p);
  return (q.is_absolute() ? q : base / q).lexically_normal().string();
}

std::string required(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error(ErrorKind::SchemaError, std::string("missing string field '") + key + "'", "config");
  return j.at(key).get<std::string>();
}

int run_bundle(const std::string& config_path, const std::string& out_override) {
  Json cfg;
  try {
    cfg = Json::parse(read_file(config_path));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, e.what(), config_path);
  }
  fs::path base = fs::path(config_path).parent_path();
  auto map = load_map(resolve(base, required(cfg, "figure_map_path")));
  fs::path out_dir = out_override.empty() ? fs::path(resolve(base, required(cfg, "bundle_dir"))) : fs::path(out_override);

  ImprovementManifest m;
  m.figure_info.figure_number = required(cfg, "figure_number");
  m.figure_info.iteration_version = required(cfg, "iteration_version");
  parse_branch_name(m.figure_info.iteration_version);
  m.figure_info.creation_time = cfg.value("creation_time", utc_now());
  if (cfg.contains("author_info")) {
    m.author_info.name = cfg["author_info"].value("name", "");
    m.author_info.email = cfg["author_info"].value("email", "");
  }
  if (!cfg.contains("operations") || !cfg["operations"].is_array())
    throw Error(ErrorKind::SchemaError, "missing array 'operations'", "config");
  int id = 0;
  for (const auto& o : cfg["operations"]) {
    OperationInput in;
    in.commit_ref = o.value("commit_ref", "");
    in.message = required(o, "message");
    in.declared_transforms = o.value("declared_transforms", std::vector<std::string>{});
    in.before_svg = resolve(base, required(o, "before_svg"));
    in.after_svg = resolve(base, required(o, "after_svg"));
    for (const auto& p : {in.before_svg, in.after_svg})
      if (!fs::is_regular_file(p)) throw Error(ErrorKind::MissingArtifact, "file not found: '" + p.string() + "'", op_label(id + 1));
    m.operations.push_back(run_operation(++id, in, map));
  }
  if (cfg.contains("assessment_info")) {
    const auto& a = cfg["assessment_info"];
    m.assessment_info.questions = a.value("questions", std::vector<std::string>{});
    m.assessment_info.scoring_method = a.value("scoring_method", mean_accuracy_rule().name);
    if (a.contains("responses")) {
      std::string csv = resolve(base, a["responses"].get<std::string>());
      m.assessment_info.responses = a["responses"].get<std::string>();
      if (cfg.contains("question_bank_path")) {
        auto r = load_responses(csv, resolve(base, cfg["question_bank_path"].get<std::string>()));
        auto versions = versions_of(r.records);
        if (!versions.empty()) m.assessment_info.final_score = score(records_for(r.records, versions.back()));
      }
    }
  }
  auto written = assemble_bundle(m, out_dir);
  emit(to_json(written));
  bool errors = false;
  for (const auto& op : written.operations) {
    summarize(op.findings);
    errors = errors || any_errors(op.findings);
  }
  std::cerr << "bundle: " << written.operations.size() << " operations written to " << out_dir.string() << "\n";
  return errors ? kFindings : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"figchain: semantic diff, lint and audit trail for code-generated figures"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string map_path, bank_path, old_svg, new_svg, svg, message, commit_ref, config, csv, pretest, version,
      verdicts_path, manifest_path, out_dir;
  std::vector<std::string> declared;
  std::optional<std::uint64_t> seed;
  int max_iter = 2000;
  double tol = 1e-6;

  auto* classify = app.add_subcommand("classify", "assign a role to every element");
  classify->add_option("svg", svg)->required()->check(CLI::ExistingFile);
  classify->add_option("--map", map_path, "figure map")->required()->check(CLI::ExistingFile);

  auto* diff_cmd = app.add_subcommand("diff", "semantic diff of two figure revisions");
  diff_cmd->add_option("old", old_svg)->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("new", new_svg)->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("--map", map_path)->required()->check(CLI::ExistingFile);

  auto* lint = app.add_subcommand("lint", "check one operation against C1 and C2");
  lint->add_option("old", old_svg)->required()->check(CLI::ExistingFile);
  lint->add_option("new", new_svg)->required()->check(CLI::ExistingFile);
  lint->add_option("--map", map_path)->required()->check(CLI::ExistingFile);
  lint->add_option("--message,-m", message, "commit message")->required();
  lint->add_option("--declare", declared, "declared transform (repeatable)");
  lint->add_option("--commit", commit_ref, "commit reference used as finding location (default: the new SVG path)");

  auto* bundle = app.add_subcommand("bundle", "assemble the reviewer bundle from a project config");
  bundle->add_option("config", config)->required()->check(CLI::ExistingFile);
  bundle->add_option("--out", out_dir, "write here instead of the config's bundle_dir");

  auto* score_cmd = app.add_subcommand("score", "score each version");
  score_cmd->add_option("responses", csv)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--bank", bank_path)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--version", version, "only this version tag");

  auto* lo_table = app.add_subcommand("lo-table", "per learning-objective accuracy by version");
  lo_table->add_option("responses", csv)->required()->check(CLI::ExistingFile);
  lo_table->add_option("--bank", bank_path)->required()->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare", "fit the mixed model comparing two versions");
  compare->add_option("responses", csv)->required()->check(CLI::ExistingFile);
  compare->add_option("--bank", bank_path)->required()->check(CLI::ExistingFile);
  compare->add_option("--pretest", pretest, "participant_id,pretest CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--seed", seed, "restart seed (default $FIGCHAIN_SEED or 0)");
  compare->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  compare->add_option("--tol", tol)->check(CLI::PositiveNumber);

  auto* verdicts = app.add_subcommand("verdicts", "reviewer verdicts");
  verdicts->require_subcommand(1);
  auto* merge = verdicts->add_subcommand("merge", "validate and merge a verdicts file");
  merge->add_option("verdicts", verdicts_path)->required()->check(CLI::ExistingFile);
  merge->add_option("--manifest", manifest_path, "bundle directory or manifest.json; adds the iteration decision")
      ->check(CLI::ExistingPath);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kInput;
  }

  try {
    if (*classify) {
      auto doc = load_svg(svg);
      Json out = Json::array();
      for (const auto& c : classify_elements(doc, load_map(map_path)))
        out.push_back(Json{{"path", c.path}, {"role", c.role.token()}});
      emit(out);
      std::cerr << out.size() << " elements classified\n";
      return kOk;
    }
    if (*diff_cmd) {
      auto changes = figchain::diff(load_svg(old_svg), load_svg(new_svg), load_map(map_path));
      emit(Json{{"changes", to_json(changes)}});
      std::cerr << changes.size() << " element changes\n";
      return kOk;
    }
    if (*lint) {
      auto r = lint_operation(message, load_svg(old_svg), load_svg(new_svg), load_map(map_path), declared,
                              commit_ref.empty() ? new_svg : commit_ref);
      emit(diff_document(r));
      summarize(r.findings);
      std::cerr << (r.has_errors() ? "lint: FAIL" : "lint: ok") << " (" << r.changes.size() << " changes, "
                << r.findings.size() << " findings)\n";
      return r.has_errors() ? kFindings : kOk;
    }
    if (*bundle) return run_bundle(config, out_dir);
    if (*score_cmd) {
      auto r = load_responses(csv, bank_path);
      Json out = Json::array();
      auto tags = version.empty() ? versions_of(r.records) : std::vector<std::string>{version};
      for (const auto& v : tags) {
        auto s = score(records_for(r.records, v));
        out.push_back(score_json(s, v));
        std::cerr << v << ": " << s.value << " over " << s.n_records << " formal responses\n";
      }
      emit(out);
      return kOk;
    }
    if (*lo_table) {
      auto r = load_responses(csv, bank_path);
      emit(table_json(lo_accuracy_table(r.records, r.bank)));
      return kOk;
    }
    if (*compare) {
      auto r = load_responses(csv, bank_path);
      std::vector<ResponseRecord> formal;
      for (const auto& rec : r.records)
        if (rec.phase == Phase::Formal) formal.push_back(rec);
      auto d = glmm::dataset_from_records(formal, load_pretest(pretest));
      glmm::FitOptions o;
      if (seed) {
        o.seed = *seed;
      } else if (const char* env = std::getenv("FIGCHAIN_SEED")) {
        try {
          o.seed = std::stoull(env);
        } catch (const std::exception&) {
          std::cerr << "FIGCHAIN_SEED is not an unsigned integer\n";
          return kInput;
        }
      }
      o.max_iter = max_iter;
      o.tol = tol;
      auto f = glmm::fit(d, o);
      auto rep = glmm::report(f);
      emit(glmm::to_json(rep));
      for (const auto& c : rep.coefficients)
        std::cerr << c.name << ": " << c.estimate << " (SE " << c.se << ", p " << c.p << ")\n";
      for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
      return f.converged ? kOk : kFindings;
    }
    if (*merge) {
      auto merged = merge_verdicts(parse_verdicts(read_file(verdicts_path)));
      if (manifest_path.empty()) {
        emit(to_json(merged));
        std::cerr << merged.size() << " verdicts after merge\n";
        return kOk;
      }
      fs::path mp = manifest_path;
      auto manifest = fs::is_directory(mp) ? load_bundle(mp) : manifest_from_json(Json::parse(read_file(mp)));
      auto decision = decide_iteration(manifest, merged);
      emit(Json{{"verdicts", to_json(merged)}, {"decision", to_json(decision)}});
      std::cerr << "iteration " << manifest.figure_info.iteration_version << ": " << decision.status() << "\n";
      for (const auto& why : decision.reasons) std::cerr << "  " << why << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Json::exception& e) {
    std::cerr << "error: SchemaError: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
