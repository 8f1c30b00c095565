// nbpractice command-line front end.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nbpractice.hpp"

namespace fs = std::filesystem;
using namespace nbpractice;

namespace {

constexpr int kUsage = 2;

struct GlobalFlags {
  std::string config_path;
  unsigned jobs = 0;
  bool allow_any_kernel = false;
  bool strict_bp5 = false;
  std::string test_match_scope;
  std::string test_profile;
  std::string fail_severity;
  std::string linter_cmd;
  std::string md_denominator;
};

Config build_config(const GlobalFlags& g) {
  Config cfg;
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv("NBPRACTICE_CONFIG"); env && *env) path = env;
  if (!path.empty()) cfg = load_config_file(path);

  auto bad = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
  cfg.jobs = g.jobs;
  if (g.allow_any_kernel) cfg.allow_any_kernel = true;
  if (g.strict_bp5) cfg.strict_bp5 = true;
  if (!g.test_match_scope.empty()) {
    auto s = match_scope_from_string(g.test_match_scope);
    if (!s) bad("--test-match-scope must be full or top");
    cfg.test_match_scope = *s;
  }
  if (!g.test_profile.empty()) {
    auto p = test_profile_from_string(g.test_profile);
    if (!p) bad("--test-profile must be strict or recommended");
    cfg.test_profile = *p;
  }
  if (!g.fail_severity.empty()) {
    auto s = fail_severity_from_string(g.fail_severity);
    if (!s) bad("--fail-severity must be info, warning, error, or none");
    cfg.fail_severity = *s;
  }
  if (!g.md_denominator.empty()) {
    auto m = md_denominator_from_string(g.md_denominator);
    if (!m) bad("--md-denominator must be all or md-only");
    cfg.md_denominator = *m;
  }
  if (!g.linter_cmd.empty()) {
    BridgeConfig b = cfg.external.value_or(BridgeConfig{});
    b.command = g.linter_cmd == "pylint" ? std::string(kPylintTemplate) : g.linter_cmd;
    cfg.external = b;
  }
  return cfg;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& xs) { return {xs.begin(), xs.end()}; }

void write_out(const std::string& text, const std::string& file) {
  if (file.empty() || file == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write output", file);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit Jupyter notebooks against collaboration best practices."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GlobalFlags g;
  app.add_option("--config", g.config_path, "Config file (TOML); falls back to $NBPRACTICE_CONFIG");
  app.add_option("--jobs,-j", g.jobs, "Worker threads (0: one per CPU)");
  app.add_flag("--allow-any-kernel", g.allow_any_kernel, "Run code checks on non-Python kernels too");
  app.add_flag("--strict-bp5", g.strict_bp5, "Unexecuted code cells break top-to-bottom order");
  app.add_option("--test-match-scope", g.test_match_scope, "Test-import substring scope: full|top");
  app.add_option("--test-profile", g.test_profile, "Test-import rules: strict|recommended");
  app.add_option("--fail-severity", g.fail_severity, "Lowest severity that fails a lint run: info|warning|error|none");
  app.add_option("--linter-cmd", g.linter_cmd, "External linter command ({input} is the script path; 'pylint' for the preset)");
  app.add_option("--md-denominator", g.md_denominator, "Notebooks summarized for markdown measures: all|md-only");

  std::vector<std::string> lint_paths;
  bool lint_json = false;
  std::string lint_out;
  auto* lint = app.add_subcommand("lint", "Per-notebook findings");
  lint->add_option("paths", lint_paths, "Notebooks or directories")->required();
  lint->add_flag("--json", lint_json, "JSON report instead of text");
  lint->add_option("-o,--output", lint_out, "Write to a file instead of stdout");
  lint->fallthrough();

  std::vector<std::string> stats_paths;
  bool stats_json = false, stats_md = false, per_notebook = false, timing = false;
  std::string csv_dir, scores_path, stats_out;
  std::vector<double> percentiles;
  auto* stats = app.add_subcommand("stats", "Corpus summary statistics");
  stats->add_option("paths", stats_paths, "Notebooks or directories")->required();
  stats->add_flag("--json", stats_json, "JSON summary (default)");
  stats->add_flag("--markdown", stats_md, "Markdown summary table");
  stats->add_option("--csv-hist", csv_dir, "Write one CSV per histogram into this directory");
  stats->add_option("--scores", scores_path, "CSV of path,score enabling percentile subsets");
  stats->add_option("--percentiles", percentiles, "Percentiles for subsets (default 0.75,0.90)")->delimiter(',');
  stats->add_flag("--per-notebook", per_notebook, "Include per-notebook metrics in the JSON");
  stats->add_flag("--timing", timing, "Include elapsed time in the JSON");
  stats->add_option("-o,--output", stats_out, "Write to a file instead of stdout");
  stats->fallthrough();

  std::string extract_path, map_out;
  auto* extract = app.add_subcommand("extract", "Print the extracted Python script");
  extract->add_option("file", extract_path, "Notebook")->required();
  extract->add_option("--map-out", map_out, "Write the source map as JSON here (default: stderr)");
  extract->fallthrough();

  bool list_json = false;
  auto* list = app.add_subcommand("check-list", "Print the practice catalog");
  list->add_flag("--json", list_json, "JSON output");
  list->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*list) {
      if (list_json) std::cout << registry_json().dump(2) << "\n";
      else std::cout << render_registry_table();
      return 0;
    }

    Config cfg = build_config(g);

    if (*extract) {
      Notebook nb;
      try {
        nb = parse_notebook(read_file(extract_path), extract_path);
      } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
      }
      const auto script = extract_script(nb, cfg.strip);
      for (const auto& l : script.text_lines) std::cout << l << "\n";
      nlohmann::json map = nlohmann::json::array();
      for (const auto& m : script.map_entries) map.push_back({m.script_line, m.cell_index, m.cell_line});
      nlohmann::json stripped = nlohmann::json::array();
      for (const auto& s : script.stripped)
        stripped.push_back({{"cell", s.cell_index}, {"line", s.cell_line}, {"reason", to_string(s.reason)}});
      const nlohmann::json doc = {{"path", nb.path.generic_string()},
                                  {"columns", {"script_line", "cell", "cell_line"}},
                                  {"map", map},
                                  {"stripped", stripped}};
      if (map_out.empty()) {
        std::cerr << doc.dump() << "\n";
      } else {
        std::ofstream out(map_out, std::ios::binary);
        if (!out) throw Error(ErrorCode::io_error, "cannot write source map", map_out);
        out << doc.dump(2) << "\n";
      }
      return 0;
    }

    if (*lint) {
      const auto corpus = ingest(to_paths(lint_paths), cfg.jobs);
      const auto report = run_analysis(corpus, cfg);
      if (lint_json) write_out(to_json(report, cfg).dump(2) + "\n", lint_out);
      else write_out(render_findings_text(report), lint_out);
      return exit_code(report, cfg.fail_severity);
    }

    if (*stats) {
      if (!percentiles.empty()) cfg.percentiles = percentiles;
      for (double p : cfg.percentiles)
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::config_error, "percentiles must lie in [0,1]");
      const auto corpus = ingest(to_paths(stats_paths), cfg.jobs);
      auto report = run_analysis(corpus, cfg);
      if (!scores_path.empty()) add_subsets(report, parse_scores(read_file(scores_path), scores_path), cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& d : report.dedup) std::cerr << "dedup: " << d.dropped << " duplicates " << d.kept << "\n";
      if (!csv_dir.empty()) write_histogram_csvs(report, csv_dir);
      if (stats_md) {
        write_out(render_markdown(report), stats_out);
      } else {
        JsonOptions opt;
        opt.include_notebooks = per_notebook;
        opt.include_findings = false;
        opt.include_timing = timing;
        write_out(to_json(report, cfg, opt).dump(2) + "\n", stats_out);
      }
      if (timing && report.elapsed_ms) std::cerr << fmt::format("elapsed: {:.1f} ms\n", *report.elapsed_ms);
      (void)stats_json;
      return report.failures() > 0 ? 3 : 0;
    }
  } catch (const Error& e) {
    std::cerr << "nbpractice: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "nbpractice: " << e.what() << "\n";
    return kUsage;
  }
  return 0;
}
