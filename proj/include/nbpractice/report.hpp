#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nbpractice/checks.hpp"
#include "nbpractice/config.hpp"
#include "nbpractice/ingest.hpp"
#include "nbpractice/parallel.hpp"
#include "nbpractice/registry.hpp"
#include "nbpractice/stats.hpp"

namespace nbpractice {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct NotebookResult {
  std::string path;
  std::optional<NotebookAnalysis> analysis;
  std::optional<InputFailure> error;
};

struct RunReport {
  std::string config_digest;
  std::vector<NotebookResult> notebooks;  // sorted by path
  std::vector<DedupEntry> dedup;
  std::vector<CorpusSummary> summaries;
  std::map<std::string, double> subset_thresholds;
  std::vector<std::string> warnings;
  std::size_t files_seen = 0;
  std::optional<double> elapsed_ms;  // reported only on request

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(notebooks.begin(), notebooks.end(),
                                                  [](const NotebookResult& r) { return r.error.has_value(); }));
  }
  std::vector<std::pair<std::string, NotebookMetrics>> analyzed_metrics() const {
    std::vector<std::pair<std::string, NotebookMetrics>> out;
    for (const auto& r : notebooks)
      if (r.analysis) out.emplace_back(r.path, r.analysis->metrics);
    return out;
  }
};

// Runs every analysis on `jobs` workers and aggregates the ALL summary.
// A missing external linter aborts the run; other failures stay per notebook.
inline RunReport run_analysis(const Corpus& corpus, const Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config_digest = config_digest(cfg);
  report.dedup = corpus.dedup;
  report.files_seen = corpus.files_seen;

  std::shared_ptr<ExternalLinter> bridge;
  if (cfg.external) bridge = std::make_shared<ExternalLinter>(*cfg.external);
  const auto analysis_cfg = cfg.analysis(bridge);

  std::vector<NotebookResult> results(corpus.notebooks.size());
  parallel_for(corpus.notebooks.size(), cfg.jobs, [&](std::size_t i) {
    const auto& nb = corpus.notebooks[i];
    results[i].path = nb.path.generic_string();
    try {
      results[i].analysis = analyze_notebook(nb, analysis_cfg, corpus.index);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::bridge_unavailable) throw;
      results[i].error = InputFailure{results[i].path, e.code(), e.detail()};
    }
  });
  for (const auto& f : corpus.failures) results.push_back({f.path, std::nullopt, f});
  std::sort(results.begin(), results.end(),
            [](const NotebookResult& a, const NotebookResult& b) { return a.path < b.path; });
  report.notebooks = std::move(results);

  auto acc = make_accumulator(report.config_digest, cfg.md_denominator);
  for (const auto& r : report.notebooks)
    if (r.analysis) acc.add(r.analysis->metrics);
  report.summaries.push_back(finalize(acc, "ALL"));
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// Adds percentile subsets keyed by `scores` (path -> score).
inline void add_subsets(RunReport& report, const std::map<std::string, double>& scores, const Config& cfg) {
  auto result = subset_compare(report.analyzed_metrics(), scores, cfg.percentiles, report.config_digest,
                               cfg.md_denominator);
  report.summaries = std::move(result.summaries);
  report.subset_thresholds = std::move(result.thresholds);
  report.warnings.insert(report.warnings.end(), result.warnings.begin(), result.warnings.end());
}

// --- scores sidecar ---------------------------------------------------------

namespace detail {

inline std::vector<std::string> csv_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

// Two columns `path,score` with a header row. Relative paths are also tried
// against the directory holding the scores file.
inline std::map<std::string, double> parse_scores(std::string_view csv, const std::filesystem::path& origin = {}) {
  std::map<std::string, double> out;
  bool header = true;
  std::size_t lineno = 0;
  for (const auto& raw : text::split_lines(csv)) {
    ++lineno;
    if (text::is_blank(raw)) continue;
    auto fields = detail::csv_fields(raw);
    if (fields.size() != 2)
      throw Error(ErrorCode::config_error, "scores line " + std::to_string(lineno) + ": expected path,score",
                  origin.generic_string());
    if (header) {
      header = false;
      continue;
    }
    double score = 0;
    try {
      std::size_t used = 0;
      auto s = std::string(text::trim(fields[1]));
      score = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(score)) throw std::invalid_argument("score");
    } catch (const std::exception&) {
      throw Error(ErrorCode::config_error, "scores line " + std::to_string(lineno) + ": bad score",
                  origin.generic_string());
    }
    const std::filesystem::path p(std::string(text::trim(fields[0])));
    out[CorpusIndex::key(p)] = score;
    if (p.is_relative() && !origin.parent_path().empty()) out.emplace(CorpusIndex::key(origin.parent_path() / p), score);
  }
  if (header) throw Error(ErrorCode::config_error, "scores file has no header", origin.generic_string());
  return out;
}

// --- JSON -------------------------------------------------------------------

inline nlohmann::json to_json(const Rate& r) {
  nlohmann::json j = {{"numerator", r.numerator}, {"denominator", r.denominator}};
  if (auto v = r.value()) j["value"] = *v;
  else {
    j["value"] = nullptr;
    j["reason"] = r.reason;
  }
  return j;
}

inline nlohmann::json to_json(const Summary5& f) {
  nlohmann::json j = {{"n", f.n}};
  if (f.value) {
    j["min"] = f.value->min;
    j["q1"] = f.value->q1;
    j["median"] = f.value->median;
    j["q3"] = f.value->q3;
    j["max"] = f.value->max;
  } else {
    j["value"] = nullptr;
    j["reason"] = f.reason;
  }
  return j;
}

inline nlohmann::json to_json(const Histogram& h) {
  return {{"counts", h.counts}, {"thirds", h.thirds}, {"total", h.total()}};
}

inline nlohmann::json to_json(const CorpusSummary& s) {
  using nlohmann::json;
  json lint = json::object();
  for (const auto& [c, r] : s.lint_category_rates) lint[std::string(to_string(c))] = to_json(r);
  json fives = json::object();
  for (const auto& [k, f] : s.fives) fives[k] = to_json(f);
  json hist = json::object();
  for (const auto& [k, h] : s.histograms) hist[k] = to_json(h);
  return {{"label", s.label},
          {"n_notebooks", s.n_notebooks},
          {"n_executed", s.n_executed()},
          {"rates",
           {{"executed", to_json(s.rate_executed)},
            {"top_to_bottom", to_json(s.rate_top_to_bottom)},
            {"bp4_compliant", to_json(s.rate_bp4_compliant)},
            {"function_def", to_json(s.rate_function_def)},
            {"class_def", to_json(s.rate_class_def)},
            {"local_import", to_json(s.rate_local_import)},
            {"test_import", to_json(s.rate_test_import)},
            {"md", to_json(s.rate_md)},
            {"md_headings", to_json(s.rate_md_headings)}}},
          {"lint_category_rates", lint},
          {"fives", fives},
          {"histograms", hist}};
}

inline nlohmann::json to_json(const Location& l) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"cell", opt(l.cell_index)}, {"line", opt(l.cell_line)}, {"script_line", opt(l.script_line)}};
}

inline nlohmann::json to_json(const Finding& f) {
  return {{"bp", to_string(f.bp)},
          {"check_id", f.check_id},
          {"severity", to_string(f.severity)},
          {"location", to_json(f.location)},
          {"message", f.message}};
}

inline nlohmann::json to_json(const NotebookMetrics& m) {
  using nlohmann::json;
  json j = {{"code_cells", m.code_cells},
            {"md_cells", m.md_cells},
            {"raw_cells", m.raw_cells},
            {"kernel_language", m.kernel_language ? json(*m.kernel_language) : json()}};
  if (m.has(BpId::bp5)) {
    j["executed"] = m.executed;
    j["top_to_bottom"] = m.top_to_bottom;
    j["outputs_without_counter"] = m.outputs_without_counter;
  }
  if (m.has(BpId::bp4)) {
    j["import_positions"] = m.import_positions;
    j["imports_first_third_fraction"] = m.imports_first_third_fraction;
    j["bp4_compliant"] = m.bp4_compliant;
  }
  if (m.has(BpId::bp6)) {
    j["has_function_def"] = m.has_function_def;
    j["has_class_def"] = m.has_class_def;
    j["has_local_import"] = m.has_local_import;
    j["local_import_known"] = m.local_import_known;
  }
  if (m.has(BpId::bp7)) j["has_test_import"] = m.has_test_import;
  if (m.has(BpId::bp9)) {
    json cats = json::object();
    for (const auto& [c, v] : m.lint_category_failed) cats[std::string(to_string(c))] = v;
    j["lint_category_failed"] = cats;
    j["lint_counts"] = m.lint_counts;
  }
  if (m.has(BpId::bp11)) {
    j["has_markdown"] = m.has_markdown;
    j["meaningful_md_words"] = m.meaningful_md_words;
    j["meaningful_md_lines"] = m.meaningful_md_lines;
    j["md_cell_positions"] = m.md_cell_positions;
    j["code_cell_positions"] = m.code_cell_positions;
  }
  if (m.has(BpId::bp12)) {
    j["md_heading_count"] = m.md_heading_count;
    j["md_heading_words"] = m.md_heading_words;
    j["heading_word_counts"] = m.heading_word_counts;
  }
  if (m.has(BpId::bp13)) {
    j["empty_cells"] = m.empty_cells;
    j["non_executed_cells"] = m.non_executed_cells;
    j["executed_cells"] = m.executed_cells;
    json pos = json::array();
    for (const auto& [p, s] : m.cell_status_positions) pos.push_back({p, to_string(s)});
    j["cell_status_positions"] = pos;
  }
  if (m.has(BpId::bp14)) {
    j["total_lines"] = m.total_lines;
    j["code_lines"] = m.code_lines;
    j["lines_per_cell"] = m.lines_per_cell;
    j["lines_per_code_cell"] = m.lines_per_code_cell;
    j["lines_per_md_cell"] = m.lines_per_md_cell;
  }
  json skipped = json::object();
  for (const auto& [id, why] : m.skipped) skipped[to_string(id)] = why;
  j["skipped"] = skipped;
  return j;
}

inline nlohmann::json conventions_json() {
  return {{"quantiles", "linear interpolation at rank (n-1)p over the sorted values"},
          {"histograms", "10 equal-width bins over [0,1], last bin right-closed; thirds are <=1/3, (1/3,2/3], >2/3"},
          {"import_positions", "index among non-empty code cells / (count - 1); 0 for a single cell"},
          {"cell_positions", "md/code: index among all cells; status: index among code cells"},
          {"locations", "cell and line are 0-based document positions"},
          {"markdown_rules", kMarkdownRulesVersion}};
}

struct JsonOptions {
  bool include_notebooks = true;
  bool include_findings = true;
  bool include_timing = false;
};

inline nlohmann::json to_json(const RunReport& r, const Config& cfg, const JsonOptions& opt = {}) {
  using nlohmann::json;
  json notebooks = json::array();
  if (opt.include_notebooks) {
    for (const auto& nb : r.notebooks) {
      json e = {{"path", nb.path}};
      if (nb.analysis) {
        e["metrics"] = to_json(nb.analysis->metrics);
        if (opt.include_findings) {
          json fs = json::array();
          for (const auto& f : nb.analysis->findings) fs.push_back(to_json(f));
          e["findings"] = fs;
        }
      } else if (nb.error) {
        e["error"] = {{"code", to_string(nb.error->code)}, {"message", nb.error->message}};
      }
      notebooks.push_back(std::move(e));
    }
  }
  json dedup = json::array();
  for (const auto& d : r.dedup) dedup.push_back({{"kept", d.kept}, {"dropped", d.dropped}, {"hash", d.hash}});
  json summaries = json::array();
  for (const auto& s : r.summaries) summaries.push_back(to_json(s));
  json j = {{"schema_version", kSchemaVersion},
            {"tool_version", kToolVersion},
            {"config_digest", r.config_digest},
            {"config", to_json(cfg)},
            {"conventions", conventions_json()},
            {"inputs", {{"files", r.files_seen}, {"analyzed", r.notebooks.size() - r.failures()}, {"failed", r.failures()}}},
            {"dedup", dedup},
            {"warnings", r.warnings},
            {"summaries", summaries}};
  if (!r.subset_thresholds.empty()) j["subset_thresholds"] = r.subset_thresholds;
  if (opt.include_notebooks) j["notebooks"] = notebooks;
  if (opt.include_timing && r.elapsed_ms) j["timing"] = {{"elapsed_ms", *r.elapsed_ms}};
  return j;
}

// --- text renderers ---------------------------------------------------------

inline std::string group_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

inline std::string format_rate(const Rate& r, bool with_count = true) {
  auto v = r.value();
  if (!v) return "null (" + r.reason + ")";
  const auto pct = fmt::format("{:.2f}%", *v * 100.0);
  return with_count ? group_thousands(r.numerator) + " (" + pct + ")" : pct;
}

inline std::string format_five(const Summary5& f) {
  if (!f.value) return "null (" + f.reason + ")";
  const auto& v = *f.value;
  return fmt::format("[{}, {}, {}, {}, {}]", v.min, v.q1, v.median, v.q3, v.max);
}

inline std::string format_histogram(const Histogram& h) {
  std::string deciles;
  for (std::size_t i = 0; i < h.counts.size(); ++i) deciles += (i ? ", " : "") + std::to_string(h.counts[i]);
  return fmt::format("beginning {} / middle {} / end {}; deciles [{}]", h.thirds[0], h.thirds[1], h.thirds[2],
                     deciles);
}

inline std::string render_markdown_summary(const CorpusSummary& s) {
  struct Row {
    std::optional<Theme> theme;
    std::optional<BpId> bp;
    std::string what;
    std::string result;
  };
  auto five = [&](const char* key) {
    auto it = s.fives.find(key);
    return it == s.fives.end() ? std::string("null (not computed)") : format_five(it->second);
  };
  auto hist = [&](const char* key) {
    auto it = s.histograms.find(key);
    return it == s.histograms.end() ? std::string("null (not computed)") : format_histogram(it->second);
  };
  auto lint = [&](LintCategory c) {
    auto it = s.lint_category_rates.find(c);
    return it == s.lint_category_rates.end() ? std::string("null (not computed)") : format_rate(it->second, false);
  };
  using T = Theme;
  std::string executed_label = "Notebooks executed top to bottom";
  if (s.rate_top_to_bottom.denominator) executed_label += " (of " + group_thousands(s.rate_top_to_bottom.denominator) + " executed)";
  const std::vector<Row> rows{
      {T::traceable_reproducible, BpId::bp4, "Distribution of import statements in notebooks", hist("import_positions")},
      {std::nullopt, BpId::bp5, executed_label, format_rate(s.rate_top_to_bottom)},
      {T::high_quality_code, BpId::bp6, "Notebooks with local module imports", format_rate(s.rate_local_import)},
      {std::nullopt, std::nullopt, "Notebooks with function definitions", format_rate(s.rate_function_def)},
      {std::nullopt, std::nullopt, "Notebooks with class definitions", format_rate(s.rate_class_def)},
      {std::nullopt, BpId::bp7, "Notebooks with test modules", format_rate(s.rate_test_import)},
      {std::nullopt, BpId::bp9, "Notebooks with failing 'Convention' checks", lint(LintCategory::convention)},
      {std::nullopt, std::nullopt, "Notebooks with failing 'Warning' checks", lint(LintCategory::warning)},
      {std::nullopt, std::nullopt, "Notebooks with failing 'Error' checks", lint(LintCategory::error)},
      {std::nullopt, std::nullopt, "Notebooks with failing 'Refactor' checks", lint(LintCategory::refactor)},
      {T::literate_programming, BpId::bp11, "Distribution of markdown cells in notebooks", hist("md_cell_positions")},
      {std::nullopt, std::nullopt, "Distribution of code cells in notebooks", hist("code_cell_positions")},
      {std::nullopt, std::nullopt, "Notebooks with markdown", format_rate(s.rate_md)},
      {std::nullopt, std::nullopt, "Code cells in notebooks", five("code_cells")},
      {std::nullopt, std::nullopt, "MD cells in notebooks", five("md_cells")},
      {std::nullopt, std::nullopt, "Meaningful MD words", five("meaningful_md_words")},
      {std::nullopt, std::nullopt, "Meaningful MD lines", five("meaningful_md_lines")},
      {std::nullopt, BpId::bp12, "Notebooks with MD headers", format_rate(s.rate_md_headings)},
      {std::nullopt, std::nullopt, "MD header words per notebook", five("md_heading_words")},
      {std::nullopt, std::nullopt, "MD header words per heading", five("md_heading_words_per_heading")},
      {T::clean_concise, BpId::bp13, "Distribution of executed cells in notebooks", hist("executed_cell_positions")},
      {std::nullopt, std::nullopt, "Distribution of non-executed cells in notebooks", hist("non_executed_cell_positions")},
      {std::nullopt, std::nullopt, "Distribution of empty cells in notebooks", hist("empty_cell_positions")},
      {std::nullopt, std::nullopt, "Empty cells in notebooks", five("empty_cells")},
      {std::nullopt, BpId::bp14, "Number of cells per notebook", five("cells_per_notebook")},
      {std::nullopt, std::nullopt, "Number of lines in cells", five("lines_per_cell")},
      {std::nullopt, std::nullopt, "Number of lines in code cells", five("lines_per_code_cell")},
      {std::nullopt, std::nullopt, "Number of lines in markdown cells", five("lines_per_md_cell")},
      {std::nullopt, std::nullopt, "Number of lines in notebooks", five("lines_per_notebook")},
      {std::nullopt, std::nullopt, "Number of Python lines in notebooks", five("code_lines_per_notebook")},
  };
  std::string out = fmt::format("### {} ({} notebooks)\n\n", s.label, group_thousands(s.n_notebooks));
  out += "5-number summaries are reported as [min, q1, median, q3, max].\n\n";
  out += "| Theme | Best practice | Operationalization | Result |\n|---|---|---|---|\n";
  for (const auto& r : rows) {
    const std::string theme = r.theme ? std::string(to_string(*r.theme)) : "";
    const std::string bp = r.bp ? to_string(*r.bp) + " " + std::string(registry_entry(*r.bp).title) : "";
    out += fmt::format("| {} | {} | {} | {} |\n", theme, bp, r.what, r.result);
  }
  return out;
}

inline std::string render_markdown(const RunReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    if (i) out += "\n";
    out += render_markdown_summary(r.summaries[i]);
  }
  return out;
}

inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < Histogram::kBins; ++i)
    out += fmt::format("{:.1f},{:.1f},{}\n", static_cast<double>(i) / 10.0, static_cast<double>(i + 1) / 10.0,
                       h.counts[i]);
  return out;
}

// One CSV per histogram; subsets other than ALL are prefixed with their label.
inline std::vector<std::filesystem::path> write_histogram_csvs(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& s : r.summaries) {
    for (const auto& [name, h] : s.histograms) {
      const auto file = dir / ((s.label == "ALL" ? "" : s.label + "_") + name + ".csv");
      std::ofstream out(file, std::ios::binary);
      if (!out) throw Error(ErrorCode::io_error, "cannot write histogram", file.generic_string());
      out << histogram_csv(h);
      written.push_back(file);
    }
  }
  return written;
}

// Human-readable lint listing; cells and lines are 1-based here.
inline std::string render_findings_text(const RunReport& r) {
  std::string out;
  for (const auto& nb : r.notebooks) {
    if (nb.error) {
      out += fmt::format("{}: {}: {}\n", nb.path, to_string(nb.error->code), nb.error->message);
      continue;
    }
    for (const auto& f : nb.analysis->findings) {
      std::string where;
      if (f.location.cell_index) {
        where = fmt::format("cell {}", *f.location.cell_index + 1);
        if (f.location.cell_line) where += fmt::format(", line {}", *f.location.cell_line + 1);
      } else {
        where = "notebook";
      }
      out += fmt::format("{}: {}: {} {} [{}] {}\n", nb.path, where, to_string(f.severity), f.check_id,
                         to_string(f.bp), f.message);
    }
  }
  return out;
}

// 0 clean, 1 findings at or above `fail_severity`, 3 when any input failed.
// Usage and config errors (2) are decided before a report exists.
inline int exit_code(const RunReport& r, std::optional<Severity> fail_severity) {
  if (r.failures() > 0) return 3;
  if (!fail_severity) return 0;
  for (const auto& nb : r.notebooks)
    for (const auto& f : nb.analysis->findings)
      if (f.severity >= *fail_severity) return 1;
  return 0;
}

// --- registry ---------------------------------------------------------------

inline nlohmann::json registry_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : registry()) {
    arr.push_back({{"id", to_string(e.id)},
                   {"title", e.title},
                   {"theme", to_string(e.theme)},
                   {"support_count", e.support_count},
                   {"sources", e.source_ids},
                   {"operationalized", e.operationalized}});
  }
  return arr;
}

inline std::string render_registry_table() {
  constexpr std::string_view row = "{:<5} {:<57} {:<48} {:>7}  {:<4}  {}\n";
  std::string out = fmt::format(row, "ID", "Title", "Theme", "Support", "Auto", "Sources");
  for (const auto& e : registry()) {
    std::vector<std::string> src(e.source_ids.begin(), e.source_ids.end());
    out += fmt::format(row, to_string(e.id), e.title, to_string(e.theme), e.support_count,
                       e.operationalized ? "yes" : "no", text::join(src, ","));
  }
  return out;
}

}  // namespace nbpractice
