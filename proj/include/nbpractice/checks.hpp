#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "nbpractice/bridge.hpp"
#include "nbpractice/extract.hpp"
#include "nbpractice/lint.hpp"
#include "nbpractice/markdown.hpp"
#include "nbpractice/notebook.hpp"
#include "nbpractice/registry.hpp"
#include "nbpractice/scan.hpp"

namespace nbpractice {

enum class Severity { info, warning, error };

constexpr std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "?";
}

inline std::optional<Severity> severity_from_string(std::string_view s) {
  if (s == "info") return Severity::info;
  if (s == "warning") return Severity::warning;
  if (s == "error") return Severity::error;
  return std::nullopt;
}

// Where a finding points. Notebook-level findings carry no cell.
struct Location {
  std::optional<std::size_t> cell_index;
  std::optional<std::size_t> cell_line;
  std::optional<std::size_t> script_line;

  friend bool operator==(const Location&, const Location&) = default;
};

struct Finding {
  BpId bp = BpId::bp9;
  std::string check_id;
  Severity severity = Severity::info;
  Location location;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

inline bool finding_order(const Finding& a, const Finding& b) {
  auto key = [](const Finding& f) {
    return std::make_tuple(f.location.cell_index.has_value(), f.location.cell_index.value_or(0),
                           f.location.cell_line.value_or(0), std::string_view(f.check_id),
                           std::string_view(f.message));
  };
  return key(a) < key(b);
}

// Engine check identifiers outside the lint set.
namespace checks {
inline constexpr std::string_view import_not_at_beginning = "import-not-at-beginning";
inline constexpr std::string_view not_top_to_bottom = "not-top-to-bottom";
inline constexpr std::string_view no_modularization = "no-modularization";
inline constexpr std::string_view no_test_imports = "no-test-imports";
inline constexpr std::string_view no_markdown = "no-markdown";
inline constexpr std::string_view no_headings = "no-headings";
inline constexpr std::string_view empty_cell = "empty-cell";
inline constexpr std::string_view non_executed_cell = "non-executed-cell";
}  // namespace checks

struct AnalysisConfig {
  std::set<BpId> enabled{BpId::bp4, BpId::bp5, BpId::bp6, BpId::bp7, BpId::bp9,
                         BpId::bp11, BpId::bp12, BpId::bp13, BpId::bp14};
  double bp4_threshold = 1.0;
  bool strict_bp5 = false;
  bool allow_any_kernel = false;
  StripRules strip;
  LintConfig lint;
  TestDetectConfig tests;
  // Keys are check ids or `lint-<category>`; unlisted checks are info.
  std::map<std::string, Severity> severity{{"not-top-to-bottom", Severity::warning},
                                           {"lint-error", Severity::warning},
                                           {std::string(kBridgeParseCheck), Severity::warning}};
  std::shared_ptr<ExternalLinter> bridge;

  bool is_enabled(BpId id) const { return enabled.count(id) != 0; }

  Severity severity_for(const std::string& check_id, std::optional<LintCategory> category = std::nullopt) const {
    if (auto it = severity.find(check_id); it != severity.end()) return it->second;
    if (category) {
      if (auto it = severity.find("lint-" + std::string(to_string(*category))); it != severity.end())
        return it->second;
    }
    return Severity::info;
  }
};

struct NotebookMetrics {
  std::size_t code_cells = 0;
  std::size_t md_cells = 0;
  std::size_t raw_cells = 0;
  std::optional<std::string> kernel_language;
  // BP5
  bool executed = false;
  bool top_to_bottom = false;
  bool outputs_without_counter = false;
  // BP4
  std::vector<double> import_positions;
  double imports_first_third_fraction = 1.0;
  bool bp4_compliant = true;
  // BP6
  bool has_function_def = false;
  bool has_class_def = false;
  bool has_local_import = false;
  bool local_import_known = true;  // false when some import could not be resolved
  // BP7
  bool has_test_import = false;
  // BP9; only measured categories are present
  std::map<LintCategory, bool> lint_category_failed;
  std::map<std::string, std::size_t> lint_counts;
  // BP11
  bool has_markdown = false;
  std::size_t meaningful_md_words = 0;
  std::size_t meaningful_md_lines = 0;
  std::vector<double> md_cell_positions;    // over all cells
  std::vector<double> code_cell_positions;  // over all cells
  // BP12
  std::size_t md_heading_count = 0;
  std::size_t md_heading_words = 0;
  std::vector<std::size_t> heading_word_counts;
  // BP13
  std::size_t empty_cells = 0;
  std::size_t non_executed_cells = 0;
  std::size_t executed_cells = 0;
  std::vector<std::pair<double, CellStatus>> cell_status_positions;
  // BP14
  std::size_t total_lines = 0;
  std::size_t code_lines = 0;
  std::vector<std::size_t> lines_per_cell;
  std::vector<std::size_t> lines_per_code_cell;
  std::vector<std::size_t> lines_per_md_cell;

  // Practices whose fields were not computed, with the reason.
  std::map<BpId, std::string> skipped;

  bool has(BpId id) const { return skipped.count(id) == 0; }
};

struct NotebookAnalysis {
  NotebookMetrics metrics;
  std::vector<Finding> findings;
};

// --- individual operationalizations -------------------------------------

inline bool check_bp5_top_to_bottom(const std::vector<std::optional<std::int64_t>>& seq, bool strict = false) {
  std::int64_t expected = 1;
  for (const auto& v : seq) {
    if (!v) {
      if (strict) return false;
      continue;
    }
    if (*v != expected) return false;
    ++expected;
  }
  return expected > 1;
}

struct Bp4Result {
  std::vector<double> positions;
  double first_third_fraction = 1.0;
};

inline constexpr double kOneThird = 1.0 / 3.0;

// Positions are measured over the non-empty code cells.
inline Bp4Result check_bp4_import_position(const std::vector<ImportRecord>& records, const ExtractedScript& script,
                                           const Notebook& nb) {
  std::map<std::size_t, std::size_t> rank;
  for (const auto& c : nb.cells)
    if (c.kind == CellKind::code && !c.is_blank()) rank.emplace(c.index, rank.size());
  Bp4Result r;
  std::size_t early = 0;
  for (const auto& rec : records) {
    const auto loc = map_line(script, rec.script_line);
    const double pos = cell_position_fraction(rank.at(loc.cell_index), rank.size());
    r.positions.push_back(pos);
    early += pos <= kOneThird;
  }
  if (!r.positions.empty()) r.first_third_fraction = static_cast<double>(early) / static_cast<double>(r.positions.size());
  return r;
}

struct Bp6Result {
  bool has_function_def = false;
  bool has_class_def = false;
  bool has_local_import = false;

  friend bool operator==(const Bp6Result&, const Bp6Result&) = default;
};

inline Bp6Result check_bp6_modularization(const std::vector<DefRecord>& defs, const std::vector<ImportRecord>& imports,
                                          const std::vector<ImportOrigin>& origins) {
  (void)imports;
  Bp6Result r;
  for (const auto& d : defs) {
    r.has_function_def |= d.kind == DefKind::function;
    r.has_class_def |= d.kind == DefKind::class_;
  }
  for (auto o : origins) r.has_local_import |= o == ImportOrigin::local;
  return r;
}

struct Bp13Result {
  std::size_t empty_cells = 0;
  std::size_t non_executed_cells = 0;
  std::size_t executed_cells = 0;
  std::vector<std::pair<double, CellStatus>> positions;
};

inline Bp13Result check_bp13_cleanliness(const Notebook& nb) {
  Bp13Result r;
  const std::size_t n = nb.count(CellKind::code);
  std::size_t k = 0;
  for (const auto& c : nb.cells) {
    if (c.kind != CellKind::code) continue;
    const auto status = cell_status(c);
    r.empty_cells += status == CellStatus::empty;
    r.non_executed_cells += status == CellStatus::non_executed;
    r.executed_cells += status == CellStatus::executed;
    r.positions.emplace_back(cell_position_fraction(k++, n), status);
  }
  return r;
}

struct Bp14Result {
  std::size_t total_lines = 0;
  std::size_t code_lines = 0;
  std::vector<std::size_t> lines_per_cell;
  std::vector<std::size_t> lines_per_code_cell;
  std::vector<std::size_t> lines_per_md_cell;

  friend bool operator==(const Bp14Result&, const Bp14Result&) = default;
};

inline Bp14Result check_bp14_conciseness(const Notebook& nb) {
  Bp14Result r;
  for (const auto& c : nb.cells) {
    const std::size_t n = c.source_lines.size();
    r.total_lines += n;
    r.lines_per_cell.push_back(n);
    if (c.kind == CellKind::code) {
      r.code_lines += n;
      r.lines_per_code_cell.push_back(n);
    } else if (c.kind == CellKind::markdown) {
      r.lines_per_md_cell.push_back(n);
    }
  }
  return r;
}

// --- engine ---------------------------------------------------------------

namespace detail {

// Nearest mapped line at or after `line`, else before it.
inline std::optional<std::size_t> snap_to_mapped(const ExtractedScript& script, std::size_t line) {
  const auto& m = script.map_entries;
  if (m.empty()) return std::nullopt;
  auto it = std::lower_bound(m.begin(), m.end(), line,
                             [](const SourceMapEntry& e, std::size_t l) { return e.script_line < l; });
  if (it == m.end()) --it;
  return it->script_line;
}

inline Location script_location(const ExtractedScript& script, std::size_t line) {
  Location loc;
  if (auto mapped = script.try_map_line(line)) {
    loc.cell_index = mapped->cell_index;
    loc.cell_line = mapped->cell_line;
    loc.script_line = line;
  }
  return loc;
}

}  // namespace detail

inline NotebookAnalysis analyze_notebook(const Notebook& nb, const AnalysisConfig& cfg, const CorpusIndex& index) {
  NotebookAnalysis out;
  auto& m = out.metrics;
  auto& findings = out.findings;
  auto add = [&](BpId bp, std::string_view check, Location loc, std::string message,
                 std::optional<LintCategory> cat = std::nullopt) {
    std::string id(check);
    findings.push_back({bp, id, cfg.severity_for(id, cat), std::move(loc), std::move(message)});
  };

  m.code_cells = nb.count(CellKind::code);
  m.md_cells = nb.count(CellKind::markdown);
  m.raw_cells = nb.count(CellKind::raw);
  m.kernel_language = nb.kernel_language;

  for (auto id : operationalized_practices())
    if (!cfg.is_enabled(id)) m.skipped.emplace(id, "disabled");
  if (!nb.is_python() && !cfg.allow_any_kernel) {
    for (auto id : {BpId::bp4, BpId::bp6, BpId::bp7, BpId::bp9})
      m.skipped.emplace(id, "non-python kernel");
  }

  const auto script = extract_script(nb, cfg.strip);
  const auto imports = scan_imports(script);
  const auto defs = scan_defs(script);

  if (m.has(BpId::bp5)) {
    const auto seq = execution_sequence(nb);
    m.executed = std::any_of(nb.cells.begin(), nb.cells.end(),
                             [](const Cell& c) { return c.kind == CellKind::code && c.execution_count; });
    m.top_to_bottom = check_bp5_top_to_bottom(seq, cfg.strict_bp5);
    for (const auto& c : nb.cells)
      if (c.kind == CellKind::code && !c.execution_count && c.has_outputs()) m.outputs_without_counter = true;
    if (m.executed && !m.top_to_bottom) {
      // the first non-empty code cell where the sequence breaks
      std::int64_t expected = 1;
      for (const auto& c : nb.cells) {
        if (c.kind != CellKind::code || c.is_blank()) continue;
        if (!c.execution_count) {
          if (cfg.strict_bp5) {
            add(BpId::bp5, checks::not_top_to_bottom, {c.index, 0, std::nullopt},
                "code cell not executed in a top-to-bottom run");
            break;
          }
          continue;
        }
        if (*c.execution_count != expected) {
          add(BpId::bp5, checks::not_top_to_bottom, {c.index, 0, std::nullopt},
              "execution counter " + std::to_string(*c.execution_count) + " where " + std::to_string(expected) +
                  " was expected");
          break;
        }
        ++expected;
      }
    }
  }

  if (m.has(BpId::bp4)) {
    const auto r = check_bp4_import_position(imports, script, nb);
    m.import_positions = r.positions;
    m.imports_first_third_fraction = r.first_third_fraction;
    m.bp4_compliant = r.first_third_fraction >= cfg.bp4_threshold;
    for (std::size_t i = 0; i < imports.size(); ++i) {
      if (r.positions[i] <= kOneThird) continue;
      add(BpId::bp4, checks::import_not_at_beginning, detail::script_location(script, imports[i].script_line),
          "import of " + imports[i].module_path + " outside the first third of the notebook");
    }
  }

  if (m.has(BpId::bp6)) {
    std::vector<ImportOrigin> origins;
    for (const auto& rec : imports) origins.push_back(classify_import_origin(rec, nb.path, index));
    const auto r = check_bp6_modularization(defs, imports, origins);
    m.has_function_def = r.has_function_def;
    m.has_class_def = r.has_class_def;
    m.has_local_import = r.has_local_import;
    m.local_import_known =
        r.has_local_import || std::none_of(origins.begin(), origins.end(), [](auto o) { return o == ImportOrigin::unknown; });
    if (!r.has_function_def && !r.has_class_def && !r.has_local_import && m.local_import_known)
      add(BpId::bp6, checks::no_modularization, {}, "no function, class, or local module");
  }

  if (m.has(BpId::bp7)) {
    m.has_test_import = !detect_test_imports(imports, cfg.tests).empty();
    if (!m.has_test_import) add(BpId::bp7, checks::no_test_imports, {}, "no testing library imported");
  }

  if (m.has(BpId::bp9)) {
    auto lint = lint_native(script, imports, defs, cfg.lint);
    m.lint_category_failed[LintCategory::convention] = false;
    m.lint_category_failed[LintCategory::warning] = false;
    if (cfg.bridge) {
      for (auto c : kLintCategories) m.lint_category_failed.try_emplace(c, false);
      auto ext = cfg.bridge->run(script);
      lint.insert(lint.end(), ext.begin(), ext.end());
    }
    for (const auto& f : lint) {
      Location loc;
      if (auto line = script.is_mapped(f.script_line) ? std::optional(f.script_line)
                                                        : detail::snap_to_mapped(script, f.script_line))
        loc = detail::script_location(script, *line);
      if (f.check_id != kBridgeParseCheck) {
        m.lint_category_failed[f.category] = true;
        ++m.lint_counts[f.check_id];
      }
      add(BpId::bp9, f.check_id, loc, f.message, f.category);
    }
  }

  const auto n_cells = nb.cells.size();
  if (m.has(BpId::bp11)) {
    for (const auto& c : nb.cells) {
      if (c.kind == CellKind::markdown) {
        if (!c.is_blank()) m.has_markdown = true;
        const auto t = meaningful_md_tokens(c.source_lines);
        m.meaningful_md_words += t.words;
        m.meaningful_md_lines += t.lines;
        m.md_cell_positions.push_back(cell_position_fraction(c.index, n_cells));
      } else if (c.kind == CellKind::code) {
        m.code_cell_positions.push_back(cell_position_fraction(c.index, n_cells));
      }
    }
    if (!m.has_markdown) add(BpId::bp11, checks::no_markdown, {}, "no markdown text");
  }

  if (m.has(BpId::bp12)) {
    const auto headings = detect_headings(nb);
    m.md_heading_count = headings.size();
    for (const auto& h : headings) {
      const auto w = meaningful_word_count(h.text);
      m.heading_word_counts.push_back(w);
      m.md_heading_words += w;
    }
    if (headings.empty()) add(BpId::bp12, checks::no_headings, {}, "no markdown headings");
  }

  if (m.has(BpId::bp13)) {
    const auto r = check_bp13_cleanliness(nb);
    m.empty_cells = r.empty_cells;
    m.non_executed_cells = r.non_executed_cells;
    m.executed_cells = r.executed_cells;
    m.cell_status_positions = r.positions;
    const bool executed_notebook = r.executed_cells > 0;
    for (const auto& c : nb.cells) {
      if (c.kind != CellKind::code) continue;
      const auto status = cell_status(c);
      if (status == CellStatus::empty)
        add(BpId::bp13, checks::empty_cell, {c.index, std::nullopt, std::nullopt}, "empty code cell");
      else if (status == CellStatus::non_executed && executed_notebook)
        add(BpId::bp13, checks::non_executed_cell, {c.index, std::nullopt, std::nullopt},
            "code cell left unexecuted");
    }
  }

  if (m.has(BpId::bp14)) {
    auto r = check_bp14_conciseness(nb);
    m.total_lines = r.total_lines;
    m.code_lines = r.code_lines;
    m.lines_per_cell = std::move(r.lines_per_cell);
    m.lines_per_code_cell = std::move(r.lines_per_code_cell);
    m.lines_per_md_cell = std::move(r.lines_per_md_cell);
  }

  std::stable_sort(findings.begin(), findings.end(), finding_order);
  return out;
}

}  // namespace nbpractice
