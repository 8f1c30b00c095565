#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "nbpractice/extract.hpp"
#include "nbpractice/pylex.hpp"
#include "nbpractice/scan.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

enum class LintCategory { convention, refactor, warning, error };

inline constexpr std::array<LintCategory, 4> kLintCategories{
    LintCategory::convention, LintCategory::warning, LintCategory::error, LintCategory::refactor};

constexpr std::string_view to_string(LintCategory c) {
  switch (c) {
    case LintCategory::convention: return "convention";
    case LintCategory::refactor: return "refactor";
    case LintCategory::warning: return "warning";
    case LintCategory::error: return "error";
  }
  return "?";
}

inline std::optional<LintCategory> lint_category_from_string(std::string_view s) {
  for (auto c : kLintCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

struct LintFinding {
  std::string check_id;
  LintCategory category = LintCategory::convention;
  std::size_t script_line = 0;  // 0-based
  std::size_t column = 0;       // 0-based
  std::string message;

  friend bool operator==(const LintFinding&, const LintFinding&) = default;
};

inline bool lint_order(const LintFinding& a, const LintFinding& b) {
  return std::tie(a.script_line, a.check_id, a.column, a.message) <
         std::tie(b.script_line, b.check_id, b.column, b.message);
}

namespace checks {
inline constexpr std::string_view trailing_whitespace = "trailing-whitespace";
inline constexpr std::string_view line_too_long = "line-too-long";
inline constexpr std::string_view bad_whitespace = "bad-whitespace";
inline constexpr std::string_view multiple_statements = "multiple-statements";
inline constexpr std::string_view invalid_name = "invalid-name";
inline constexpr std::string_view wildcard_import = "wildcard-import";
inline constexpr std::string_view unused_import = "unused-import";
}  // namespace checks

struct NativeCheck {
  std::string_view id;
  LintCategory category;
};

inline constexpr std::array<NativeCheck, 7> kNativeChecks{{
    {checks::trailing_whitespace, LintCategory::convention},
    {checks::line_too_long, LintCategory::convention},
    {checks::bad_whitespace, LintCategory::convention},
    {checks::multiple_statements, LintCategory::convention},
    {checks::invalid_name, LintCategory::convention},
    {checks::wildcard_import, LintCategory::warning},
    {checks::unused_import, LintCategory::warning},
}};

struct LintConfig {
  std::size_t max_line_len = 79;
  std::set<std::string> disabled;

  bool enabled(std::string_view id) const { return disabled.count(std::string(id)) == 0; }
  friend bool operator==(const LintConfig&, const LintConfig&) = default;
};

inline bool is_snake_case(std::string_view name) {
  if (name.empty() || (name.front() >= '0' && name.front() <= '9')) return false;
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::islower(u) || std::isdigit(u) || c == '_' || u >= 0x80)) return false;
  }
  return true;
}

inline bool is_pascal_case(std::string_view name) {
  while (!name.empty() && name.front() == '_') name.remove_prefix(1);
  if (name.empty() || !(name.front() >= 'A' && name.front() <= 'Z')) return false;
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u >= 0x80)) return false;
  }
  return true;
}

namespace detail {

// Per-line whitespace checks run on the code view (strings masked, comment cut).
inline std::optional<std::size_t> bad_whitespace_column(std::string_view code) {
  const std::size_t n = code.size();
  // '[' positions that open a subscript containing a slice
  std::vector<bool> slice_at(n, false);
  {
    std::vector<std::size_t> stack;
    std::vector<bool> has_colon(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      char c = code[i];
      if (c == '(' || c == '[' || c == '{') {
        stack.push_back(i);
      } else if ((c == ')' || c == ']' || c == '}') && !stack.empty()) {
        stack.pop_back();
      } else if (c == ':' && !stack.empty() && code[stack.back()] == '[') {
        has_colon[stack.back()] = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (code[i] != '[' || !has_colon[i]) continue;
      std::size_t p = i;
      while (p > 0 && (code[p - 1] == ' ' || code[p - 1] == '\t')) --p;
      if (p > 0 && (text::is_ident_char(code[p - 1]) || code[p - 1] == ')' || code[p - 1] == ']'))
        slice_at[i] = true;
    }
  }
  const std::size_t lead = n - text::ltrim(code).size();
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = code[i];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(i);
      continue;
    }
    if ((c == ')' || c == ']' || c == '}') && !stack.empty()) {
      stack.pop_back();
      continue;
    }
    if (c != ',' && c != ';') continue;
    if (i > lead && (code[i - 1] == ' ' || code[i - 1] == '\t')) return i;
    if (c == ',' && i + 1 < n) {
      const char next = code[i + 1];
      const bool spaced = next == ' ' || next == '\t' || next == ')' || next == ']' || next == '}';
      const bool in_slice = !stack.empty() && slice_at[stack.back()];
      if (!spaced && !in_slice) return i;
    }
  }
  return std::nullopt;
}

inline std::optional<std::size_t> multiple_statements_column(std::string_view code) {
  int depth = 0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    const char c = code[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
    else if (c == ';' && depth == 0 && !text::is_blank(code.substr(i + 1))) return i;
  }
  return std::nullopt;
}

// Does `name` occur as a token anywhere in the script outside `skip`?
inline bool used_elsewhere(const ExtractedScript& script, std::string_view name, const SourceSpan& skip) {
  for (std::size_t l = 0; l < script.text_lines.size(); ++l) {
    const std::string& line = script.text_lines[l];
    if (l < skip.begin_line || l > skip.end_line) {
      if (text::contains_token(line, name)) return true;
      continue;
    }
    std::string masked = line;
    for (std::size_t c = 0; c < masked.size(); ++c)
      if (skip.contains(l, c)) masked[c] = ' ';
    if (text::contains_token(masked, name)) return true;
  }
  return false;
}

}  // namespace detail

inline std::vector<LintFinding> lint_native(const ExtractedScript& script, const std::vector<ImportRecord>& imports,
                                            const std::vector<DefRecord>& defs, const LintConfig& cfg) {
  std::vector<LintFinding> out;
  for (const auto& span : script.cells) {
    const auto views = pylex::scan_lines(script.cell_lines(span));
    for (std::size_t j = 0; j < views.size(); ++j) {
      const std::size_t line = span.first_line + j;
      if (!script.is_mapped(line)) continue;
      const std::string& raw = script.text_lines[line];
      const std::string& code = views[j].code;
      if (cfg.enabled(checks::trailing_whitespace) && !raw.empty() && (raw.back() == ' ' || raw.back() == '\t'))
        out.push_back({std::string(checks::trailing_whitespace), LintCategory::convention, line,
                       text::rtrim(raw).size(), "Trailing whitespace"});
      if (cfg.enabled(checks::line_too_long)) {
        const auto len = text::utf8_length(raw);
        if (len > cfg.max_line_len)
          out.push_back({std::string(checks::line_too_long), LintCategory::convention, line, 0,
                         "Line too long (" + std::to_string(len) + "/" + std::to_string(cfg.max_line_len) + ")"});
      }
      if (cfg.enabled(checks::bad_whitespace)) {
        if (auto col = detail::bad_whitespace_column(code))
          out.push_back({std::string(checks::bad_whitespace), LintCategory::convention, line, *col,
                         std::string("Bad whitespace around '") + code[*col] + "'"});
      }
      if (cfg.enabled(checks::multiple_statements)) {
        if (auto col = detail::multiple_statements_column(code))
          out.push_back({std::string(checks::multiple_statements), LintCategory::convention, line, *col,
                         "More than one statement on a single line"});
      }
    }
  }

  if (cfg.enabled(checks::invalid_name)) {
    for (const auto& d : defs) {
      if (!script.is_mapped(d.script_line)) continue;
      if (d.kind == DefKind::function && !is_snake_case(d.name))
        out.push_back({std::string(checks::invalid_name), LintCategory::convention, d.script_line, d.indent,
                       "Function name \"" + d.name + "\" doesn't conform to snake_case naming style"});
      if (d.kind == DefKind::class_ && !is_pascal_case(d.name))
        out.push_back({std::string(checks::invalid_name), LintCategory::convention, d.script_line, d.indent,
                       "Class name \"" + d.name + "\" doesn't conform to PascalCase naming style"});
    }
  }

  for (const auto& rec : imports) {
    if (rec.is_wildcard) {
      if (cfg.enabled(checks::wildcard_import))
        out.push_back({std::string(checks::wildcard_import), LintCategory::warning, rec.script_line,
                       rec.statement.begin_col, "Wildcard import " + rec.module_path});
      continue;
    }
    if (!cfg.enabled(checks::unused_import) || rec.module_path == "__future__") continue;
    for (std::size_t k = 0; k < rec.bound_names.size(); ++k) {
      const auto& name = rec.bound_names[k];
      if (detail::used_elsewhere(script, name, rec.statement)) continue;
      std::string what = rec.imported_names.empty() ? rec.module_path : rec.imported_names[k] + " from " + rec.module_path;
      if (name != (rec.imported_names.empty() ? rec.module_path : rec.imported_names[k])) what += " as " + name;
      out.push_back({std::string(checks::unused_import), LintCategory::warning, rec.script_line,
                     rec.statement.begin_col, what + " imported but unused"});
    }
  }

  std::stable_sort(out.begin(), out.end(), lint_order);
  return out;
}

inline std::vector<LintFinding> lint_native(const ExtractedScript& script, const LintConfig& cfg = {}) {
  return lint_native(script, scan_imports(script), scan_defs(script), cfg);
}

}  // namespace nbpractice
