#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbpractice/error.hpp"
#include "nbpractice/notebook.hpp"
#include "nbpractice/pylex.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

enum class StripReason { line_magic, cell_magic, shell_escape, shell_assignment, introspection };

constexpr std::string_view to_string(StripReason r) {
  switch (r) {
    case StripReason::line_magic: return "line_magic";
    case StripReason::cell_magic: return "cell_magic";
    case StripReason::shell_escape: return "shell_escape";
    case StripReason::shell_assignment: return "shell_assignment";
    case StripReason::introspection: return "introspection";
  }
  return "?";
}

struct StrippedRecord {
  std::size_t cell_index = 0;
  std::size_t cell_line = 0;
  StripReason reason = StripReason::line_magic;

  friend bool operator==(const StrippedRecord&, const StrippedRecord&) = default;
};

// Each rewrite can be switched off independently.
struct StripRules {
  bool cell_magic = true;
  bool line_magic = true;
  bool shell_escape = true;
  bool shell_assignment = true;
  bool introspection = true;

  friend bool operator==(const StripRules&, const StripRules&) = default;
};

struct StripResult {
  std::vector<std::string> lines;
  std::vector<StrippedRecord> stripped;
};

namespace detail {

// `<target> = !<cmd>` where target is one or more comma-separated dotted names.
inline bool is_shell_assignment(std::string_view line) {
  auto s = text::ltrim(line);
  std::size_t i = 0;
  auto dotted = [&] {
    if (i >= s.size() || !text::is_ident_start(s[i])) return false;
    while (i < s.size() && (text::is_ident_char(s[i]) || s[i] == '.')) ++i;
    return true;
  };
  auto skip_ws = [&] {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  };
  if (!dotted()) return false;
  skip_ws();
  while (i < s.size() && s[i] == ',') {
    ++i;
    skip_ws();
    if (!dotted()) return false;
    skip_ws();
  }
  if (i >= s.size() || s[i] != '=') return false;
  ++i;
  if (i < s.size() && s[i] == '=') return false;
  skip_ws();
  return i < s.size() && s[i] == '!';
}

// `name?` / `obj.attr??` terminating the line in code state, or a leading `?`.
inline bool is_introspection(std::string_view line, const pylex::LineView& view) {
  auto raw = text::rtrim(line);
  auto code = text::rtrim(view.code);
  if (text::starts_with(text::ltrim(code), "?")) return true;
  if (raw.empty() || raw.back() != '?' || code.size() != raw.size()) return false;
  std::size_t n = code.size();
  std::size_t marks = 0;
  while (n > 0 && code[n - 1] == '?' && marks < 2) {
    --n;
    ++marks;
  }
  return n > 0 && text::is_ident_char(code[n - 1]);
}

}  // namespace detail

// Blanks notebook-specific statements in place. The line count never changes.
inline StripResult strip_cell(std::span<const std::string> lines, const StripRules& rules = {},
                              std::size_t cell_index = 0) {
  StripResult r;
  r.lines.assign(lines.begin(), lines.end());
  if (r.lines.empty()) return r;

  if (rules.cell_magic && text::starts_with(text::ltrim(r.lines.front()), "%%")) {
    for (std::size_t i = 0; i < r.lines.size(); ++i) {
      r.lines[i].clear();
      r.stripped.push_back({cell_index, i, StripReason::cell_magic});
    }
    return r;
  }

  pylex::QuoteScanner state;
  for (std::size_t i = 0; i < r.lines.size(); ++i) {
    auto& line = r.lines[i];
    pylex::QuoteScanner probe = state;
    const bool in_string = probe.in_string();
    const auto view = probe.scan(line);
    std::optional<StripReason> reason;
    if (!in_string) {
      const auto lead = text::ltrim(line);
      const char first = lead.empty() ? '\0' : lead.front();
      if (first == '%') {
        if (rules.line_magic) reason = StripReason::line_magic;
      } else if (first == '!') {
        if (rules.shell_escape) reason = StripReason::shell_escape;
      } else if (rules.shell_assignment && detail::is_shell_assignment(line)) {
        reason = StripReason::shell_assignment;
      } else if (rules.introspection && detail::is_introspection(line, view)) {
        reason = StripReason::introspection;
      }
    }
    if (reason) {
      line.clear();
      r.stripped.push_back({cell_index, i, *reason});
    } else {
      state = probe;
    }
  }
  return r;
}

struct SourceMapEntry {
  std::size_t script_line = 0;
  std::size_t cell_index = 0;
  std::size_t cell_line = 0;

  friend bool operator==(const SourceMapEntry&, const SourceMapEntry&) = default;
};

struct CellLocation {
  std::size_t cell_index = 0;
  std::size_t cell_line = 0;

  friend bool operator==(const CellLocation&, const CellLocation&) = default;
};

// Script lines [first_line, first_line + line_count) belong to one code cell.
struct CellSpan {
  std::size_t cell_index = 0;
  std::size_t first_line = 0;
  std::size_t line_count = 0;
};

struct ExtractedScript {
  std::vector<std::string> text_lines;
  std::vector<SourceMapEntry> map_entries;  // sorted by script_line
  std::vector<StrippedRecord> stripped;
  std::vector<CellSpan> cells;

  std::optional<CellLocation> try_map_line(std::size_t script_line) const {
    auto it = std::lower_bound(map_entries.begin(), map_entries.end(), script_line,
                               [](const SourceMapEntry& e, std::size_t l) { return e.script_line < l; });
    if (it == map_entries.end() || it->script_line != script_line) return std::nullopt;
    return CellLocation{it->cell_index, it->cell_line};
  }

  bool is_mapped(std::size_t script_line) const { return try_map_line(script_line).has_value(); }

  std::span<const std::string> cell_lines(const CellSpan& span) const {
    return std::span<const std::string>(text_lines).subspan(span.first_line, span.line_count);
  }
};

inline CellLocation map_line(const ExtractedScript& script, std::size_t script_line) {
  if (auto loc = script.try_map_line(script_line)) return *loc;
  throw Error(ErrorCode::unmapped_line, "script line " + std::to_string(script_line) + " has no source cell");
}

// Concatenates the stripped code cells, one blank separator between cells.
inline ExtractedScript extract_script(const Notebook& nb, const StripRules& rules = {}) {
  ExtractedScript s;
  bool first = true;
  for (const auto& cell : nb.cells) {
    if (cell.kind != CellKind::code) continue;
    if (!first) s.text_lines.emplace_back();
    first = false;

    auto r = strip_cell(cell.source_lines, rules, cell.index);
    std::vector<bool> blanked(r.lines.size(), false);
    for (const auto& rec : r.stripped) blanked[rec.cell_line] = true;

    s.cells.push_back({cell.index, s.text_lines.size(), r.lines.size()});
    for (std::size_t j = 0; j < r.lines.size(); ++j) {
      const std::size_t script_line = s.text_lines.size();
      s.text_lines.push_back(std::move(r.lines[j]));
      if (!blanked[j]) s.map_entries.push_back({script_line, cell.index, j});
    }
    s.stripped.insert(s.stripped.end(), r.stripped.begin(), r.stripped.end());
  }
  return s;
}

}  // namespace nbpractice
