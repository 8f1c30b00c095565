#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbpractice/extract.hpp"
#include "nbpractice/pylex.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

// Half-open character range in script coordinates.
struct SourceSpan {
  std::size_t begin_line = 0;
  std::size_t begin_col = 0;
  std::size_t end_line = 0;
  std::size_t end_col = 0;

  bool contains(std::size_t line, std::size_t col) const {
    if (line < begin_line || line > end_line) return false;
    if (line == begin_line && col < begin_col) return false;
    if (line == end_line && col >= end_col) return false;
    return true;
  }
};

struct ImportRecord {
  std::string module_path;
  std::vector<std::string> imported_names;  // empty for a plain import
  std::vector<std::string> bound_names;     // names the statement binds for this module
  bool is_wildcard = false;
  std::size_t script_line = 0;
  SourceSpan statement;  // the whole statement the record came from
};

enum class DefKind { function, class_ };

constexpr std::string_view to_string(DefKind k) { return k == DefKind::function ? "function" : "class"; }

struct DefRecord {
  DefKind kind = DefKind::function;
  std::string name;
  std::size_t script_line = 0;
  std::size_t indent = 0;
};

// A logical line: physical lines joined across open brackets and trailing
// backslashes, each character tagged with its script position.
struct LogicalLine {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> pos;

  void push(char c, std::size_t line, std::size_t col) {
    text += c;
    pos.emplace_back(line, col);
  }
};

// Calls fn(LogicalLine) once per top-level `;`-separated statement of every
// code cell. Blanked lines are empty and never start a statement.
template <typename Fn>
void for_each_statement(const ExtractedScript& script, Fn&& fn) {
  for (const auto& span : script.cells) {
    const auto views = pylex::scan_lines(script.cell_lines(span));
    std::size_t k = 0;
    while (k < views.size()) {
      LogicalLine logical;
      int depth = 0;
      std::size_t j = k;
      while (true) {
        const std::string& code = views[j].code;
        const std::size_t line = span.first_line + j;
        auto body = text::rtrim(code);
        const bool backslash = !body.empty() && body.back() == '\\';
        for (std::size_t col = 0; col < code.size(); ++col) {
          char c = code[col];
          if (c == '(' || c == '[' || c == '{') ++depth;
          else if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
          if (backslash && col + 1 == body.size()) c = ' ';
          logical.push(c, line, col);
        }
        if ((depth > 0 || backslash) && j + 1 < views.size()) {
          logical.push(' ', line, code.size());
          ++j;
          continue;
        }
        break;
      }
      // split on top-level semicolons
      std::size_t start = 0;
      int d = 0;
      auto emit = [&](std::size_t b, std::size_t e) {
        LogicalLine seg;
        for (std::size_t i = b; i < e; ++i) seg.push(logical.text[i], logical.pos[i].first, logical.pos[i].second);
        fn(seg);
      };
      for (std::size_t i = 0; i < logical.text.size(); ++i) {
        const char c = logical.text[i];
        if (c == '(' || c == '[' || c == '{') ++d;
        else if ((c == ')' || c == ']' || c == '}') && d > 0) --d;
        else if (c == ';' && d == 0) {
          emit(start, i);
          start = i + 1;
        }
      }
      emit(start, logical.text.size());
      k = j + 1;
    }
  }
}

namespace detail {

class ImportParser {
 public:
  explicit ImportParser(std::string_view s) : s_(s) {}

  std::optional<std::vector<ImportRecord>> parse() {
    skip_ws();
    if (keyword("import")) return parse_import();
    if (keyword("from")) return parse_from();
    return std::nullopt;
  }

 private:
  static bool ws(char c) { return c == ' ' || c == '\t' || c == '\\'; }
  void skip_ws() {
    while (i_ < s_.size() && ws(s_[i_])) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= s_.size();
  }
  bool keyword(std::string_view kw) {
    if (s_.substr(i_, kw.size()) != kw) return false;
    const std::size_t e = i_ + kw.size();
    if (e < s_.size() && text::is_ident_char(s_[e])) return false;
    i_ = e;
    skip_ws();
    return true;
  }
  bool punct(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      skip_ws();
      return true;
    }
    return false;
  }
  std::optional<std::string> ident() {
    skip_ws();
    if (i_ >= s_.size() || !text::is_ident_start(s_[i_])) return std::nullopt;
    std::size_t b = i_;
    while (i_ < s_.size() && text::is_ident_char(s_[i_])) ++i_;
    return std::string(s_.substr(b, i_ - b));
  }
  std::optional<std::string> dotted() {
    auto first = ident();
    if (!first) return std::nullopt;
    std::string out = *first;
    while (true) {
      std::size_t save = i_;
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '.') {
        ++i_;
        auto next = ident();
        if (!next) return std::nullopt;
        out += '.';
        out += *next;
      } else {
        i_ = save;
        return out;
      }
    }
  }
  std::optional<std::string> alias() {
    std::size_t save = i_;
    skip_ws();
    if (keyword("as")) return ident();
    i_ = save;
    return std::string();
  }

  std::optional<std::vector<ImportRecord>> parse_import() {
    std::vector<ImportRecord> out;
    do {
      auto mod = dotted();
      if (!mod) return std::nullopt;
      auto as = alias();
      if (!as) return std::nullopt;
      ImportRecord r;
      r.module_path = *mod;
      r.bound_names.push_back(as->empty() ? mod->substr(0, mod->find('.')) : *as);
      out.push_back(std::move(r));
    } while (punct(','));
    if (!at_end()) return std::nullopt;
    return out;
  }

  std::optional<std::vector<ImportRecord>> parse_from() {
    std::string module;
    skip_ws();
    while (i_ < s_.size() && s_[i_] == '.') {
      module += '.';
      ++i_;
    }
    std::size_t save = i_;
    skip_ws();
    if (!keyword("import")) {
      i_ = save;
      auto mod = dotted();
      if (!mod) return std::nullopt;
      module += *mod;
      skip_ws();
      if (!keyword("import")) return std::nullopt;
    }
    if (module.empty()) return std::nullopt;
    ImportRecord r;
    r.module_path = module;
    if (punct('*')) {
      if (!at_end()) return std::nullopt;
      r.is_wildcard = true;
      return std::vector<ImportRecord>{r};
    }
    const bool paren = punct('(');
    while (true) {
      auto name = ident();
      if (!name) {
        if (paren && !r.imported_names.empty()) break;  // trailing comma
        return std::nullopt;
      }
      auto as = alias();
      if (!as) return std::nullopt;
      r.imported_names.push_back(*name);
      r.bound_names.push_back(as->empty() ? *name : *as);
      if (!punct(',')) break;
    }
    if (paren && !punct(')')) return std::nullopt;
    if (!at_end()) return std::nullopt;
    return std::vector<ImportRecord>{r};
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline std::vector<ImportRecord> scan_imports(const ExtractedScript& script) {
  std::vector<ImportRecord> out;
  for_each_statement(script, [&](const LogicalLine& seg) {
    std::size_t b = 0;
    while (b < seg.text.size() && text::is_space(seg.text[b])) ++b;
    if (b == seg.text.size()) return;
    std::size_t e = seg.text.size();
    while (e > b && text::is_space(seg.text[e - 1])) --e;
    auto parsed = detail::ImportParser(std::string_view(seg.text).substr(b, e - b)).parse();
    if (!parsed) return;
    SourceSpan span{seg.pos[b].first, seg.pos[b].second, seg.pos[e - 1].first, seg.pos[e - 1].second + 1};
    for (auto& rec : *parsed) {
      rec.script_line = span.begin_line;
      rec.statement = span;
      out.push_back(std::move(rec));
    }
  });
  return out;
}

inline std::vector<DefRecord> scan_defs(const ExtractedScript& script) {
  std::vector<DefRecord> out;
  for (const auto& span : script.cells) {
    const auto views = pylex::scan_lines(script.cell_lines(span));
    for (std::size_t j = 0; j < views.size(); ++j) {
      std::string_view code = views[j].code;
      std::size_t i = 0, indent = 0;
      while (i < code.size() && (code[i] == ' ' || code[i] == '\t')) {
        indent = code[i] == '\t' ? (indent / 8 + 1) * 8 : indent + 1;
        ++i;
      }
      auto word = [&](std::string_view kw) {
        if (code.substr(i, kw.size()) != kw) return false;
        std::size_t e = i + kw.size();
        if (e >= code.size() || (code[e] != ' ' && code[e] != '\t')) return false;
        i = e;
        while (i < code.size() && (code[i] == ' ' || code[i] == '\t')) ++i;
        return true;
      };
      DefKind kind;
      if (word("async")) {
        if (!word("def")) continue;
        kind = DefKind::function;
      } else if (word("def")) {
        kind = DefKind::function;
      } else if (word("class")) {
        kind = DefKind::class_;
      } else {
        continue;
      }
      if (i >= code.size() || !text::is_ident_start(code[i])) continue;
      std::size_t b = i;
      while (i < code.size() && text::is_ident_char(code[i])) ++i;
      out.push_back({kind, std::string(code.substr(b, i - b)), span.first_line + j, indent});
    }
  }
  return out;
}

enum class MatchScope { full, top };
enum class TestProfile { strict, recommended };

constexpr std::string_view to_string(MatchScope s) { return s == MatchScope::full ? "full" : "top"; }
constexpr std::string_view to_string(TestProfile p) {
  return p == TestProfile::strict ? "strict" : "recommended";
}

struct TestDetectConfig {
  std::vector<std::string> substrings{"test", "Test", "TEST", "mock", "Mock", "MOCK"};
  std::vector<std::string> allowlist{"nose2", "robot"};
  std::vector<std::string> denylist{};
  MatchScope scope = MatchScope::full;

  static std::vector<std::string> recommended_denylist() {
    return {"contest", "greatest", "latest", "protest"};
  }
};

namespace detail {

inline std::string_view strip_relative(std::string_view module) {
  while (!module.empty() && module.front() == '.') module.remove_prefix(1);
  return module;
}

inline std::string_view top_segment(std::string_view module) {
  module = strip_relative(module);
  return module.substr(0, module.find('.'));
}

// `entry` names a module or any of its submodules.
inline bool names_module(std::string_view module, std::string_view entry) {
  module = strip_relative(module);
  return module == entry || (text::starts_with(module, entry) && module.size() > entry.size() &&
                             module[entry.size()] == '.');
}

}  // namespace detail

inline bool is_test_import(const ImportRecord& rec, const TestDetectConfig& cfg) {
  for (const auto& d : cfg.denylist)
    if (detail::names_module(rec.module_path, d)) return false;
  for (const auto& a : cfg.allowlist)
    if (detail::names_module(rec.module_path, a)) return true;
  const std::string_view subject =
      cfg.scope == MatchScope::full ? std::string_view(rec.module_path) : detail::top_segment(rec.module_path);
  for (const auto& s : cfg.substrings)
    if (!s.empty() && subject.find(s) != std::string_view::npos) return true;
  return false;
}

inline std::vector<ImportRecord> detect_test_imports(const std::vector<ImportRecord>& imports,
                                                     const TestDetectConfig& cfg) {
  std::vector<ImportRecord> out;
  for (const auto& r : imports)
    if (is_test_import(r, cfg)) out.push_back(r);
  return out;
}

enum class ImportOrigin { local, external_or_stdlib, unknown };

constexpr std::string_view to_string(ImportOrigin o) {
  switch (o) {
    case ImportOrigin::local: return "local";
    case ImportOrigin::external_or_stdlib: return "external_or_stdlib";
    case ImportOrigin::unknown: return "unknown";
  }
  return "?";
}

// Python sources and walked directories of an ingested corpus. A notebook
// whose directory was never walked has no file-system context.
struct CorpusIndex {
  std::set<std::string> files;
  std::set<std::string> directories;

  static std::string key(const std::filesystem::path& p) {
    auto k = p.lexically_normal().generic_string();
    if (k.empty()) return ".";
    while (k.size() > 1 && k.back() == '/') k.pop_back();
    return k;
  }
  void add_file(const std::filesystem::path& p) { files.insert(key(p)); }
  void add_directory(const std::filesystem::path& p) { directories.insert(key(p)); }
  bool has(const std::filesystem::path& p) const { return files.count(key(p)) != 0; }
  bool walked(const std::filesystem::path& dir) const { return directories.count(key(dir)) != 0; }
};

inline ImportOrigin classify_import_origin(const ImportRecord& rec, const std::filesystem::path& notebook_path,
                                           const CorpusIndex& index) {
  auto dir = notebook_path.parent_path();
  if (dir.empty()) dir = ".";
  if (!index.walked(dir)) return ImportOrigin::unknown;
  std::string seg(detail::top_segment(rec.module_path));
  if (seg.empty() && !rec.imported_names.empty()) seg = rec.imported_names.front();
  if (seg.empty()) return ImportOrigin::external_or_stdlib;
  if (index.has(dir / (seg + ".py")) || index.has(dir / seg / "__init__.py")) return ImportOrigin::local;
  return ImportOrigin::external_or_stdlib;
}

}  // namespace nbpractice
