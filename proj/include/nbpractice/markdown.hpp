#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbpractice/notebook.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

// Version tag of the stripping rules below; reported so numbers stay comparable.
//
//  1. fenced code blocks (``` or ~~~, through the closing fence or the end of
//     the cell) are removed with their fence lines
//  2. HTML tags `<tag ...>`, `</tag>`, `<!...>` are removed
//  3. images `![alt](target)` are removed entirely
//  4. links `[text](target)` keep only `text`
//  5. line prefixes are removed: ATX heading markers (and closing `#` runs),
//     blockquote markers, list bullets `-`/`*`/`+`, ordered-list numerals `1.`/`1)`
//  6. emphasis and strikethrough markers (`*`, `_`, `~` runs at token edges)
//  7. inline-code backticks (content kept)
//  8. a word is a whitespace-separated token holding at least one letter or
//     digit; tokens made only of punctuation (rules, table pipes, setext
//     underlines) are syntax
inline constexpr std::string_view kMarkdownRulesVersion = "md-strip-v1";

struct MdTokens {
  std::size_t words = 0;
  std::size_t lines = 0;

  friend bool operator==(const MdTokens&, const MdTokens&) = default;
};

struct Heading {
  int level = 1;
  std::string text;
  std::size_t cell_index = 0;
};

namespace md {

// Length of a fence marker (``` or ~~~, three or more) opening the line, else 0.
inline std::size_t fence_length(std::string_view line, char* fence_char = nullptr) {
  auto s = text::ltrim(line);
  if (s.size() < 3 || (s[0] != '`' && s[0] != '~')) return 0;
  std::size_t n = 0;
  while (n < s.size() && s[n] == s[0]) ++n;
  if (n < 3) return 0;
  if (fence_char) *fence_char = s[0];
  return n;
}

// Marks lines that belong to fenced code blocks, fence lines included.
inline std::vector<bool> fenced_lines(std::span<const std::string> lines) {
  std::vector<bool> out(lines.size(), false);
  char open_char = 0;
  std::size_t open_len = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    char c = 0;
    const std::size_t len = fence_length(lines[i], &c);
    if (open_len == 0) {
      if (len) {
        open_char = c;
        open_len = len;
        out[i] = true;
      }
    } else {
      out[i] = true;
      if (len >= open_len && c == open_char && text::is_blank(text::ltrim(lines[i]).substr(len))) open_len = 0;
    }
  }
  return out;
}

inline std::string remove_html_tags(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<' && i + 1 < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/' || s[i + 1] == '!')) {
      auto close = s.find('>', i + 1);
      if (close != std::string_view::npos) {
        out += ' ';
        i = close + 1;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

// Rewrites `[text](target)` to `text`, or drops it entirely for images.
inline std::string rewrite_links(std::string_view s, bool images) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool bang = s[i] == '!' && i + 1 < s.size() && s[i + 1] == '[';
    if ((images && bang) || (!images && s[i] == '[')) {
      const std::size_t open = images ? i + 1 : i;
      auto close = s.find(']', open + 1);
      if (close != std::string_view::npos && close + 1 < s.size() && s[close + 1] == '(') {
        auto end = s.find(')', close + 2);
        if (end != std::string_view::npos) {
          if (!images) out.append(s.substr(open + 1, close - open - 1));
          else out += ' ';
          i = end + 1;
          continue;
        }
      }
    }
    out += s[i++];
  }
  return out;
}

inline std::string_view strip_prefixes(std::string_view s) {
  while (true) {
    s = text::ltrim(s);
    if (s.empty()) return s;
    if (s[0] == '>') {
      s.remove_prefix(1);
      continue;
    }
    if (s[0] == '#') {
      std::size_t n = 0;
      while (n < s.size() && s[n] == '#') ++n;
      if (n <= 6 && (n == s.size() || s[n] == ' ' || s[n] == '\t')) {
        s.remove_prefix(n);
        // closing sequence
        auto body = text::rtrim(s);
        std::size_t e = body.size();
        while (e > 0 && body[e - 1] == '#') --e;
        if (e < body.size() && (e == 0 || body[e - 1] == ' ' || body[e - 1] == '\t')) s = body.substr(0, e);
        continue;
      }
      return s;
    }
    if ((s[0] == '-' || s[0] == '*' || s[0] == '+') && s.size() > 1 && (s[1] == ' ' || s[1] == '\t')) {
      s.remove_prefix(2);
      continue;
    }
    std::size_t d = 0;
    while (d < s.size() && d < 9 && s[d] >= '0' && s[d] <= '9') ++d;
    if (d > 0 && d + 1 < s.size() && (s[d] == '.' || s[d] == ')') && (s[d + 1] == ' ' || s[d + 1] == '\t')) {
      s.remove_prefix(d + 2);
      continue;
    }
    return s;
  }
}

inline bool is_word(std::string_view token) {
  for (char c : token) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) return true;
  }
  return false;
}

inline std::string_view strip_emphasis(std::string_view token) {
  auto marker = [](char c) { return c == '*' || c == '_' || c == '~'; };
  while (!token.empty() && marker(token.front())) token.remove_prefix(1);
  while (!token.empty() && marker(token.back())) token.remove_suffix(1);
  return token;
}

// Meaningful words of one line that lies outside any fenced block.
inline std::size_t line_words(std::string_view line) {
  std::string s = remove_html_tags(line);
  s = rewrite_links(s, true);
  s = rewrite_links(s, false);
  std::string body(strip_prefixes(s));
  std::size_t words = 0;
  for (const auto& tok : text::split_ws(body)) {
    std::string t(strip_emphasis(tok));
    std::erase(t, '`');
    if (is_word(strip_emphasis(t))) ++words;
  }
  return words;
}

}  // namespace md

inline MdTokens meaningful_md_tokens(std::span<const std::string> md_lines) {
  MdTokens out;
  const auto fenced = md::fenced_lines(md_lines);
  for (std::size_t i = 0; i < md_lines.size(); ++i) {
    if (fenced[i]) continue;
    const auto w = md::line_words(md_lines[i]);
    out.words += w;
    out.lines += w > 0;
  }
  return out;
}

inline std::size_t meaningful_word_count(std::string_view s) {
  std::string line(s);
  return md::line_words(line);
}

namespace md {

struct Atx {
  int level;
  std::string text;
};

inline std::optional<Atx> atx_heading(std::string_view line) {
  std::size_t lead = 0;
  while (lead < line.size() && line[lead] == ' ') ++lead;
  if (lead > 3) return std::nullopt;
  auto s = line.substr(lead);
  std::size_t n = 0;
  while (n < s.size() && s[n] == '#') ++n;
  if (n < 1 || n > 6 || n >= s.size() || (s[n] != ' ' && s[n] != '\t')) return std::nullopt;
  auto body = text::trim(s.substr(n));
  std::size_t e = body.size();
  while (e > 0 && body[e - 1] == '#') --e;
  if (e < body.size() && (e == 0 || body[e - 1] == ' ' || body[e - 1] == '\t')) body = text::rtrim(body.substr(0, e));
  return Atx{static_cast<int>(n), std::string(body)};
}

// 1 for `===`, 2 for `---`, 0 otherwise.
inline int setext_level(std::string_view line) {
  std::size_t lead = 0;
  while (lead < line.size() && line[lead] == ' ') ++lead;
  if (lead > 3) return 0;
  auto s = text::rtrim(line.substr(lead));
  if (s.empty() || (s[0] != '=' && s[0] != '-')) return 0;
  for (char c : s)
    if (c != s[0]) return 0;
  return s[0] == '=' ? 1 : 2;
}

inline bool is_list_or_quote(std::string_view line) {
  auto s = text::ltrim(line);
  if (s.empty()) return false;
  if (s[0] == '>') return true;
  if ((s[0] == '-' || s[0] == '*' || s[0] == '+') && (s.size() == 1 || s[1] == ' ' || s[1] == '\t')) return true;
  std::size_t d = 0;
  while (d < s.size() && s[d] >= '0' && s[d] <= '9') ++d;
  return d > 0 && d < s.size() && (s[d] == '.' || s[d] == ')') && (d + 1 == s.size() || s[d + 1] == ' ');
}

}  // namespace md

inline std::vector<Heading> detect_headings(std::span<const std::string> lines, std::size_t cell_index = 0) {
  std::vector<Heading> out;
  const auto fenced = md::fenced_lines(lines);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (fenced[i]) continue;
    if (auto h = md::atx_heading(lines[i])) {
      out.push_back({h->level, std::move(h->text), cell_index});
      continue;
    }
    const int level = md::setext_level(lines[i]);
    if (level == 0 || i == 0 || fenced[i - 1]) continue;
    const auto& prev = lines[i - 1];
    if (text::is_blank(prev) || md::atx_heading(prev) || md::setext_level(prev) || md::is_list_or_quote(prev))
      continue;
    out.push_back({level, std::string(text::trim(prev)), cell_index});
  }
  return out;
}

inline std::vector<Heading> detect_headings(const Notebook& nb) {
  std::vector<Heading> out;
  for (const auto& c : nb.cells) {
    if (c.kind != CellKind::markdown) continue;
    auto hs = detect_headings(c.source_lines, c.index);
    out.insert(out.end(), std::make_move_iterator(hs.begin()), std::make_move_iterator(hs.end()));
  }
  return out;
}

}  // namespace nbpractice
