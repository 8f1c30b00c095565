#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nbpractice::pylex {

// Replacement byte for characters inside string literals. It is neither
// whitespace nor an identifier character, so scanners skip over it.
inline constexpr char kMask = '\x01';

// The code part of one physical line: comments cut off, string interiors
// masked, quote characters kept. Same length as the line up to the comment.
struct LineView {
  std::string code;
  bool starts_in_string = false;
  bool has_comment = false;
};

// Line-at-a-time quote-state machine. Triple-quoted strings carry over to the
// next line; a single-quoted string only does so after a trailing backslash.
class QuoteScanner {
 public:
  LineView scan(std::string_view line) {
    LineView v;
    v.starts_in_string = quote_ != 0;
    v.code.reserve(line.size());
    bool escaped_newline = false;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
      const char c = line[i];
      if (quote_ != 0) {
        if (c == '\\') {
          v.code += kMask;
          if (i + 1 < n) {
            v.code += kMask;
            i += 2;
          } else {
            escaped_newline = true;
            ++i;
          }
          continue;
        }
        if (c == quote_ && (!triple_ || closes_triple(line, i))) {
          const std::size_t len = triple_ ? 3 : 1;
          v.code.append(line.substr(i, len));
          i += len;
          quote_ = 0;
          triple_ = false;
          continue;
        }
        v.code += kMask;
        ++i;
        continue;
      }
      if (c == '#') {
        v.has_comment = true;
        break;
      }
      if (c == '"' || c == '\'') {
        quote_ = c;
        if (closes_triple(line, i)) {
          triple_ = true;
          v.code.append(3, c);
          i += 3;
        } else {
          v.code += c;
          ++i;
        }
        continue;
      }
      v.code += c;
      ++i;
    }
    // An unterminated single-quoted string ends with its line.
    if (quote_ != 0 && !triple_ && !escaped_newline) quote_ = 0;
    return v;
  }

  bool in_string() const { return quote_ != 0; }
  void reset() {
    quote_ = 0;
    triple_ = false;
  }

 private:
  bool closes_triple(std::string_view line, std::size_t i) const {
    const char q = line[i];
    return i + 2 < line.size() && line[i + 1] == q && line[i + 2] == q;
  }

  char quote_ = 0;
  bool triple_ = false;
};

inline std::vector<LineView> scan_lines(std::span<const std::string> lines) {
  QuoteScanner scanner;
  std::vector<LineView> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(scanner.scan(l));
  return out;
}

}  // namespace nbpractice::pylex
