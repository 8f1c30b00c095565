#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nbpractice/error.hpp"

// A TOML subset sufficient for configuration files: comments, [tables] and
// [dotted.tables], bare/quoted keys, basic and literal strings, integers,
// floats, booleans, and (possibly multi-line) arrays. Parsed into JSON.
namespace nbpractice::toml {

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, std::string origin) : s_(src), origin_(std::move(origin)) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++i_;
        skip_ws();
        if (peek() == '[') fail("arrays of tables are not supported");
        table = &root;
        while (true) {
          skip_ws();
          const auto k = key();
          auto& next = (*table)[k];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          table = &next;
          skip_ws();
          if (peek() == '.') {
            ++i_;
            continue;
          }
          break;
        }
        expect(']');
        end_of_line();
        continue;
      }
      const auto k = key();
      skip_ws();
      expect('=');
      skip_ws();
      if (table->contains(k)) fail("duplicate key '" + k + "'");
      (*table)[k] = value();
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::config_error, "line " + std::to_string(line_) + ": " + msg, origin_);
  }

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++i_;
  }

  void newline() {
    if (peek() == '\r') ++i_;
    if (peek() == '\n') {
      ++i_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') newline();
      else break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected trailing content");
    newline();
  }

  std::string key() {
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    std::string out;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      out += s_[i_++];
    if (out.empty()) fail("expected a key");
    return out;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      char e = s_[i_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t n = e == 'u' ? 4 : 8;
          if (i_ + n > s_.size()) fail("short unicode escape");
          std::uint32_t cp = 0;
          for (std::size_t k = 0; k < n; ++k) {
            const char h = s_[i_++];
            if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
            cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                             : (std::tolower(h) - 'a' + 10));
          }
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '\'') return out;
      out += c;
    }
  }

  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') newline();
      else break;
    }
  }

  nlohmann::json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') {
      ++i_;
      nlohmann::json arr = nlohmann::json::array();
      while (true) {
        skip_array_space();
        if (peek() == ']') {
          ++i_;
          return arr;
        }
        arr.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        expect(']');
        return arr;
      }
    }
    if (s_.substr(i_, 4) == "true") {
      i_ += 4;
      return true;
    }
    if (s_.substr(i_, 5) == "false") {
      i_ += 5;
      return false;
    }
    std::string num;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      if (peek() != '_') num += peek();
      ++i_;
    }
    if (num.empty()) fail("expected a value");
    const bool is_float = num.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(num, &used);
        if (used == num.size()) return v;
      } else {
        const long long v = std::stoll(num, &used, 10);
        if (used == num.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + num + "'");
  }

  std::string_view s_;
  std::string origin_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
};

}  // namespace detail

inline nlohmann::json parse(std::string_view src, std::string origin = {}) {
  return detail::Parser(src, std::move(origin)).parse();
}

}  // namespace nbpractice::toml
