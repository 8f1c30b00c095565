#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "nbpractice/error.hpp"
#include "nbpractice/extract.hpp"
#include "nbpractice/lint.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

inline constexpr std::string_view kBridgeParseCheck = "ext:bridge-parse";

// A Pylint invocation matching the output contract below.
inline constexpr std::string_view kPylintTemplate =
    "pylint --msg-template='{line}:{column}:{symbol}:{C}:{msg}' --score=n --reports=n {input}";

struct BridgeConfig {
  std::string command;  // `{input}` is replaced with the quoted script path
  std::set<std::string> ignored_checks{"pointless-statement"};
  unsigned max_subprocesses = 0;  // 0: number of logical CPUs

  friend bool operator==(const BridgeConfig&, const BridgeConfig&) = default;
};

inline std::optional<LintCategory> bridge_category(char initial) {
  switch (initial) {
    case 'C': return LintCategory::convention;
    case 'R': return LintCategory::refactor;
    case 'W': return LintCategory::warning;
    case 'E':
    case 'F': return LintCategory::error;
    default: return std::nullopt;
  }
}

// Parses `line:column:code:category:message` lines. External lines are
// 1-based; findings are 0-based like every script line. Lines that do not
// parse become a warning finding and parsing continues.
inline std::vector<LintFinding> parse_bridge_output(std::string_view output,
                                                    const std::set<std::string>& ignored = {}) {
  std::vector<LintFinding> out;
  for (const auto& raw : text::split_lines(output)) {
    auto line = text::trim(raw);
    if (line.empty() || text::starts_with(line, "*")) continue;  // module banners
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (fields.size() < 4) {
      auto colon = line.find(':', start);
      if (colon == std::string_view::npos) break;
      fields.push_back(line.substr(start, colon - start));
      start = colon + 1;
    }
    auto as_number = [](std::string_view s) -> std::optional<std::size_t> {
      s = text::trim(s);
      if (s.empty()) return std::nullopt;
      std::size_t v = 0;
      for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<std::size_t>(c - '0');
      }
      return v;
    };
    std::optional<std::size_t> lno, col;
    std::optional<LintCategory> cat;
    if (fields.size() == 4) {
      lno = as_number(fields[0]);
      col = as_number(fields[1]);
      auto c = text::trim(fields[3]);
      if (!c.empty()) cat = bridge_category(c.front());
    }
    if (!lno || !col || !cat || text::trim(fields[2]).empty()) {
      out.push_back({std::string(kBridgeParseCheck), LintCategory::warning, 0, 0,
                     "unparseable linter output: " + std::string(line)});
      continue;
    }
    std::string code(text::trim(fields[2]));
    if (ignored.count(code) || ignored.count("ext:" + code)) continue;
    out.push_back({"ext:" + code, *cat, *lno > 0 ? *lno - 1 : 0, *col,
                   std::string(text::trim(line.substr(start)))});
  }
  std::stable_sort(out.begin(), out.end(), lint_order);
  return out;
}

namespace detail {

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string substitute_input(std::string_view templ, const std::string& path) {
  std::string out;
  const std::string quoted = shell_quote(path);
  std::size_t i = 0;
  bool placed = false;
  while (i < templ.size()) {
    if (templ.substr(i, 7) == "{input}") {
      out += quoted;
      i += 7;
      placed = true;
    } else {
      out += templ[i++];
    }
  }
  if (!placed) out += " " + quoted;
  return out;
}

}  // namespace detail

// Runs a configured linter as a subprocess per script. Concurrent subprocesses
// are capped; the object may be shared by any number of analysis threads.
class ExternalLinter {
 public:
  explicit ExternalLinter(BridgeConfig cfg)
      : cfg_(std::move(cfg)),
        slots_(static_cast<std::ptrdiff_t>(cfg_.max_subprocesses
                                               ? cfg_.max_subprocesses
                                               : std::max(1u, std::thread::hardware_concurrency()))) {}

  const BridgeConfig& config() const { return cfg_; }

  std::vector<LintFinding> run(const ExtractedScript& script) {
    if (script.text_lines.empty()) return {};
    std::string contents;
    for (const auto& l : script.text_lines) contents += l + "\n";

    auto pattern = (std::filesystem::temp_directory_path() / "nbpractice-XXXXXX.py").string();
    int fd = ::mkstemps(pattern.data(), 3);
    if (fd < 0) throw Error(ErrorCode::bridge_unavailable, "cannot create temporary script");
    ::close(fd);
    struct Remove {
      std::string path;
      ~Remove() { std::remove(path.c_str()); }
    } cleanup{pattern};
    {
      std::ofstream f(pattern, std::ios::binary);
      f << contents;
    }

    const std::string cmd = detail::substitute_input(cfg_.command, pattern);
    std::string output;
    int status = 0;
    {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{slots_};
      FILE* pipe = ::popen(cmd.c_str(), "r");
      if (!pipe) throw Error(ErrorCode::bridge_unavailable, "cannot spawn: " + cmd);
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
      status = ::pclose(pipe);
    }
    if (status == -1 || (WIFEXITED(status) && WEXITSTATUS(status) == 127))
      throw Error(ErrorCode::bridge_unavailable, "command not runnable: " + cmd);
    return parse_bridge_output(output, cfg_.ignored_checks);
  }

 private:
  BridgeConfig cfg_;
  std::counting_semaphore<> slots_;
};

inline std::vector<LintFinding> run_external_linter(const ExtractedScript& script, const BridgeConfig& cfg) {
  ExternalLinter linter(cfg);
  return linter.run(script);
}

}  // namespace nbpractice
