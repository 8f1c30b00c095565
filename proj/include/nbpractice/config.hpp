#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbpractice/bridge.hpp"
#include "nbpractice/checks.hpp"
#include "nbpractice/error.hpp"
#include "nbpractice/stats.hpp"
#include "nbpractice/text.hpp"
#include "nbpractice/toml.hpp"

namespace nbpractice {

// Run configuration. Defaults match the plain catalog rules; a config file
// and then command-line flags override them.
struct Config {
  std::set<BpId> enabled{BpId::bp4, BpId::bp5, BpId::bp6, BpId::bp7, BpId::bp9,
                         BpId::bp11, BpId::bp12, BpId::bp13, BpId::bp14};
  bool allow_any_kernel = false;
  std::optional<Severity> fail_severity = Severity::warning;  // nullopt: never fail on findings
  double bp4_threshold = 1.0;
  bool strict_bp5 = false;
  StripRules strip;
  LintConfig lint;
  std::optional<BridgeConfig> external;
  TestProfile test_profile = TestProfile::strict;
  std::vector<std::string> test_substrings = TestDetectConfig{}.substrings;
  std::vector<std::string> test_allowlist = TestDetectConfig{}.allowlist;
  std::optional<std::vector<std::string>> test_denylist;  // unset: the profile's list
  MatchScope test_match_scope = MatchScope::full;
  MdDenominator md_denominator = MdDenominator::all;
  std::vector<double> percentiles{0.75, 0.90};
  std::map<std::string, Severity> severity;  // overrides on top of the defaults
  unsigned jobs = 0;                         // 0: logical CPUs; not part of the digest

  TestDetectConfig test_detect() const {
    TestDetectConfig t;
    t.substrings = test_substrings;
    t.allowlist = test_allowlist;
    t.scope = test_match_scope;
    if (test_denylist) t.denylist = *test_denylist;
    else if (test_profile == TestProfile::recommended) t.denylist = TestDetectConfig::recommended_denylist();
    return t;
  }

  AnalysisConfig analysis(std::shared_ptr<ExternalLinter> bridge = nullptr) const {
    AnalysisConfig a;
    a.enabled = enabled;
    a.bp4_threshold = bp4_threshold;
    a.strict_bp5 = strict_bp5;
    a.allow_any_kernel = allow_any_kernel;
    a.strip = strip;
    a.lint = lint;
    a.tests = test_detect();
    for (const auto& [k, v] : severity) a.severity[k] = v;
    a.bridge = std::move(bridge);
    return a;
  }
};

inline std::optional<std::optional<Severity>> fail_severity_from_string(std::string_view s) {
  if (s == "none") return std::optional<Severity>{};
  if (auto v = severity_from_string(s)) return std::optional<Severity>{*v};
  return std::nullopt;
}

inline std::optional<TestProfile> test_profile_from_string(std::string_view s) {
  if (s == "strict") return TestProfile::strict;
  if (s == "recommended") return TestProfile::recommended;
  return std::nullopt;
}

inline std::optional<MatchScope> match_scope_from_string(std::string_view s) {
  if (s == "full") return MatchScope::full;
  if (s == "top") return MatchScope::top;
  return std::nullopt;
}

inline std::optional<MdDenominator> md_denominator_from_string(std::string_view s) {
  if (s == "all") return MdDenominator::all;
  if (s == "md-only") return MdDenominator::md_only;
  return std::nullopt;
}

// Check ids that a severity override may name.
inline bool known_severity_key(const std::string& k) {
  for (auto id : {checks::import_not_at_beginning, checks::not_top_to_bottom, checks::no_modularization,
                  checks::no_test_imports, checks::no_markdown, checks::no_headings, checks::empty_cell,
                  checks::non_executed_cell})
    if (k == id) return true;
  for (const auto& c : kNativeChecks)
    if (k == c.id) return true;
  for (auto c : kLintCategories)
    if (k == "lint-" + std::string(to_string(c))) return true;
  return text::starts_with(k, "ext:");
}

namespace detail {

class ConfigReader {
 public:
  ConfigReader(Config& cfg, std::string origin) : cfg_(cfg), origin_(std::move(origin)) {}

  void apply(const nlohmann::json& doc) {
    for (const auto& [table, body] : doc.items()) {
      if (!body.is_object()) fail("top-level key '" + table + "' must be a table");
      if (table == "checks") checks_table(body);
      else if (table == "bp4") bp4_table(body);
      else if (table == "bp5") bp5_table(body);
      else if (table == "extract") extract_table(body);
      else if (table == "lint") lint_table(body);
      else if (table == "test_detect") test_table(body);
      else if (table == "stats") stats_table(body);
      else if (table == "severity") severity_table(body);
      else fail("unknown table [" + table + "]");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorCode::config_error, msg, origin_); }

  [[noreturn]] void unknown(const std::string& table, const std::string& key) const {
    fail("unknown key '" + key + "' in [" + table + "]");
  }

  bool boolean(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_boolean()) fail("'" + key + "' must be a boolean");
    return v.get<bool>();
  }
  std::string string(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }
  double number(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_number()) fail("'" + key + "' must be a number");
    return v.get<double>();
  }
  std::int64_t integer(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
    return v.get<std::int64_t>();
  }
  std::vector<std::string> strings(const nlohmann::json& v, const std::string& key) const {
    if (!v.is_array()) fail("'" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(string(e, key));
    return out;
  }

  void checks_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k == "enabled") {
        std::set<BpId> ids;
        for (const auto& s : strings(v, k)) {
          auto id = bp_from_string(s);
          if (!id) fail("unknown practice '" + s + "'");
          if (!registry_entry(*id).operationalized) fail(s + " has no automated check");
          ids.insert(*id);
        }
        cfg_.enabled = ids;
      } else if (k == "allow_any_kernel") {
        cfg_.allow_any_kernel = boolean(v, k);
      } else if (k == "fail_severity") {
        auto s = fail_severity_from_string(string(v, k));
        if (!s) fail("fail_severity must be info, warning, error, or none");
        cfg_.fail_severity = *s;
      } else {
        unknown("checks", k);
      }
    }
  }

  void bp4_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k != "threshold") unknown("bp4", k);
      const double x = number(v, k);
      if (!(x >= 0.0 && x <= 1.0)) fail("bp4 threshold must lie in [0,1]");
      cfg_.bp4_threshold = x;
    }
  }

  void bp5_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k != "strict") unknown("bp5", k);
      cfg_.strict_bp5 = boolean(v, k);
    }
  }

  void extract_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k == "cell_magic") cfg_.strip.cell_magic = boolean(v, k);
      else if (k == "line_magic") cfg_.strip.line_magic = boolean(v, k);
      else if (k == "shell_escape") cfg_.strip.shell_escape = boolean(v, k);
      else if (k == "shell_assignment") cfg_.strip.shell_assignment = boolean(v, k);
      else if (k == "introspection") cfg_.strip.introspection = boolean(v, k);
      else unknown("extract", k);
    }
  }

  void lint_table(const nlohmann::json& t) {
    BridgeConfig bridge = cfg_.external.value_or(BridgeConfig{});
    bool touched_bridge = false;
    for (const auto& [k, v] : t.items()) {
      if (k == "max_line_len") {
        const auto n = integer(v, k);
        if (n < 1) fail("max_line_len must be positive");
        cfg_.lint.max_line_len = static_cast<std::size_t>(n);
      } else if (k == "disabled") {
        auto ids = strings(v, k);
        cfg_.lint.disabled = {ids.begin(), ids.end()};
      } else if (k == "external") {
        auto cmd = string(v, k);
        bridge.command = cmd == "pylint" ? std::string(kPylintTemplate) : cmd;
        touched_bridge = true;
      } else if (k == "ignored_checks") {
        auto ids = strings(v, k);
        bridge.ignored_checks = {ids.begin(), ids.end()};
      } else if (k == "max_subprocesses") {
        const auto n = integer(v, k);
        if (n < 0) fail("max_subprocesses must be non-negative");
        bridge.max_subprocesses = static_cast<unsigned>(n);
      } else {
        unknown("lint", k);
      }
    }
    if (touched_bridge || cfg_.external) {
      if (bridge.command.empty()) cfg_.external.reset();
      else cfg_.external = bridge;
    }
  }

  void test_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k == "profile") {
        auto p = test_profile_from_string(string(v, k));
        if (!p) fail("profile must be strict or recommended");
        cfg_.test_profile = *p;
      } else if (k == "substrings") {
        cfg_.test_substrings = strings(v, k);
      } else if (k == "allowlist") {
        cfg_.test_allowlist = strings(v, k);
      } else if (k == "denylist") {
        cfg_.test_denylist = strings(v, k);
      } else if (k == "match_scope") {
        auto s = match_scope_from_string(string(v, k));
        if (!s) fail("match_scope must be full or top");
        cfg_.test_match_scope = *s;
      } else {
        unknown("test_detect", k);
      }
    }
  }

  void stats_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (k == "md_denominator") {
        auto m = md_denominator_from_string(string(v, k));
        if (!m) fail("md_denominator must be all or md-only");
        cfg_.md_denominator = *m;
      } else if (k == "percentiles") {
        if (!v.is_array()) fail("percentiles must be an array of numbers");
        std::vector<double> ps;
        for (const auto& e : v) {
          const double p = number(e, k);
          if (!(p >= 0.0 && p <= 1.0)) fail("percentiles must lie in [0,1]");
          ps.push_back(p);
        }
        cfg_.percentiles = ps;
      } else {
        unknown("stats", k);
      }
    }
  }

  void severity_table(const nlohmann::json& t) {
    for (const auto& [k, v] : t.items()) {
      if (!known_severity_key(k)) fail("unknown check '" + k + "' in [severity]");
      auto s = severity_from_string(string(v, k));
      if (!s) fail("severity must be info, warning, or error");
      cfg_.severity[k] = *s;
    }
  }

  Config& cfg_;
  std::string origin_;
};

}  // namespace detail

inline void apply_config_text(Config& cfg, std::string_view toml_text, const std::string& origin = {}) {
  detail::ConfigReader(cfg, origin).apply(toml::parse(toml_text, origin));
}

inline Config load_config_file(const std::filesystem::path& path, Config base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(base, ss.str(), path.string());
  return base;
}

// Canonical form of every semantically meaningful field. The test profile is
// represented by the denylist it resolves to.
inline nlohmann::json to_json(const Config& c) {
  using nlohmann::json;
  json enabled = json::array();
  for (auto id : c.enabled) enabled.push_back(to_string(id));
  const auto analysis = c.analysis();
  json severity = json::object();
  for (const auto& [k, v] : analysis.severity) severity[k] = to_string(v);
  const auto tests = c.test_detect();
  json external = nullptr;
  if (c.external) {
    external = {{"command", c.external->command},
                {"ignored_checks", c.external->ignored_checks},
                {"max_subprocesses", c.external->max_subprocesses}};
  }
  return {
      {"checks",
       {{"enabled", enabled},
        {"allow_any_kernel", c.allow_any_kernel},
        {"fail_severity", c.fail_severity ? json(to_string(*c.fail_severity)) : json("none")}}},
      {"bp4", {{"threshold", c.bp4_threshold}}},
      {"bp5", {{"strict", c.strict_bp5}}},
      {"extract",
       {{"cell_magic", c.strip.cell_magic},
        {"line_magic", c.strip.line_magic},
        {"shell_escape", c.strip.shell_escape},
        {"shell_assignment", c.strip.shell_assignment},
        {"introspection", c.strip.introspection}}},
      {"lint", {{"max_line_len", c.lint.max_line_len}, {"disabled", c.lint.disabled}, {"external", external}}},
      {"test_detect",
       {{"substrings", tests.substrings},
        {"allowlist", tests.allowlist},
        {"denylist", tests.denylist},
        {"match_scope", to_string(c.test_match_scope)}}},
      {"stats", {{"md_denominator", to_string(c.md_denominator)}, {"percentiles", c.percentiles}}},
      {"severity", severity},
      {"markdown_rules", kMarkdownRulesVersion},
  };
}

inline std::string config_digest(const Config& c) { return "fnv1a64:" + text::hex64(text::fnv1a64(to_json(c).dump())); }

}  // namespace nbpractice
