#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbpractice/checks.hpp"
#include "nbpractice/error.hpp"

namespace nbpractice {

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;

  friend bool operator==(const FiveNumber&, const FiveNumber&) = default;
};

// Linear interpolation at rank (n-1)p over an ascending list.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::empty_input, "quantile of an empty list");
  const double rank = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

inline FiveNumber five_number_summary(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::empty_input, "five-number summary of an empty list");
  std::sort(values.begin(), values.end());
  return {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
          quantile_sorted(values, 0.75), values.back()};
}

struct Histogram {
  static constexpr std::size_t kBins = 10;
  std::array<std::size_t, kBins> counts{};
  std::array<std::size_t, 3> thirds{};  // <=1/3, (1/3,2/3], >2/3

  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline Histogram position_histogram(const std::vector<double>& fractions) {
  Histogram h;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::out_of_range, "position outside [0,1]");
    auto bin = static_cast<std::size_t>(f * Histogram::kBins);
    h.counts[std::min(bin, Histogram::kBins - 1)] += 1;
    h.thirds[f <= 1.0 / 3.0 ? 0 : f <= 2.0 / 3.0 ? 1 : 2] += 1;
  }
  return h;
}

// A share with its denominator; undefined when nothing was eligible.
struct Rate {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::string reason;  // set when value() is empty

  std::optional<double> value() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Rate&, const Rate&) = default;
};

enum class MdDenominator { all, md_only };

constexpr std::string_view to_string(MdDenominator m) { return m == MdDenominator::all ? "all" : "md-only"; }

// Measures summarized by five numbers, in report order.
inline constexpr std::array<std::string_view, 13> kFiveMeasures{
    "code_cells",       "md_cells",          "meaningful_md_words",  "meaningful_md_lines",
    "md_heading_words", "md_heading_words_per_heading", "empty_cells", "cells_per_notebook",
    "lines_per_cell",   "lines_per_code_cell", "lines_per_md_cell",  "lines_per_notebook",
    "code_lines_per_notebook"};

inline constexpr std::array<std::string_view, 6> kHistogramMeasures{
    "import_positions",         "md_cell_positions",           "code_cell_positions",
    "executed_cell_positions",  "non_executed_cell_positions", "empty_cell_positions"};

struct Tally {
  std::size_t hits = 0;
  std::size_t eligible = 0;

  void add(bool eligible_now, bool hit) {
    eligible += eligible_now;
    hits += eligible_now && hit;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

// Raw counts and value multisets; merge is associative and commutative.
struct Accumulator {
  std::string config_version;
  MdDenominator md_denominator = MdDenominator::all;
  std::size_t n_notebooks = 0;
  Tally executed, top_to_bottom, bp4_compliant, function_def, class_def, local_import, test_import, markdown,
      md_headings;
  std::map<LintCategory, Tally> lint;
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::vector<double>> positions;

  void add(const NotebookMetrics& m) {
    ++n_notebooks;
    const bool b5 = m.has(BpId::bp5), b6 = m.has(BpId::bp6), b7 = m.has(BpId::bp7), b11 = m.has(BpId::bp11),
               b12 = m.has(BpId::bp12);
    executed.add(b5, m.executed);
    top_to_bottom.add(b5 && m.executed, m.top_to_bottom);
    bp4_compliant.add(m.has(BpId::bp4), m.bp4_compliant);
    function_def.add(b6, m.has_function_def);
    class_def.add(b6, m.has_class_def);
    local_import.add(b6 && m.local_import_known, m.has_local_import);
    test_import.add(b7, m.has_test_import);
    markdown.add(b11, m.has_markdown);
    md_headings.add(b11 && b12 && m.has_markdown, m.md_heading_count > 0);
    if (m.has(BpId::bp9)) {
      for (auto c : kLintCategories) {
        auto it = m.lint_category_failed.find(c);
        lint[c].add(it != m.lint_category_failed.end(), it != m.lint_category_failed.end() && it->second);
      }
    }

    auto push = [&](std::string_view key, double v) { values[std::string(key)].push_back(v); };
    auto push_all = [&](std::string_view key, const auto& xs) {
      auto& dst = values[std::string(key)];
      for (auto x : xs) dst.push_back(static_cast<double>(x));
    };
    auto pos = [&](std::string_view key, double v) { positions[std::string(key)].push_back(v); };

    const bool md_eligible = md_denominator == MdDenominator::all || m.md_cells > 0;
    if (md_eligible) {
      push("code_cells", static_cast<double>(m.code_cells));
      push("md_cells", static_cast<double>(m.md_cells));
    }
    push("cells_per_notebook", static_cast<double>(m.code_cells + m.md_cells + m.raw_cells));
    if (b11) {
      if (md_eligible) {
        push("meaningful_md_words", static_cast<double>(m.meaningful_md_words));
        push("meaningful_md_lines", static_cast<double>(m.meaningful_md_lines));
      }
      for (double p : m.md_cell_positions) pos("md_cell_positions", p);
      for (double p : m.code_cell_positions) pos("code_cell_positions", p);
    }
    if (b12) {
      push("md_heading_words", static_cast<double>(m.md_heading_words));
      push_all("md_heading_words_per_heading", m.heading_word_counts);
    }
    if (m.has(BpId::bp4))
      for (double p : m.import_positions) pos("import_positions", p);
    if (m.has(BpId::bp13)) {
      push("empty_cells", static_cast<double>(m.empty_cells));
      for (const auto& [p, status] : m.cell_status_positions) {
        switch (status) {
          case CellStatus::executed: pos("executed_cell_positions", p); break;
          case CellStatus::non_executed: pos("non_executed_cell_positions", p); break;
          case CellStatus::empty: pos("empty_cell_positions", p); break;
        }
      }
    }
    if (m.has(BpId::bp14)) {
      push_all("lines_per_cell", m.lines_per_cell);
      push_all("lines_per_code_cell", m.lines_per_code_cell);
      push_all("lines_per_md_cell", m.lines_per_md_cell);
      push("lines_per_notebook", static_cast<double>(m.total_lines));
      push("code_lines_per_notebook", static_cast<double>(m.code_lines));
    }
  }
};

inline Accumulator make_accumulator(std::string config_version, MdDenominator md = MdDenominator::all) {
  Accumulator a;
  a.config_version = std::move(config_version);
  a.md_denominator = md;
  return a;
}

inline Accumulator merge(Accumulator a, const Accumulator& b) {
  if (a.config_version != b.config_version || a.md_denominator != b.md_denominator)
    throw Error(ErrorCode::config_mismatch,
                "cannot merge accumulators built under configs " + a.config_version + " and " + b.config_version);
  auto sum = [](Tally& x, const Tally& y) {
    x.hits += y.hits;
    x.eligible += y.eligible;
  };
  a.n_notebooks += b.n_notebooks;
  sum(a.executed, b.executed);
  sum(a.top_to_bottom, b.top_to_bottom);
  sum(a.bp4_compliant, b.bp4_compliant);
  sum(a.function_def, b.function_def);
  sum(a.class_def, b.class_def);
  sum(a.local_import, b.local_import);
  sum(a.test_import, b.test_import);
  sum(a.markdown, b.markdown);
  sum(a.md_headings, b.md_headings);
  for (const auto& [c, t] : b.lint) sum(a.lint[c], t);
  for (const auto& [k, v] : b.values) a.values[k].insert(a.values[k].end(), v.begin(), v.end());
  for (const auto& [k, v] : b.positions) a.positions[k].insert(a.positions[k].end(), v.begin(), v.end());
  return a;
}

struct Summary5 {
  std::optional<FiveNumber> value;
  std::size_t n = 0;
  std::string reason;

  friend bool operator==(const Summary5&, const Summary5&) = default;
};

struct CorpusSummary {
  std::string label = "ALL";
  std::size_t n_notebooks = 0;
  Rate rate_executed, rate_top_to_bottom, rate_bp4_compliant, rate_function_def, rate_class_def,
      rate_local_import, rate_test_import, rate_md, rate_md_headings;
  std::map<LintCategory, Rate> lint_category_rates;
  std::map<std::string, Summary5> fives;
  std::map<std::string, Histogram> histograms;

  std::size_t n_executed() const { return rate_executed.numerator; }
  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

inline CorpusSummary finalize(const Accumulator& acc, std::string label = "ALL") {
  CorpusSummary s;
  s.label = std::move(label);
  s.n_notebooks = acc.n_notebooks;
  auto rate = [](const Tally& t, std::string_view empty_reason) {
    Rate r{t.hits, t.eligible, {}};
    if (t.eligible == 0) r.reason = std::string(empty_reason);
    return r;
  };
  s.rate_executed = rate(acc.executed, "no notebook with the re-executability check enabled");
  s.rate_top_to_bottom = rate(acc.top_to_bottom, "no executed notebooks");
  s.rate_bp4_compliant = rate(acc.bp4_compliant, "import-position check not run");
  s.rate_function_def = rate(acc.function_def, "modularization check not run");
  s.rate_class_def = rate(acc.class_def, "modularization check not run");
  s.rate_local_import = rate(acc.local_import, "no notebook with a resolvable file-system context");
  s.rate_test_import = rate(acc.test_import, "testing check not run");
  s.rate_md = rate(acc.markdown, "documentation check not run");
  s.rate_md_headings = rate(acc.md_headings, "no notebooks with markdown");
  for (auto c : kLintCategories) {
    auto it = acc.lint.find(c);
    Tally t = it == acc.lint.end() ? Tally{} : it->second;
    s.lint_category_rates[c] =
        rate(t, c == LintCategory::error || c == LintCategory::refactor ? "category not measured without an external linter"
                                                                        : "coding-standards check not run");
  }
  for (auto key : kFiveMeasures) {
    Summary5 f;
    auto it = acc.values.find(std::string(key));
    if (it == acc.values.end() || it->second.empty()) {
      f.reason = "no observations";
    } else {
      f.n = it->second.size();
      f.value = five_number_summary(it->second);
    }
    s.fives.emplace(std::string(key), std::move(f));
  }
  for (auto key : kHistogramMeasures) {
    auto it = acc.positions.find(std::string(key));
    s.histograms.emplace(std::string(key), it == acc.positions.end() ? Histogram{} : position_histogram(it->second));
  }
  return s;
}

inline CorpusSummary aggregate(const std::vector<NotebookMetrics>& metrics, std::string label = "ALL",
                               std::string config_version = {}, MdDenominator md = MdDenominator::all) {
  auto acc = make_accumulator(std::move(config_version), md);
  for (const auto& m : metrics) acc.add(m);
  return finalize(acc, std::move(label));
}

inline std::string percentile_label(double p) {
  return "P" + std::to_string(static_cast<long>(std::lround(p * 100.0)));
}

struct SubsetResult {
  std::vector<CorpusSummary> summaries;  // ALL first, then one per percentile
  std::vector<std::string> warnings;
  std::map<std::string, double> thresholds;
};

// `metrics` pairs each notebook's path with its measures. Notebooks without a
// score are excluded from the subsets, with a warning.
inline SubsetResult subset_compare(const std::vector<std::pair<std::string, NotebookMetrics>>& metrics,
                                   const std::map<std::string, double>& scores, const std::vector<double>& percentiles,
                                   std::string config_version = {}, MdDenominator md = MdDenominator::all) {
  SubsetResult out;
  std::vector<std::pair<double, const NotebookMetrics*>> scored;
  std::vector<NotebookMetrics> all;
  for (const auto& [path, m] : metrics) {
    all.push_back(m);
    if (auto it = scores.find(path); it != scores.end()) scored.emplace_back(it->second, &m);
    else out.warnings.push_back("no score for " + path + "; excluded from percentile subsets");
  }
  if (scored.empty()) throw Error(ErrorCode::no_scores, "no analyzed notebook has a score");
  std::vector<double> values;
  for (const auto& s : scored) values.push_back(s.first);
  std::sort(values.begin(), values.end());

  out.summaries.push_back(aggregate(all, "ALL", config_version, md));
  for (double p : percentiles) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::out_of_range, "percentile outside [0,1]");
    const double threshold = quantile_sorted(values, p);
    std::vector<NotebookMetrics> subset;
    for (const auto& [score, m] : scored)
      if (score >= threshold) subset.push_back(*m);
    const auto label = percentile_label(p);
    out.thresholds[label] = threshold;
    out.summaries.push_back(aggregate(subset, label, config_version, md));
  }
  return out;
}

}  // namespace nbpractice
