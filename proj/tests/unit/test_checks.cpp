#include <gtest/gtest.h>

#include "helpers.hpp"
#include "support/cases.hpp"
#include "support/gen.hpp"

using namespace nbpractice;
using th::json;
using Seq = std::vector<std::optional<std::int64_t>>;

namespace {

NotebookAnalysis analyze(const json& d, const AnalysisConfig& cfg = {}, const CorpusIndex& index = {}) {
  return analyze_notebook(th::parse(d), cfg, index);
}

std::vector<std::string> ids(const std::vector<Finding>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.check_id);
  return out;
}

std::size_t count_id(const std::vector<Finding>& fs, std::string_view id) {
  return static_cast<std::size_t>(std::count_if(fs.begin(), fs.end(), [&](const Finding& f) { return f.check_id == id; }));
}

}  // namespace

TEST(Bp5, Examples) {
  EXPECT_TRUE(check_bp5_top_to_bottom({1, 2, 3}));
  EXPECT_FALSE(check_bp5_top_to_bottom({1, 3, 2}));
  EXPECT_FALSE(check_bp5_top_to_bottom({1, 2, 4}));
  EXPECT_FALSE(check_bp5_top_to_bottom({1, 2, 2}));
  EXPECT_FALSE(check_bp5_top_to_bottom({2, 3, 4}));
  EXPECT_FALSE(check_bp5_top_to_bottom({}));
  EXPECT_FALSE(check_bp5_top_to_bottom({std::nullopt}));
  EXPECT_TRUE(check_bp5_top_to_bottom({1, std::nullopt, 2}));
  EXPECT_FALSE(check_bp5_top_to_bottom({1, std::nullopt, 2}, true));
}

TEST(Bp5, ExhaustiveAgainstConstructiveSet) {
  for (bool strict : {false, true}) {
    const auto accepted = cases::bp5_accepted(5, strict);
    std::size_t n = 0;
    cases::for_each_sequence(5, 5, [&](const Seq& s) {
      ++n;
      ASSERT_EQ(check_bp5_top_to_bottom(s, strict), accepted.count(s) == 1);
    });
    EXPECT_EQ(n, 9331u);
  }
}

TEST(Bp4, Examples) {
  json cells = json::array({th::code({"import os", "import re"}, 1)});
  for (int i = 0; i < 9; ++i) cells.push_back(th::code({"x = 1"}, i + 2));
  auto nb = th::parse(th::doc(cells));
  auto s = extract_script(nb);
  auto r = check_bp4_import_position(scan_imports(s), s, nb);
  EXPECT_EQ(r.positions, (std::vector<double>{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(r.first_third_fraction, 1.0);

  auto none = th::parse(th::doc(json::array({th::code({"x = 1"}, 1)})));
  auto sn = extract_script(none);
  auto rn = check_bp4_import_position(scan_imports(sn), sn, none);
  EXPECT_TRUE(rn.positions.empty());
  EXPECT_DOUBLE_EQ(rn.first_third_fraction, 1.0);

  auto last = th::parse(th::doc(json::array({th::code({"a"}), th::code({"b"}), th::code({"c"}), th::code({"import os"})})));
  auto sl = extract_script(last);
  auto rl = check_bp4_import_position(scan_imports(sl), sl, last);
  EXPECT_EQ(rl.positions, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(rl.first_third_fraction, 0.0);
}

TEST(Bp4, ThresholdAndFindings) {
  json cells = json::array({th::code({"import os"}, 1), th::code({"x = 1"}, 2), th::code({"y = 2"}, 3),
                            th::code({"import re"}, 4)});
  auto a = analyze(th::doc(cells));
  EXPECT_DOUBLE_EQ(a.metrics.imports_first_third_fraction, 0.5);
  EXPECT_FALSE(a.metrics.bp4_compliant);
  ASSERT_EQ(count_id(a.findings, checks::import_not_at_beginning), 1u);
  AnalysisConfig cfg;
  cfg.bp4_threshold = 0.5;
  EXPECT_TRUE(analyze(th::doc(cells), cfg).metrics.bp4_compliant);
}

TEST(Bp6, Examples) {
  DefRecord f{DefKind::function, "f", 0, 0};
  EXPECT_EQ(check_bp6_modularization({f}, {}, {}), (Bp6Result{true, false, false}));
  EXPECT_EQ(check_bp6_modularization({}, {ImportRecord{}}, {ImportOrigin::local}), (Bp6Result{false, false, true}));
  EXPECT_EQ(check_bp6_modularization({}, {}, {}), (Bp6Result{false, false, false}));
}

TEST(Bp6, LocalImportNeedsContext) {
  json d = th::doc(json::array({th::code({"import utils"}, 1)}));
  auto lone = analyze(d);
  EXPECT_FALSE(lone.metrics.local_import_known);
  EXPECT_EQ(count_id(lone.findings, checks::no_modularization), 0u);

  CorpusIndex index;
  index.add_directory(".");
  index.add_file("utils.py");
  auto walked = analyze(d, {}, index);
  EXPECT_TRUE(walked.metrics.local_import_known);
  EXPECT_TRUE(walked.metrics.has_local_import);

  CorpusIndex empty_dir;
  empty_dir.add_directory(".");
  auto nothing = analyze(d, {}, empty_dir);
  EXPECT_FALSE(nothing.metrics.has_local_import);
  EXPECT_EQ(count_id(nothing.findings, checks::no_modularization), 1u);
}

TEST(Bp13, Examples) {
  auto all = th::parse(th::doc(json::array({th::code({"a"}, 1), th::code({"b"}, 2)})));
  auto r = check_bp13_cleanliness(all);
  EXPECT_EQ(r.empty_cells, 0u);
  EXPECT_EQ(r.non_executed_cells, 0u);
  EXPECT_EQ(r.positions.size(), 2u);
  for (const auto& p : r.positions) EXPECT_EQ(p.second, CellStatus::executed);

  json cells = json::array();
  for (int i = 0; i < 4; ++i) cells.push_back(th::code({"x"}, i + 1));
  cells.push_back(th::code({""}));
  auto trailing = check_bp13_cleanliness(th::parse(th::doc(cells)));
  EXPECT_EQ(trailing.empty_cells, 1u);
  EXPECT_EQ(trailing.positions.back(), (std::pair<double, CellStatus>{1.0, CellStatus::empty}));

  auto none = check_bp13_cleanliness(th::parse(th::doc(json::array({th::md({"x"})}))));
  EXPECT_EQ(none.empty_cells + none.non_executed_cells, 0u);
  EXPECT_TRUE(none.positions.empty());
}

TEST(Bp14, Examples) {
  auto a = check_bp14_conciseness(th::parse(th::doc(json::array({th::code({"a", "b", "c"}), th::md({"x", "y"})}))));
  EXPECT_EQ(a, (Bp14Result{5, 3, {3, 2}, {3}, {2}}));
  EXPECT_EQ(check_bp14_conciseness(th::parse(th::doc(json::array()))), (Bp14Result{}));
  auto raw = check_bp14_conciseness(th::parse(th::doc(json::array({th::raw({"r1", "r2"}), th::code({"c"})}))));
  EXPECT_EQ(raw.total_lines, 3u);
  EXPECT_EQ(raw.code_lines, 1u);
}

TEST(Analyze, FixtureLikeNotebook) {
  json d = th::doc(json::array({th::md({"# Sales analysis", "We look at monthly **sales** figures."}),
                                th::code({"import numpy as np", "import pandas as pd"}, 1), th::md({"## Helpers"}),
                                th::code({"def mean(xs):", "    return np.mean(xs)"}, 2),
                                th::code({"pd.DataFrame([mean([1, 2])])"}, 3)}));
  const auto m = analyze(d).metrics;
  EXPECT_TRUE(m.executed);
  EXPECT_TRUE(m.top_to_bottom);
  EXPECT_TRUE(m.has_function_def);
  EXPECT_FALSE(m.has_class_def);
  EXPECT_EQ(m.md_heading_count, 2u);
  EXPECT_EQ(m.md_heading_words, 3u);
  EXPECT_EQ(m.meaningful_md_words, 9u);
  EXPECT_EQ(m.code_cells, 3u);
  EXPECT_EQ(m.import_positions, (std::vector<double>{0.0, 0.0}));
  EXPECT_TRUE(m.bp4_compliant);
  EXPECT_FALSE(m.has_test_import);
}

TEST(Analyze, NoMarkdown) {
  const auto a = analyze(th::doc(json::array({th::code({"x = 1"}, 1)})));
  EXPECT_FALSE(a.metrics.has_markdown);
  EXPECT_EQ(a.metrics.meaningful_md_words, 0u);
  EXPECT_EQ(a.metrics.md_heading_count, 0u);
  EXPECT_EQ(count_id(a.findings, checks::no_markdown), 1u);
  EXPECT_EQ(count_id(a.findings, checks::no_headings), 1u);
}

TEST(Analyze, OutOfOrderFinding) {
  const auto a = analyze(th::doc(json::array({th::code({"a"}, 1), th::code({"b"}, 3), th::code({"c"}, 2)})));
  EXPECT_TRUE(a.metrics.executed);
  EXPECT_FALSE(a.metrics.top_to_bottom);
  auto it = std::find_if(a.findings.begin(), a.findings.end(),
                         [](const Finding& f) { return f.check_id == checks::not_top_to_bottom; });
  ASSERT_NE(it, a.findings.end());
  EXPECT_EQ(it->severity, Severity::warning);
  EXPECT_EQ(it->location.cell_index, std::optional<std::size_t>(1));
}

TEST(Analyze, ExecutedCountsAnyCounter) {
  const auto a = analyze(th::doc(json::array({th::code({""}, 4), th::code({"x"})})));
  EXPECT_TRUE(a.metrics.executed);
  EXPECT_FALSE(a.metrics.top_to_bottom);
  const auto b = analyze(th::doc(json::array({th::code({"x"}), th::md({"m"})})));
  EXPECT_FALSE(b.metrics.executed);
  EXPECT_EQ(count_id(b.findings, checks::non_executed_cell), 0u);
}

TEST(Analyze, OutputsWithoutCounterAreNotExecution) {
  json cell = th::code({"1 + 1"});
  cell["outputs"].push_back({{"output_type", "execute_result"}, {"execution_count", nullptr},
                             {"metadata", json::object()}, {"data", {{"text/plain", "2"}}}});
  const auto a = analyze(th::doc(json::array({cell})));
  EXPECT_FALSE(a.metrics.executed);
  EXPECT_TRUE(a.metrics.outputs_without_counter);
  EXPECT_FALSE(analyze(th::doc(json::array({th::code({"1"}, 1)}))).metrics.outputs_without_counter);
}

TEST(Analyze, NonPythonKernelSkipsCodeChecks) {
  json d = th::doc(json::array({th::code({"library(ggplot2)"}, 1), th::md({"# R"})}), "R");
  const auto m = analyze(d).metrics;
  for (auto id : {BpId::bp4, BpId::bp6, BpId::bp7, BpId::bp9}) EXPECT_FALSE(m.has(id));
  EXPECT_TRUE(m.has(BpId::bp5));
  EXPECT_TRUE(m.lint_category_failed.empty());
  AnalysisConfig cfg;
  cfg.allow_any_kernel = true;
  EXPECT_TRUE(analyze(d, cfg).metrics.has(BpId::bp9));
}

TEST(Analyze, DisabledPracticesAreSkipped) {
  AnalysisConfig cfg;
  cfg.enabled.erase(BpId::bp12);
  const auto a = analyze(th::doc(json::array({th::md({"text"})})), cfg);
  EXPECT_FALSE(a.metrics.has(BpId::bp12));
  EXPECT_EQ(a.metrics.skipped.at(BpId::bp12), "disabled");
  EXPECT_EQ(count_id(a.findings, checks::no_headings), 0u);
}

TEST(Analyze, LintFindingsPointAtCells) {
  const auto a = analyze(th::doc(json::array({th::code({"x = 1"}, 1), th::code({"%time y", "y = 2 "}, 2)})));
  auto it = std::find_if(a.findings.begin(), a.findings.end(),
                         [](const Finding& f) { return f.check_id == "trailing-whitespace"; });
  ASSERT_NE(it, a.findings.end());
  EXPECT_EQ(it->location.cell_index, std::optional<std::size_t>(1));
  EXPECT_EQ(it->location.cell_line, std::optional<std::size_t>(1));
  EXPECT_EQ(it->location.script_line, std::optional<std::size_t>(3));
  EXPECT_EQ(it->bp, BpId::bp9);
  EXPECT_TRUE(a.metrics.lint_category_failed.at(LintCategory::convention));
  EXPECT_FALSE(a.metrics.lint_category_failed.count(LintCategory::error));
}

TEST(Analyze, SeverityOverrides) {
  AnalysisConfig cfg;
  cfg.severity["empty-cell"] = Severity::error;
  cfg.severity["lint-convention"] = Severity::warning;
  const auto a = analyze(th::doc(json::array({th::code({""}), th::code({"x = 1 "}, 1)})), cfg);
  for (const auto& f : a.findings) {
    if (f.check_id == "empty-cell") { EXPECT_EQ(f.severity, Severity::error); }
    if (f.check_id == "trailing-whitespace") { EXPECT_EQ(f.severity, Severity::warning); }
    if (f.check_id == "no-test-imports") { EXPECT_EQ(f.severity, Severity::info); }
  }
}

TEST(Analyze, BridgeFindingsMerge) {
  AnalysisConfig cfg;
  cfg.bridge = std::make_shared<ExternalLinter>(BridgeConfig{"printf '1:0:E0602:E:undefined name\\n' #", {}, 1});
  const auto a = analyze(th::doc(json::array({th::code({"print(z)"}, 1)})), cfg);
  EXPECT_TRUE(a.metrics.lint_category_failed.at(LintCategory::error));
  EXPECT_FALSE(a.metrics.lint_category_failed.at(LintCategory::refactor));
  auto it = std::find_if(a.findings.begin(), a.findings.end(), [](const Finding& f) { return f.check_id == "ext:E0602"; });
  ASSERT_NE(it, a.findings.end());
  EXPECT_EQ(it->severity, Severity::warning);
  EXPECT_EQ(it->location.cell_index, std::optional<std::size_t>(0));
}

TEST(Analyze, FindingsAreOrdered) {
  gen::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto a = analyze(gen::random_notebook(rng));
    EXPECT_TRUE(std::is_sorted(a.findings.begin(), a.findings.end(), finding_order));
  }
}

// Same bytes, config and index give identical metrics and findings.
TEST(Analyze, IsPure) {
  gen::Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto d = gen::random_notebook(rng);
    const auto a = analyze(d);
    const auto b = analyze(d);
    EXPECT_EQ(to_json(a.metrics), to_json(b.metrics));
    EXPECT_EQ(ids(a.findings), ids(b.findings));
  }
}

TEST(Analyze, AppendingEmptyCodeCell) {
  gen::Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    json d = gen::random_notebook(rng);
    const auto before = analyze(d).metrics;
    d["cells"].push_back(th::code({}, gen::chance(rng, 0.5) ? json(7) : json()));
    const auto after = analyze(d).metrics;
    EXPECT_EQ(after.top_to_bottom, before.top_to_bottom);
    EXPECT_EQ(after.import_positions, before.import_positions);
    EXPECT_EQ(after.has_function_def, before.has_function_def);
    EXPECT_EQ(after.has_class_def, before.has_class_def);
    EXPECT_EQ(after.has_local_import, before.has_local_import);
    EXPECT_EQ(after.has_test_import, before.has_test_import);
    EXPECT_EQ(after.empty_cells, before.empty_cells + 1);
  }
}

TEST(Analyze, MetricInvariants) {
  gen::Rng rng(47);
  for (int i = 0; i < 300; ++i) {
    const auto m = analyze(gen::random_notebook(rng)).metrics;
    if (m.top_to_bottom) { EXPECT_TRUE(m.executed); }
    EXPECT_GE(m.imports_first_third_fraction, 0.0);
    EXPECT_LE(m.imports_first_third_fraction, 1.0);
    if (m.import_positions.empty()) { EXPECT_DOUBLE_EQ(m.imports_first_third_fraction, 1.0); }
    EXPECT_EQ(m.empty_cells + m.non_executed_cells + m.executed_cells, m.code_cells);
    EXPECT_EQ(m.md_heading_count, m.heading_word_counts.size());
  }
}
