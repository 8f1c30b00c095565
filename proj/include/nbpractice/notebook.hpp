#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbpractice/error.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

enum class CellKind { code, markdown, raw };
enum class OutputKind { stream, display, execute_result, error };
enum class CellStatus { executed, non_executed, empty };

constexpr std::string_view to_string(CellKind k) {
  switch (k) {
    case CellKind::code: return "code";
    case CellKind::markdown: return "markdown";
    case CellKind::raw: return "raw";
  }
  return "?";
}

constexpr std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::executed: return "executed";
    case CellStatus::non_executed: return "non_executed";
    case CellStatus::empty: return "empty";
  }
  return "?";
}

constexpr std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::stream: return "stream";
    case OutputKind::display: return "display_data";
    case OutputKind::execute_result: return "execute_result";
    case OutputKind::error: return "error";
  }
  return "?";
}

struct Cell {
  CellKind kind = CellKind::code;
  std::vector<std::string> source_lines;
  std::optional<std::int64_t> execution_count;  // code cells only
  std::map<OutputKind, std::size_t> output_kinds;
  std::size_t index = 0;

  bool is_blank() const {
    for (const auto& l : source_lines)
      if (!text::is_blank(l)) return false;
    return true;
  }
  bool has_outputs() const { return !output_kinds.empty(); }
};

struct Notebook {
  std::filesystem::path path;
  int nbformat_major = 4;
  int nbformat_minor = 0;
  std::optional<std::string> kernel_language;
  std::vector<Cell> cells;
  std::uint64_t content_hash = 0;
  // Original document; fields the model does not consume are kept here.
  nlohmann::json document;

  // An unknown kernel language is treated as Python.
  bool is_python() const {
    if (!kernel_language) return true;
    std::string lang;
    for (char c : *kernel_language) lang += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return text::starts_with(lang, "python") || lang == "ipython" || lang == "py";
  }

  std::size_t count(CellKind kind) const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.kind == kind;
    return n;
  }
};

namespace detail {

inline std::vector<std::string> normalize_source(const nlohmann::json& src,
                                                 const std::string& path,
                                                 std::size_t cell) {
  if (src.is_null()) return {};
  if (src.is_string()) return text::split_lines(src.get_ref<const std::string&>());
  if (src.is_array()) {
    std::string joined;
    for (const auto& piece : src) {
      if (!piece.is_string())
        throw Error(ErrorCode::not_a_notebook,
                    "cell " + std::to_string(cell) + ": source array holds a non-string", path);
      joined += piece.get_ref<const std::string&>();
    }
    return text::split_lines(joined);
  }
  throw Error(ErrorCode::not_a_notebook,
              "cell " + std::to_string(cell) + ": source is neither string nor list", path);
}

inline std::optional<std::string> kernel_language_of(const nlohmann::json& doc) {
  auto meta = doc.find("metadata");
  if (meta == doc.end() || !meta->is_object()) return std::nullopt;
  if (auto ks = meta->find("kernelspec"); ks != meta->end() && ks->is_object()) {
    if (auto lang = ks->find("language"); lang != ks->end() && lang->is_string())
      return lang->get<std::string>();
  }
  if (auto li = meta->find("language_info"); li != meta->end() && li->is_object()) {
    if (auto name = li->find("name"); name != li->end() && name->is_string())
      return name->get<std::string>();
  }
  return std::nullopt;
}

inline std::optional<OutputKind> output_kind_of(std::string_view type) {
  if (type == "stream") return OutputKind::stream;
  if (type == "display_data") return OutputKind::display;
  if (type == "execute_result") return OutputKind::execute_result;
  if (type == "error") return OutputKind::error;
  return std::nullopt;
}

}  // namespace detail

inline Notebook parse_notebook(std::string_view bytes, const std::filesystem::path& path) {
  const std::string where = path.generic_string();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_json, e.what(), where);
  }
  if (!doc.is_object()) throw Error(ErrorCode::not_a_notebook, "top level is not an object", where);

  auto fmt = doc.find("nbformat");
  if (fmt == doc.end() || !fmt->is_number_integer())
    throw Error(ErrorCode::unsupported_format, "missing integer nbformat", where);
  Notebook nb;
  nb.path = path;
  nb.nbformat_major = fmt->get<int>();
  if (nb.nbformat_major < 4)
    throw Error(ErrorCode::unsupported_format,
                "nbformat " + std::to_string(nb.nbformat_major) + " is older than 4", where);
  if (auto minor = doc.find("nbformat_minor"); minor != doc.end() && minor->is_number_integer())
    nb.nbformat_minor = minor->get<int>();

  auto cells = doc.find("cells");
  if (cells == doc.end() || !cells->is_array())
    throw Error(ErrorCode::not_a_notebook, "no cells array", where);

  nb.kernel_language = detail::kernel_language_of(doc);
  nb.cells.reserve(cells->size());
  for (std::size_t i = 0; i < cells->size(); ++i) {
    const auto& jc = (*cells)[i];
    if (!jc.is_object())
      throw Error(ErrorCode::not_a_notebook, "cell " + std::to_string(i) + " is not an object", where);
    auto type = jc.find("cell_type");
    if (type == jc.end() || !type->is_string())
      throw Error(ErrorCode::not_a_notebook, "cell " + std::to_string(i) + " has no cell_type", where);
    Cell cell;
    cell.index = i;
    const auto& t = type->get_ref<const std::string&>();
    if (t == "code") cell.kind = CellKind::code;
    else if (t == "markdown") cell.kind = CellKind::markdown;
    else if (t == "raw") cell.kind = CellKind::raw;
    else
      throw Error(ErrorCode::not_a_notebook, "cell " + std::to_string(i) + " has unknown cell_type '" + t + "'", where);

    auto src = jc.find("source");
    cell.source_lines = detail::normalize_source(src == jc.end() ? nlohmann::json() : *src, where, i);

    if (cell.kind == CellKind::code) {
      if (auto ec = jc.find("execution_count");
          ec != jc.end() && ec->is_number_integer() && ec->get<std::int64_t>() >= 0)
        cell.execution_count = ec->get<std::int64_t>();
      if (auto outs = jc.find("outputs"); outs != jc.end() && outs->is_array()) {
        for (const auto& o : *outs) {
          if (!o.is_object()) continue;
          auto ot = o.find("output_type");
          if (ot == o.end() || !ot->is_string()) continue;
          if (auto k = detail::output_kind_of(ot->get_ref<const std::string&>())) ++cell.output_kinds[*k];
        }
      }
    }
    nb.cells.push_back(std::move(cell));
  }
  nb.content_hash = text::fnv1a64(bytes);
  nb.document = std::move(doc);
  return nb;
}

// Writes the model back into the original document. Fields the model does not
// own (metadata, outputs, ids) are carried over from `document` when present.
inline nlohmann::json to_json(const Notebook& nb) {
  nlohmann::json doc = nb.document.is_object() ? nb.document : nlohmann::json::object();
  doc["nbformat"] = nb.nbformat_major;
  doc["nbformat_minor"] = nb.nbformat_minor;
  nlohmann::json old_cells = doc.contains("cells") && doc["cells"].is_array() ? doc["cells"] : nlohmann::json::array();
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : nb.cells) {
    nlohmann::json jc = c.index < old_cells.size() && old_cells[c.index].is_object()
                            ? old_cells[c.index]
                            : nlohmann::json::object();
    jc["cell_type"] = std::string(to_string(c.kind));
    nlohmann::json src = nlohmann::json::array();
    for (std::size_t i = 0; i < c.source_lines.size(); ++i)
      src.push_back(i + 1 < c.source_lines.size() ? c.source_lines[i] + "\n" : c.source_lines[i]);
    jc["source"] = std::move(src);
    if (c.kind == CellKind::code) {
      jc["execution_count"] = c.execution_count ? nlohmann::json(*c.execution_count) : nlohmann::json();
      if (!jc.contains("outputs")) jc["outputs"] = nlohmann::json::array();
    } else {
      jc.erase("execution_count");
      jc.erase("outputs");
    }
    if (!jc.contains("metadata")) jc["metadata"] = nlohmann::json::object();
    cells.push_back(std::move(jc));
  }
  doc["cells"] = std::move(cells);
  if (!doc.contains("metadata")) doc["metadata"] = nlohmann::json::object();
  return doc;
}

inline CellStatus cell_status(const Cell& cell) {
  if (cell.kind != CellKind::code)
    throw Error(ErrorCode::not_a_code_cell, "cell " + std::to_string(cell.index) + " is " + std::string(to_string(cell.kind)));
  if (cell.is_blank()) return CellStatus::empty;
  return cell.execution_count ? CellStatus::executed : CellStatus::non_executed;
}

// Counters of the non-empty code cells in document order.
inline std::vector<std::optional<std::int64_t>> execution_sequence(const Notebook& nb) {
  std::vector<std::optional<std::int64_t>> seq;
  for (const auto& c : nb.cells)
    if (c.kind == CellKind::code && !c.is_blank()) seq.push_back(c.execution_count);
  return seq;
}

inline double cell_position_fraction(std::size_t index, std::size_t n_code_cells) {
  if (index >= n_code_cells)
    throw Error(ErrorCode::index_out_of_range,
                "index " + std::to_string(index) + " not below " + std::to_string(n_code_cells));
  if (n_code_cells == 1) return 0.0;
  return static_cast<double>(index) / static_cast<double>(n_code_cells - 1);
}

}  // namespace nbpractice
