#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbpractice.hpp"

namespace th {

using nlohmann::json;

inline json source_of(const std::vector<std::string>& lines) {
  json src = json::array();
  for (std::size_t i = 0; i < lines.size(); ++i) src.push_back(i + 1 < lines.size() ? lines[i] + "\n" : lines[i]);
  return src;
}

inline json code(const std::vector<std::string>& lines, json count = nullptr) {
  return {{"cell_type", "code"}, {"execution_count", count}, {"metadata", json::object()},
          {"outputs", json::array()}, {"source", source_of(lines)}};
}

inline json md(const std::vector<std::string>& lines) {
  return {{"cell_type", "markdown"}, {"metadata", json::object()}, {"source", source_of(lines)}};
}

inline json raw(const std::vector<std::string>& lines) {
  return {{"cell_type", "raw"}, {"metadata", json::object()}, {"source", source_of(lines)}};
}

inline json doc(json cells, std::string language = "python") {
  return {{"nbformat", 4},
          {"nbformat_minor", 5},
          {"metadata", {{"kernelspec", {{"language", language}}}}},
          {"cells", std::move(cells)}};
}

inline nbpractice::Notebook parse(const json& d, const std::string& path = "nb.ipynb") {
  return nbpractice::parse_notebook(d.dump(), path);
}

inline nbpractice::ExtractedScript script_of(const std::vector<std::vector<std::string>>& cells) {
  json cs = json::array();
  for (const auto& c : cells) cs.push_back(code(c, 1));
  return nbpractice::extract_script(parse(doc(cs)));
}

inline nbpractice::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const nbpractice::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an nbpractice::Error");
}

}  // namespace th
