#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nbpractice/error.hpp"
#include "nbpractice/notebook.hpp"
#include "nbpractice/parallel.hpp"
#include "nbpractice/scan.hpp"
#include "nbpractice/text.hpp"

namespace nbpractice {

struct DedupEntry {
  std::string kept;
  std::string dropped;
  std::string hash;

  friend bool operator==(const DedupEntry&, const DedupEntry&) = default;
};

struct InputFailure {
  std::string path;
  ErrorCode code = ErrorCode::io_error;
  std::string message;
};

struct Corpus {
  std::vector<Notebook> notebooks;  // sorted by path
  CorpusIndex index;
  std::vector<DedupEntry> dedup;
  std::vector<InputFailure> failures;  // sorted by path
  std::size_t files_seen = 0;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open file", p.generic_string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_error, "read failed", p.generic_string());
  return ss.str();
}

namespace detail {

inline bool skipped_directory(const std::filesystem::path& p) {
  const auto name = p.filename().string();
  return name == ".ipynb_checkpoints" || name == ".git";
}

inline void walk(const std::filesystem::path& root, std::vector<std::filesystem::path>& notebooks, CorpusIndex& index) {
  namespace fs = std::filesystem;
  index.add_directory(root);
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(root)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      if (!skipped_directory(p)) walk(p, notebooks, index);
    } else if (p.extension() == ".ipynb") {
      notebooks.push_back(p);
    } else if (p.extension() == ".py") {
      index.add_file(p);
    }
  }
}

}  // namespace detail

// Walks files and directories, deduplicates notebooks by content, and parses
// the survivors on `jobs` workers. Files that fail to parse are recorded.
inline Corpus ingest(const std::vector<std::filesystem::path>& paths, unsigned jobs = 0) {
  namespace fs = std::filesystem;
  Corpus corpus;
  std::vector<fs::path> found;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      detail::walk(p, found, corpus.index);
    } else if (fs::exists(p, ec)) {
      if (p.extension() == ".py") corpus.index.add_file(p);
      else found.push_back(p);
    } else {
      corpus.failures.push_back({p.generic_string(), ErrorCode::io_error, "no such file or directory"});
    }
  }
  std::vector<std::string> names;
  for (const auto& p : found) names.push_back(CorpusIndex::key(p));
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  corpus.files_seen = names.size();
  if (names.empty() && corpus.failures.empty())
    throw Error(ErrorCode::no_inputs, "no notebooks found under the given paths");

  // Lexicographic order means the first file of each content group is kept.
  struct Loaded {
    std::string path;
    std::string bytes;
    std::uint64_t hash;
  };
  std::vector<Loaded> kept;
  std::map<std::uint64_t, std::vector<std::size_t>> by_hash;
  for (const auto& name : names) {
    std::string bytes;
    try {
      bytes = read_file(name);
    } catch (const Error& e) {
      corpus.failures.push_back({name, e.code(), e.detail()});
      continue;
    }
    const auto h = text::fnv1a64(bytes);
    auto& group = by_hash[h];
    auto dup = std::find_if(group.begin(), group.end(), [&](std::size_t k) { return kept[k].bytes == bytes; });
    if (dup != group.end()) {
      corpus.dedup.push_back({kept[*dup].path, name, text::hex64(h)});
      continue;
    }
    group.push_back(kept.size());
    kept.push_back({name, std::move(bytes), h});
  }

  std::vector<std::optional<Notebook>> parsed(kept.size());
  std::vector<std::optional<InputFailure>> errors(kept.size());
  parallel_for(kept.size(), jobs, [&](std::size_t i) {
    try {
      parsed[i] = parse_notebook(kept[i].bytes, kept[i].path);
    } catch (const Error& e) {
      errors[i] = InputFailure{kept[i].path, e.code(), e.detail()};
    }
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (parsed[i]) corpus.notebooks.push_back(std::move(*parsed[i]));
    if (errors[i]) corpus.failures.push_back(std::move(*errors[i]));
  }
  std::sort(corpus.failures.begin(), corpus.failures.end(),
            [](const InputFailure& a, const InputFailure& b) { return a.path < b.path; });
  return corpus;
}

}  // namespace nbpractice
