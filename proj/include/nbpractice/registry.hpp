#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nbpractice {

// Identifier of a catalogued practice, BP1..BP17.
enum class BpId : std::uint8_t {
  bp1 = 1, bp2, bp3, bp4, bp5, bp6, bp7, bp8, bp9, bp10, bp11, bp12, bp13, bp14, bp15, bp16, bp17
};

inline std::string to_string(BpId id) { return "BP" + std::to_string(static_cast<int>(id)); }

inline std::optional<BpId> bp_from_string(std::string_view s) {
  if (s.size() < 3 || (s[0] != 'B' && s[0] != 'b') || (s[1] != 'P' && s[1] != 'p')) return std::nullopt;
  int v = 0;
  for (char c : s.substr(2)) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  if (v < 1 || v > 17) return std::nullopt;
  return static_cast<BpId>(v);
}

enum class Theme {
  traceable_reproducible,
  high_quality_code,
  literate_programming,
  clean_concise,
  production_development,
  open_dissemination,
};

constexpr std::string_view to_string(Theme t) {
  switch (t) {
    case Theme::traceable_reproducible: return "Make your analysis traceable and reproducible";
    case Theme::high_quality_code: return "Write high-quality code";
    case Theme::literate_programming: return "Leverage the literate programming paradigm";
    case Theme::clean_concise: return "Keep your notebook clean and concise";
    case Theme::production_development: return "Distinguish production and development artifacts";
    case Theme::open_dissemination: return "Embrace open dissemination";
  }
  return "?";
}

struct RegistryEntry {
  BpId id;
  std::string_view title;
  Theme theme;
  int support_count;
  std::vector<std::string_view> source_ids;  // W*: white literature, G*: grey literature
  bool operationalized;
};

inline const std::vector<RegistryEntry>& registry() {
  using T = Theme;
  static const std::vector<RegistryEntry> entries{
      {BpId::bp1, "Use version control", T::traceable_reproducible, 8,
       {"W1", "G1", "G2", "G3", "G5", "G6", "G8", "G11"}, false},
      {BpId::bp2, "Manage project dependencies", T::traceable_reproducible, 7,
       {"W1", "W2", "G2", "G7", "G8", "G9", "G13"}, false},
      {BpId::bp3, "Use self-contained environments", T::traceable_reproducible, 6,
       {"W1", "G1", "G2", "G7", "G8", "G13"}, false},
      {BpId::bp4, "Put imports at the beginning", T::traceable_reproducible, 5,
       {"W2", "G5", "G7", "G9", "G10"}, true},
      {BpId::bp5, "Ensure re-executability (re-run notebooks top to bottom)", T::traceable_reproducible, 6,
       {"W1", "W2", "W4", "G2", "G9", "G11"}, true},
      {BpId::bp6, "Modularize your code", T::high_quality_code, 7,
       {"W1", "W2", "G1", "G3", "G7", "G8", "G11"}, true},
      {BpId::bp7, "Test your code", T::high_quality_code, 5, {"W2", "G2", "G3", "G7", "G9"}, true},
      {BpId::bp8, "Name your notebooks consistently", T::high_quality_code, 3, {"W2", "G5", "G6"}, false},
      {BpId::bp9, "Stick to coding standards", T::high_quality_code, 4, {"G1", "G3", "G5", "G10"}, true},
      {BpId::bp10, "Use relative paths", T::high_quality_code, 1, {"W2"}, false},
      {BpId::bp11, "Document your analysis", T::literate_programming, 8,
       {"W1", "G1", "G3", "G5", "G8", "G9", "G10", "G11"}, true},
      {BpId::bp12, "Leverage Markdown headings to structure your notebook", T::literate_programming, 6,
       {"W1", "W2", "G1", "G3", "G9", "G10"}, true},
      {BpId::bp13, "Keep your notebook clean", T::clean_concise, 3, {"W1", "W2", "G3"}, true},
      {BpId::bp14, "Keep your notebook concise", T::clean_concise, 4, {"W1", "G5", "G9", "G10"}, true},
      {BpId::bp15, "Distinguish production and development artifacts", T::production_development, 5,
       {"G2", "G5", "G6", "G9", "G11"}, false},
      {BpId::bp16, "Make your notebooks available", T::open_dissemination, 2, {"W1", "G9"}, false},
      {BpId::bp17, "Make your data available", T::open_dissemination, 4, {"W1", "G9", "G11", "G13"}, false},
  };
  return entries;
}

inline const RegistryEntry& registry_entry(BpId id) { return registry()[static_cast<std::size_t>(id) - 1]; }

inline std::vector<BpId> operationalized_practices() {
  std::vector<BpId> out;
  for (const auto& e : registry())
    if (e.operationalized) out.push_back(e.id);
  return out;
}

}  // namespace nbpractice
