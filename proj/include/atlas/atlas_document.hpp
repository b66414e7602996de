#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlas/domain.hpp"
#include "atlas/json_io.hpp"
#include "atlas/layout.hpp"

namespace atlas {

inline constexpr const char* kAtlasSchemaVersion = "1.0";
inline constexpr std::size_t kNarrativeSections = 4;

struct NarrativeSection {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> highlighted_use_ids;

  friend bool operator==(const NarrativeSection&, const NarrativeSection&) = default;
};

/// Exactly four sections: map introduction, risk-level regrouping, shared
/// traits of risk groups, dashboard hand-off.
using Narrative = std::array<NarrativeSection, kNarrativeSections>;

Narrative default_narrative();

/// Reads {"sections": [...]} (or a bare array) and requires exactly four.
Narrative narrative_from_json(const json& document);

using Palette = std::map<RiskTier, std::string>;

/// unacceptable #d7263d, high #f46036, low #1b998b.
Palette default_palette();

/// WCAG relative-luminance contrast ratio between two "#rrggbb" colors.
double contrast_ratio(const std::string& a, const std::string& b);

/// Graphics contrast floor (WCAG 2.1, 1.4.11) each color must reach on white.
inline constexpr double kMinContrastOnWhite = 3.0;

/// All three tiers present, "#rrggbb" colors, pairwise distinct, and each
/// color at least kMinContrastOnWhite against white.
ValidationReport validate_palette(const Palette& palette);

Palette palette_from_json(const json& document);

struct AtlasUse {
  UseRecord use;
  double x = 0.5;
  double y = 0.5;

  friend bool operator==(const AtlasUse&, const AtlasUse&) = default;
};

struct AtlasDocument {
  std::string version = kAtlasSchemaVersion;
  std::string generated_at;
  std::vector<AtlasUse> uses;
  Narrative narrative;
  json facets = json::object();  // facet -> value -> count
  Palette palette;

  const AtlasUse* find(const std::string& use_id) const;

  friend bool operator==(const AtlasDocument&, const AtlasDocument&) = default;
};

/// Structural checks applied at export time and again when a service loads a file.
ValidationReport validate_atlas(const AtlasDocument& document);

json to_json(const AtlasDocument& document);

/// Decodes and validates. Throws InputError on shape problems and
/// ValidationError when invariants fail.
AtlasDocument atlas_from_json(const json& document);
AtlasDocument load_atlas(const std::filesystem::path& path);

struct ExportOptions {
  Narrative narrative = default_narrative();
  Palette palette = default_palette();
  std::optional<std::string> generated_at;  // defaults to the dataset's created_at
};

/// Binds uses to layout coordinates (rounded to six decimals) and derives
/// facet counts. Throws ReconciliationError when the id sets differ.
AtlasDocument export_atlas(const Dataset& dataset, const layout::LayoutResult& layout,
                           const ExportOptions& options = {});

/// Canonical bytes (see canonical_dump).
std::string serialize_atlas(const AtlasDocument& document);

}  // namespace atlas
