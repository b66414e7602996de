#include "atlas/atlas_document.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "atlas/canonical_json.hpp"
#include "atlas/errors.hpp"
#include "atlas/search.hpp"

namespace atlas {

Narrative default_narrative() {
  return Narrative{{
      {"map", "A map of AI uses in mobile computing",
       "Each dot is one AI use drawn from a real-world incident. Uses that are described in "
       "similar terms sit close together.",
       {}},
      {"risk-levels", "Same technology, different risk",
       "The dots regroup by regulatory risk tier: unacceptable, high and low. Similar "
       "technologies can land in very different tiers depending on how they are used.",
       {}},
      {"shared-traits", "What each risk group has in common",
       "Colors mark the risk tiers. Even uses in the low tier are linked to documented harms.",
       {}},
      {"dashboard", "Explore the uses yourself",
       "Hover a dot for a summary, click it for the full card, filter by category or search by "
       "keyword.",
       {}},
  }};
}

Narrative narrative_from_json(const json& document) {
  const json* sections = &document;
  if (document.is_object()) {
    if (!document.contains("sections")) throw InputError("narrative lacks 'sections'");
    sections = &document["sections"];
  }
  if (!sections->is_array()) throw InputError("narrative sections must be an array");
  if (sections->size() != kNarrativeSections) {
    throw InputError("narrative must have exactly " + std::to_string(kNarrativeSections) +
                     " sections, found " + std::to_string(sections->size()));
  }
  Narrative narrative;
  for (std::size_t i = 0; i < kNarrativeSections; ++i) {
    const auto& s = (*sections)[i];
    try {
      narrative[i].id = s.at("id").get<std::string>();
      narrative[i].title = s.at("title").get<std::string>();
      narrative[i].body = s.at("body").get<std::string>();
      narrative[i].highlighted_use_ids =
          s.value("highlighted_use_ids", std::vector<std::string>{});
    } catch (const json::exception& e) {
      throw InputError("narrative section " + std::to_string(i) + ": " + e.what());
    }
  }
  return narrative;
}

Palette default_palette() {
  return {{RiskTier::unacceptable, "#d7263d"}, {RiskTier::high, "#f46036"}, {RiskTier::low, "#1b998b"}};
}

namespace {

bool is_hex_color(const std::string& color) {
  if (color.size() != 7 || color[0] != '#') return false;
  for (std::size_t i = 1; i < 7; ++i) {
    if (!std::isxdigit(static_cast<unsigned char>(color[i]))) return false;
  }
  return true;
}

double relative_luminance(const std::string& color) {
  if (!is_hex_color(color)) throw InputError("not a #rrggbb color: " + color);
  double channels[3];
  for (int k = 0; k < 3; ++k) {
    const double c = std::stoi(color.substr(1 + 2 * k, 2), nullptr, 16) / 255.0;
    channels[k] = c <= 0.03928 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  }
  return 0.2126 * channels[0] + 0.7152 * channels[1] + 0.0722 * channels[2];
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

double contrast_ratio(const std::string& a, const std::string& b) {
  const double la = relative_luminance(a);
  const double lb = relative_luminance(b);
  return (std::max(la, lb) + 0.05) / (std::min(la, lb) + 0.05);
}

ValidationReport validate_palette(const Palette& palette) {
  ValidationReport report;
  std::set<std::string> seen;
  for (RiskTier tier : kAllRiskTiers) {
    const std::string path = "palette." + std::string(to_string(tier));
    auto it = palette.find(tier);
    if (it == palette.end()) {
      report.violations.push_back({path, "missing color"});
      continue;
    }
    if (!is_hex_color(it->second)) {
      report.violations.push_back({path, "not a #rrggbb color: " + it->second});
      continue;
    }
    if (!seen.insert(lower(it->second)).second) {
      report.violations.push_back({path, "color shared with another tier"});
    }
    const double ratio = contrast_ratio(it->second, "#ffffff");
    if (ratio < kMinContrastOnWhite) {
      report.violations.push_back({path, "contrast " + std::to_string(ratio) +
                                             ":1 against white is below 3:1"});
    }
  }
  return report;
}

Palette palette_from_json(const json& document) {
  if (!document.is_object()) throw InputError("palette must be an object");
  Palette palette;
  for (const auto& [key, value] : document.items()) {
    auto tier = parse_risk_tier(key);
    if (!tier) throw InputError("palette names unknown risk tier '" + key + "'");
    if (!value.is_string()) throw InputError("palette color for '" + key + "' must be a string");
    palette[*tier] = value.get<std::string>();
  }
  return palette;
}

const AtlasUse* AtlasDocument::find(const std::string& use_id) const {
  for (const auto& entry : uses) {
    if (entry.use.use_id == use_id) return &entry;
  }
  return nullptr;
}

ValidationReport validate_atlas(const AtlasDocument& document) {
  ValidationReport report;
  auto& out = report.violations;
  if (document.version != kAtlasSchemaVersion) {
    out.push_back({"version", "unsupported schema version '" + document.version + "'"});
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < document.uses.size(); ++i) {
    const auto& entry = document.uses[i];
    const std::string prefix = "uses[" + std::to_string(i) + "]";
    auto sub = validate_use(entry.use);
    for (auto& v : sub.violations) out.push_back({prefix + "." + v.path, v.reason});
    if (!ids.insert(entry.use.use_id).second) {
      out.push_back({prefix + ".use_id", "duplicate use_id " + entry.use.use_id});
    }
    for (auto [name, value] : {std::pair{"x", entry.x}, std::pair{"y", entry.y}}) {
      if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        out.push_back({prefix + "." + name, "coordinate outside [0, 1]"});
      }
    }
  }
  std::set<std::string> section_ids;
  for (std::size_t s = 0; s < document.narrative.size(); ++s) {
    const auto& section = document.narrative[s];
    const std::string prefix = "narrative[" + std::to_string(s) + "]";
    if (trim(section.id).empty()) out.push_back({prefix + ".id", "must be non-empty"});
    if (!section_ids.insert(section.id).second) {
      out.push_back({prefix + ".id", "duplicate section id " + section.id});
    }
    if (trim(section.title).empty()) out.push_back({prefix + ".title", "must be non-empty"});
    for (std::size_t k = 0; k < section.highlighted_use_ids.size(); ++k) {
      if (!ids.contains(section.highlighted_use_ids[k])) {
        out.push_back({prefix + ".highlighted_use_ids[" + std::to_string(k) + "]",
                       "unknown use " + section.highlighted_use_ids[k]});
      }
    }
  }
  for (auto& v : validate_palette(document.palette).violations) out.push_back(std::move(v));
  return report;
}

namespace {

json facet_counts_for(const std::vector<AtlasUse>& uses) {
  std::vector<UseRecord> records;
  records.reserve(uses.size());
  for (const auto& entry : uses) records.push_back(entry.use);
  return search::SearchIndex::build(std::move(records)).facet_counts();
}

}  // namespace

json to_json(const AtlasDocument& document) {
  json uses = json::array();
  for (const auto& entry : document.uses) {
    json item = entry.use;
    item["x"] = entry.x;
    item["y"] = entry.y;
    uses.push_back(std::move(item));
  }
  json narrative = json::array();
  for (const auto& section : document.narrative) {
    narrative.push_back({{"id", section.id},
                         {"title", section.title},
                         {"body", section.body},
                         {"highlighted_use_ids", section.highlighted_use_ids}});
  }
  json palette = json::object();
  for (const auto& [tier, color] : document.palette) palette[std::string(to_string(tier))] = color;
  return json{{"version", document.version},   {"generated_at", document.generated_at},
              {"uses", uses},                   {"narrative", narrative},
              {"facets", document.facets},      {"palette", palette}};
}

AtlasDocument atlas_from_json(const json& document) {
  if (!document.is_object()) throw InputError("atlas document must be a JSON object");
  AtlasDocument atlas;
  try {
    atlas.version = document.at("version").get<std::string>();
    atlas.generated_at = document.at("generated_at").get<std::string>();
    for (const auto& item : document.at("uses")) {
      AtlasUse entry;
      entry.use = item.get<UseRecord>();
      entry.x = item.at("x").get<double>();
      entry.y = item.at("y").get<double>();
      atlas.uses.push_back(std::move(entry));
    }
    atlas.narrative = narrative_from_json(document.at("narrative"));
    atlas.facets = document.at("facets");
    atlas.palette = palette_from_json(document.at("palette"));
  } catch (const json::exception& e) {
    throw InputError(std::string("atlas document: ") + e.what());
  }
  auto report = validate_atlas(atlas);
  if (atlas.facets != facet_counts_for(atlas.uses)) {
    report.violations.push_back({"facets", "counts do not match the uses"});
  }
  if (!report.ok()) throw ValidationError(report.messages());
  return atlas;
}

AtlasDocument load_atlas(const std::filesystem::path& path) {
  return atlas_from_json(read_json_file(path));
}

AtlasDocument export_atlas(const Dataset& dataset, const layout::LayoutResult& layout,
                           const ExportOptions& options) {
  if (auto report = validate_dataset(dataset); !report.ok()) throw ValidationError(report.messages());
  if (auto report = layout.validate(); !report.ok()) throw ValidationError(report.messages());

  std::map<std::string, Eigen::Index> row_of;
  for (std::size_t r = 0; r < layout.row_ids.size(); ++r) {
    row_of.emplace(layout.row_ids[r], static_cast<Eigen::Index>(r));
  }
  std::set<std::string> use_ids;
  std::vector<std::string> only_dataset;
  for (const auto& use : dataset.uses) {
    use_ids.insert(use.use_id);
    if (!row_of.contains(use.use_id)) only_dataset.push_back(use.use_id);
  }
  std::vector<std::string> only_layout;
  for (const auto& id : layout.row_ids) {
    if (!use_ids.contains(id)) only_layout.push_back(id);
  }
  if (!only_dataset.empty() || !only_layout.empty()) {
    throw ReconciliationError("dataset and layout ids differ", only_dataset, only_layout);
  }

  AtlasDocument atlas;
  atlas.generated_at = options.generated_at.value_or(dataset.created_at);
  atlas.narrative = options.narrative;
  atlas.palette = options.palette;
  for (const auto& use : dataset.uses) {
    const Eigen::Index r = row_of.at(use.use_id);
    atlas.uses.push_back({use, round_to_micro(layout.coordinates(r, 0)),
                          round_to_micro(layout.coordinates(r, 1))});
  }
  atlas.facets = facet_counts_for(atlas.uses);
  if (auto report = validate_atlas(atlas); !report.ok()) throw ValidationError(report.messages());
  return atlas;
}

std::string serialize_atlas(const AtlasDocument& document) {
  return canonical_dump(to_json(document));
}

}  // namespace atlas
