#pragma once

#include <string>
#include <vector>

#include "atlas/domain.hpp"
#include "atlas/json_io.hpp"

namespace atlas::assessment {

/// Expert consensus for one use.
struct AnnotationEntry {
  std::string use_id;
  RiskTier risk = RiskTier::low;
  std::vector<SdgImpact> sdg_impacts;
  std::vector<std::string> incident_examples;
  std::vector<std::string> benefit_examples;

  friend bool operator==(const AnnotationEntry&, const AnnotationEntry&) = default;
};

struct AnnotationFile {
  std::vector<AnnotationEntry> entries;

  /// Unique use_ids and well-formed SDG entries; violations carry entry paths.
  ValidationReport validate() const;
};

void to_json(json& j, const AnnotationEntry& entry);
void from_json(const json& j, AnnotationEntry& entry);

/// Accepts {"entries": [...]} or a bare array.
AnnotationFile parse_annotations(const json& document);

struct MergeInputs {
  std::vector<UseDraft> drafts;
  std::vector<IncidentRecord> incidents;
  std::string created_at;
  std::string source_snapshot;
};

/// Joins drafts and annotations on use_id. The drafts' five components are
/// copied verbatim. Throws ReconciliationError (listing ids missing on either
/// side) or ValidationError (the merged dataset breaks an invariant).
Dataset merge_annotations(const MergeInputs& inputs, const AnnotationFile& annotations);

/// Drafts file written by the formatter: {"drafts", "incidents", "failures"}.
/// A bare array of drafts is also accepted (incidents then empty).
struct DraftsFile {
  std::vector<UseDraft> drafts;
  std::vector<IncidentRecord> incidents;
  json failures = json::array();
};

DraftsFile parse_drafts(const json& document);
json to_json(const DraftsFile& drafts);

}  // namespace atlas::assessment
