#include "atlas/assessment.hpp"

#include <map>
#include <set>

#include "atlas/errors.hpp"

namespace atlas::assessment {

void to_json(json& j, const AnnotationEntry& entry) {
  j = json{{"use_id", entry.use_id},
           {"risk", entry.risk},
           {"sdg_impacts", entry.sdg_impacts},
           {"incident_examples", entry.incident_examples},
           {"benefit_examples", entry.benefit_examples}};
}

void from_json(const json& j, AnnotationEntry& entry) {
  if (!j.is_object()) throw InputError("annotation entry must be an object");
  for (const char* name : {"use_id", "risk", "incident_examples"}) {
    if (!j.contains(name)) throw InputError(std::string("annotation entry lacks '") + name + "'");
  }
  try {
    entry.use_id = j.at("use_id").get<std::string>();
    entry.incident_examples = j.at("incident_examples").get<std::vector<std::string>>();
    entry.benefit_examples = j.value("benefit_examples", std::vector<std::string>{});
    entry.sdg_impacts =
        j.contains("sdg_impacts") ? j.at("sdg_impacts").get<std::vector<SdgImpact>>()
                                  : std::vector<SdgImpact>{};
  } catch (const json::exception& e) {
    throw InputError("annotation entry: " + std::string(e.what()));
  }
  entry.risk = j.at("risk").get<RiskTier>();
}

ValidationReport AnnotationFile::validate() const {
  ValidationReport report;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& entry = entries[i];
    const std::string prefix = "entries[" + std::to_string(i) + "]";
    if (!ids.insert(entry.use_id).second) {
      report.violations.push_back({prefix + ".use_id", "duplicate use_id " + entry.use_id});
    }
    // Reuse the use-level checks on a record that only carries the annotation.
    UseRecord probe;
    probe.use_id = entry.use_id;
    probe.incident_ids = {1};
    probe.domain = probe.purpose = probe.capability = probe.ai_user = probe.ai_subject = "-";
    probe.risk = entry.risk;
    probe.sdg_impacts = entry.sdg_impacts;
    probe.incident_examples = entry.incident_examples;
    probe.benefit_examples = entry.benefit_examples;
    auto sub = validate_use(probe);
    for (auto& v : sub.violations) report.violations.push_back({prefix + "." + v.path, v.reason});
    for (auto& w : sub.warnings) report.warnings.push_back({prefix + "." + w.path, w.reason});
  }
  return report;
}

AnnotationFile parse_annotations(const json& document) {
  const json* entries = &document;
  if (document.is_object()) {
    if (!document.contains("entries")) throw InputError("annotation file lacks 'entries'");
    entries = &document["entries"];
  }
  if (!entries->is_array()) throw InputError("annotation entries must be an array");
  AnnotationFile file;
  for (std::size_t i = 0; i < entries->size(); ++i) {
    try {
      file.entries.push_back((*entries)[i].get<AnnotationEntry>());
    } catch (const InputError& e) {
      throw InputError("entries[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return file;
}

Dataset merge_annotations(const MergeInputs& inputs, const AnnotationFile& annotations) {
  if (auto report = annotations.validate(); !report.ok()) {
    throw ValidationError(report.messages());
  }
  std::map<std::string, const AnnotationEntry*> by_id;
  for (const auto& entry : annotations.entries) by_id.emplace(entry.use_id, &entry);

  std::set<std::string> draft_ids;
  std::vector<std::string> missing_annotation;
  for (const auto& draft : inputs.drafts) {
    draft_ids.insert(draft.use_id);
    if (!by_id.contains(draft.use_id)) missing_annotation.push_back(draft.use_id);
  }
  std::vector<std::string> missing_draft;
  for (const auto& entry : annotations.entries) {
    if (!draft_ids.contains(entry.use_id)) missing_draft.push_back(entry.use_id);
  }
  if (!missing_annotation.empty() || !missing_draft.empty()) {
    throw ReconciliationError("drafts and annotations do not match", missing_annotation,
                              missing_draft);
  }

  Dataset dataset;
  dataset.incidents = inputs.incidents;
  dataset.created_at = inputs.created_at;
  dataset.source_snapshot = inputs.source_snapshot;
  dataset.uses.reserve(inputs.drafts.size());
  for (const auto& draft : inputs.drafts) {
    const AnnotationEntry& entry = *by_id.at(draft.use_id);
    UseRecord use;
    use.use_id = draft.use_id;
    use.incident_ids = draft.incident_ids;
    use.domain = draft.domain;
    use.purpose = draft.purpose;
    use.capability = draft.capability;
    use.ai_user = draft.ai_user;
    use.ai_subject = draft.ai_subject;
    use.risk = entry.risk;
    use.sdg_impacts = entry.sdg_impacts;
    use.incident_examples = entry.incident_examples;
    use.benefit_examples = entry.benefit_examples;
    dataset.uses.push_back(std::move(use));
  }
  if (auto report = validate_dataset(dataset); !report.ok()) {
    throw ValidationError(report.messages());
  }
  return dataset;
}

DraftsFile parse_drafts(const json& document) {
  DraftsFile file;
  try {
    if (document.is_array()) {
      file.drafts = document.get<std::vector<UseDraft>>();
      return file;
    }
    if (!document.is_object() || !document.contains("drafts")) {
      throw InputError("drafts file must be an array or an object with 'drafts'");
    }
    file.drafts = document.at("drafts").get<std::vector<UseDraft>>();
    if (document.contains("incidents")) {
      file.incidents = document.at("incidents").get<std::vector<IncidentRecord>>();
    }
    if (document.contains("failures")) file.failures = document.at("failures");
  } catch (const json::exception& e) {
    throw InputError(std::string("drafts file: ") + e.what());
  }
  return file;
}

json to_json(const DraftsFile& drafts) {
  return json{{"drafts", drafts.drafts},
              {"incidents", drafts.incidents},
              {"failures", drafts.failures}};
}

}  // namespace atlas::assessment
