#include "atlas/json_io.hpp"

#include <fstream>
#include <sstream>

#include "atlas/errors.hpp"

namespace atlas {

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(std::string("missing field '") + name + "'");
  return *it;
}

template <typename T>
T get_as(const json& j, const char* name) {
  const json& value = field(j, name);
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field '") + name + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* name, T fallback) {
  if (!j.is_object() || !j.contains(name) || j.at(name).is_null()) return fallback;
  return get_as<T>(j, name);
}

}  // namespace

void to_json(json& j, const IncidentRecord& incident) {
  j = json{{"incident_id", incident.incident_id},
           {"title", incident.title},
           {"description", incident.description},
           {"source_urls", incident.source_urls}};
  j["date"] = incident.date ? json(*incident.date) : json(nullptr);
  if (!incident.matched_keywords.empty()) j["matched_keywords"] = incident.matched_keywords;
}

void from_json(const json& j, IncidentRecord& incident) {
  incident.incident_id = get_as<IncidentId>(j, "incident_id");
  incident.title = get_as<std::string>(j, "title");
  incident.description = get_as<std::string>(j, "description");
  incident.date.reset();
  if (j.contains("date") && !j.at("date").is_null()) incident.date = get_as<std::string>(j, "date");
  incident.source_urls = get_or<std::vector<std::string>>(j, "source_urls", {});
  incident.matched_keywords = get_or<std::vector<std::string>>(j, "matched_keywords", {});
}

void to_json(json& j, RiskTier tier) { j = std::string(to_string(tier)); }

void from_json(const json& j, RiskTier& tier) {
  if (!j.is_string()) throw InputError("risk tier must be a string");
  auto parsed = parse_risk_tier(j.get<std::string>());
  if (!parsed) throw InputError("unknown risk tier '" + j.get<std::string>() + "'");
  tier = *parsed;
}

void to_json(json& j, const SdgImpact& impact) {
  j = json{{"sdg_id", impact.sdg_id},
           {"direction", std::string(to_string(impact.direction))},
           {"examples", impact.examples}};
}

void from_json(const json& j, SdgImpact& impact) {
  impact.sdg_id = get_as<int>(j, "sdg_id");
  const auto direction = get_as<std::string>(j, "direction");
  auto parsed = parse_sdg_direction(direction);
  if (!parsed) throw InputError("unknown SDG direction '" + direction + "'");
  impact.direction = *parsed;
  impact.examples = get_as<std::vector<std::string>>(j, "examples");
}

void to_json(json& j, const UseDraft& draft) {
  j = json{{"use_id", draft.use_id},         {"incident_ids", draft.incident_ids},
           {"domain", draft.domain},         {"purpose", draft.purpose},
           {"capability", draft.capability}, {"ai_user", draft.ai_user},
           {"ai_subject", draft.ai_subject}};
}

void from_json(const json& j, UseDraft& draft) {
  draft.use_id = get_as<std::string>(j, "use_id");
  draft.incident_ids = get_as<std::vector<IncidentId>>(j, "incident_ids");
  draft.domain = get_as<std::string>(j, "domain");
  draft.purpose = get_as<std::string>(j, "purpose");
  draft.capability = get_as<std::string>(j, "capability");
  draft.ai_user = get_as<std::string>(j, "ai_user");
  draft.ai_subject = get_as<std::string>(j, "ai_subject");
}

void to_json(json& j, const UseRecord& use) {
  to_json(j, use.draft());
  j["risk"] = use.risk;
  j["sdg_impacts"] = use.sdg_impacts;
  j["incident_examples"] = use.incident_examples;
  j["benefit_examples"] = use.benefit_examples;
}

void from_json(const json& j, UseRecord& use) {
  UseDraft draft;
  from_json(j, draft);
  use.use_id = std::move(draft.use_id);
  use.incident_ids = std::move(draft.incident_ids);
  use.domain = std::move(draft.domain);
  use.purpose = std::move(draft.purpose);
  use.capability = std::move(draft.capability);
  use.ai_user = std::move(draft.ai_user);
  use.ai_subject = std::move(draft.ai_subject);
  use.risk = get_as<RiskTier>(j, "risk");
  use.sdg_impacts = get_or<std::vector<SdgImpact>>(j, "sdg_impacts", {});
  use.incident_examples = get_as<std::vector<std::string>>(j, "incident_examples");
  use.benefit_examples = get_or<std::vector<std::string>>(j, "benefit_examples", {});
}

void to_json(json& j, const Dataset& dataset) {
  j = json{{"uses", dataset.uses},
           {"incidents", dataset.incidents},
           {"created_at", dataset.created_at},
           {"source_snapshot", dataset.source_snapshot}};
}

void from_json(const json& j, Dataset& dataset) {
  dataset.uses = get_as<std::vector<UseRecord>>(j, "uses");
  dataset.incidents = get_as<std::vector<IncidentRecord>>(j, "incidents");
  dataset.created_at = get_or<std::string>(j, "created_at", "");
  dataset.source_snapshot = get_or<std::string>(j, "source_snapshot", "");
}

void to_json(json& j, const SummaryStats& stats) {
  j = json{{"uses", stats.total_uses},
           {"incidents", stats.total_incidents},
           {"low", stats.low},
           {"high", stats.high},
           {"unacceptable", stats.unacceptable},
           {"supported_sdgs", stats.supported_sdgs},
           {"undermined_sdgs", stats.undermined_sdgs}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("failed reading " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
  if (!out) throw InputError("failed writing " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) {
  try {
    return read_json_file(path).get<Dataset>();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace atlas
