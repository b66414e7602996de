#include "atlas/domain.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

#include "atlas/errors.hpp"

namespace atlas {

std::string_view to_string(RiskTier tier) {
  switch (tier) {
    case RiskTier::low:
      return "low";
    case RiskTier::high:
      return "high";
    case RiskTier::unacceptable:
      return "unacceptable";
  }
  return "low";
}

std::optional<RiskTier> parse_risk_tier(std::string_view text) {
  const std::string norm = normalize_label(text);
  for (RiskTier tier : kAllRiskTiers) {
    if (norm == to_string(tier)) return tier;
  }
  return std::nullopt;
}

std::string_view to_string(SdgDirection direction) {
  return direction == SdgDirection::supports ? "supports" : "undermines";
}

std::optional<SdgDirection> parse_sdg_direction(std::string_view text) {
  const std::string norm = normalize_label(text);
  if (norm == "supports") return SdgDirection::supports;
  if (norm == "undermines") return SdgDirection::undermines;
  return std::nullopt;
}

UseDraft UseRecord::draft() const {
  return UseDraft{use_id, incident_ids, domain, purpose, capability, ai_user, ai_subject};
}

std::vector<std::string> ValidationReport::messages() const {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.path + ": " + v.reason);
  return out;
}

std::string trim(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string normalize_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool is_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  const int year = std::stoi(std::string(text.substr(0, 4)));
  const int month = std::stoi(std::string(text.substr(5, 2)));
  const int day = std::stoi(std::string(text.substr(8, 2)));
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
  return day <= limit;
}

bool is_absolute_url(std::string_view text) {
  const auto sep = text.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (std::size_t i = 0; i < sep; ++i) {
    const unsigned char c = text[i];
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  const auto rest = text.substr(sep + 3);
  if (rest.empty() || rest.front() == '/') return false;
  return std::none_of(text.begin(), text.end(),
                      [](unsigned char c) { return std::isspace(c); });
}

std::string make_use_id(std::size_t ordinal) {
  std::string digits = std::to_string(ordinal);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "use-" + digits;
}

namespace {

void require_text(std::vector<Violation>& out, std::string_view path,
                  const std::string& value) {
  if (trim(value).empty()) out.push_back({std::string(path), "must be non-empty"});
}

void check_draft_fields(std::vector<Violation>& out, const std::string& use_id,
                        const std::vector<IncidentId>& incident_ids,
                        const std::string& domain, const std::string& purpose,
                        const std::string& capability, const std::string& ai_user,
                        const std::string& ai_subject) {
  require_text(out, "use_id", use_id);
  if (incident_ids.empty()) out.push_back({"incident_ids", "must list at least one incident"});
  for (std::size_t i = 0; i < incident_ids.size(); ++i) {
    if (incident_ids[i] <= 0) {
      out.push_back({"incident_ids[" + std::to_string(i) + "]", "must be a positive integer"});
    }
  }
  require_text(out, "domain", domain);
  require_text(out, "purpose", purpose);
  require_text(out, "capability", capability);
  require_text(out, "ai_user", ai_user);
  require_text(out, "ai_subject", ai_subject);
}

void check_examples(std::vector<Violation>& out, const std::string& path,
                    const std::vector<std::string>& examples, std::size_t min_count,
                    std::size_t max_count) {
  if (examples.size() < min_count || examples.size() > max_count) {
    out.push_back({path, "must hold " + std::to_string(min_count) + ".." +
                             std::to_string(max_count) + " entries, found " +
                             std::to_string(examples.size())});
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    require_text(out, path + "[" + std::to_string(i) + "]", examples[i]);
  }
}

}  // namespace

ValidationReport validate_incident(const IncidentRecord& incident) {
  ValidationReport report;
  auto& out = report.violations;
  if (incident.incident_id <= 0) out.push_back({"incident_id", "must be a positive integer"});
  require_text(out, "title", incident.title);
  require_text(out, "description", incident.description);
  if (incident.date && !is_iso_date(*incident.date)) {
    out.push_back({"date", "not an ISO-8601 date: " + *incident.date});
  }
  for (std::size_t i = 0; i < incident.source_urls.size(); ++i) {
    if (!is_absolute_url(incident.source_urls[i])) {
      out.push_back({"source_urls[" + std::to_string(i) + "]",
                     "not an absolute URL: " + incident.source_urls[i]});
    }
  }
  return report;
}

ValidationReport validate_draft(const UseDraft& draft) {
  ValidationReport report;
  check_draft_fields(report.violations, draft.use_id, draft.incident_ids, draft.domain,
                     draft.purpose, draft.capability, draft.ai_user, draft.ai_subject);
  return report;
}

ValidationReport validate_use(const UseRecord& record) {
  ValidationReport report;
  auto& out = report.violations;
  check_draft_fields(out, record.use_id, record.incident_ids, record.domain, record.purpose,
                     record.capability, record.ai_user, record.ai_subject);

  std::set<std::pair<int, SdgDirection>> seen;
  std::map<int, int> directions_per_sdg;
  for (std::size_t k = 0; k < record.sdg_impacts.size(); ++k) {
    const auto& impact = record.sdg_impacts[k];
    const std::string path = "sdg_impacts[" + std::to_string(k) + "]";
    if (impact.sdg_id < 1 || impact.sdg_id > 17) {
      out.push_back({path + ".sdg_id",
                     "must be within 1..17, found " + std::to_string(impact.sdg_id)});
    }
    check_examples(out, path + ".examples", impact.examples, 1, 3);
    if (!seen.insert({impact.sdg_id, impact.direction}).second) {
      out.push_back({path, "duplicate entry for SDG " + std::to_string(impact.sdg_id) + " (" +
                               std::string(to_string(impact.direction)) + ")"});
    } else if (++directions_per_sdg[impact.sdg_id] == 2) {
      report.warnings.push_back(
          {path, "SDG " + std::to_string(impact.sdg_id) + " is both supported and undermined"});
    }
  }
  check_examples(out, "incident_examples", record.incident_examples, 1, 3);
  check_examples(out, "benefit_examples", record.benefit_examples, 0, 3);
  return report;
}

ValidationReport validate_dataset(const Dataset& dataset) {
  ValidationReport report;
  std::unordered_set<IncidentId> incident_ids;
  for (std::size_t i = 0; i < dataset.incidents.size(); ++i) {
    const auto& incident = dataset.incidents[i];
    const std::string prefix = "incidents[" + std::to_string(i) + "]";
    auto sub = validate_incident(incident);
    for (auto& v : sub.violations) report.violations.push_back({prefix + "." + v.path, v.reason});
    if (!incident_ids.insert(incident.incident_id).second) {
      report.violations.push_back({prefix + ".incident_id",
                                   "duplicate incident_id " + std::to_string(incident.incident_id)});
    }
  }
  std::unordered_set<std::string> use_ids;
  for (std::size_t u = 0; u < dataset.uses.size(); ++u) {
    const auto& use = dataset.uses[u];
    const std::string prefix = "uses[" + std::to_string(u) + "]";
    auto sub = validate_use(use);
    for (auto& v : sub.violations) report.violations.push_back({prefix + "." + v.path, v.reason});
    for (auto& w : sub.warnings) report.warnings.push_back({prefix + "." + w.path, w.reason});
    if (!use_ids.insert(use.use_id).second) {
      report.violations.push_back({prefix + ".use_id", "duplicate use_id " + use.use_id});
    }
    for (std::size_t k = 0; k < use.incident_ids.size(); ++k) {
      if (!incident_ids.contains(use.incident_ids[k])) {
        report.violations.push_back({prefix + ".incident_ids[" + std::to_string(k) + "]",
                                     "unknown incident " + std::to_string(use.incident_ids[k])});
      }
    }
  }
  return report;
}

std::size_t SummaryStats::count(RiskTier tier) const {
  switch (tier) {
    case RiskTier::low:
      return low;
    case RiskTier::high:
      return high;
    case RiskTier::unacceptable:
      return unacceptable;
  }
  return 0;
}

SummaryStats dataset_summary(const Dataset& dataset) {
  const auto report = validate_dataset(dataset);
  if (!report.ok()) throw ValidationError(report.messages());

  SummaryStats stats;
  stats.total_uses = dataset.uses.size();
  stats.total_incidents = dataset.incidents.size();
  std::set<int> supported;
  std::set<int> undermined;
  for (const auto& use : dataset.uses) {
    switch (use.risk) {
      case RiskTier::low:
        ++stats.low;
        break;
      case RiskTier::high:
        ++stats.high;
        break;
      case RiskTier::unacceptable:
        ++stats.unacceptable;
        break;
    }
    for (const auto& impact : use.sdg_impacts) {
      (impact.direction == SdgDirection::supports ? supported : undermined).insert(impact.sdg_id);
    }
  }
  stats.supported_sdgs = supported.size();
  stats.undermined_sdgs = undermined.size();
  return stats;
}

}  // namespace atlas
