#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atlas {

using IncidentId = std::int64_t;

/// One raw incident as ingested from a database dump.
struct IncidentRecord {
  IncidentId incident_id = 0;
  std::string title;
  std::string description;
  std::optional<std::string> date;  // ISO-8601 calendar date, YYYY-MM-DD
  std::vector<std::string> source_urls;
  // Filled by the mobile-relevance filter; empty otherwise.
  std::vector<std::string> matched_keywords;

  friend bool operator==(const IncidentRecord&, const IncidentRecord&) = default;
};

enum class RiskTier { low, high, unacceptable };

std::string_view to_string(RiskTier tier);
std::optional<RiskTier> parse_risk_tier(std::string_view text);
inline constexpr RiskTier kAllRiskTiers[] = {RiskTier::low, RiskTier::high,
                                             RiskTier::unacceptable};

enum class SdgDirection { supports, undermines };

std::string_view to_string(SdgDirection direction);
std::optional<SdgDirection> parse_sdg_direction(std::string_view text);

struct SdgImpact {
  int sdg_id = 0;
  SdgDirection direction = SdgDirection::supports;
  std::vector<std::string> examples;

  friend bool operator==(const SdgImpact&, const SdgImpact&) = default;
};

/// The five-component description of a use, linked to its incidents. This is
/// what the formatter produces; risk and SDG annotations come later.
struct UseDraft {
  std::string use_id;
  std::vector<IncidentId> incident_ids;
  std::string domain;
  std::string purpose;
  std::string capability;
  std::string ai_user;
  std::string ai_subject;

  friend bool operator==(const UseDraft&, const UseDraft&) = default;
};

/// A fully annotated AI use.
struct UseRecord {
  std::string use_id;
  std::vector<IncidentId> incident_ids;
  std::string domain;
  std::string purpose;
  std::string capability;
  std::string ai_user;
  std::string ai_subject;
  RiskTier risk = RiskTier::low;
  std::vector<SdgImpact> sdg_impacts;
  std::vector<std::string> incident_examples;
  std::vector<std::string> benefit_examples;

  UseDraft draft() const;

  friend bool operator==(const UseRecord&, const UseRecord&) = default;
};

struct Dataset {
  std::vector<UseRecord> uses;
  std::vector<IncidentRecord> incidents;
  std::string created_at;  // ISO-8601 timestamp
  std::string source_snapshot;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct Violation {
  std::string path;  // e.g. "sdg_impacts[0].sdg_id"
  std::string reason;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Violations make a record invalid; warnings are informational.
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const { return violations.empty(); }
  std::vector<std::string> messages() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate_incident(const IncidentRecord& incident);

/// Checks only the five components and the incident linkage.
ValidationReport validate_draft(const UseDraft& draft);

/// Checks every per-record invariant of a use. Never throws.
ValidationReport validate_use(const UseRecord& record);

/// Per-record checks plus cross-record ones: unique ids, known incidents.
ValidationReport validate_dataset(const Dataset& dataset);

struct SummaryStats {
  std::size_t total_uses = 0;
  std::size_t total_incidents = 0;
  std::size_t low = 0;
  std::size_t high = 0;
  std::size_t unacceptable = 0;
  std::size_t supported_sdgs = 0;   // distinct sdg ids with a `supports` entry
  std::size_t undermined_sdgs = 0;  // distinct sdg ids with an `undermines` entry

  std::size_t count(RiskTier tier) const;

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

/// Throws ValidationError when the dataset is invalid.
SummaryStats dataset_summary(const Dataset& dataset);

std::string trim(std::string_view text);

/// Lowercased, trimmed, internal whitespace collapsed to single spaces.
std::string normalize_label(std::string_view text);

bool is_iso_date(std::string_view text);
bool is_absolute_url(std::string_view text);

/// "use-" followed by the ordinal zero-padded to four digits.
std::string make_use_id(std::size_t ordinal);

}  // namespace atlas
