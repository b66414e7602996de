#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atlas/domain.hpp"
#include "atlas/json_io.hpp"

namespace atlas::ingestion {

enum class InputFormat { json, csv };

std::optional<InputFormat> parse_input_format(std::string_view name);

enum class MatchMode {
  word_boundary,  // "app" does not match "application"
  substring,
};

struct DateRange {
  std::string start;  // inclusive, YYYY-MM-DD
  std::string end;    // inclusive, YYYY-MM-DD
};

struct IngestConfig {
  std::filesystem::path input_path;
  InputFormat format = InputFormat::json;
  std::vector<std::string> keyword_list;
  std::optional<DateRange> date_range;
  MatchMode match_mode = MatchMode::word_boundary;

  /// Throws InputError when the keyword list is empty or the range inverted.
  void validate() const;
};

std::vector<std::string> default_keywords();

/// Reads a keyword file: a JSON array of strings, or one keyword per line
/// with `#` comments. Keywords are lowercased and trimmed.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

struct SkippedEntry {
  std::size_t index = 0;            // element index (JSON) or data-row index (CSV), 0-based
  std::optional<std::size_t> line;  // 1-based physical line, CSV only
  std::string reason;
};

struct ParseResult {
  std::vector<IncidentRecord> records;
  std::vector<SkippedEntry> skipped;
};

/// Decodes an incident dump. Malformed entries land in `skipped`; invalid
/// UTF-8, a non-array JSON document or a CSV without the required header
/// columns throw InputError.
ParseResult parse_incidents(std::string_view input, InputFormat format);

/// Keeps the first occurrence; later records sharing its incident_id or its
/// normalized title are dropped.
std::vector<IncidentRecord> deduplicate(const std::vector<IncidentRecord>& records);

/// Keeps records whose title or description mentions any configured keyword,
/// annotating each with the keywords it matched (in keyword-list order).
std::vector<IncidentRecord> filter_mobile(const std::vector<IncidentRecord>& records,
                                          const IngestConfig& config);

json to_json(const std::vector<SkippedEntry>& skipped);

bool is_valid_utf8(std::string_view input);

}  // namespace atlas::ingestion
