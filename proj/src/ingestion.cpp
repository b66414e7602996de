#include "atlas/ingestion.hpp"

#include <unordered_set>

#include "atlas/errors.hpp"
#include "atlas/text.hpp"

namespace atlas::ingestion {

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "json") return InputFormat::json;
  if (name == "csv") return InputFormat::csv;
  return std::nullopt;
}

void IngestConfig::validate() const {
  if (keyword_list.empty()) throw InputError("keyword list must not be empty");
  for (const auto& keyword : keyword_list) {
    if (trim(keyword).empty()) throw InputError("keyword list contains an empty entry");
  }
  if (date_range) {
    if (!is_iso_date(date_range->start) || !is_iso_date(date_range->end)) {
      throw InputError("date range bounds must be YYYY-MM-DD dates");
    }
    if (date_range->start > date_range->end) throw InputError("date range start is after end");
  }
}

std::vector<std::string> default_keywords() {
  return {"mobile",  "smartphone", "phone",      "app",
          "ios",     "android",    "wearable",   "smartwatch",
          "fitness tracker", "tablet", "voice assistant"};
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
  const std::string contents = read_text_file(path);
  std::vector<std::string> raw;
  const std::string head = trim(contents);
  if (!head.empty() && head.front() == '[') {
    try {
      raw = json::parse(head).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  } else {
    std::size_t start = 0;
    while (start <= contents.size()) {
      auto end = contents.find('\n', start);
      if (end == std::string::npos) end = contents.size();
      std::string line = trim(std::string_view(contents).substr(start, end - start));
      if (!line.empty() && line.front() != '#') raw.push_back(line);
      start = end + 1;
    }
  }
  std::vector<std::string> keywords;
  for (const auto& k : raw) {
    auto norm = normalize_label(k);
    if (!norm.empty()) keywords.push_back(std::move(norm));
  }
  return keywords;
}

bool is_valid_utf8(std::string_view input) {
  std::size_t i = 0;
  while (i < input.size()) {
    const auto c = static_cast<unsigned char>(input[i]);
    std::size_t extra = 0;
    char32_t code = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      code = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      code = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      code = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= input.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(input[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      code = (code << 6) | (cc & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (code < kMin[extra] || code > 0x10FFFF || (code >= 0xD800 && code <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

namespace {

ParseResult parse_json_dump(std::string_view input) {
  json document;
  try {
    document = json::parse(input);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("incident dump is not valid JSON: ") + e.what());
  }
  if (document.is_object() && document.contains("incidents")) document = document["incidents"];
  if (!document.is_array()) throw InputError("incident dump must be a JSON array of incidents");

  ParseResult result;
  for (std::size_t i = 0; i < document.size(); ++i) {
    try {
      auto record = document[i].get<IncidentRecord>();
      record.matched_keywords.clear();
      auto report = validate_incident(record);
      if (!report.ok()) {
        result.skipped.push_back({i, std::nullopt, report.messages().front()});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      result.skipped.push_back({i, std::nullopt, e.what()});
    }
  }
  return result;
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;  // physical line where the row starts
  std::optional<std::string> error;
};

// RFC 4180: quoted fields may hold commas, doubled quotes and newlines.
std::vector<CsvRow> split_csv(std::string_view input) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  if (input.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < input.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    bool row_done = false;
    while (i < input.size() && !row_done) {
      const char c = input[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < input.size() && input[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          quoted = false;
          ++i;
          continue;
        }
        if (c == '\n') ++line;
        field.push_back(c);
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          if (field.empty() && !field_was_quoted) {
            quoted = true;
            field_was_quoted = true;
          } else if (!row.error) {
            row.error = "stray quote inside unquoted field";
          }
          ++i;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          ++i;
          break;
        case '\r':
          ++i;
          break;
        case '\n':
          ++line;
          ++i;
          row_done = true;
          break;
        default:
          if (field_was_quoted && !row.error) row.error = "text after closing quote";
          field.push_back(c);
          ++i;
      }
    }
    if (quoted && !row.error) row.error = "unterminated quoted field";
    row.fields.push_back(std::move(field));
    const bool blank = row.fields.size() == 1 && row.fields.front().empty() && !field_was_quoted;
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_urls(const std::string& cell) {
  std::vector<std::string> urls;
  std::string current;
  for (char c : cell) {
    if (c == ';' || c == '|' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) urls.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) urls.push_back(std::move(current));
  return urls;
}

ParseResult parse_csv_dump(std::string_view input) {
  auto rows = split_csv(input);
  ParseResult result;
  if (rows.empty()) return result;

  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (normalize_label(header[c]) == name) return c;
    }
    return std::nullopt;
  };
  const auto id_col = column("incident_id");
  const auto title_col = column("title");
  const auto desc_col = column("description");
  const auto date_col = column("date");
  const auto urls_col = column("source_urls");
  if (!id_col || !title_col || !desc_col) {
    throw InputError("CSV header must name incident_id, title and description columns");
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t index = r - 1;
    if (row.error) {
      result.skipped.push_back({index, row.line, *row.error});
      continue;
    }
    if (row.fields.size() != header.size()) {
      result.skipped.push_back({index, row.line,
                                "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(row.fields.size())});
      continue;
    }
    IncidentRecord record;
    const std::string id_text = trim(row.fields[*id_col]);
    std::size_t consumed = 0;
    try {
      record.incident_id = std::stoll(id_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (id_text.empty() || consumed != id_text.size()) {
      result.skipped.push_back({index, row.line, "incident_id is not an integer: '" + id_text + "'"});
      continue;
    }
    record.title = row.fields[*title_col];
    record.description = row.fields[*desc_col];
    if (date_col) {
      auto date = trim(row.fields[*date_col]);
      if (!date.empty()) record.date = std::move(date);
    }
    if (urls_col) record.source_urls = split_urls(row.fields[*urls_col]);
    auto report = validate_incident(record);
    if (!report.ok()) {
      result.skipped.push_back({index, row.line, report.messages().front()});
      continue;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

}  // namespace

ParseResult parse_incidents(std::string_view input, InputFormat format) {
  if (!is_valid_utf8(input)) throw InputError("incident dump is not valid UTF-8");
  return format == InputFormat::json ? parse_json_dump(input) : parse_csv_dump(input);
}

std::vector<IncidentRecord> deduplicate(const std::vector<IncidentRecord>& records) {
  std::vector<IncidentRecord> kept;
  std::unordered_set<IncidentId> ids;
  std::unordered_set<std::string> titles;
  for (const auto& record : records) {
    auto title = text::normalize_title(record.title);
    if (ids.contains(record.incident_id) || titles.contains(title)) continue;
    ids.insert(record.incident_id);
    titles.insert(std::move(title));
    kept.push_back(record);
  }
  return kept;
}

std::vector<IncidentRecord> filter_mobile(const std::vector<IncidentRecord>& records,
                                          const IngestConfig& config) {
  struct Keyword {
    std::string raw;
    std::vector<std::string> tokens;
  };
  std::vector<Keyword> keywords;
  for (const auto& k : config.keyword_list) {
    keywords.push_back({normalize_label(k), text::tokenize(k)});
  }

  std::vector<IncidentRecord> kept;
  for (const auto& record : records) {
    if (config.date_range && record.date &&
        (*record.date < config.date_range->start || *record.date > config.date_range->end)) {
      continue;
    }
    std::vector<std::string> matched;
    if (config.match_mode == MatchMode::word_boundary) {
      const auto title_tokens = text::tokenize(record.title);
      const auto desc_tokens = text::tokenize(record.description);
      for (const auto& k : keywords) {
        if (text::contains_token_sequence(title_tokens, k.tokens) ||
            text::contains_token_sequence(desc_tokens, k.tokens)) {
          matched.push_back(k.raw);
        }
      }
    } else {
      const auto title = text::to_lower(record.title);
      const auto desc = text::to_lower(record.description);
      for (const auto& k : keywords) {
        if (title.find(k.raw) != std::string::npos || desc.find(k.raw) != std::string::npos) {
          matched.push_back(k.raw);
        }
      }
    }
    if (matched.empty()) continue;
    kept.push_back(record);
    kept.back().matched_keywords = std::move(matched);
  }
  return kept;
}

json to_json(const std::vector<SkippedEntry>& skipped) {
  json out = json::array();
  for (const auto& entry : skipped) {
    json item{{"index", entry.index}, {"reason", entry.reason}};
    if (entry.line) item["line"] = *entry.line;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace atlas::ingestion
