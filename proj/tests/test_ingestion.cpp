#include <doctest.h>

#include <algorithm>
#include <random>

#include "atlas/errors.hpp"
#include "atlas/ingestion.hpp"
#include "atlas/text.hpp"
#include "support.hpp"

using namespace atlas;
using namespace atlas::ingestion;

namespace {

IncidentRecord make(IncidentId id, std::string title, std::string description = "text") {
  return {id, std::move(title), std::move(description), std::nullopt, {}, {}};
}

IngestConfig keywords(std::vector<std::string> list) {
  IngestConfig config;
  config.keyword_list = std::move(list);
  return config;
}

// Pairwise duplicate oracle: record i survives iff no earlier surviving
// record shares its id or normalized title.
std::vector<IncidentId> dedupe_oracle(const std::vector<IncidentRecord>& records) {
  std::vector<const IncidentRecord*> kept;
  for (const auto& r : records) {
    bool dup = false;
    for (const auto* k : kept) {
      dup = dup || k->incident_id == r.incident_id ||
            text::normalize_title(k->title) == text::normalize_title(r.title);
    }
    if (!dup) kept.push_back(&r);
  }
  std::vector<IncidentId> ids;
  for (const auto* k : kept) ids.push_back(k->incident_id);
  return ids;
}

std::vector<IncidentId> ids_of(const std::vector<IncidentRecord>& records) {
  std::vector<IncidentId> ids;
  for (const auto& r : records) ids.push_back(r.incident_id);
  return ids;
}

}  // namespace

TEST_CASE("CSV with one malformed row") {
  const std::string csv =
      "incident_id,title,description,date,source_urls\n"
      "1,Phone tracker,Tracks phones,2021-04-01,https://a.example/1\n"
      "2,Voice assistant,\"Says \"\"hi\"\", then records\",,https://a.example/2;https://b.example/2\n"
      "three,Bad id,The id is not a number,,\n"
      "4,Smartwatch,\"Line one\nline two\",2020-01-05,\n"
      "5,Tablet app,Kids tablet,,\n";
  const auto result = parse_incidents(csv, InputFormat::csv);
  REQUIRE(result.records.size() == 4);
  REQUIRE(result.skipped.size() == 1);
  CHECK(result.skipped[0].index == 2);
  CHECK(result.skipped[0].line == 4);
  CHECK(result.skipped[0].reason.find("incident_id") != std::string::npos);
  CHECK(result.records[1].description == "Says \"hi\", then records");
  CHECK(result.records[1].source_urls.size() == 2);
  CHECK(result.records[2].description == "Line one\nline two");
  CHECK(ids_of(result.records) == std::vector<IncidentId>{1, 2, 4, 5});
}

TEST_CASE("JSON inputs") {
  CHECK(parse_incidents("[]", InputFormat::json).records.empty());
  CHECK(parse_incidents("{\"incidents\": []}", InputFormat::json).records.empty());
  CHECK_THROWS_AS(parse_incidents("{\"x\": 1}", InputFormat::json), InputError);
  CHECK_THROWS_AS(parse_incidents("[", InputFormat::json), InputError);
  const auto result = parse_incidents(
      R"([{"incident_id": 1, "title": "a", "description": "b"}, {"title": "no id"}, 7])",
      InputFormat::json);
  CHECK(result.records.size() == 1);
  CHECK(result.skipped.size() == 2);
}

TEST_CASE("parse partitions the input") {
  const auto raw = read_json_file(testing::fixture_dir() / "incidents.json");
  json mixed = raw;
  mixed.push_back({{"incident_id", "x"}});
  mixed.push_back({{"incident_id", 5000}, {"title", ""}, {"description", "empty title"}});
  const auto result = parse_incidents(mixed.dump(), InputFormat::json);
  std::vector<std::size_t> indices;
  std::size_t r = 0;
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    const bool skipped = std::any_of(result.skipped.begin(), result.skipped.end(),
                                     [&](const SkippedEntry& s) { return s.index == i; });
    if (!skipped) {
      REQUIRE(r < result.records.size());
      CHECK(result.records[r++].incident_id == mixed[i]["incident_id"].get<IncidentId>());
    }
  }
  CHECK(r == result.records.size());
  CHECK(result.records.size() + result.skipped.size() == mixed.size());
}

TEST_CASE("invalid UTF-8 is an input error") {
  const std::string bad = "[{\"incident_id\": 1, \"title\": \"\xC3\x28\", \"description\": \"x\"}]";
  CHECK_FALSE(is_valid_utf8(bad));
  CHECK_THROWS_AS(parse_incidents(bad, InputFormat::json), InputError);
  CHECK_THROWS_AS(parse_incidents("incident_id,title,description\n1,\xFF,x\n", InputFormat::csv),
                  InputError);
  CHECK(is_valid_utf8("caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x93\xB1"));
  CHECK_FALSE(is_valid_utf8("\xED\xA0\x80"));  // surrogate
  CHECK_FALSE(is_valid_utf8("\xC0\xAF"));      // overlong
}

TEST_CASE("CSV header must name the required columns") {
  CHECK_THROWS_AS(parse_incidents("id,title\n1,x\n", InputFormat::csv), InputError);
}

TEST_CASE("deduplicate drops title duplicates") {
  const std::vector<IncidentRecord> records = {
      make(1, "Phone app leaks data"),      make(2, "Smartwatch misreads pulse"),
      make(3, "phone app LEAKS data!"),     make(4, "Tablet tutor bias"),
      make(5, "Smartwatch  misreads pulse"), make(6, "Voice assistant records"),
  };
  const auto kept = deduplicate(records);
  CHECK(kept.size() == 4);
  CHECK(ids_of(kept) == dedupe_oracle(records));
  CHECK(deduplicate(kept) == kept);
}

TEST_CASE("deduplicate matches the pairwise oracle on random inputs") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> titles = {"Alpha", "alpha.", "Beta", "Gamma", "BETA ", "Delta"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<IncidentRecord> records;
    const auto n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      records.push_back(make(std::uniform_int_distribution<IncidentId>(1, 8)(rng),
                             titles[std::uniform_int_distribution<std::size_t>(0, 5)(rng)]));
    }
    const auto kept = deduplicate(records);
    CHECK(ids_of(kept) == dedupe_oracle(records));
    CHECK(deduplicate(kept) == kept);
  }
}

TEST_CASE("filter_mobile against a grep oracle") {
  std::vector<IncidentRecord> records;
  for (IncidentId i = 1; i <= 10; ++i) {
    const bool hit = i == 2 || i == 5 || i == 9;
    records.push_back(make(i, "Incident " + std::to_string(i),
                           hit ? "A smartphone was involved." : "A desktop system was involved."));
  }
  const auto kept = filter_mobile(records, keywords({"smartphone"}));
  std::vector<IncidentId> oracle;
  for (const auto& r : records) {
    if (r.description.find("smartphone") != std::string::npos) oracle.push_back(r.incident_id);
  }
  CHECK(ids_of(kept) == oracle);
  CHECK(kept.size() == 3);
  CHECK(kept[0].matched_keywords == std::vector<std::string>{"smartphone"});
}

TEST_CASE("word-boundary matching") {
  const std::vector<IncidentRecord> records = {
      make(1, "New applications of AI"), make(2, "Ride app surge pricing"),
      make(3, "Fitness-tracker data"),   make(4, "Fitness tracking"),
      make(5, "iOS update"),
  };
  auto config = keywords({"app", "fitness tracker", "ios"});
  CHECK(ids_of(filter_mobile(records, config)) == std::vector<IncidentId>{2, 3, 5});
  config.match_mode = MatchMode::substring;
  CHECK(ids_of(filter_mobile(records, config)) == std::vector<IncidentId>{1, 2, 5});  // raw text: "fitness-tracker" lacks the space
}

TEST_CASE("filter_mobile is an order-preserving subsequence, monotone in keywords") {
  const auto parsed = parse_incidents(read_text_file(testing::fixture_dir() / "incidents.json"),
                                      InputFormat::json);
  const auto all = default_keywords();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> small;
    for (const auto& k : all) {
      if (rng() % 2) small.push_back(k);
    }
    if (small.empty()) small.push_back(all[0]);
    std::vector<std::string> large = small;
    large.push_back(all[rng() % all.size()]);
    const auto a = ids_of(filter_mobile(parsed.records, keywords(small)));
    const auto b = ids_of(filter_mobile(parsed.records, keywords(large)));
    const auto input = ids_of(parsed.records);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end(),
                        [&](IncidentId x, IncidentId y) {
                          return std::find(input.begin(), input.end(), x) <
                                 std::find(input.begin(), input.end(), y);
                        }));
    // subsequence of the input
    auto it = input.begin();
    for (IncidentId id : b) {
      it = std::find(it, input.end(), id);
      CHECK(it != input.end());
    }
  }
}

TEST_CASE("date range keeps undated records") {
  std::vector<IncidentRecord> records = {make(1, "phone"), make(2, "phone"), make(3, "phone")};
  records[0].date = "2019-12-31";
  records[1].date = "2020-06-01";
  auto config = keywords({"phone"});
  config.date_range = DateRange{"2020-01-01", "2020-12-31"};
  CHECK(ids_of(filter_mobile(records, config)) == std::vector<IncidentId>{2, 3});
  config.date_range = DateRange{"2021-01-01", "2020-01-01"};
  CHECK_THROWS_AS(config.validate(), InputError);
}

TEST_CASE("fixture ingest counts") {
  const auto tally = testing::expected_tally()["ingest"];
  const auto parsed = parse_incidents(read_text_file(testing::fixture_dir() / "incidents.json"),
                                      InputFormat::json);
  const auto unique = deduplicate(parsed.records);
  const auto kept = filter_mobile(unique, keywords(default_keywords()));
  CHECK(parsed.records.size() == tally["parsed"].get<std::size_t>());
  CHECK(parsed.skipped.size() == tally["skipped"].get<std::size_t>());
  CHECK(unique.size() == tally["unique"].get<std::size_t>());
  CHECK(kept.size() == tally["kept"].get<std::size_t>());
}

TEST_CASE("keyword files") {
  const auto dir = testing::scratch_dir("keywords");
  write_text_file(dir / "k.txt", "# mobile words\nPhone\n\n  Smart Watch \n");
  CHECK(load_keywords(dir / "k.txt") == std::vector<std::string>{"phone", "smart watch"});
  write_text_file(dir / "k.json", R"(["Tablet", "ios"])");
  CHECK(load_keywords(dir / "k.json") == std::vector<std::string>{"tablet", "ios"});
  CHECK_THROWS_AS(keywords({}).validate(), InputError);
}
