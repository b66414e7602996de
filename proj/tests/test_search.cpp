#include <doctest.h>

#include <algorithm>
#include <random>

#include "atlas/embedding.hpp"
#include "atlas/errors.hpp"
#include "atlas/search.hpp"
#include "support.hpp"

using namespace atlas;
using namespace atlas::search;

namespace {

const std::vector<UseRecord>& fixture_uses() {
  static const auto uses = testing::fixture_dataset().uses;
  return uses;
}

std::set<std::string> oracle_filter(const FacetSelections& selections) {
  return testing::linear_scan_filter(fixture_uses(), selections);
}

}  // namespace

TEST_CASE("every document ranks itself first") {
  const auto index = SearchIndex::build(fixture_uses());
  for (const auto& use : fixture_uses()) {
    const auto hits = index.search(embedding::build_document(use, embedding::EmbeddingConfig{}.text_fields), 5);
    REQUIRE_FALSE(hits.empty());
    CHECK(hits[0].use_id == use.use_id);
    CHECK(std::abs(hits[0].score - 1.0) < 1e-9);
  }
}

TEST_CASE("scores match a cosine oracle") {
  const auto index = SearchIndex::build(fixture_uses());
  std::vector<std::string> docs;
  for (const auto& use : fixture_uses()) docs.push_back(embedding::build_document(use, embedding::EmbeddingConfig{}.text_fields));
  std::vector<std::string> vocab;
  std::vector<double> idf;
  const auto corpus = testing::tfidf_oracle(docs, vocab, &idf);

  for (const std::string query : {"drivers", "video data speed", "App users app", "facial recognition drivers zebra"}) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
    for (const auto& w : testing::oracle_tokenize(query)) {
      auto it = std::find(vocab.begin(), vocab.end(), w);
      if (it != vocab.end()) q(it - vocab.begin()) += idf[static_cast<std::size_t>(it - vocab.begin())];
    }
    std::vector<std::pair<double, std::string>> expected;
    if (q.norm() > 0) {
      const Eigen::VectorXd s = corpus * q.normalized();
      for (Eigen::Index r = 0; r < s.size(); ++r)
        if (s(r) > 0) expected.emplace_back(-s(r), fixture_uses()[static_cast<std::size_t>(r)].use_id);
    }
    std::sort(expected.begin(), expected.end());
    const auto hits = index.search(query, 100);
    REQUIRE(hits.size() == expected.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(std::abs(hits[i].score + expected[i].first) < 1e-9);
      if (i > 0) CHECK((hits[i - 1].score > hits[i].score ||
                        (hits[i - 1].score == hits[i].score && hits[i - 1].use_id < hits[i].use_id)));
      for (const auto& term : hits[i].matched_terms) CHECK(query.find(term) != std::string::npos);
    }
  }
}

TEST_CASE("empty and unknown queries") {
  const auto index = SearchIndex::build(fixture_uses());
  CHECK(index.search("", 10).empty());
  CHECK(index.search("   ", 10).empty());
  CHECK(index.search("xylophone", 10).empty());
  CHECK(index.search("drivers", 1).size() == 1);
  CHECK_THROWS_AS(index.search("drivers", 0), InputError);
  CHECK(SearchIndex::build({}).search("drivers", 10).empty());
}

TEST_CASE("filter agrees with a linear scan on random selections") {
  const auto index = SearchIndex::build(fixture_uses());
  testing::SelectionSampler sampler(fixture_uses(), 2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto selection = sampler.next();
    CHECK(index.filter(selection) == oracle_filter(selection));
  }
}

TEST_CASE("filter monotonicity") {
  const auto index = SearchIndex::build(fixture_uses());
  testing::SelectionSampler sampler(fixture_uses(), 99);
  for (int trial = 0; trial < 100; ++trial) {
    auto selection = sampler.next();
    const auto base = index.filter(selection);
    // Another value within a facet can only widen.
    if (!selection.empty()) {
      auto wider = selection;
      auto& [facet, values] = *wider.begin();
      values.insert(sampler.any_value(facet));
      const auto widened = index.filter(wider);
      CHECK(std::includes(widened.begin(), widened.end(), base.begin(), base.end()));
    }
    // Another facet can only narrow.
    auto narrower = selection;
    const std::string facet = kFacetNames[sampler.roll() % 5];
    if (!narrower.contains(facet)) {
      narrower[facet].insert(sampler.any_value(facet));
      const auto narrowed = index.filter(narrower);
      CHECK(std::includes(base.begin(), base.end(), narrowed.begin(), narrowed.end()));
    }
  }
}

TEST_CASE("filter edge cases") {
  const auto index = SearchIndex::build(fixture_uses());
  CHECK(index.filter({}) == index.all_ids());
  CHECK_THROWS_AS(index.filter({{"color", {"red"}}}), InputError);
  CHECK(index.filter({{"risk", {}}}).empty());
  CHECK(index.filter({{"domain", {"  LAW   Enforcement "}}}) == oracle_filter({{"domain", {"law enforcement"}}}));
  CHECK(index.filter({{"sdg", {"05"}}}) == oracle_filter({{"sdg", {"5"}}}));
}

TEST_CASE("facet counts equal the hand tally") {
  const auto counts = SearchIndex::build(fixture_uses()).facet_counts();
  const auto tally = testing::expected_tally()["facets"];
  for (const auto& [facet, expected] : tally.items()) CHECK(counts[facet] == expected);
  for (const char* facet : kFacetNames) {
    std::size_t total = 0;
    for (const auto& [value, n] : counts[facet].items()) total += n.get<std::size_t>();
    if (std::string(facet) != "sdg") CHECK(total == fixture_uses().size());
  }
}
