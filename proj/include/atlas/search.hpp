#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atlas/domain.hpp"
#include "atlas/embedding.hpp"
#include "atlas/json_io.hpp"

namespace atlas::search {

inline constexpr const char* kFacetNames[] = {"domain", "ai_user", "ai_subject", "risk", "sdg"};

bool is_facet_name(std::string_view name);

/// facet name -> normalized value -> use ids carrying that value.
using FacetIndex = std::map<std::string, std::map<std::string, std::set<std::string>>>;

/// facet name -> selected values. Values within a facet are OR-ed; facets are AND-ed.
using FacetSelections = std::map<std::string, std::set<std::string>>;

struct SearchHit {
  std::string use_id;
  double score = 0.0;  // cosine similarity in (0, 1]
  std::vector<std::string> matched_terms;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

json to_json(const SearchHit& hit);

/// Normalized facet value as stored in the index; e.g. SDG 3 -> "3".
std::string facet_value(std::string_view facet, std::string_view raw);

class SearchIndex {
 public:
  /// Immutable once built. Documents come from build_document over `fields`.
  static SearchIndex build(std::vector<UseRecord> uses,
                           std::vector<embedding::TextField> fields = embedding::EmbeddingConfig{}.text_fields);

  const FacetIndex& facets() const { return facets_; }
  const std::vector<UseRecord>& uses() const { return uses_; }
  const UseRecord* find(const std::string& use_id) const;
  std::set<std::string> all_ids() const;

  /// Ranked by (score desc, use_id asc); at most `limit` hits. A query with
  /// no known terms yields no hits. Throws InputError when limit is zero.
  std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;

  /// Throws InputError on an unknown facet name. An empty map selects all uses.
  std::set<std::string> filter(const FacetSelections& selections) const;

  /// facet -> value -> count.
  json facet_counts() const;

 private:
  std::vector<UseRecord> uses_;
  std::unordered_map<std::string, std::size_t> position_;
  FacetIndex facets_;
  std::optional<embedding::TfidfModel> model_;
  std::vector<std::set<std::string>> document_terms_;
};

}  // namespace atlas::search
