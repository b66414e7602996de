#include "atlas/search.hpp"

#include <algorithm>

#include "atlas/errors.hpp"
#include "atlas/text.hpp"

namespace atlas::search {

bool is_facet_name(std::string_view name) {
  return std::find(std::begin(kFacetNames), std::end(kFacetNames), name) != std::end(kFacetNames);
}

json to_json(const SearchHit& hit) {
  return json{{"use_id", hit.use_id}, {"score", hit.score}, {"matched_terms", hit.matched_terms}};
}

std::string facet_value(std::string_view facet, std::string_view raw) {
  if (facet == "sdg") {
    const std::string trimmed = trim(raw);
    std::size_t consumed = 0;
    try {
      const int id = std::stoi(trimmed, &consumed);
      if (consumed == trimmed.size()) return std::to_string(id);
    } catch (const std::exception&) {
    }
    return normalize_label(raw);
  }
  return normalize_label(raw);
}

SearchIndex SearchIndex::build(std::vector<UseRecord> uses, std::vector<embedding::TextField> fields) {
  SearchIndex index;
  index.uses_ = std::move(uses);
  for (const char* name : kFacetNames) index.facets_[name];

  std::vector<std::string> documents;
  for (std::size_t i = 0; i < index.uses_.size(); ++i) {
    const auto& use = index.uses_[i];
    index.position_.emplace(use.use_id, i);
    index.facets_["domain"][normalize_label(use.domain)].insert(use.use_id);
    index.facets_["ai_user"][normalize_label(use.ai_user)].insert(use.use_id);
    index.facets_["ai_subject"][normalize_label(use.ai_subject)].insert(use.use_id);
    index.facets_["risk"][std::string(to_string(use.risk))].insert(use.use_id);
    for (const auto& impact : use.sdg_impacts) {
      index.facets_["sdg"][std::to_string(impact.sdg_id)].insert(use.use_id);
    }
    documents.push_back(embedding::build_document(use, fields));
    const auto tokens = text::tokenize(documents.back());
    index.document_terms_.emplace_back(tokens.begin(), tokens.end());
  }
  if (!documents.empty()) index.model_ = embedding::TfidfModel::fit(documents);
  return index;
}

const UseRecord* SearchIndex::find(const std::string& use_id) const {
  auto it = position_.find(use_id);
  return it == position_.end() ? nullptr : &uses_[it->second];
}

std::set<std::string> SearchIndex::all_ids() const {
  std::set<std::string> ids;
  for (const auto& use : uses_) ids.insert(use.use_id);
  return ids;
}

std::vector<SearchHit> SearchIndex::search(std::string_view query, std::size_t limit) const {
  if (limit == 0) throw InputError("search limit must be positive");
  std::vector<SearchHit> hits;
  if (!model_) return hits;
  const Eigen::VectorXd weights = model_->weights(query);
  const double norm = weights.norm();
  if (!(norm > 0.0)) return hits;
  const Eigen::VectorXd scores = model_->corpus() * (weights / norm);

  std::vector<std::string> query_terms;
  for (auto& token : text::tokenize(query)) {
    if (std::find(query_terms.begin(), query_terms.end(), token) == query_terms.end()) {
      query_terms.push_back(std::move(token));
    }
  }
  for (Eigen::Index r = 0; r < scores.size(); ++r) {
    if (!(scores(r) > 0.0)) continue;
    SearchHit hit;
    hit.use_id = uses_[static_cast<std::size_t>(r)].use_id;
    hit.score = std::min(1.0, scores(r));
    for (const auto& term : query_terms) {
      if (document_terms_[static_cast<std::size_t>(r)].contains(term)) hit.matched_terms.push_back(term);
    }
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.use_id < b.use_id;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

std::set<std::string> SearchIndex::filter(const FacetSelections& selections) const {
  for (const auto& [facet, values] : selections) {
    if (!is_facet_name(facet)) throw InputError("unknown facet '" + facet + "'");
  }
  std::set<std::string> result = all_ids();
  for (const auto& [facet, values] : selections) {
    const auto& by_value = facets_.at(facet);
    std::set<std::string> matched;
    for (const auto& raw : values) {
      auto it = by_value.find(facet_value(facet, raw));
      if (it != by_value.end()) matched.insert(it->second.begin(), it->second.end());
    }
    std::set<std::string> narrowed;
    std::set_intersection(result.begin(), result.end(), matched.begin(), matched.end(),
                          std::inserter(narrowed, narrowed.end()));
    result = std::move(narrowed);
  }
  return result;
}

json SearchIndex::facet_counts() const {
  json out = json::object();
  for (const auto& [facet, by_value] : facets_) {
    json counts = json::object();
    for (const auto& [value, ids] : by_value) counts[value] = ids.size();
    out[facet] = std::move(counts);
  }
  return out;
}

}  // namespace atlas::search
