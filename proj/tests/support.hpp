#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atlas/assessment.hpp"
#include "atlas/atlas_document.hpp"
#include "atlas/embedding.hpp"
#include "atlas/domain.hpp"
#include "atlas/formatter.hpp"
#include "atlas/ingestion.hpp"
#include "atlas/json_io.hpp"

namespace atlas::testing {

inline std::filesystem::path fixture_dir() { return std::filesystem::path(ATLAS_FIXTURES) / "atlas12"; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("atlas-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// The incident #264 use exactly as worded in the source material.
inline UseRecord speedcam_use() {
  UseRecord use;
  use.use_id = "use-0001";
  use.incident_ids = {264};
  use.domain = "Law enforcement";
  use.purpose = "Documenting and reporting traffic violations from video data";
  use.capability = "Estimating vehicle speed from video data";
  use.ai_user = "mobile app users";
  use.ai_subject = "drivers";
  use.risk = RiskTier::high;
  use.sdg_impacts = {{11, SdgDirection::supports, {"Safer streets"}}};
  use.incident_examples = {"Drivers reported from unverified speed estimates"};
  return use;
}

inline formatter::FormatterConfig fixture_formatter_config() {
  formatter::FormatterConfig config;
  config.mode = formatter::Mode::replay;
  config.cache_path = fixture_dir() / "formatter_cache.json";
  config.prompt_template = read_text_file(fixture_dir() / "prompt_template.txt");
  return config;
}

/// Runs ingest + replay formatting + merge over the committed fixture files.
inline Dataset fixture_dataset() {
  ingestion::IngestConfig ingest;
  ingest.keyword_list = ingestion::default_keywords();
  const auto parsed = ingestion::parse_incidents(read_text_file(fixture_dir() / "incidents.json"),
                                                 ingestion::InputFormat::json);
  const auto filtered = ingestion::filter_mobile(ingestion::deduplicate(parsed.records), ingest);
  formatter::Formatter fmt(fixture_formatter_config());
  const auto batch = fmt.format_batch(filtered);
  const auto annotations =
      assessment::parse_annotations(read_json_file(fixture_dir() / "annotations.json"));
  return assessment::merge_annotations({batch.drafts, filtered, "2024-03-31T00:00:00Z", "fixture"},
                                       annotations);
}

inline layout::TsneConfig fixture_tsne_config() {
  layout::TsneConfig config;
  config.perplexity = 3;
  config.seed = 20240331;
  return config;
}

/// Fixture dataset laid out and exported with the default narrative and palette.
inline AtlasDocument fixture_atlas() {
  const Dataset dataset = fixture_dataset();
  const auto layout = layout::run_layout(embedding::embed_uses(dataset.uses, {}), fixture_tsne_config());
  return export_atlas(dataset, layout);
}

inline json expected_tally() { return read_json_file(fixture_dir() / "expected_tally.json"); }

/// Mean silhouette coefficient of `points` (rows) under `labels`, by
/// direct enumeration of Euclidean distances.
inline double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  const auto n = static_cast<std::size_t>(points.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, std::pair<double, int>> by_cluster;  // label -> (sum, count)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (Eigen::Index c = 0; c < points.cols(); ++c) {
        const double diff = points(static_cast<Eigen::Index>(i), c) - points(static_cast<Eigen::Index>(j), c);
        d += diff * diff;
      }
      auto& slot = by_cluster[labels[j]];
      slot.first += std::sqrt(d);
      slot.second += 1;
    }
    const auto own = by_cluster[labels[i]];
    if (own.second == 0) continue;  // singleton cluster scores 0
    const double a = own.first / own.second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, slot] : by_cluster) {
      if (label != labels[i] && slot.second > 0) b = std::min(b, slot.first / slot.second);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

/// Lowercase runs of ASCII letters and digits (bytes >= 0x80 count as letters).
inline std::vector<std::string> oracle_tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

/// Row-normalized TF-IDF straight from the definition: raw counts times
/// ln((1 + N) / (1 + df)) + 1, vocabulary in order of first appearance.
inline Eigen::MatrixXd tfidf_oracle(const std::vector<std::string>& docs, std::vector<std::string>& vocab,
                                    std::vector<double>* idf_out = nullptr) {
  std::vector<std::map<std::string, int>> counts(docs.size());
  vocab.clear();
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& w : oracle_tokenize(docs[d])) {
      if (std::find(vocab.begin(), vocab.end(), w) == vocab.end()) vocab.push_back(w);
      ++counts[d][w];
    }
  }
  const double n = static_cast<double>(docs.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()),
                                            static_cast<Eigen::Index>(vocab.size()));
  if (idf_out) idf_out->clear();
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    double df = 0;
    for (const auto& c : counts) df += c.contains(vocab[t]) ? 1 : 0;
    const double idf = std::log((1 + n) / (1 + df)) + 1;
    if (idf_out) idf_out->push_back(idf);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      auto it = counts[d].find(vocab[t]);
      if (it != counts[d].end()) m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = it->second * idf;
    }
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double norm = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) norm += m(r, c) * m(r, c);
    m.row(r) /= std::sqrt(norm);
  }
  return m;
}

/// Facet values a use carries, normalized the way a reader would type them.
inline std::vector<std::string> oracle_facet_values(const UseRecord& use, const std::string& facet) {
  if (facet == "domain") return {normalize_label(use.domain)};
  if (facet == "ai_user") return {normalize_label(use.ai_user)};
  if (facet == "ai_subject") return {normalize_label(use.ai_subject)};
  if (facet == "risk") return {std::string(to_string(use.risk))};
  std::vector<std::string> out;
  for (const auto& impact : use.sdg_impacts) out.push_back(std::to_string(impact.sdg_id));
  return out;
}

/// OR within a facet, AND across facets, by scanning every use.
inline std::set<std::string> linear_scan_filter(const std::vector<UseRecord>& uses,
                                                const std::map<std::string, std::set<std::string>>& selections) {
  std::set<std::string> out;
  for (const auto& use : uses) {
    bool keep = true;
    for (const auto& [facet, values] : selections) {
      bool any = false;
      for (const auto& v : oracle_facet_values(use, facet)) any = any || values.contains(v);
      keep = keep && any;
    }
    if (keep) out.insert(use.use_id);
  }
  return out;
}

/// Random selections drawn from the values present plus one absent value.
class SelectionSampler {
 public:
  SelectionSampler(const std::vector<UseRecord>& uses, std::uint64_t seed) : rng_(seed) {
    for (const char* facet : {"domain", "ai_user", "ai_subject", "risk", "sdg"}) {
      auto& values = pool_[facet];
      for (const auto& use : uses)
        for (auto& v : oracle_facet_values(use, facet)) values.push_back(std::move(v));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      values.push_back("not-a-value");
    }
  }
  std::map<std::string, std::set<std::string>> next() {
    std::map<std::string, std::set<std::string>> s;
    for (const auto& [facet, values] : pool_) {
      if (rng_() % 3 != 0) continue;
      auto& chosen = s[facet];
      const auto count = 1 + rng_() % 3;
      for (std::uint64_t i = 0; i < count; ++i) chosen.insert(values[rng_() % values.size()]);
    }
    return s;
  }
  const std::string& any_value(const std::string& facet) { return pool_.at(facet)[rng_() % pool_.at(facet).size()]; }
  std::uint64_t roll() { return rng_(); }

 private:
  std::mt19937_64 rng_;
  std::map<std::string, std::vector<std::string>> pool_;
};

}  // namespace atlas::testing
