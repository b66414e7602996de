#pragma once

#include <string>
#include <vector>

#include "atlas/embedding.hpp"
#include "atlas/json_io.hpp"
#include "atlas/layout/tsne.hpp"

namespace atlas::layout {

struct LayoutResult {
  std::vector<std::string> row_ids;
  Points2<double> coordinates;
  std::vector<double> kl_trace;
  TsneConfig config;
  std::vector<std::string> warnings;

  /// Finite coordinates inside [0, 1]^2 and one per row id.
  ValidationReport validate() const;
};

/// t-SNE over the rows of an embedding matrix; row ids are carried over.
LayoutResult run_layout(const embedding::EmbeddingMatrix& embeddings, const TsneConfig& config,
                        const IterationObserver<double>& observer = {});

json to_json(const TsneConfig& config);
TsneConfig tsne_config_from_json(const json& document, TsneConfig defaults = {});

json to_json(const LayoutResult& layout);
LayoutResult layout_from_json(const json& document);

}  // namespace atlas::layout
