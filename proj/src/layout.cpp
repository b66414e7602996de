#include "atlas/layout.hpp"

#include <set>

namespace atlas::layout {

ValidationReport LayoutResult::validate() const {
  ValidationReport report;
  if (static_cast<Eigen::Index>(row_ids.size()) != coordinates.rows()) {
    report.violations.push_back({"coordinates", "expected " + std::to_string(row_ids.size()) +
                                                    " points, found " +
                                                    std::to_string(coordinates.rows())});
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    if (!seen.insert(row_ids[i]).second) {
      report.violations.push_back({"row_ids[" + std::to_string(i) + "]", "duplicate id " + row_ids[i]});
    }
  }
  for (Eigen::Index r = 0; r < coordinates.rows(); ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      const double v = coordinates(r, c);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        report.violations.push_back({"coordinates[" + std::to_string(r) + "]",
                                     "coordinate outside [0, 1]"});
        break;
      }
    }
  }
  return report;
}

LayoutResult run_layout(const embedding::EmbeddingMatrix& embeddings, const TsneConfig& config,
                        const IterationObserver<double>& observer) {
  auto output = run_tsne(embeddings.vectors, config, observer);
  LayoutResult result;
  result.row_ids = embeddings.row_ids;
  result.coordinates = std::move(output.coordinates);
  result.kl_trace = std::move(output.kl_trace);
  result.config = config;
  result.warnings = std::move(output.warnings);
  return result;
}

json to_json(const TsneConfig& config) {
  return json{{"perplexity", config.perplexity},
              {"iterations", config.iterations},
              {"early_exaggeration_factor", config.early_exaggeration_factor},
              {"exaggeration_iters", config.exaggeration_iters},
              {"learning_rate", config.learning_rate},
              {"momentum_initial", config.momentum_initial},
              {"momentum_final", config.momentum_final},
              {"seed", config.seed},
              {"entropy_tolerance", config.entropy_tolerance},
              {"max_bisection_steps", config.max_bisection_steps}};
}

TsneConfig tsne_config_from_json(const json& document, TsneConfig config) {
  if (!document.is_object()) throw InputError("t-SNE config must be an object");
  try {
    config.perplexity = document.value("perplexity", config.perplexity);
    config.iterations = document.value("iterations", config.iterations);
    config.early_exaggeration_factor =
        document.value("early_exaggeration_factor", config.early_exaggeration_factor);
    config.exaggeration_iters = document.value("exaggeration_iters", config.exaggeration_iters);
    config.learning_rate = document.value("learning_rate", config.learning_rate);
    config.momentum_initial = document.value("momentum_initial", config.momentum_initial);
    config.momentum_final = document.value("momentum_final", config.momentum_final);
    config.seed = document.value("seed", config.seed);
    config.entropy_tolerance = document.value("entropy_tolerance", config.entropy_tolerance);
    config.max_bisection_steps = document.value("max_bisection_steps", config.max_bisection_steps);
  } catch (const json::exception& e) {
    throw InputError(std::string("t-SNE config: ") + e.what());
  }
  return config;
}

json to_json(const LayoutResult& layout) {
  json coordinates = json::array();
  for (Eigen::Index r = 0; r < layout.coordinates.rows(); ++r) {
    coordinates.push_back({layout.coordinates(r, 0), layout.coordinates(r, 1)});
  }
  return json{{"row_ids", layout.row_ids},
              {"coordinates", coordinates},
              {"kl_trace", layout.kl_trace},
              {"config", to_json(layout.config)}};
}

LayoutResult layout_from_json(const json& document) {
  LayoutResult layout;
  try {
    layout.row_ids = document.at("row_ids").get<std::vector<std::string>>();
    const auto& coordinates = document.at("coordinates");
    layout.coordinates.resize(static_cast<Eigen::Index>(coordinates.size()), 2);
    for (std::size_t r = 0; r < coordinates.size(); ++r) {
      const auto& point = coordinates[r];
      if (!point.is_array() || point.size() != 2) {
        throw InputError("coordinates[" + std::to_string(r) + "] is not an [x, y] pair");
      }
      layout.coordinates(static_cast<Eigen::Index>(r), 0) = point[0].get<double>();
      layout.coordinates(static_cast<Eigen::Index>(r), 1) = point[1].get<double>();
    }
    layout.kl_trace = document.value("kl_trace", std::vector<double>{});
    if (document.contains("config")) layout.config = tsne_config_from_json(document.at("config"));
  } catch (const json::exception& e) {
    throw InputError(std::string("layout file: ") + e.what());
  }
  if (auto report = layout.validate(); !report.ok()) throw ValidationError(report.messages());
  return layout;
}

}  // namespace atlas::layout
