#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "atlas/atlas_document.hpp"
#include "atlas/embedding.hpp"
#include "atlas/formatter.hpp"
#include "atlas/ingestion.hpp"
#include "atlas/layout.hpp"

namespace atlas::pipeline {

/// Every stage of the pipeline, read from one JSON file. Relative paths are
/// resolved against the config file's directory.
struct PipelineConfig {
  ingestion::IngestConfig ingest;
  formatter::FormatterConfig formatter;
  std::filesystem::path annotations_path;
  std::string created_at;
  std::string source_snapshot;
  embedding::EmbeddingConfig embedding;
  layout::TsneConfig tsne;
  ExportOptions export_options;
  std::filesystem::path out_dir;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct IngestOutcome {
  ingestion::ParseResult parsed;
  std::size_t deduplicated = 0;
  std::vector<IncidentRecord> filtered;
};

/// parse -> deduplicate -> filter_mobile on the configured input file.
IngestOutcome ingest(const ingestion::IngestConfig& config);

struct PipelineReport {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t deduplicated = 0;
  std::size_t filtered = 0;
  std::size_t drafts = 0;
  SummaryStats summary;
  std::vector<std::string> warnings;
  std::filesystem::path atlas_path;
};

/// Runs every stage and writes each artifact into out_dir:
/// incidents.json (+ .skipped.json), drafts.json, dataset.json,
/// embeddings.json, layout.json, atlas.json.
PipelineReport run_pipeline(const PipelineConfig& config);

}  // namespace atlas::pipeline
