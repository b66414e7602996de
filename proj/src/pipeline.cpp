#include "atlas/pipeline.hpp"

#include "atlas/assessment.hpp"
#include "atlas/errors.hpp"

namespace atlas::pipeline {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("pipeline config '") + key + "': " + e.what());
  }
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object()) throw InputError("pipeline config must be a JSON object");
  const auto base = path.parent_path();
  PipelineConfig config;

  // Ingestion.
  if (!doc.contains("input")) throw InputError("pipeline config lacks 'input'");
  config.ingest.input_path = resolve(base, doc.at("input").get<std::string>());
  const auto format_name = value_or<std::string>(doc, "format", "json");
  auto format = ingestion::parse_input_format(format_name);
  if (!format) throw InputError("unknown input format '" + format_name + "'");
  config.ingest.format = *format;
  if (doc.contains("keywords")) {
    for (const auto& k : value_or<std::vector<std::string>>(doc, "keywords", {})) {
      config.ingest.keyword_list.push_back(normalize_label(k));
    }
  } else if (doc.contains("keywords_file")) {
    config.ingest.keyword_list =
        ingestion::load_keywords(resolve(base, doc.at("keywords_file").get<std::string>()));
  } else {
    config.ingest.keyword_list = ingestion::default_keywords();
  }
  const auto match_mode = value_or<std::string>(doc, "match_mode", "word_boundary");
  if (match_mode == "substring") {
    config.ingest.match_mode = ingestion::MatchMode::substring;
  } else if (match_mode != "word_boundary") {
    throw InputError("unknown match_mode '" + match_mode + "'");
  }
  if (doc.contains("date_range")) {
    const auto& range = doc.at("date_range");
    config.ingest.date_range = ingestion::DateRange{value_or<std::string>(range, "start", ""),
                                                    value_or<std::string>(range, "end", "")};
  }

  // Formatting.
  const json fmt = doc.value("formatter", json::object());
  const auto mode_name = value_or<std::string>(fmt, "mode", "replay");
  auto mode = formatter::parse_mode(mode_name);
  if (!mode) throw InputError("unknown formatter mode '" + mode_name + "'");
  config.formatter.mode = *mode;
  config.formatter.endpoint_url = value_or<std::string>(fmt, "endpoint", "");
  config.formatter.model_name = value_or<std::string>(fmt, "model", "");
  if (fmt.contains("cache")) config.formatter.cache_path = resolve(base, fmt.at("cache").get<std::string>());
  if (fmt.contains("prompt_template_file")) {
    config.formatter.prompt_template =
        read_text_file(resolve(base, fmt.at("prompt_template_file").get<std::string>()));
  }
  config.formatter.timeout = std::chrono::milliseconds(
      static_cast<long long>(1000.0 * value_or<double>(fmt, "timeout_seconds", 60.0)));
  config.formatter.max_retries = value_or<int>(fmt, "max_retries", 2);

  // Assessment.
  if (!doc.contains("annotations")) throw InputError("pipeline config lacks 'annotations'");
  config.annotations_path = resolve(base, doc.at("annotations").get<std::string>());
  config.created_at = value_or<std::string>(doc, "created_at", "");
  if (config.created_at.empty()) throw InputError("pipeline config lacks 'created_at'");
  config.source_snapshot = value_or<std::string>(doc, "source_snapshot", "");

  // Embedding.
  const json emb = doc.value("embedding", json::object());
  const auto provider_name = value_or<std::string>(emb, "provider", "tfidf");
  auto provider = embedding::parse_provider(provider_name);
  if (!provider) throw InputError("unknown embedding provider '" + provider_name + "'");
  config.embedding.provider = *provider;
  config.embedding.external_url = value_or<std::string>(emb, "endpoint", "");
  config.embedding.model_name = value_or<std::string>(emb, "model", "");
  if (emb.contains("text_fields")) {
    config.embedding.text_fields.clear();
    for (const auto& name : value_or<std::vector<std::string>>(emb, "text_fields", {})) {
      auto field = embedding::parse_text_field(name);
      if (!field) throw InputError("unknown text field '" + name + "'");
      config.embedding.text_fields.push_back(*field);
    }
  }

  // Layout and export.
  config.tsne = layout::tsne_config_from_json(doc.value("tsne", json::object()));
  if (doc.contains("narrative")) {
    config.export_options.narrative =
        narrative_from_json(read_json_file(resolve(base, doc.at("narrative").get<std::string>())));
  }
  if (doc.contains("palette")) config.export_options.palette = palette_from_json(doc.at("palette"));
  config.out_dir = resolve(base, value_or<std::string>(doc, "out_dir", "out"));
  return config;
}

IngestOutcome ingest(const ingestion::IngestConfig& config) {
  config.validate();
  IngestOutcome outcome;
  outcome.parsed = ingestion::parse_incidents(read_text_file(config.input_path), config.format);
  const auto unique = ingestion::deduplicate(outcome.parsed.records);
  outcome.deduplicated = unique.size();
  outcome.filtered = ingestion::filter_mobile(unique, config);
  return outcome;
}

PipelineReport run_pipeline(const PipelineConfig& config) {
  PipelineReport report;
  const auto& dir = config.out_dir;
  std::filesystem::create_directories(dir);

  auto ingested = ingest(config.ingest);
  report.parsed = ingested.parsed.records.size();
  report.skipped = ingested.parsed.skipped.size();
  report.deduplicated = ingested.deduplicated;
  report.filtered = ingested.filtered.size();
  write_json_file(dir / "incidents.json", ingested.filtered);
  write_json_file(dir / "incidents.json.skipped.json", ingestion::to_json(ingested.parsed.skipped));

  formatter::Formatter fmt(config.formatter);
  auto batch = fmt.format_batch(ingested.filtered);
  assessment::DraftsFile drafts{batch.drafts, ingested.filtered, json::array()};
  for (const auto& failure : batch.failures) drafts.failures.push_back(formatter::to_json(failure));
  write_json_file(dir / "drafts.json", assessment::to_json(drafts));
  report.drafts = batch.drafts.size();
  report.warnings.insert(report.warnings.end(), batch.warnings.begin(), batch.warnings.end());
  if (!batch.failures.empty()) {
    throw Error("formatting failed for " + std::to_string(batch.failures.size()) +
                " incident(s); see " + (dir / "drafts.json").string());
  }

  const auto annotations = assessment::parse_annotations(read_json_file(config.annotations_path));
  const Dataset dataset = assessment::merge_annotations(
      {batch.drafts, ingested.filtered, config.created_at, config.source_snapshot}, annotations);
  write_json_file(dir / "dataset.json", dataset);
  report.summary = dataset_summary(dataset);
  for (const auto& w : validate_dataset(dataset).warnings) {
    report.warnings.push_back(w.path + ": " + w.reason);
  }

  const auto embeddings = embedding::embed_uses(dataset.uses, config.embedding);
  write_json_file(dir / "embeddings.json", embedding::to_json(embeddings));

  const auto layout = layout::run_layout(embeddings, config.tsne);
  write_json_file(dir / "layout.json", layout::to_json(layout));
  report.warnings.insert(report.warnings.end(), layout.warnings.begin(), layout.warnings.end());

  const auto atlas = export_atlas(dataset, layout, config.export_options);
  report.atlas_path = dir / "atlas.json";
  write_text_file(report.atlas_path, serialize_atlas(atlas));
  return report;
}

}  // namespace atlas::pipeline
