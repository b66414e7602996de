// atlas: command-line front end for every pipeline stage and the HTTP service.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "atlas/assessment.hpp"
#include "atlas/atlas_document.hpp"
#include "atlas/canonical_json.hpp"
#include "atlas/embedding.hpp"
#include "atlas/errors.hpp"
#include "atlas/formatter.hpp"
#include "atlas/ingestion.hpp"
#include "atlas/json_io.hpp"
#include "atlas/layout.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/service.hpp"

namespace {

using namespace atlas;

std::string now_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct IngestArgs {
  std::string input;
  std::string format = "json";
  std::string keywords;
  std::string out;
  std::string match_mode = "word_boundary";
  std::string date_start;
  std::string date_end;
};

int run_ingest(const IngestArgs& args) {
  ingestion::IngestConfig config;
  config.input_path = args.input;
  config.format = *ingestion::parse_input_format(args.format);
  config.keyword_list =
      args.keywords.empty() ? ingestion::default_keywords() : ingestion::load_keywords(args.keywords);
  config.match_mode = args.match_mode == "substring" ? ingestion::MatchMode::substring
                                                     : ingestion::MatchMode::word_boundary;
  if (!args.date_start.empty() || !args.date_end.empty()) {
    config.date_range = ingestion::DateRange{args.date_start.empty() ? "0000-01-01" : args.date_start,
                                             args.date_end.empty() ? "9999-12-31" : args.date_end};
  }
  const auto outcome = pipeline::ingest(config);
  write_json_file(args.out, outcome.filtered);
  write_json_file(args.out + ".skipped.json", ingestion::to_json(outcome.parsed.skipped));
  std::cerr << "parsed " << outcome.parsed.records.size() << ", skipped "
            << outcome.parsed.skipped.size() << ", unique " << outcome.deduplicated << ", kept "
            << outcome.filtered.size() << "\n";
  return 0;
}

struct FormatArgs {
  std::string input;
  std::string mode = "replay";
  std::string endpoint;
  std::string model;
  std::string cache;
  std::string out;
  std::string prompt_template;
  double timeout_seconds = 60.0;
  int max_retries = 2;
};

int run_format(const FormatArgs& args) {
  formatter::FormatterConfig config;
  config.mode = *formatter::parse_mode(args.mode);
  config.endpoint_url = args.endpoint;
  config.model_name = args.model;
  config.cache_path = args.cache;
  if (!args.prompt_template.empty()) config.prompt_template = read_text_file(args.prompt_template);
  config.timeout = std::chrono::milliseconds(static_cast<long long>(args.timeout_seconds * 1000.0));
  config.max_retries = args.max_retries;

  auto incidents = read_json_file(args.input).get<std::vector<IncidentRecord>>();
  formatter::Formatter fmt(config);
  auto batch = fmt.format_batch(incidents);
  assessment::DraftsFile drafts{batch.drafts, incidents, json::array()};
  for (const auto& f : batch.failures) {
    drafts.failures.push_back(formatter::to_json(f));
    std::cerr << "failed: incident " << f.incident_id << " (" << f.kind << "): " << f.message << "\n";
  }
  write_json_file(args.out, assessment::to_json(drafts));
  print_warnings(batch.warnings);
  std::cerr << batch.drafts.size() << " draft(s), " << batch.failures.size() << " failure(s)\n";
  return 0;
}

struct AssessArgs {
  std::string drafts;
  std::string annotations;
  std::string incidents;
  std::string out;
  std::string created_at;
  std::string source_snapshot;
};

int run_assess(const AssessArgs& args) {
  auto drafts = assessment::parse_drafts(read_json_file(args.drafts));
  if (!args.incidents.empty()) {
    drafts.incidents = read_json_file(args.incidents).get<std::vector<IncidentRecord>>();
  }
  const auto annotations = assessment::parse_annotations(read_json_file(args.annotations));
  const Dataset dataset = assessment::merge_annotations(
      {drafts.drafts, drafts.incidents, args.created_at.empty() ? now_utc() : args.created_at,
       args.source_snapshot},
      annotations);
  write_json_file(args.out, dataset);
  for (const auto& w : validate_dataset(dataset).warnings) {
    std::cerr << "warning: " << w.path << ": " << w.reason << "\n";
  }
  std::cout << json(dataset_summary(dataset)).dump(2) << "\n";
  return 0;
}

struct EmbedArgs {
  std::string dataset;
  std::string provider = "tfidf";
  std::string endpoint;
  std::string model;
  std::vector<std::string> fields;
  std::string out;
};

int run_embed(const EmbedArgs& args) {
  embedding::EmbeddingConfig config;
  config.provider = *embedding::parse_provider(args.provider);
  config.external_url = args.endpoint;
  config.model_name = args.model;
  if (!args.fields.empty()) {
    config.text_fields.clear();
    for (const auto& name : args.fields) {
      auto field = embedding::parse_text_field(name);
      if (!field) throw InputError("unknown text field '" + name + "'");
      config.text_fields.push_back(*field);
    }
  }
  const Dataset dataset = load_dataset(args.dataset);
  const auto matrix = embedding::embed_uses(dataset.uses, config);
  write_json_file(args.out, embedding::to_json(matrix));
  std::cerr << matrix.rows() << " x " << matrix.dims() << " embedding written\n";
  return 0;
}

struct LayoutArgs {
  std::string embeddings;
  std::string out;
  layout::TsneConfig config;
};

int run_layout(const LayoutArgs& args) {
  const auto matrix = embedding::embedding_from_json(read_json_file(args.embeddings));
  const auto result = layout::run_layout(matrix, args.config);
  write_json_file(args.out, layout::to_json(result));
  print_warnings(result.warnings);
  if (!result.kl_trace.empty()) {
    std::cerr << "KL " << result.kl_trace.front() << " -> " << result.kl_trace.back() << "\n";
  }
  return 0;
}

struct ExportArgs {
  std::string dataset;
  std::string layout;
  std::string narrative;
  std::string generated_at;
  std::string out;
};

int run_export(const ExportArgs& args) {
  ExportOptions options;
  if (!args.narrative.empty()) options.narrative = narrative_from_json(read_json_file(args.narrative));
  if (!args.generated_at.empty()) options.generated_at = args.generated_at;
  const auto atlas = export_atlas(load_dataset(args.dataset),
                                  layout::layout_from_json(read_json_file(args.layout)), options);
  write_text_file(args.out, serialize_atlas(atlas));
  std::cerr << atlas.uses.size() << " use(s) exported\n";
  return 0;
}

struct ServeArgs {
  std::string atlas;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

service::HttpService* g_service = nullptr;

int run_serve(const ServeArgs& args) {
  std::optional<std::filesystem::path> static_dir;
  if (!args.static_dir.empty()) static_dir = args.static_dir;
  service::HttpService server(args.atlas, args.host, args.port, static_dir);
  g_service = &server;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  std::cerr << "serving " << args.atlas << " on http://" << args.host << ":" << server.port() << "\n";
  server.wait();
  g_service = nullptr;
  return 0;
}

int run_pipeline_cmd(const std::string& config_path, const std::string& out_dir) {
  auto config = pipeline::load_pipeline_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  const auto report = pipeline::run_pipeline(config);
  print_warnings(report.warnings);
  std::cerr << "parsed " << report.parsed << ", skipped " << report.skipped << ", unique "
            << report.deduplicated << ", kept " << report.filtered << ", drafts " << report.drafts
            << "\n";
  std::cout << report.atlas_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds and serves an atlas of AI uses from incident records"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse, deduplicate and filter an incident dump");
  ingest_cmd->add_option("--input", ingest.input, "Incident dump")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--format", ingest.format)->check(CLI::IsMember({"json", "csv"}));
  ingest_cmd->add_option("--keywords", ingest.keywords, "Keyword file (JSON array or one per line)");
  ingest_cmd->add_option("--out", ingest.out)->required();
  ingest_cmd->add_option("--match-mode", ingest.match_mode)
      ->check(CLI::IsMember({"word_boundary", "substring"}));
  ingest_cmd->add_option("--date-start", ingest.date_start);
  ingest_cmd->add_option("--date-end", ingest.date_end);

  FormatArgs format;
  auto* format_cmd = app.add_subcommand("format", "Rewrite incidents into five-component drafts");
  format_cmd->add_option("--input", format.input)->required()->check(CLI::ExistingFile);
  format_cmd->add_option("--mode", format.mode)->check(CLI::IsMember({"live", "replay"}));
  format_cmd->add_option("--endpoint", format.endpoint, "Chat-completion URL (live)");
  format_cmd->add_option("--model", format.model, "Model name (live)");
  format_cmd->add_option("--cache", format.cache)->required();
  format_cmd->add_option("--out", format.out)->required();
  format_cmd->add_option("--prompt-template", format.prompt_template, "Template file");
  format_cmd->add_option("--timeout", format.timeout_seconds, "Seconds per request");
  format_cmd->add_option("--max-retries", format.max_retries);
  format_cmd->footer(std::string("The API credential is read from $") + formatter::kDefaultApiKeyEnv);

  AssessArgs assess;
  auto* assess_cmd = app.add_subcommand("assess", "Merge expert annotations into drafts");
  assess_cmd->add_option("--drafts", assess.drafts)->required()->check(CLI::ExistingFile);
  assess_cmd->add_option("--annotations", assess.annotations)->required()->check(CLI::ExistingFile);
  assess_cmd->add_option("--incidents", assess.incidents, "Override the drafts file's incidents");
  assess_cmd->add_option("--out", assess.out)->required();
  assess_cmd->add_option("--created-at", assess.created_at, "ISO-8601 timestamp (default: now)");
  assess_cmd->add_option("--source-snapshot", assess.source_snapshot);

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Embed every use of a dataset");
  embed_cmd->add_option("--dataset", embed.dataset)->required()->check(CLI::ExistingFile);
  embed_cmd->add_option("--provider", embed.provider)->check(CLI::IsMember({"tfidf", "external"}));
  embed_cmd->add_option("--endpoint", embed.endpoint, "Embedding URL (external)");
  embed_cmd->add_option("--model", embed.model);
  embed_cmd->add_option("--fields", embed.fields, "Components to embed");
  embed_cmd->add_option("--out", embed.out)->required();

  LayoutArgs layout_args;
  auto* layout_cmd = app.add_subcommand("layout", "Project embeddings to 2-D with t-SNE");
  layout_cmd->add_option("--embeddings", layout_args.embeddings)->required()->check(CLI::ExistingFile);
  layout_cmd->add_option("--seed", layout_args.config.seed);
  layout_cmd->add_option("--perplexity", layout_args.config.perplexity);
  layout_cmd->add_option("--iterations", layout_args.config.iterations);
  layout_cmd->add_option("--exaggeration-iters", layout_args.config.exaggeration_iters);
  layout_cmd->add_option("--learning-rate", layout_args.config.learning_rate);
  layout_cmd->add_option("--out", layout_args.out)->required();

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export", "Write the self-contained atlas document");
  export_cmd->add_option("--dataset", export_args.dataset)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--layout", export_args.layout)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--narrative", export_args.narrative, "Four-section narrative file");
  export_cmd->add_option("--generated-at", export_args.generated_at);
  export_cmd->add_option("--out", export_args.out)->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the atlas over HTTP");
  serve_cmd->add_option("--atlas", serve.atlas)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", serve.port);
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--static", serve.static_dir, "Frontend bundle directory");

  std::string pipeline_config;
  std::string pipeline_out;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage from one config file");
  pipeline_cmd->add_option("--config", pipeline_config)->required()->check(CLI::ExistingFile);
  pipeline_cmd->add_option("--out-dir", pipeline_out);

  std::string summary_dataset;
  auto* summary_cmd = app.add_subcommand("summary", "Print tier and SDG counts of a dataset");
  summary_cmd->add_option("--dataset", summary_dataset)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) return run_ingest(ingest);
    if (*format_cmd) return run_format(format);
    if (*assess_cmd) return run_assess(assess);
    if (*embed_cmd) return run_embed(embed);
    if (*layout_cmd) return run_layout(layout_args);
    if (*export_cmd) return run_export(export_args);
    if (*serve_cmd) return run_serve(serve);
    if (*pipeline_cmd) return run_pipeline_cmd(pipeline_config, pipeline_out);
    if (*summary_cmd) {
      std::cout << json(dataset_summary(load_dataset(summary_dataset))).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
