// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "atlas/errors.hpp"
#include "atlas/layout/tsne.hpp"
#include "atlas/search.hpp"
#include "atlas/service.hpp"
#include "support.hpp"

// After Eigen: <resolv.h> defines a `_res` macro.
#include <httplib.h>

using namespace atlas;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string command = std::string("\"") + ATLAS_CLI + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = normal(rng);
  return x;
}

Outcome pipeline_determinism() {
  const auto dir = testing::scratch_dir("accept-pipeline");
  const std::string config = "\"" + (testing::fixture_dir() / "pipeline.json").string() + "\"";
  double slowest = 0;
  for (const char* run : {"a", "b"}) {
    const auto start = std::chrono::steady_clock::now();
    const int status = run_cli("pipeline --config " + config + " --out-dir \"" + (dir / run).string() + "\"");
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (status != 0) return check(false, std::string("run ") + run + " exited " + std::to_string(status));
  }
  const bool same = read_text_file(dir / "a" / "atlas.json") == read_text_file(dir / "b" / "atlas.json");
  return check(same && slowest < 10.0,
               std::string(same ? "byte-identical" : "bytes differ") + ", slowest run " + fmt(slowest) + " s");
}

Outcome dataset_invariants() {
  const Dataset dataset = testing::fixture_dataset();
  const auto report = validate_dataset(dataset);
  const auto stats = dataset_summary(dataset);
  bool examples_ok = true;
  for (const auto& use : dataset.uses)
    for (const auto& impact : use.sdg_impacts)
      examples_ok = examples_ok && !impact.examples.empty() && impact.examples.size() <= 3;
  const bool partition = stats.low + stats.high + stats.unacceptable == stats.total_uses;
  const bool tally = json(stats) == testing::expected_tally()["summary"];
  return check(report.ok() && examples_ok && partition && tally,
               std::to_string(report.violations.size()) + " violations, tiers " + std::to_string(stats.low) + "/" +
                   std::to_string(stats.high) + "/" + std::to_string(stats.unacceptable) +
                   (tally ? ", matches hand tally" : ", differs from hand tally"));
}

Outcome gradient_check() {
  const auto x = gaussian_matrix(10, 5, 42);
  const Eigen::MatrixXd p = layout::symmetrize(
      layout::conditional_affinities<double>(layout::squared_distances(x), 3.0, 1e-5, 50).p);
  const layout::Points2<double> y = gaussian_matrix(10, 2, 43);
  const auto analytic = layout::kl_gradient(p, y);
  const double h = 1e-6;
  double worst = 0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      layout::Points2<double> plus = y, minus = y;
      plus(i, c) += h;
      minus(i, c) -= h;
      const double numeric = (layout::kl_divergence(p, plus) - layout::kl_divergence(p, minus)) / (2 * h);
      worst = std::max(worst, std::abs(analytic(i, c) - numeric) / std::max(std::abs(analytic(i, c)), std::abs(numeric)));
    }
  }
  return check(worst < 1e-4, "max relative error " + fmt(worst));
}

Outcome perplexity_calibration() {
  Eigen::MatrixXd line(5, 1);
  line << 0, 1, 2, 3, 4;
  const auto aff = layout::conditional_affinities<double>(layout::squared_distances(line), 2.0, 1e-5, 50);
  double worst_perp = 0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    double h = 0;
    for (Eigen::Index j = 0; j < 5; ++j)
      if (j != i && aff.p(i, j) > 0) h -= aff.p(i, j) * std::log2(aff.p(i, j));
    worst_perp = std::max(worst_perp, std::abs(std::exp2(h) - 2.0));
  }
  const auto simplex = layout::conditional_affinities<double>(
      layout::squared_distances(Eigen::MatrixXd::Identity(4, 4)), 2.0, 1e-5, 50);
  double worst_uniform = 0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != j) worst_uniform = std::max(worst_uniform, std::abs(simplex.p(i, j) - 1.0 / 3.0));
  return check(worst_perp < 1e-3 && worst_uniform < 1e-9,
               "perplexity error " + fmt(worst_perp) + ", simplex deviation " + fmt(worst_uniform));
}

Outcome optimization_sanity() {
  const Dataset dataset = testing::fixture_dataset();
  const auto embedding = embedding::embed_uses(dataset.uses, {});
  const auto config = testing::fixture_tsne_config();
  double worst_q = 0;
  const auto first = layout::run_tsne(embedding.vectors, config, [&](const layout::IterationState<double>& s) {
    worst_q = std::max(worst_q, std::abs(s.q_sum - 1.0));
  });
  const auto second = layout::run_tsne(embedding.vectors, config);
  const bool identical = first.coordinates == second.coordinates;
  const bool decreased = first.kl_trace.back() < first.kl_trace.front();
  return check(decreased && worst_q < 1e-9 && identical,
               "KL " + fmt(first.kl_trace.front()) + " -> " + fmt(first.kl_trace.back()) + ", max |sum q - 1| " +
                   fmt(worst_q) + (identical ? ", repeat run bit-identical" : ", repeat run differs"));
}

Outcome cluster_recovery() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(15, 10);
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 5; ++k) {
        for (Eigen::Index j = 0; j < 10; ++j) x(c * 5 + k, j) = 0.5 * normal(rng);
        x(c * 5 + k, c) += 10.0;
        labels.push_back(c);
      }
    }
    layout::TsneConfig config;
    config.perplexity = 4;
    config.seed = 20240331;
    const double s = testing::silhouette(layout::run_tsne(x, config).coordinates, labels);
    ok = ok && s > 0.5;
    detail += (detail.empty() ? "silhouette " : ", ") + fmt(s);
  }
  return check(ok, detail);
}

Outcome tfidf_oracle() {
  // Closed form: phone and app each appear in two of four documents, camera
  // and watch in one, so idf = ln(5/3) + 1 and ln(5/2) + 1 respectively.
  const std::vector<std::string> docs = {"phone app", "phone camera", "app app", "watch"};
  const double a = std::log(5.0 / 3.0) + 1;
  const double b = std::log(5.0 / 2.0) + 1;
  const double r = std::sqrt(a * a + b * b);
  Eigen::MatrixXd expected(4, 4);
  expected << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0, 0,
              a / r, 0, b / r, 0,
              0, 1, 0, 0,
              0, 0, 0, 1;
  const auto m = embedding::embed_tfidf(docs);
  const double err = m.vectors.rows() == 4 && m.vectors.cols() == 4
                         ? (m.vectors - expected).cwiseAbs().maxCoeff()
                         : std::numeric_limits<double>::infinity();
  const auto same = embedding::embed_tfidf({"phone tracks you", "phone tracks you", "other"});
  const auto disjoint = embedding::embed_tfidf({"alpha beta", "gamma delta"});
  const double c1 = same.vectors.row(0).dot(same.vectors.row(1));
  const double c0 = disjoint.vectors.row(0).dot(disjoint.vectors.row(1));
  return check(err < 1e-9 && std::abs(c1 - 1.0) < 1e-9 && c0 == 0.0,
               "max deviation " + fmt(err) + ", identical cosine " + fmt(c1) + ", disjoint cosine " + fmt(c0));
}

Outcome search_filter() {
  const auto uses = testing::fixture_dataset().uses;
  const auto index = search::SearchIndex::build(uses);
  std::size_t ranked_first = 0;
  for (const auto& use : uses) {
    const auto hits = index.search(embedding::build_document(use, embedding::EmbeddingConfig{}.text_fields), 1);
    if (!hits.empty() && hits[0].use_id == use.use_id && std::abs(hits[0].score - 1.0) < 1e-9) ++ranked_first;
  }
  testing::SelectionSampler sampler(uses, 2024);
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    const auto selection = sampler.next();
    if (index.filter(selection) == testing::linear_scan_filter(uses, selection)) ++agree;
  }
  return check(ranked_first == uses.size() && agree == 100,
               std::to_string(ranked_first) + "/" + std::to_string(uses.size()) + " self-ranked first, " +
                   std::to_string(agree) + "/100 selections match the linear scan");
}

Outcome service_contract() {
  const auto dir = testing::scratch_dir("accept-service");
  const AtlasDocument atlas = testing::fixture_atlas();
  json corrupted = to_json(atlas);
  corrupted["uses"][0]["y"] = 2.0;
  write_json_file(dir / "corrupted.json", corrupted);
  bool rejected = false;
  try {
    service::HttpService bad(dir / "corrupted.json", "127.0.0.1", 0);
  } catch (const Error&) {
    rejected = true;
  }

  write_text_file(dir / "atlas.json", serialize_atlas(atlas));
  service::HttpService server(dir / "atlas.json", "127.0.0.1", 0);  // no static bundle
  httplib::Client client("127.0.0.1", server.port());
  const auto unknown = client.Get("/api/uses/use-0404");
  const bool not_found = unknown && unknown->status == 404;
  bool all_ok = true;
  bool stable = true;
  for (const char* path : {"/api/atlas", "/api/uses/use-0001", "/api/search?q=drivers", "/api/search?q=",
                           "/api/filter?risk=low", "/api/facets"}) {
    const auto a = client.Get(path);
    const auto b = client.Get(path);
    all_ok = all_ok && a && b && a->status == 200 && b->status == 200;
    stable = stable && a && b && a->body == b->body;
  }
  return check(rejected && not_found && all_ok && stable,
               std::string(rejected ? "corrupt atlas rejected" : "corrupt atlas accepted") +
                   (not_found ? ", unknown id 404" : ", unknown id not 404") +
                   (all_ok ? ", API answers without a frontend" : ", API errors") +
                   (stable ? ", repeated GETs identical" : ", repeated GETs differ"));
}

/// The published dataset statistics. Needs the real incident snapshot and
/// the curated dataset, which are not distributed with the code.
Outcome paper_counts() {
  const char* snapshot = std::getenv("ATLAS_AIID_SNAPSHOT");
  const char* curated = std::getenv("ATLAS_ANNOTATIONS");
  if (!snapshot || !curated) return {Outcome::skip, "set ATLAS_AIID_SNAPSHOT and ATLAS_ANNOTATIONS to run"};
  ingestion::IngestConfig config;
  config.input_path = snapshot;
  config.format = fs::path(snapshot).extension() == ".csv" ? ingestion::InputFormat::csv : ingestion::InputFormat::json;
  config.keyword_list = ingestion::default_keywords();
  const auto parsed = ingestion::parse_incidents(read_text_file(config.input_path), config.format);
  const auto unique = ingestion::deduplicate(parsed.records);
  const auto filtered = ingestion::filter_mobile(unique, config);
  const auto stats = dataset_summary(load_dataset(curated));
  const bool ok = parsed.records.size() == 649 && unique.size() == 639 && filtered.size() == 57 &&
                  stats.total_uses == 54 && stats.low == 29 && stats.high == 16 && stats.unacceptable == 9 &&
                  stats.supported_sdgs == 9 && stats.undermined_sdgs == 14;
  return check(ok, "incidents " + std::to_string(parsed.records.size()) + " -> " + std::to_string(unique.size()) +
                       ", filtered " + std::to_string(filtered.size()) + ", uses " + std::to_string(stats.total_uses) +
                       ", tiers " + std::to_string(stats.low) + "/" + std::to_string(stats.high) + "/" +
                       std::to_string(stats.unacceptable) + ", SDGs +" + std::to_string(stats.supported_sdgs) +
                       " -" + std::to_string(stats.undermined_sdgs));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"pipeline determinism", pipeline_determinism},
      {"dataset invariants", dataset_invariants},
      {"t-SNE gradient check", gradient_check},
      {"t-SNE perplexity calibration", perplexity_calibration},
      {"t-SNE optimization sanity", optimization_sanity},
      {"cluster recovery", cluster_recovery},
      {"TF-IDF oracle equivalence", tfidf_oracle},
      {"search/filter correctness", search_filter},
      {"service contract", service_contract},
      {"published dataset counts", paper_counts},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {Outcome::fail, std::string("threw: ") + e.what()};
    }
    const char* tag = outcome.kind == Outcome::pass ? "PASS" : outcome.kind == Outcome::skip ? "SKIP" : "FAIL";
    if (outcome.kind == Outcome::fail) ++failures;
    std::cout << tag << "  " << name << ": " << outcome.detail << "\n";
  }
  std::cout << (failures == 0 ? "all criteria met" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
