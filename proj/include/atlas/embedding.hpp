#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "atlas/domain.hpp"
#include "atlas/json_io.hpp"

namespace atlas::embedding {

enum class Provider { tfidf, external };

std::optional<Provider> parse_provider(std::string_view name);

enum class TextField { domain, purpose, capability, ai_user, ai_subject };

std::optional<TextField> parse_text_field(std::string_view name);
std::string_view to_string(TextField field);

inline constexpr std::size_t kExternalBatchSize = 32;

struct EmbeddingConfig {
  Provider provider = Provider::tfidf;
  std::string external_url;
  std::string model_name;  // forwarded to the external provider when non-empty
  std::size_t dimensions = 0;  // 0 = accept whatever the provider reports
  std::vector<TextField> text_fields = {TextField::domain, TextField::purpose,
                                        TextField::capability, TextField::ai_user,
                                        TextField::ai_subject};
  std::size_t batch_size = kExternalBatchSize;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{250};
  std::string api_key_env = "ATLAS_EMBEDDING_API_KEY";

  void validate() const;
};

/// N unit-length rows, one per use.
struct EmbeddingMatrix {
  std::vector<std::string> row_ids;
  Eigen::MatrixXd vectors;

  Eigen::Index rows() const { return vectors.rows(); }
  Eigen::Index dims() const { return vectors.cols(); }

  /// Finite entries, unit rows (within 1e-9), one unique id per row.
  ValidationReport validate() const;
};

json to_json(const EmbeddingMatrix& matrix);
EmbeddingMatrix embedding_from_json(const json& document);

/// The configured components in canonical order (domain, purpose, capability,
/// AI user, AI subject), trimmed, joined with ". " and lowercased.
std::string build_document(const UseDraft& use, const std::vector<TextField>& fields);
std::string build_document(const UseRecord& use, const std::vector<TextField>& fields);

/// Corpus statistics for TF-IDF: raw term counts weighted by the smoothed
/// inverse document frequency ln((1 + N) / (1 + df)) + 1. Vocabulary is in
/// order of first appearance across the corpus.
class TfidfModel {
 public:
  /// Throws InputError on an empty corpus or a document without tokens.
  static TfidfModel fit(const std::vector<std::string>& documents);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const Eigen::VectorXd& idf() const { return idf_; }
  std::optional<Eigen::Index> term_index(const std::string& term) const;

  /// Unnormalized TF-IDF weights of `document`; unseen terms are ignored.
  Eigen::VectorXd weights(std::string_view document) const;

  /// Row-normalized weights of the fitted corpus.
  const Eigen::MatrixXd& corpus() const { return corpus_; }

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, Eigen::Index> index_;
  Eigen::VectorXd idf_;
  Eigen::MatrixXd corpus_;
};

EmbeddingMatrix embed_tfidf(const std::vector<std::string>& documents);

/// POSTs {"input": [...], "model"?} in batches and reads either
/// {"data": [{"embedding": [...]}, ...]} or {"embeddings": [[...], ...]}.
/// Throws TransportError after retries, ProtocolError on dimension mismatch,
/// wrong row count, non-finite values or zero vectors.
EmbeddingMatrix embed_external(const std::vector<std::string>& documents,
                               const EmbeddingConfig& config);

/// Builds documents for every use and embeds them with the configured provider.
EmbeddingMatrix embed_uses(const std::vector<UseRecord>& uses, const EmbeddingConfig& config);

/// In-place L2 normalization; throws ProtocolError naming the first zero row.
void normalize_rows(Eigen::MatrixXd& vectors);

}  // namespace atlas::embedding
