#include "atlas/embedding.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "atlas/errors.hpp"
#include "atlas/http_client.hpp"
#include "atlas/text.hpp"

namespace atlas::embedding {

std::optional<Provider> parse_provider(std::string_view name) {
  if (name == "tfidf") return Provider::tfidf;
  if (name == "external") return Provider::external;
  return std::nullopt;
}

std::optional<TextField> parse_text_field(std::string_view name) {
  for (auto field : {TextField::domain, TextField::purpose, TextField::capability,
                     TextField::ai_user, TextField::ai_subject}) {
    if (name == to_string(field)) return field;
  }
  return std::nullopt;
}

std::string_view to_string(TextField field) {
  switch (field) {
    case TextField::domain:
      return "domain";
    case TextField::purpose:
      return "purpose";
    case TextField::capability:
      return "capability";
    case TextField::ai_user:
      return "ai_user";
    case TextField::ai_subject:
      return "ai_subject";
  }
  return "domain";
}

void EmbeddingConfig::validate() const {
  if (text_fields.empty()) throw InputError("embedding text_fields must not be empty");
  if (provider == Provider::external && external_url.empty()) {
    throw InputError("external embedding provider requires an endpoint URL");
  }
  if (batch_size == 0 || batch_size > kExternalBatchSize) {
    throw InputError("embedding batch size must be within 1.." +
                     std::to_string(kExternalBatchSize));
  }
}

ValidationReport EmbeddingMatrix::validate() const {
  ValidationReport report;
  if (static_cast<Eigen::Index>(row_ids.size()) != vectors.rows()) {
    report.violations.push_back({"row_ids", "expected " + std::to_string(vectors.rows()) +
                                                " ids, found " + std::to_string(row_ids.size())});
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    if (!seen.insert(row_ids[i]).second) {
      report.violations.push_back({"row_ids[" + std::to_string(i) + "]", "duplicate id " + row_ids[i]});
    }
  }
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    const std::string path = "vectors[" + std::to_string(r) + "]";
    if (!vectors.row(r).allFinite()) {
      report.violations.push_back({path, "non-finite entry"});
    } else if (std::abs(vectors.row(r).norm() - 1.0) > 1e-9) {
      report.violations.push_back({path, "row is not unit length"});
    }
  }
  return report;
}

json to_json(const EmbeddingMatrix& matrix) {
  json vectors = json::array();
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < matrix.dims(); ++c) row.push_back(matrix.vectors(r, c));
    vectors.push_back(std::move(row));
  }
  return json{{"row_ids", matrix.row_ids}, {"dims", matrix.dims()}, {"vectors", vectors}};
}

EmbeddingMatrix embedding_from_json(const json& document) {
  EmbeddingMatrix matrix;
  try {
    matrix.row_ids = document.at("row_ids").get<std::vector<std::string>>();
    const auto dims = document.at("dims").get<Eigen::Index>();
    const auto& rows = document.at("vectors");
    if (!rows.is_array()) throw InputError("'vectors' must be an array");
    if (dims < 0) throw InputError("'dims' must be non-negative");
    matrix.vectors.resize(static_cast<Eigen::Index>(rows.size()), dims);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || static_cast<Eigen::Index>(rows[r].size()) != dims) {
        throw InputError("vectors[" + std::to_string(r) + "] does not have " +
                         std::to_string(dims) + " entries");
      }
      for (Eigen::Index c = 0; c < dims; ++c) {
        matrix.vectors(static_cast<Eigen::Index>(r), c) = rows[r][c].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("embedding file: ") + e.what());
  }
  if (auto report = matrix.validate(); !report.ok()) throw ValidationError(report.messages());
  return matrix;
}

namespace {

template <typename Use>
std::string build_document_impl(const Use& use, const std::vector<TextField>& fields) {
  std::set<TextField> wanted(fields.begin(), fields.end());
  const std::pair<TextField, const std::string*> ordered[] = {
      {TextField::domain, &use.domain},
      {TextField::purpose, &use.purpose},
      {TextField::capability, &use.capability},
      {TextField::ai_user, &use.ai_user},
      {TextField::ai_subject, &use.ai_subject},
  };
  std::string out;
  for (const auto& [field, value] : ordered) {
    if (!wanted.contains(field)) continue;
    if (!out.empty()) out += ". ";
    out += trim(*value);
  }
  return text::to_lower(out);
}

}  // namespace

std::string build_document(const UseDraft& use, const std::vector<TextField>& fields) {
  return build_document_impl(use, fields);
}

std::string build_document(const UseRecord& use, const std::vector<TextField>& fields) {
  return build_document_impl(use, fields);
}

TfidfModel TfidfModel::fit(const std::vector<std::string>& documents) {
  if (documents.empty()) throw InputError("TF-IDF needs at least one document");
  TfidfModel model;
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    auto tokens = text::tokenize(documents[d]);
    if (tokens.empty()) {
      throw InputError("document " + std::to_string(d) + " has no tokens: \"" + documents[d] + "\"");
    }
    for (const auto& token : tokens) {
      if (model.index_.emplace(token, static_cast<Eigen::Index>(model.vocabulary_.size())).second) {
        model.vocabulary_.push_back(token);
      }
    }
    tokenized.push_back(std::move(tokens));
  }

  const auto n_docs = static_cast<Eigen::Index>(documents.size());
  const auto n_terms = static_cast<Eigen::Index>(model.vocabulary_.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_docs, n_terms);
  for (Eigen::Index d = 0; d < n_docs; ++d) {
    for (const auto& token : tokenized[static_cast<std::size_t>(d)]) {
      counts(d, model.index_.at(token)) += 1.0;
    }
  }
  const Eigen::VectorXd df = (counts.array() > 0.0).cast<double>().colwise().sum().transpose();
  model.idf_ = ((1.0 + static_cast<double>(n_docs)) / (1.0 + df.array())).log() + 1.0;
  model.corpus_ = counts * model.idf_.asDiagonal();
  model.corpus_.rowwise().normalize();
  return model;
}

std::optional<Eigen::Index> TfidfModel::term_index(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd TfidfModel::weights(std::string_view document) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary_.size()));
  for (const auto& token : text::tokenize(document)) {
    if (auto it = index_.find(token); it != index_.end()) w(it->second) += 1.0;
  }
  return w.cwiseProduct(idf_);
}

EmbeddingMatrix embed_tfidf(const std::vector<std::string>& documents) {
  EmbeddingMatrix matrix;
  matrix.vectors = TfidfModel::fit(documents).corpus();
  return matrix;
}

void normalize_rows(Eigen::MatrixXd& vectors) {
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    const double norm = vectors.row(r).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ProtocolError("embedding row " + std::to_string(r) + " is a zero or non-finite vector");
    }
    vectors.row(r) /= norm;
  }
}

namespace {

std::vector<std::vector<double>> decode_batch(const json& reply) {
  std::vector<std::vector<double>> rows;
  try {
    if (reply.contains("data")) {
      for (const auto& item : reply.at("data")) {
        rows.push_back(item.at("embedding").get<std::vector<double>>());
      }
    } else if (reply.contains("embeddings")) {
      rows = reply.at("embeddings").get<std::vector<std::vector<double>>>();
    } else {
      throw ProtocolError("embedding reply has neither 'data' nor 'embeddings'");
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed embedding reply: ") + e.what());
  }
  return rows;
}

}  // namespace

EmbeddingMatrix embed_external(const std::vector<std::string>& documents,
                               const EmbeddingConfig& config) {
  config.validate();
  EmbeddingMatrix matrix;
  if (documents.empty()) {
    matrix.vectors.resize(0, static_cast<Eigen::Index>(config.dimensions));
    return matrix;
  }

  HttpPostOptions options;
  options.timeout = config.timeout;
  options.max_retries = config.max_retries;
  options.retry_backoff = config.retry_backoff;
  add_bearer_from_env(options, config.api_key_env);

  std::vector<std::vector<double>> rows;
  std::size_t dims = config.dimensions;
  for (std::size_t begin = 0; begin < documents.size(); begin += config.batch_size) {
    const std::size_t end = std::min(documents.size(), begin + config.batch_size);
    json body{{"input", std::vector<std::string>(documents.begin() + static_cast<long>(begin),
                                                 documents.begin() + static_cast<long>(end))}};
    if (!config.model_name.empty()) body["model"] = config.model_name;
    auto batch = decode_batch(post_json(config.external_url, body, options));
    if (batch.size() != end - begin) {
      throw ProtocolError("embedding batch starting at row " + std::to_string(begin) + " returned " +
                          std::to_string(batch.size()) + " vectors for " +
                          std::to_string(end - begin) + " documents");
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (dims == 0) dims = batch[k].size();
      if (batch[k].size() != dims || dims == 0) {
        throw ProtocolError("embedding row " + std::to_string(begin + k) + " has " +
                            std::to_string(batch[k].size()) + " dimensions, expected " +
                            std::to_string(dims));
      }
      rows.push_back(std::move(batch[k]));
    }
  }

  matrix.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dims));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < dims; ++c) {
      matrix.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  normalize_rows(matrix.vectors);
  return matrix;
}

EmbeddingMatrix embed_uses(const std::vector<UseRecord>& uses, const EmbeddingConfig& config) {
  config.validate();
  std::vector<std::string> documents;
  std::vector<std::string> ids;
  for (const auto& use : uses) {
    documents.push_back(build_document(use, config.text_fields));
    ids.push_back(use.use_id);
  }
  EmbeddingMatrix matrix;
  if (config.provider == Provider::external) {
    matrix = embed_external(documents, config);
  } else if (documents.empty()) {
    matrix.vectors.resize(0, 0);
  } else {
    matrix = embed_tfidf(documents);
  }
  matrix.row_ids = std::move(ids);
  return matrix;
}

}  // namespace atlas::embedding
