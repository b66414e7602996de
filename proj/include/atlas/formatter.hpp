#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/domain.hpp"
#include "atlas/json_io.hpp"

namespace atlas::formatter {

enum class Mode { live, replay };

std::optional<Mode> parse_mode(std::string_view name);

inline constexpr std::size_t kMaxComponentChars = 200;
inline constexpr const char* kDefaultApiKeyEnv = "ATLAS_API_KEY";

std::string default_prompt_template();

struct FormatterConfig {
  Mode mode = Mode::replay;
  std::string endpoint_url;
  std::string model_name;
  std::string prompt_template = default_prompt_template();
  std::filesystem::path cache_path;
  std::chrono::milliseconds timeout{60000};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{500};
  std::string api_key_env = kDefaultApiKeyEnv;  // value read at request time, never logged

  /// Throws InputError when the mode's requirements are not met.
  void validate() const;
};

/// Cache key for the first request about an incident.
std::string request_key(IncidentId incident_id, std::string_view prompt_template);

/// Cache key for the single repair request sent after an unparseable answer.
std::string reprompt_key(IncidentId incident_id, std::string_view prompt_template);

/// Append-only store of raw model responses keyed by request_key.
class ResponseCache {
 public:
  ResponseCache() = default;

  /// A missing file yields an empty cache.
  static ResponseCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<std::string> find(const std::string& key) const;

  /// Returns false (and leaves the entry untouched) when the key exists.
  bool insert(const std::string& key, std::string response);

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

/// A chat-completion endpoint. Implementations return the assistant text.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Speaks the chat-completion wire shape: POST {model, messages, temperature: 0}
/// and reads choices[0].message.content.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(const FormatterConfig& config);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::string endpoint_url_;
  std::string model_name_;
  std::chrono::milliseconds timeout_;
  int max_retries_;
  std::chrono::milliseconds retry_backoff_;
  std::string api_key_env_;
};

struct Components {
  std::string domain;
  std::string purpose;
  std::string capability;
  std::string ai_user;
  std::string ai_subject;

  friend bool operator==(const Components&, const Components&) = default;
};

/// Reads a labeled five-line answer (Domain:/Purpose:/Capability:/AI user:/
/// AI subject:). Labels are case-insensitive; list bullets and bold markers
/// around labels are tolerated. Returns nullopt if any label is missing or empty.
std::optional<Components> parse_components(std::string_view response);

/// Cuts text longer than `max_chars` code points at the last word boundary.
/// Returns true when it truncated.
bool truncate_at_word(std::string& text, std::size_t max_chars = kMaxComponentChars);

std::string render_prompt(std::string_view prompt_template, const IncidentRecord& incident);

struct FormatResult {
  UseDraft draft;  // use_id left empty; format_batch assigns it
  std::vector<std::string> warnings;
};

struct BatchFailure {
  IncidentId incident_id = 0;
  std::string kind;  // cache_miss | transport | protocol | format | invalid_input
  std::string message;
  std::optional<std::string> raw_response;
};

struct BatchResult {
  std::vector<UseDraft> drafts;
  std::vector<BatchFailure> failures;
  std::vector<std::string> warnings;
};

class Formatter {
 public:
  /// Loads the cache. In live mode a null client is replaced by an
  /// HttpChatClient built from the config.
  explicit Formatter(FormatterConfig config, std::unique_ptr<ChatClient> client = nullptr);

  /// Throws CacheMissError, TransportError, ProtocolError or FormatError.
  FormatResult format_incident(const IncidentRecord& incident);

  /// Sequential, in input order. Drafts get use-0001, use-0002, ... in output order.
  BatchResult format_batch(const std::vector<IncidentRecord>& incidents);

  const ResponseCache& cache() const { return cache_; }
  const FormatterConfig& config() const { return config_; }

 private:
  std::string fetch(const std::string& key, const std::vector<ChatMessage>& messages);

  FormatterConfig config_;
  std::unique_ptr<ChatClient> client_;
  ResponseCache cache_;
};

json to_json(const BatchFailure& failure);

}  // namespace atlas::formatter
