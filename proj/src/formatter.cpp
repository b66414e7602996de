#include "atlas/formatter.hpp"

#include <cctype>
#include <utility>

#include "atlas/errors.hpp"
#include "atlas/http_client.hpp"
#include "atlas/text.hpp"

namespace atlas::formatter {

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "live") return Mode::live;
  if (name == "replay") return Mode::replay;
  return std::nullopt;
}

std::string default_prompt_template() {
  return "Paraphrase the AI incident below into a description of the AI use involved.\n"
         "Answer in exactly five lines, each starting with its label:\n"
         "Domain: <the application industry or sector>\n"
         "Purpose: <the goal the AI is used for>\n"
         "Capability: <what the AI technology does>\n"
         "AI user: <who operates the AI system>\n"
         "AI subject: <who is affected by the AI system>\n"
         "\n"
         "Incident title: {title}\n"
         "Incident description: {description}\n";
}

void FormatterConfig::validate() const {
  if (prompt_template.find("{title}") == std::string::npos &&
      prompt_template.find("{description}") == std::string::npos) {
    throw InputError("prompt template must reference {title} or {description}");
  }
  if (max_retries < 0) throw InputError("max_retries must be non-negative");
  if (mode == Mode::live) {
    if (endpoint_url.empty()) throw InputError("live mode requires an endpoint URL");
    if (model_name.empty()) throw InputError("live mode requires a model name");
    if (cache_path.empty()) throw InputError("live mode requires a cache path to record responses");
  } else {
    if (cache_path.empty() || !std::filesystem::exists(cache_path)) {
      throw InputError("replay mode requires an existing cache file: " + cache_path.string());
    }
  }
}

std::string request_key(IncidentId incident_id, std::string_view prompt_template) {
  std::string material = std::to_string(incident_id);
  material += '\x1f';
  material += prompt_template;
  return text::sha256_hex(material);
}

std::string reprompt_key(IncidentId incident_id, std::string_view prompt_template) {
  std::string material = std::to_string(incident_id);
  material += '\x1f';
  material += prompt_template;
  material += "\x1freprompt";
  return text::sha256_hex(material);
}

ResponseCache ResponseCache::load(const std::filesystem::path& path) {
  ResponseCache cache;
  if (path.empty() || !std::filesystem::exists(path)) return cache;
  const json document = read_json_file(path);
  if (!document.is_object() || !document.contains("entries") || !document["entries"].is_object()) {
    throw InputError(path.string() + ": cache must be an object with an 'entries' map");
  }
  for (const auto& [key, value] : document["entries"].items()) {
    if (!value.is_string()) throw InputError(path.string() + ": cache entry " + key + " is not text");
    cache.entries_.emplace(key, value.get<std::string>());
  }
  return cache;
}

void ResponseCache::save(const std::filesystem::path& path) const {
  json document{{"entries", json::object()}};
  for (const auto& [key, value] : entries_) document["entries"][key] = value;
  write_json_file(path, document);
}

std::optional<std::string> ResponseCache::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool ResponseCache::insert(const std::string& key, std::string response) {
  return entries_.emplace(key, std::move(response)).second;
}

HttpChatClient::HttpChatClient(const FormatterConfig& config)
    : endpoint_url_(config.endpoint_url),
      model_name_(config.model_name),
      timeout_(config.timeout),
      max_retries_(config.max_retries),
      retry_backoff_(config.retry_backoff),
      api_key_env_(config.api_key_env) {}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
  json body{{"model", model_name_}, {"temperature", 0}, {"messages", json::array()}};
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  HttpPostOptions options;
  options.timeout = timeout_;
  options.max_retries = max_retries_;
  options.retry_backoff = retry_backoff_;
  add_bearer_from_env(options, api_key_env_);
  const json reply = post_json(endpoint_url_, body, options);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProtocolError("chat endpoint reply lacks choices[0].message.content");
  }
}

namespace {

struct Label {
  const char* name;
  std::string Components::*member;
};

constexpr std::size_t kLabelCount = 5;

const Label kLabels[kLabelCount] = {
    {"domain", &Components::domain},
    {"purpose", &Components::purpose},
    {"capability", &Components::capability},
    {"ai user", &Components::ai_user},
    {"ai subject", &Components::ai_subject},
};

std::string strip_decoration(std::string_view line) {
  std::string s = trim(line);
  // Leading list markers: "-", "*", "•", "1." / "1)".
  while (!s.empty()) {
    if (s.front() == '-' || s.front() == '*' || s.front() == '>') {
      s = trim(std::string_view(s).substr(1));
    } else if (s.rfind("\xE2\x80\xA2", 0) == 0) {
      s = trim(std::string_view(s).substr(3));
    } else if (std::isdigit(static_cast<unsigned char>(s.front()))) {
      std::size_t i = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && (s[i] == '.' || s[i] == ')')) {
        s = trim(std::string_view(s).substr(i + 1));
      } else {
        break;
      }
    } else {
      break;
    }
  }
  return s;
}

std::string strip_bold(std::string text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '*') {
      ++i;
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

}  // namespace

std::optional<Components> parse_components(std::string_view response) {
  Components parsed;
  bool found[kLabelCount] = {};
  std::size_t start = 0;
  while (start <= response.size()) {
    auto end = response.find('\n', start);
    if (end == std::string_view::npos) end = response.size();
    const std::string line = strip_bold(strip_decoration(response.substr(start, end - start)));
    start = end + 1;

    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string label = normalize_label(line.substr(0, colon));
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      if (found[k] || label != kLabels[k].name) continue;
      std::string value = trim(std::string_view(line).substr(colon + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = trim(std::string_view(value).substr(1, value.size() - 2));
      }
      while (!value.empty() && (value.back() == '.' || value.back() == ';' || value.back() == ',')) {
        value.pop_back();
      }
      parsed.*(kLabels[k].member) = value;
      found[k] = true;
    }
  }
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    if (!found[k] || (parsed.*(kLabels[k].member)).empty()) return std::nullopt;
  }
  return parsed;
}

bool truncate_at_word(std::string& text, std::size_t max_chars) {
  // Byte offset just past the max_chars-th code point.
  std::size_t count = 0;
  std::size_t cut = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) == 0x80) continue;
    if (count == max_chars) {
      cut = i;
      break;
    }
    ++count;
  }
  if (cut == text.size()) return false;

  std::size_t boundary = cut;
  const bool cut_at_space = std::isspace(static_cast<unsigned char>(text[cut])) != 0;
  if (!cut_at_space) {
    const auto space = text.rfind(' ', cut);
    if (space != std::string::npos && space > 0) boundary = space;
  }
  text = trim(std::string_view(text).substr(0, boundary));
  while (!text.empty() && (text.back() == ',' || text.back() == ';' || text.back() == ':')) {
    text.pop_back();
  }
  return true;
}

std::string render_prompt(std::string_view prompt_template, const IncidentRecord& incident) {
  std::string out;
  std::size_t i = 0;
  while (i < prompt_template.size()) {
    if (prompt_template.substr(i, 7) == "{title}") {
      out += incident.title;
      i += 7;
    } else if (prompt_template.substr(i, 13) == "{description}") {
      out += incident.description;
      i += 13;
    } else {
      out.push_back(prompt_template[i++]);
    }
  }
  return out;
}

Formatter::Formatter(FormatterConfig config, std::unique_ptr<ChatClient> client)
    : config_(std::move(config)), client_(std::move(client)) {
  config_.validate();
  cache_ = ResponseCache::load(config_.cache_path);
  if (config_.mode == Mode::live && !client_) client_ = std::make_unique<HttpChatClient>(config_);
}

std::string Formatter::fetch(const std::string& key, const std::vector<ChatMessage>& messages) {
  if (auto cached = cache_.find(key)) return *cached;
  if (config_.mode == Mode::replay || !client_) {
    throw CacheMissError("no cached response for request " + key);
  }
  std::string response = client_->complete(messages);
  cache_.insert(key, response);
  cache_.save(config_.cache_path);
  return response;
}

FormatResult Formatter::format_incident(const IncidentRecord& incident) {
  if (auto report = validate_incident(incident); !report.ok()) {
    throw ValidationError(report.messages());
  }
  const std::string prompt = render_prompt(config_.prompt_template, incident);
  std::vector<ChatMessage> messages{{"user", prompt}};
  std::string response = fetch(request_key(incident.incident_id, config_.prompt_template), messages);

  auto components = parse_components(response);
  if (!components) {
    messages.push_back({"assistant", response});
    messages.push_back(
        {"user",
         "Your previous answer could not be parsed. Answer in exactly five lines, each starting "
         "with its label: Domain:, Purpose:, Capability:, AI user:, AI subject:"});
    response = fetch(reprompt_key(incident.incident_id, config_.prompt_template), messages);
    components = parse_components(response);
    if (!components) {
      throw FormatError("incident " + std::to_string(incident.incident_id) +
                            ": response lacks the five labeled components after one reprompt",
                        response);
    }
  }

  FormatResult result;
  result.draft.incident_ids = {incident.incident_id};
  result.draft.domain = components->domain;
  result.draft.purpose = components->purpose;
  result.draft.capability = components->capability;
  result.draft.ai_user = components->ai_user;
  result.draft.ai_subject = components->ai_subject;
  const std::pair<const char*, std::string UseDraft::*> fields[] = {
      {"domain", &UseDraft::domain},     {"purpose", &UseDraft::purpose},
      {"capability", &UseDraft::capability}, {"ai_user", &UseDraft::ai_user},
      {"ai_subject", &UseDraft::ai_subject}};
  for (const auto& [name, member] : fields) {
    if (truncate_at_word(result.draft.*member)) {
      result.warnings.push_back("incident " + std::to_string(incident.incident_id) + ": " + name +
                                " truncated to " + std::to_string(kMaxComponentChars) +
                                " characters");
    }
  }
  return result;
}

BatchResult Formatter::format_batch(const std::vector<IncidentRecord>& incidents) {
  BatchResult batch;
  for (const auto& incident : incidents) {
    BatchFailure failure{incident.incident_id, "", "", std::nullopt};
    try {
      auto result = format_incident(incident);
      result.draft.use_id = make_use_id(batch.drafts.size() + 1);
      batch.drafts.push_back(std::move(result.draft));
      for (auto& w : result.warnings) batch.warnings.push_back(std::move(w));
      continue;
    } catch (const CacheMissError& e) {
      failure.kind = "cache_miss";
      failure.message = e.what();
    } catch (const TransportError& e) {
      failure.kind = "transport";
      failure.message = e.what();
    } catch (const ProtocolError& e) {
      failure.kind = "protocol";
      failure.message = e.what();
    } catch (const FormatError& e) {
      failure.kind = "format";
      failure.message = e.what();
      failure.raw_response = e.raw_response();
    } catch (const ValidationError& e) {
      failure.kind = "invalid_input";
      failure.message = e.what();
    }
    batch.failures.push_back(std::move(failure));
  }
  return batch;
}

json to_json(const BatchFailure& failure) {
  json out{{"incident_id", failure.incident_id},
           {"kind", failure.kind},
           {"message", failure.message}};
  if (failure.raw_response) out["raw_response"] = *failure.raw_response;
  return out;
}

}  // namespace atlas::formatter
