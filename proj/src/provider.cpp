#include "lapi/provider.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace lapi::llm {

using nlohmann::json;

void ChatRequest::validate() const {
  if (prompt.empty()) throw std::invalid_argument("ChatRequest: prompt must be non-empty");
  if (temperature < 0.0 || temperature > 2.0)
    throw std::invalid_argument("ChatRequest: temperature must be in [0, 2]");
  if (sample_count < 1) throw std::invalid_argument("ChatRequest: sample_count must be >= 1");
  if (max_tokens < 1) throw std::invalid_argument("ChatRequest: max_tokens must be >= 1");
}

void ProviderConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("provider: endpoint must be set");
  if (model_id.empty()) throw ConfigError("provider: model_id must be set");
  if (timeout.count() <= 0) throw ConfigError("provider: timeout must be > 0");
  if (max_retries < 0 || max_retries > 8)
    throw ConfigError("provider: max_retries must be in [0, 8]");
}

// ---- fingerprints -----------------------------------------------------------

std::string normalize_prompt(std::string_view prompt) {
  std::string out;
  out.reserve(prompt.size());
  bool in_space = false;
  for (unsigned char c : prompt) {
    if (std::isspace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

Fingerprint fingerprint(std::string_view prompt) {
  const std::string normalized = normalize_prompt(prompt);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : normalized) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fingerprint_hex(Fingerprint fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return std::string(buf);
}

std::optional<Fingerprint> fingerprint_from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() > 16) return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size()) return std::nullopt;
  return value;
}

// ---- mock -------------------------------------------------------------------

MockScript& MockScript::add(std::string_view prompt, std::vector<std::string> batch) {
  return add_fingerprint(fingerprint(prompt), std::move(batch));
}

MockScript& MockScript::add_fingerprint(Fingerprint fp, std::vector<std::string> batch) {
  keyed_[fp].push_back(std::move(batch));
  return *this;
}

MockScript& MockScript::add_wildcard(std::vector<std::string> batch) {
  wildcard_.push_back(std::move(batch));
  return *this;
}

json MockScript::to_json() const {
  json entries = json::array();
  for (const auto& [fp, batches] : keyed_) {
    entries.push_back({{"fingerprint", fingerprint_hex(fp)}, {"batches", batches}});
  }
  if (!wildcard_.empty()) {
    entries.push_back({{"wildcard", true}, {"batches", wildcard_}});
  }
  return json{{"entries", entries}};
}

MockScript MockScript::from_json(const json& doc) {
  MockScript script;
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
    throw ConfigError("mock script: expected an object with an \"entries\" array");
  for (const auto& entry : doc["entries"]) {
    if (!entry.contains("batches") || !entry["batches"].is_array())
      throw ConfigError("mock script: entry missing \"batches\" array");
    std::vector<std::vector<std::string>> batches;
    for (const auto& batch : entry["batches"]) {
      batches.push_back(batch.get<std::vector<std::string>>());
    }
    if (entry.value("wildcard", false)) {
      for (auto& b : batches) script.add_wildcard(std::move(b));
    } else if (entry.contains("prompt")) {
      const auto fp = fingerprint(entry["prompt"].get<std::string>());
      for (auto& b : batches) script.add_fingerprint(fp, std::move(b));
    } else if (entry.contains("fingerprint")) {
      const auto fp = fingerprint_from_hex(entry["fingerprint"].get<std::string>());
      if (!fp) throw ConfigError("mock script: bad fingerprint hex");
      for (auto& b : batches) script.add_fingerprint(*fp, std::move(b));
    } else {
      throw ConfigError("mock script: entry needs \"prompt\", \"fingerprint\", or \"wildcard\"");
    }
  }
  return script;
}

void MockScript::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FileNotFound("cannot write mock script: " + path.string());
  out << to_json().dump(2) << '\n';
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("mock script not found: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

MockProvider::MockProvider(MockScript script) : script_(std::move(script)) {}

ChatBatch MockProvider::complete(const ChatRequest& request) {
  request.validate();
  const Fingerprint fp = fingerprint(request.prompt);

  std::vector<std::string> batch;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = script_.keyed_.find(fp);
        it != script_.keyed_.end() && keyed_ordinal_[fp] < it->second.size()) {
      batch = it->second[keyed_ordinal_[fp]++];
    } else if (wildcard_ordinal_ < script_.wildcard_.size()) {
      batch = script_.wildcard_[wildcard_ordinal_++];
    } else {
      throw ScriptMiss("mock script has no entry for prompt fingerprint " + fingerprint_hex(fp) +
                       " (normalized: \"" + normalize_prompt(request.prompt).substr(0, 120) + "\")");
    }
  }

  if (static_cast<int>(batch.size()) != request.sample_count) {
    throw ScriptMiss("mock script batch for fingerprint " + fingerprint_hex(fp) + " has " +
                     std::to_string(batch.size()) + " texts but sample_count is " +
                     std::to_string(request.sample_count));
  }
  return ChatBatch{std::move(batch)};
}

// ---- capture ----------------------------------------------------------------

ChatBatch RecordingProvider::complete(const ChatRequest& request) {
  ChatBatch batch = inner_.complete(request);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    calls_.push_back({request, batch});
  }
  return batch;
}

std::vector<CapturedCall> RecordingProvider::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

// ---- live HTTP backend --------------------------------------------------------

namespace {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "https://api.example.com:443"
  std::string path;              // e.g. "/v1/chat/completions"
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("provider endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
public:
  HttpResponse post_json(const std::string& url, const std::string& body,
                         const std::vector<std::pair<std::string, std::string>>& headers,
                         std::chrono::milliseconds timeout) override {
    const ParsedUrl parsed = split_url(url);
    httplib::Client client(parsed.scheme_host_port);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));

    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);

    auto result = client.Post(parsed.path, hl, body, "application/json");
    if (!result) {
      throw TimeoutError("request to " + parsed.scheme_host_port +
                         " failed: " + httplib::to_string(result.error()));
    }
    return {result->status, result->body};
  }
};

void log_verbose(const ProviderConfig& config, const std::string& direction,
                 const std::string& body) {
  if (!config.verbose) return;
  std::fprintf(stderr, "[provider] %s %s %s\n", direction.c_str(), config.endpoint.c_str(),
               body.c_str());
}

std::vector<std::string> parse_choices(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unparseable completion payload: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array())
    throw MalformedResponse("completion payload has no choices array");
  std::vector<std::string> texts;
  for (const auto& choice : doc["choices"]) {
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      texts.push_back(choice["message"]["content"].get<std::string>());
    } else if (choice.contains("text") && choice["text"].is_string()) {
      texts.push_back(choice["text"].get<std::string>());
    } else {
      throw MalformedResponse("completion choice has no message content");
    }
  }
  return texts;
}

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

HttpProvider::HttpProvider(ProviderConfig config, std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_httplib_transport()) {
  config_.validate();
}

// One wire exchange for n samples, retrying transient failures with
// exponential backoff until max_retries is spent.
std::vector<std::string> HttpProvider::request_samples(const ChatRequest& request, int n,
                                                       const std::string& api_key) {
  json body{
      {"model", config_.model_id},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"n", n},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed) body["seed"] = *request.seed;
  const std::string payload = body.dump();
  log_verbose(config_, ">>", payload);

  const std::vector<std::pair<std::string, std::string>> headers{
      {"Authorization", "Bearer " + api_key}};

  for (int attempt = 0;; ++attempt) {
    const bool last_attempt = attempt >= config_.max_retries;
    try {
      HttpResponse response =
          transport_->post_json(config_.endpoint, payload, headers, config_.timeout);
      log_verbose(config_, "<<", "status=" + std::to_string(response.status));

      if (response.status == 200) {
        log_verbose(config_, "<<", response.body);
        auto texts = parse_choices(response.body);
        if (static_cast<int>(texts.size()) != n)
          throw MalformedResponse("backend returned " + std::to_string(texts.size()) +
                                  " choices, expected " + std::to_string(n));
        return texts;
      }
      if (response.status == 401 || response.status == 403)
        throw AuthError("backend rejected the API key (status " +
                        std::to_string(response.status) + ")");
      if (response.status == 429) {
        if (last_attempt)
          throw RateLimited("rate limited after " + std::to_string(attempt + 1) + " attempts");
      } else if (response.status >= 500) {
        if (last_attempt)
          throw ProviderError("backend error status " + std::to_string(response.status) +
                              " after " + std::to_string(attempt + 1) + " attempts");
      } else {
        throw ProviderError("backend returned status " + std::to_string(response.status) + ": " +
                            response.body.substr(0, 200));
      }
    } catch (const TimeoutError&) {
      if (last_attempt) throw;
    }
    std::this_thread::sleep_for(config_.retry_backoff * (1LL << attempt));
  }
}

ChatBatch HttpProvider::complete(const ChatRequest& request) {
  request.validate();

  const char* key = config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) {
    throw AuthError("API key environment variable " +
                    (config_.api_key_env.empty() ? std::string("<unset>") : config_.api_key_env) +
                    " is not set");
  }

  ChatBatch batch;
  if (config_.supports_n) {
    batch.texts = request_samples(request, request.sample_count, key);
  } else {
    batch.texts.reserve(request.sample_count);
    for (int i = 0; i < request.sample_count; ++i) {
      auto one = request_samples(request, 1, key);
      batch.texts.push_back(std::move(one.front()));
    }
  }
  return batch;
}

}  // namespace lapi::llm
