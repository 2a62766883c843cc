#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lapi/errors.hpp"

namespace lapi::llm {

// One text-generation request. sample_count asks for that many independent
// samples from the same prompt in one batch.
struct ChatRequest {
  std::string prompt;
  double temperature = 1.0;  // [0, 2]
  int sample_count = 1;
  int max_tokens = 512;
  std::optional<std::uint64_t> seed;  // advisory; forwarded when the backend supports it

  void validate() const;  // throws std::invalid_argument
};

// The sampled texts, in the order the backend returned them. Length always
// equals the request's sample_count; a short batch is an error, never a
// silent truncation.
struct ChatBatch {
  std::vector<std::string> texts;
};

struct ProviderConfig {
  std::string endpoint;     // full chat-completions URL, e.g. https://host/v1/chat/completions
  std::string model_id;
  std::string api_key_env;  // name of the environment variable holding the key
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;                         // bounded at 8
  std::chrono::milliseconds retry_backoff{250};  // doubled per attempt
  bool supports_n = true;  // one request with n samples; otherwise sequential singles
  bool verbose = false;    // log request/response bodies to stderr, key redacted

  void validate() const;  // throws ConfigError
};

// Uniform abstraction over text-generation backends. Instances are shareable;
// concurrent complete() calls on independent requests are permitted.
class Provider {
public:
  virtual ~Provider() = default;

  // Returns exactly request.sample_count texts or throws a ProviderError.
  virtual ChatBatch complete(const ChatRequest& request) = 0;
};

// ---- prompt fingerprints ----------------------------------------------------

using Fingerprint = std::uint64_t;

// Collapses every run of whitespace to a single space and trims the ends.
std::string normalize_prompt(std::string_view prompt);

// 64-bit FNV-1a over the normalized prompt. Stable across runs and platforms;
// equal prompts (modulo whitespace) yield equal fingerprints.
Fingerprint fingerprint(std::string_view prompt);

std::string fingerprint_hex(Fingerprint fp);
std::optional<Fingerprint> fingerprint_from_hex(std::string_view hex);

// ---- scripted mock ----------------------------------------------------------

// Deterministic offline backend. Each key (a prompt fingerprint or the
// wildcard) owns an ordered list of batches; the k-th match of a key replays
// its k-th batch. Exact fingerprints are consulted before the wildcard, and a
// request with no remaining batch under either key throws ScriptMiss so tests
// fail loudly on unexpected prompts.
class MockScript {
public:
  MockScript& add(std::string_view prompt, std::vector<std::string> batch);
  MockScript& add_fingerprint(Fingerprint fp, std::vector<std::string> batch);
  MockScript& add_wildcard(std::vector<std::string> batch);

  nlohmann::json to_json() const;
  static MockScript from_json(const nlohmann::json& doc);

  void save(const std::filesystem::path& path) const;
  static MockScript load(const std::filesystem::path& path);

private:
  friend class MockProvider;
  std::map<Fingerprint, std::vector<std::vector<std::string>>> keyed_;
  std::vector<std::vector<std::string>> wildcard_;
};

class MockProvider : public Provider {
public:
  explicit MockProvider(MockScript script);

  ChatBatch complete(const ChatRequest& request) override;

private:
  MockScript script_;
  std::map<Fingerprint, std::size_t> keyed_ordinal_;
  std::size_t wildcard_ordinal_ = 0;
  std::mutex mutex_;
};

// ---- capture ----------------------------------------------------------------

struct CapturedCall {
  ChatRequest request;
  ChatBatch batch;
};

// Decorator recording every request/response pair that flows through it.
class RecordingProvider : public Provider {
public:
  explicit RecordingProvider(Provider& inner) : inner_(inner) {}

  ChatBatch complete(const ChatRequest& request) override;

  std::vector<CapturedCall> calls() const;

private:
  Provider& inner_;
  std::vector<CapturedCall> calls_;
  mutable std::mutex mutex_;
};

// ---- live HTTP backend --------------------------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Injectable transport so retry and parsing logic stays testable offline.
// Implementations throw TimeoutError when the endpoint cannot be reached or
// does not answer within the timeout.
class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post_json(const std::string& url, const std::string& body,
                                 const std::vector<std::pair<std::string, std::string>>& headers,
                                 std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();

// OpenAI-compatible chat-completions client with exponential backoff on
// transient failures (429, 5xx, transport errors). 401/403 raise AuthError
// without retrying; an unset API key raises AuthError before any network call.
class HttpProvider : public Provider {
public:
  explicit HttpProvider(ProviderConfig config,
                        std::unique_ptr<HttpTransport> transport = nullptr);

  ChatBatch complete(const ChatRequest& request) override;

private:
  std::vector<std::string> request_samples(const ChatRequest& request, int n,
                                           const std::string& api_key);

  ProviderConfig config_;
  std::unique_ptr<HttpTransport> transport_;
};

}  // namespace lapi::llm
