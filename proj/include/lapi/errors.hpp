#pragma once

#include <stdexcept>
#include <string>

namespace lapi {

// Base class for every engine error. Programmer-contract violations
// (bad arguments to a function whose preconditions forbid them) throw
// std::invalid_argument instead.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- provider -------------------------------------------------------------

class ProviderError : public Error {
public:
  using Error::Error;
};

// Missing or rejected API key. Raised before any network call when the
// configured environment variable is unset or empty.
class AuthError : public ProviderError {
public:
  using ProviderError::ProviderError;
};

// HTTP 429 still failing after the retry budget is spent.
class RateLimited : public ProviderError {
public:
  using ProviderError::ProviderError;
};

// Request timed out or the transport could not reach the endpoint, after
// retries. Connection-level failures are folded in here: from the caller's
// point of view the backend did not answer in time.
class TimeoutError : public ProviderError {
public:
  using ProviderError::ProviderError;
};

// Wire payload arrived but could not be interpreted (bad JSON, missing
// fields, wrong choice count).
class MalformedResponse : public ProviderError {
public:
  using ProviderError::ProviderError;
};

// Mock script has no batch for the requested (fingerprint, ordinal).
class ScriptMiss : public ProviderError {
public:
  using ProviderError::ProviderError;
};

// ---- prompts / planning ---------------------------------------------------

// The LLM returned empty text where a prompt body was required.
class DegeneratePrompt : public Error {
public:
  using Error::Error;
};

// A prompt asset is missing, unreadable, or lacks a required placeholder.
class TemplateError : public Error {
public:
  using Error::Error;
};

// ---- rules / entropy ------------------------------------------------------

// A verdict was built against a rule set of a different width.
class WidthMismatch : public Error {
public:
  using Error::Error;
};

// Verdict list length disagrees with the declared sample count.
class LengthMismatch : public Error {
public:
  using Error::Error;
};

// Every sample satisfied all rules; there is no failing category to mine.
class NoFailingCategory : public Error {
public:
  using Error::Error;
};

// ---- retrieval ------------------------------------------------------------

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class EmptyKnowledgeBase : public Error {
public:
  using Error::Error;
};

// ---- harness --------------------------------------------------------------

class FileNotFound : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line) : Error(what), line(line) {}
  int line = 0;
};

class DuplicateId : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace lapi
