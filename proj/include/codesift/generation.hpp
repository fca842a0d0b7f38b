#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "codesift/model.hpp"

namespace codesift {

enum class BackendKind { http_completion, http_chat, replay };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view tag);

struct GenerationRequest {
  std::string prompt_text;
  int n = 10;
  int max_new_tokens = 128;
  double temperature = 0.8;
  double top_p = 0.95;
  std::string model_id;

  void validate() const;
};

inline constexpr int kCompletionMaxTokens = 128;
inline constexpr int kChatMaxTokens = 512;

int default_max_tokens(BackendKind kind);

struct RetryPolicy {
  int max_retries = 3;
  int base_backoff_ms = 500;
};

// JSON field names used by the HTTP backends. `text_path` is dot-separated
// and resolved inside each element of `choices_field`.
struct FieldMapping {
  std::string model_field = "model";
  std::string prompt_field = "prompt";      // completion requests
  std::string messages_field = "messages";  // chat requests
  std::string n_field = "n";
  std::string max_tokens_field = "max_tokens";
  std::string temperature_field = "temperature";
  std::string top_p_field = "top_p";
  std::string choices_field = "choices";
  std::string index_field = "index";
  std::string text_path;  // empty: "text" for completion, "message.content" for chat
};

struct BackendConfig {
  BackendKind kind = BackendKind::replay;
  std::optional<std::string> endpoint_url;
  std::optional<std::string> auth_env_var;
  std::optional<std::string> fixture_path;
  int max_inflight = 4;
  RetryPolicy retry;
  int request_timeout_ms = 60000;
  FieldMapping fields;

  void validate() const;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual BackendKind kind() const = 0;
  // Exactly req.n completions in model order. Safe to call concurrently.
  virtual std::vector<std::string> complete(const GenerationRequest& req) = 0;
};

// Throws ConfigError on an invalid config, AuthMissing for an HTTP backend
// whose auth variable is unset.
std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& cfg);

// Requests req.n completions and wraps them as an inventory for the prompt.
SuggestionInventory generate(const Prompt& prompt, const GenerationRequest& req,
                             GenerationBackend& backend);

// Stable replay key: FNV-1a 64 over model, n and prompt text, as 16 hex digits.
std::string fixture_key(const std::string& prompt_text, const std::string& model_id, int n);

// Appends one replay record. Throws PreconditionError when the completion
// count differs from req.n, DuplicateKeyError, IoError.
void record_fixture(const GenerationRequest& req, const std::vector<std::string>& completions,
                    const std::string& fixture_path);

}  // namespace codesift
