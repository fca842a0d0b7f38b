#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "codesift/errors.hpp"
#include "codesift/generation.hpp"
#include "gate.hpp"

namespace codesift {

using nlohmann::json;

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint url lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

const json* resolve(const json& j, const std::string& dotted) {
  const json* cur = &j;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? dotted.npos : dot - start);
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &(*cur)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

bool transient(int status) { return status == 429 || status >= 500; }

class HttpBackend final : public GenerationBackend {
 public:
  explicit HttpBackend(const BackendConfig& cfg)
      : cfg_(cfg), url_(split_url(*cfg.endpoint_url)), gate_(cfg.max_inflight) {
    if (cfg_.auth_env_var) {
      const char* v = std::getenv(cfg_.auth_env_var->c_str());
      if (!v || !*v) throw AuthMissing("environment variable " + *cfg_.auth_env_var + " is not set");
      token_ = v;
    }
    text_path_ = cfg_.fields.text_path;
    if (text_path_.empty()) {
      text_path_ = cfg_.kind == BackendKind::http_chat ? "message.content" : "text";
    }
  }

  BackendKind kind() const override { return cfg_.kind; }

  std::vector<std::string> complete(const GenerationRequest& req) override {
    req.validate();
    const std::string body = request_body(req).dump(-1, ' ', false, json::error_handler_t::replace);
    detail::GateGuard slot(gate_);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retry.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long>(cfg_.retry.base_backoff_ms) << (attempt - 1)));
      }
      httplib::Client client(url_.origin);
      const auto timeout = std::chrono::milliseconds(cfg_.request_timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      httplib::Headers headers;
      if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
      auto res = client.Post(url_.path, headers, body, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (transient(res->status)) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw BackendUnavailable("HTTP " + std::to_string(res->status) + " from " +
                                 *cfg_.endpoint_url);
      }
      return parse_choices(res->body, req.n);
    }
    throw BackendUnavailable(*cfg_.endpoint_url + ": " + last_error + " after " +
                             std::to_string(cfg_.retry.max_retries + 1) + " attempts");
  }

 private:
  json request_body(const GenerationRequest& req) const {
    const auto& f = cfg_.fields;
    json body = json::object();
    if (!req.model_id.empty()) body[f.model_field] = req.model_id;
    if (cfg_.kind == BackendKind::http_chat) {
      body[f.messages_field] = json::array({{{"role", "user"}, {"content", req.prompt_text}}});
    } else {
      body[f.prompt_field] = req.prompt_text;
    }
    body[f.n_field] = req.n;
    body[f.max_tokens_field] = req.max_new_tokens;
    body[f.temperature_field] = req.temperature;
    body[f.top_p_field] = req.top_p;
    return body;
  }

  std::vector<std::string> parse_choices(const std::string& body, int n) const {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw BackendUnavailable(std::string("response is not JSON: ") + e.what());
    }
    const json* choices = resolve(j, cfg_.fields.choices_field);
    if (!choices || !choices->is_array()) throw BackendUnavailable("response has no choices list");
    std::vector<std::pair<long, std::string>> indexed;
    long fallback = 0;
    for (const auto& c : *choices) {
      const json* text = resolve(c, text_path_);
      if (!text || !text->is_string()) throw BackendUnavailable("choice without text");
      long index = fallback++;
      if (c.is_object() && c.contains(cfg_.fields.index_field) &&
          c[cfg_.fields.index_field].is_number_integer()) {
        index = c[cfg_.fields.index_field].get<long>();
      }
      indexed.emplace_back(index, text->get<std::string>());
    }
    std::stable_sort(indexed.begin(), indexed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<int>(indexed.size()) < n) {
      throw TruncatedResponse("backend returned " + std::to_string(indexed.size()) + " of " +
                              std::to_string(n) + " completions");
    }
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::move(indexed[static_cast<std::size_t>(i)].second));
    return out;
  }

  BackendConfig cfg_;
  Url url_;
  detail::Gate gate_;
  std::string token_;
  std::string text_path_;
};

}  // namespace

std::unique_ptr<GenerationBackend> make_http_backend(const BackendConfig& cfg) {
  return std::make_unique<HttpBackend>(cfg);
}

}  // namespace codesift
