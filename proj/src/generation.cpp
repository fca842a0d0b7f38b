#include "codesift/generation.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "codesift/errors.hpp"

namespace codesift {

using nlohmann::json;

std::unique_ptr<GenerationBackend> make_http_backend(const BackendConfig& cfg);

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::http_completion: return "http_completion";
    case BackendKind::http_chat: return "http_chat";
    case BackendKind::replay: return "replay";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view tag) {
  if (tag == "http_completion") return BackendKind::http_completion;
  if (tag == "http_chat") return BackendKind::http_chat;
  if (tag == "replay") return BackendKind::replay;
  throw InvalidValueError("unknown backend kind '" + std::string(tag) + "'");
}

int default_max_tokens(BackendKind kind) {
  return kind == BackendKind::http_chat ? kChatMaxTokens : kCompletionMaxTokens;
}

void GenerationRequest::validate() const {
  if (n < 1) throw InvalidValueError("n must be at least 1");
  if (max_new_tokens < 1) throw InvalidValueError("max_new_tokens must be at least 1");
}

void BackendConfig::validate() const {
  if (kind == BackendKind::replay && !fixture_path) {
    throw ConfigError("replay backend requires a fixture path");
  }
  if (kind != BackendKind::replay && !endpoint_url) {
    throw ConfigError(std::string(to_string(kind)) + " backend requires an endpoint url");
  }
  if (max_inflight < 1) throw ConfigError("max_inflight must be at least 1");
  if (retry.max_retries < 0 || retry.base_backoff_ms < 0) {
    throw ConfigError("retry settings must be non-negative");
  }
}

std::string fixture_key(const std::string& prompt_text, const std::string& model_id, int n) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(model_id);
  mix(std::string_view("\0", 1));
  mix(std::to_string(n));
  mix(std::string_view("\0", 1));
  mix(prompt_text);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct FixtureRecord {
  std::string key;
  std::vector<std::string> completions;
};

std::vector<FixtureRecord> read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailable("cannot open fixture file " + path);
  std::vector<FixtureRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("key").get<std::string>(),
                     j.at("completions").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw MalformedRecord(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

class ReplayBackend final : public GenerationBackend {
 public:
  explicit ReplayBackend(std::string path) : path_(std::move(path)) { reload(); }

  BackendKind kind() const override { return BackendKind::replay; }

  std::vector<std::string> complete(const GenerationRequest& req) override {
    req.validate();
    const std::string key = fixture_key(req.prompt_text, req.model_id, req.n);
    auto found = lookup(key);
    if (!found) {
      std::unique_lock lock(mutex_);
      load_locked();
      lock.unlock();
      found = lookup(key);
    }
    if (!found) throw FixtureMiss("no replay record for key " + key);
    if (static_cast<int>(found->size()) < req.n) {
      throw TruncatedResponse("replay record " + key + " has " + std::to_string(found->size()) +
                              " completions, expected " + std::to_string(req.n));
    }
    found->resize(static_cast<std::size_t>(req.n));
    return *found;
  }

 private:
  std::optional<std::vector<std::string>> lookup(const std::string& key) {
    std::shared_lock lock(mutex_);
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }
  void reload() {
    std::unique_lock lock(mutex_);
    load_locked();
  }
  void load_locked() {
    records_.clear();
    for (auto& r : read_fixture(path_)) records_.emplace(r.key, std::move(r.completions));
  }

  std::string path_;
  std::shared_mutex mutex_;
  std::unordered_map<std::string, std::vector<std::string>> records_;
};

std::mutex& record_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::replay) return std::make_unique<ReplayBackend>(*cfg.fixture_path);
  return make_http_backend(cfg);
}

SuggestionInventory generate(const Prompt& prompt, const GenerationRequest& req,
                             GenerationBackend& backend) {
  req.validate();
  auto completions = backend.complete(req);
  if (static_cast<int>(completions.size()) < req.n) {
    throw TruncatedResponse("backend returned " + std::to_string(completions.size()) + " of " +
                            std::to_string(req.n) + " completions");
  }
  completions.resize(static_cast<std::size_t>(req.n));
  return make_inventory(prompt, completions);
}

void record_fixture(const GenerationRequest& req, const std::vector<std::string>& completions,
                    const std::string& fixture_path) {
  req.validate();
  if (static_cast<int>(completions.size()) != req.n) {
    throw PreconditionError("expected " + std::to_string(req.n) + " completions, got " +
                            std::to_string(completions.size()));
  }
  const std::string key = fixture_key(req.prompt_text, req.model_id, req.n);
  std::lock_guard lock(record_mutex());
  if (std::ifstream(fixture_path)) {
    for (const auto& r : read_fixture(fixture_path)) {
      if (r.key == key) throw DuplicateKeyError("fixture already holds key " + key);
    }
  }
  std::ofstream out(fixture_path, std::ios::app);
  if (!out) throw IoError("cannot open " + fixture_path + " for append");
  const json j = {{"key", key},
                  {"prompt", req.prompt_text},
                  {"model", req.model_id},
                  {"n", req.n},
                  {"completions", completions}};
  out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  if (!out) throw IoError("write to " + fixture_path + " failed");
}

}  // namespace codesift
