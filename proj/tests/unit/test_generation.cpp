#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "codesift/errors.hpp"
#include "codesift/generation.hpp"
#include "support.hpp"

using namespace codesift;
using nlohmann::json;

namespace {

std::string fnv_oracle(const std::string& bytes) {
  unsigned long long h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

GenerationRequest request(const std::string& prompt, int n = 2) {
  GenerationRequest r;
  r.prompt_text = prompt;
  r.n = n;
  r.model_id = "m";
  return r;
}

BackendConfig replay_config(const std::string& path) {
  BackendConfig cfg;
  cfg.kind = BackendKind::replay;
  cfg.fixture_path = path;
  return cfg;
}

// Local endpoint whose first `failures` requests answer 503.
struct FakeServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  int failures = 0;
  int status = 200;
  int returned = -1;  // completions returned; -1 means n
  std::mutex mutex;
  json last_body;
  std::string last_auth;

  FakeServer() {
    server.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int hit = ++hits;
      {
        std::lock_guard lock(mutex);
        last_body = json::parse(req.body);
        last_auth = req.get_header_value("Authorization");
      }
      if (hit <= failures) {
        res.status = 503;
        return;
      }
      if (status != 200) {
        res.status = status;
        return;
      }
      const json body = json::parse(req.body);
      const int n = returned >= 0 ? returned : body.at("n").get<int>();
      json choices = json::array();
      // reverse order so the client has to sort by index
      for (int i = n - 1; i >= 0; --i) {
        if (body.contains("messages")) {
          choices.push_back({{"index", i}, {"message", {{"content", "chat " + std::to_string(i)}}}});
        } else {
          choices.push_back({{"index", i}, {"text", "text " + std::to_string(i)}});
        }
      }
      res.set_content(json{{"choices", choices}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }

  BackendConfig config(BackendKind kind = BackendKind::http_completion) const {
    BackendConfig cfg;
    cfg.kind = kind;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/completions";
    cfg.retry.base_backoff_ms = 1;
    cfg.request_timeout_ms = 5000;
    return cfg;
  }
};

}  // namespace

TEST_CASE("fixture key is FNV-1a over model, n and prompt") {
  const std::string bytes = std::string("m") + '\0' + "10" + '\0' + "def f():\n";
  CHECK(fixture_key("def f():\n", "m", 10) == fnv_oracle(bytes));
  CHECK(fnv_oracle("") == "cbf29ce484222325");
  CHECK(fixture_key("p", "m", 10) != fixture_key("p", "m", 9));
  CHECK(fixture_key("p", "a", 1).size() == 16);
}

TEST_CASE("defaults") {
  GenerationRequest r;
  CHECK(r.n == 10);
  CHECK(r.max_new_tokens == 128);
  CHECK(default_max_tokens(BackendKind::http_chat) == 512);
  CHECK(default_max_tokens(BackendKind::http_completion) == 128);
  CHECK(parse_backend_kind("http_chat") == BackendKind::http_chat);
  CHECK_THROWS_AS(parse_backend_kind("grpc"), InvalidValueError);
  r.n = 0;
  CHECK_THROWS_AS(r.validate(), InvalidValueError);
}

TEST_CASE("backend config validation") {
  BackendConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(make_backend(cfg), ConfigError);
  cfg.kind = BackendKind::http_completion;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.endpoint_url = "http://x/";
  CHECK_NOTHROW(cfg.validate());
  cfg.max_inflight = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.max_inflight = 1;
  cfg.endpoint_url = "no-scheme";
  CHECK_THROWS_AS(make_backend(cfg), ConfigError);
}

TEST_CASE("record then replay") {
  const std::string dir = testsupport::make_temp_dir("replay");
  const std::string path = dir + "/f.jsonl";
  record_fixture(request("a"), {"x", "y"}, path);
  record_fixture(request("b", 1), {"z"}, path);
  CHECK_THROWS_AS(record_fixture(request("a"), {"x", "y"}, path), DuplicateKeyError);
  CHECK_THROWS_AS(record_fixture(request("c"), {"x"}, path), PreconditionError);
  CHECK_THROWS_AS(record_fixture(request("c"), {"x", "y"}, dir + "/missing/f.jsonl"), IoError);

  auto backend = make_backend(replay_config(path));
  CHECK(backend->kind() == BackendKind::replay);
  CHECK(backend->complete(request("a")) == std::vector<std::string>{"x", "y"});
  CHECK(backend->complete(request("b", 1)) == std::vector<std::string>{"z"});
  CHECK_THROWS_AS(backend->complete(request("zzz")), FixtureMiss);
  CHECK_THROWS_AS(backend->complete(request("b", 2)), FixtureMiss);

  record_fixture(request("late"), {"1", "2"}, path);
  CHECK(backend->complete(request("late")) == std::vector<std::string>{"1", "2"});

  const Prompt p{"id", Language::java, "a", "d", std::nullopt};
  const auto inv = generate(p, request("a"), *backend);
  CHECK(inv.n() == 2);
  CHECK(inv.suggestions[1].position == 2);
  CHECK(inv.suggestions[1].language == Language::java);
  CHECK(inv.suggestions[0].text == "x");
}

TEST_CASE("replay file problems") {
  const std::string dir = testsupport::make_temp_dir("replay-bad");
  CHECK_THROWS_AS(make_backend(replay_config(dir + "/absent.jsonl"))->complete(request("a")),
                  BackendUnavailable);
  testsupport::write_file(dir + "/bad.jsonl", "{not json\n");
  CHECK_THROWS_AS(make_backend(replay_config(dir + "/bad.jsonl"))->complete(request("a")), MalformedRecord);
  const std::string key = fixture_key("a", "m", 3);
  testsupport::write_file(dir + "/short.jsonl",
                          json{{"key", key}, {"completions", {"only", "two"}}}.dump() + "\n");
  CHECK_THROWS_AS(make_backend(replay_config(dir + "/short.jsonl"))->complete(request("a", 3)),
                  TruncatedResponse);
}

TEST_CASE("concurrent replay reads") {
  const std::string dir = testsupport::make_temp_dir("replay-mt");
  const std::string path = dir + "/f.jsonl";
  for (int i = 0; i < 20; ++i) record_fixture(request("p" + std::to_string(i)), {"a" + std::to_string(i), "b"}, path);
  auto backend = make_backend(replay_config(path));
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) {
        if (backend->complete(request("p" + std::to_string(i)))[0] == "a" + std::to_string(i)) ++ok;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 80);
}

TEST_CASE("http completion with retries") {
  FakeServer server;
  server.failures = 2;
  auto backend = make_backend(server.config());
  auto req = request("def f():\n", 3);
  req.max_new_tokens = 64;
  CHECK(backend->complete(req) == std::vector<std::string>{"text 0", "text 1", "text 2"});
  CHECK(server.hits == 3);
  CHECK(server.last_body["prompt"] == "def f():\n");
  CHECK(server.last_body["n"] == 3);
  CHECK(server.last_body["max_tokens"] == 64);
  CHECK(server.last_body["model"] == "m");
  CHECK(server.last_body["top_p"].get<double>() == doctest::Approx(0.95));
  CHECK(server.last_auth.empty());
}

TEST_CASE("http retries give up") {
  FakeServer server;
  server.failures = 100;
  auto cfg = server.config();
  cfg.retry.max_retries = 2;
  CHECK_THROWS_AS(make_backend(cfg)->complete(request("x")), BackendUnavailable);
  CHECK(server.hits == 3);
}

TEST_CASE("http client errors are not retried") {
  FakeServer server;
  server.status = 400;
  CHECK_THROWS_AS(make_backend(server.config())->complete(request("x")), BackendUnavailable);
  CHECK(server.hits == 1);
}

TEST_CASE("http short responses") {
  FakeServer server;
  server.returned = 1;
  CHECK_THROWS_AS(make_backend(server.config())->complete(request("x", 2)), TruncatedResponse);
}

TEST_CASE("http chat and auth") {
  FakeServer server;
  auto cfg = server.config(BackendKind::http_chat);
  cfg.auth_env_var = "CODESIFT_TEST_TOKEN";
  ::unsetenv("CODESIFT_TEST_TOKEN");
  CHECK_THROWS_AS(make_backend(cfg), AuthMissing);
  ::setenv("CODESIFT_TEST_TOKEN", "secret", 1);
  auto backend = make_backend(cfg);
  CHECK(backend->complete(request("hi")) == std::vector<std::string>{"chat 0", "chat 1"});
  CHECK(server.last_auth == "Bearer secret");
  CHECK(server.last_body["messages"][0]["content"] == "hi");
  CHECK(server.last_body["messages"][0]["role"] == "user");
  ::unsetenv("CODESIFT_TEST_TOKEN");
}

TEST_CASE("http unreachable endpoint") {
  int port = 0;
  {
    FakeServer probe;
    port = probe.port;
  }
  BackendConfig cfg;
  cfg.kind = BackendKind::http_completion;
  cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/completions";
  cfg.retry = {1, 1};
  cfg.request_timeout_ms = 500;
  CHECK_THROWS_AS(make_backend(cfg)->complete(request("x")), BackendUnavailable);
}
