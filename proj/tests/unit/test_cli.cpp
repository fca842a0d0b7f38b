#include <doctest.h>

#include <json.hpp>

#include "codesift/analyzer.hpp"
#include "support.hpp"

using namespace codesift;
using nlohmann::json;
using testsupport::fixture_path;
using testsupport::read_file;
using testsupport::write_file;

namespace {

std::string quote(const std::string& s) { return "'" + s + "'"; }

ProcessResult cli(const std::string& args, const std::string& stdin_path = "") {
  std::string cmd = quote(CODESIFT_CLI) + " " + args;
  if (!stdin_path.empty()) cmd += " < " + quote(stdin_path);
  return run_shell(cmd, 60000);
}

struct Replay {
  std::string dir;
  testsupport::ReplaySet set;
};

const Replay& replay() {
  static const Replay r = [] {
    Replay out;
    out.dir = testsupport::make_temp_dir("cli");
    out.set = testsupport::build_replay_set(out.dir, 6, "cli-model");
    return out;
  }();
  return r;
}

std::string pipeline_args(const std::string& extra = "", const testsupport::ReplaySet* set = nullptr,
                          const std::string& model = "cli-model") {
  const auto& r = set ? *set : replay().set;
  return "pipeline --dataset " + quote(r.dataset_path) + " --format jsonl_generic --backend replay --model " +
         model + " --fixtures " + quote(r.fixture_path) + " " + extra;
}

}  // namespace

TEST_CASE("help lists every pipeline flag with its default") {
  const auto r = cli("pipeline --help");
  CHECK(r.exit_code == 0);
  for (const char* flag : {"--dataset", "--format", "--language", "--backend", "--model", "--endpoint",
                           "--fixtures", "--n", "--max-tokens", "--tau", "--repair-structure", "--weights",
                           "--analyzers", "--out", "--jobs"}) {
    CAPTURE(flag);
    CHECK(r.out.find(std::string(flag) + " ") != std::string::npos);
  }
  CHECK(r.out.find("--n INT [10]") != std::string::npos);
  CHECK(r.out.find("[128, or 512 for http_chat]") != std::string::npos);
  CHECK(r.out.find("--tau FLOAT [1.0]") != std::string::npos);
  CHECK(r.out.find("[p1]") != std::string::npos);
}

TEST_CASE("pipeline writes a report") {
  const std::string dir = testsupport::make_temp_dir("cli-p3");
  const auto set = testsupport::build_replay_set(dir, 6, "cli-model", RepairStructure::P3);
  const std::string out = dir + "/report.json";
  const auto r = cli(pipeline_args("--out " + quote(out) + " --tau 1.0 --repair-structure p3", &set));
  CHECK(r.exit_code == 0);
  const auto report = json::parse(read_file(out));
  CHECK(report["config"]["tau"] == 1.0);
  CHECK(report["config"]["repair_structure"] == "p3");
  CHECK(report["prompts"].size() == 6);
  CHECK(report["summary"]["failures"] == 0);
}

TEST_CASE("pipeline stdout is stable") {
  const auto a = cli(pipeline_args());
  const auto b = cli(pipeline_args("--jobs 3"));
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("pipeline config file, flags win") {
  const std::string cfg = replay().dir + "/cfg.json";
  write_file(cfg, R"({"tau": 0.0, "repair_structure": "p2", "n": 10})");
  const auto r = cli(pipeline_args("--config " + quote(cfg) + " --repair-structure p3"));
  REQUIRE(r.exit_code == 0);
  const auto report = json::parse(r.out);
  CHECK(report["config"]["tau"] == 0.0);
  CHECK(report["config"]["repair_structure"] == "p3");
}

TEST_CASE("pipeline exit codes") {
  const auto& rp = replay();
  const auto missing = cli("pipeline --dataset " + quote(rp.set.dataset_path) +
                           " --format jsonl_generic --fixtures /nonexistent/f.jsonl --model cli-model");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("BackendUnavailable") != std::string::npos);

  const auto wrong_model = cli(pipeline_args("", nullptr, "other"));
  CHECK(wrong_model.exit_code == 1);
  CHECK(wrong_model.err.find("FixtureMiss") != std::string::npos);

  CHECK(cli(pipeline_args("--weights smell_free=0.5")).exit_code == 2);
  CHECK(cli(pipeline_args("--tau 3")).exit_code == 2);
  CHECK(cli("pipeline --dataset /nonexistent.jsonl --fixtures x").exit_code == 2);
  CHECK(cli(pipeline_args("--repair-structure p9")).exit_code != 0);
}

TEST_CASE("phase subcommands compose") {
  const std::string dir = replay().dir;
  const std::string inv = dir + "/inv.json";
  write_file(inv, json{{"prompt", {{"id", "t"}, {"text", read_file(fixture_path("sql_show_user.prompt"))}}},
                       {"suggestions", {read_file(fixture_path("sql_show_user.py")), "garbage (", ""}}}
                      .dump());
  const auto filtered = cli("filter --language python", inv);
  REQUIRE(filtered.exit_code == 0);
  const auto es = json::parse(filtered.out);
  CHECK(es["x"] == 1);
  CHECK(es["dropped"].size() == 2);

  write_file(dir + "/eligible.json", filtered.out);
  const auto ranked = cli("rank", dir + "/eligible.json");
  REQUIRE(ranked.exit_code == 0);
  const auto rj = json::parse(ranked.out);
  CHECK(rj["order"] == json::array({1}));
  CHECK(rj["entries"][0]["assessment"]["score"] == 0.0);

  write_file(dir + "/ranked.json", ranked.out);
  const auto p1 = cli("repair-prompt --structure p1", dir + "/ranked.json");
  REQUIRE(p1.exit_code == 0);
  CHECK(p1.out == read_file(fixture_path("golden/repair_p1.txt")) + "\n");
  const auto p3 = cli("repair-prompt --structure p3 --json", dir + "/ranked.json");
  REQUIRE(p3.exit_code == 0);
  CHECK(json::parse(p3.out)["text"] == read_file(fixture_path("golden/repair_p3.txt")));

  CHECK(cli("rank", dir + "/ranked.json").exit_code == 2);
  write_file(dir + "/junk.json", "{not json");
  CHECK(cli("filter", dir + "/junk.json").exit_code == 2);
  CHECK(cli("rank", dir + "/junk.json").exit_code == 2);
  CHECK(cli("repair-prompt", dir + "/junk.json").exit_code == 2);
  CHECK(cli("eval", dir + "/junk.json").exit_code == 2);
  CHECK(cli("filter", inv).out == filtered.out);
}

TEST_CASE("repair-prompt without findings") {
  const std::string path = replay().dir + "/clean.json";
  write_file(path, json{{"prompt", {{"id", "t"}, {"text", "def f():\n"}}}, {"code", "def f():\n    pass\n"}}.dump());
  const auto r = cli("repair-prompt", path);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("NoFindingsError") != std::string::npos);
}

TEST_CASE("eval") {
  const std::string path = replay().dir + "/eval.json";
  write_file(path, R"({"ndcg": [[3,3,3,3,3,3,3,3,3,3], [0, 3]], "kappa": {"a": [1,2], "b": [1,2]},
                       "t_test": {"x": [1,2,3], "y": [0,0,0]}})");
  const auto r = cli("eval", path);
  REQUIRE(r.exit_code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["ndcg"][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["ndcg"][1].get<double>() == doctest::Approx(testsupport::ndcg_oracle({0, 3})));
  CHECK(j["kappa"] == 1.0);
  CHECK(j["t_test"]["t"].get<double>() == doctest::Approx(3.4641).epsilon(1e-4));
  write_file(path, R"({"t_test": {"x": [1], "y": [0]}})");
  CHECK(cli("eval", path).exit_code == 2);
}

TEST_CASE("record and tables") {
  const std::string dir = testsupport::make_temp_dir("cli-record");
  write_file(dir + "/in.jsonl", "{\"prompt\": \"def f():\\n\", \"completions\": [\"    return 1\\n\"]}\n");
  CHECK(cli("record --fixtures " + quote(dir + "/f.jsonl") + " --model m", dir + "/in.jsonl").exit_code == 0);
  CHECK(cli("record --fixtures " + quote(dir + "/f.jsonl") + " --model m", dir + "/in.jsonl").exit_code == 2);
  write_file(dir + "/d.jsonl", R"({"task_id": "a", "prompt": "def f():\n"})"
                               "\n");
  const auto run = cli("pipeline --dataset " + quote(dir + "/d.jsonl") + " --fixtures " + quote(dir + "/f.jsonl") +
                       " --model m --n 1 --out " + quote(dir + "/r.json"));
  CHECK(run.exit_code == 0);

  const auto t = cli("tables " + quote(fixture_path("report_fixture.json")) + " --prefix " + quote(dir + "/"));
  CHECK(t.exit_code == 0);
  CHECK(read_file(dir + "/table2.csv") == read_file(fixture_path("golden/table2.csv")));
  const auto both = cli("tables " + quote(fixture_path("report_fixture.json")) + " " + quote(dir + "/r.json"));
  CHECK(both.exit_code == 0);
  CHECK(both.out.find("language,metric,codeparrot-small,m\n") != std::string::npos);
}
