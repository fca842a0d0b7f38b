#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/pipeline.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

struct Setup {
  testsupport::ReplaySet set;
  std::vector<DatasetRecord> records;
  std::unique_ptr<GenerationBackend> backend;
  PipelineConfig cfg;
};

Setup setup(int count, RepairStructure structure = RepairStructure::P1) {
  Setup s;
  s.set = testsupport::build_replay_set(testsupport::make_temp_dir("pipeline"), count, "test-model", structure);
  s.records = load_dataset(s.set.dataset_path, DatasetFormat::jsonl_generic);
  BackendConfig bc;
  bc.fixture_path = s.set.fixture_path;
  s.backend = make_backend(bc);
  s.cfg.request.model_id = s.set.model;
  s.cfg.policy.structure = structure;
  return s;
}

}  // namespace

TEST_CASE("pipeline over replayed prompts") {
  auto s = setup(12);
  const auto report = run_pipeline(s.records, s.cfg, *s.backend);
  REQUIRE(report.rows.size() == 12);
  CHECK(report.failures == 0);
  CHECK(report.dataset_name == "synthetic");
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i - 1].task_id < report.rows[i].task_id);
  }
  long total = 0;
  for (const auto& row : report.rows) {
    CAPTURE(row.task_id);
    CHECK_FALSE(row.error_code);
    CHECK(row.n == 10);
    REQUIRE(row.eligible);
    CHECK(row.ranking.size() == row.eligible->x());
    CHECK(row.raw_compilable <= static_cast<int>(row.eligible->x()));
    REQUIRE(row.top1);
    CHECK(row.repair.rounds <= 1);
    CHECK(row.repair.triggered == (row.top1->score < 1.0));
    CHECK(row.good_before == (row.top1->score == 1.0));
    const std::vector<std::string> base{"generate", "filter", "rank"};
    if (row.repair.rounds == 1) {
      CHECK(row.trace == std::vector<std::string>{"generate", "filter", "rank", "repair_prompt",
                                                  "generate", "filter", "rank"});
      REQUIRE(row.repair.prompt);
      CHECK(row.repair.prompt->target_position == row.top1->position);
      CHECK(row.repair.eligible);
    } else {
      CHECK(row.trace == base);
    }
    CHECK(std::count(row.trace.begin(), row.trace.end(), "repair_prompt") == row.repair.rounds);
    total += row.n;
  }
  CHECK(report.overall.counts.total == total);
  CHECK(report.by_language.size() == 2);
  CHECK(report.by_language.at(Language::python).counts.prompts +
            report.by_language.at(Language::java).counts.prompts ==
        12);
  CHECK(report.overall.compilability.pct_after >= report.overall.compilability.pct_before);
}

TEST_CASE("repair actually improves flawed prompts") {
  auto s = setup(10);
  const auto report = run_pipeline(s.records, s.cfg, *s.backend);
  int triggered = 0;
  int good = 0;
  for (const auto& row : report.rows) {
    if (!row.repair.triggered) continue;
    ++triggered;
    good += row.repair.good;
  }
  CHECK(triggered > 0);
  CHECK(good > 0);
  CHECK(report.overall.repair_triggered == triggered);
  CHECK(report.overall.repair_good == good);
}

TEST_CASE("repair structures") {
  for (auto st : {RepairStructure::P2, RepairStructure::P3}) {
    auto s = setup(6, st);
    const auto report = run_pipeline(s.records, s.cfg, *s.backend);
    CHECK(report.failures == 0);
    for (const auto& row : report.rows) {
      if (row.repair.prompt) CHECK(row.repair.prompt->structure == st);
    }
    CHECK(report_json(report)["config"]["repair_structure"] == std::string(to_string(st)));
  }
}

TEST_CASE("tau below the achievable scores disables repair") {
  auto s = setup(6);
  s.cfg.policy.tau = 0.0;
  const auto report = run_pipeline(s.records, s.cfg, *s.backend);
  for (const auto& row : report.rows) CHECK_FALSE(row.repair.triggered);
}

TEST_CASE("missing fixtures become row failures") {
  auto s = setup(4);
  DatasetRecord extra;
  extra.task_id = "zz-unrecorded";
  extra.prompt = "def nothing():\n";
  extra.source_dataset = "synthetic";
  s.records.push_back(extra);
  const auto report = run_pipeline(s.records, s.cfg, *s.backend);
  CHECK(report.failures == 1);
  const auto& row = report.rows.back();
  CHECK(row.task_id == "zz-unrecorded");
  CHECK(row.error_code == std::optional<std::string>("FixtureMiss"));
  CHECK(row.counts().total == 0);
  const auto j = report_json(report);
  CHECK(j["prompts"].back()["error"]["code"] == "FixtureMiss");
  CHECK(j["summary"]["failures"] == 1);
}

TEST_CASE("ndcg with labels") {
  auto s = setup(10);
  const auto plain = run_pipeline(s.records, s.cfg, *s.backend);
  std::map<std::string, Prompt> prompts;
  for (const auto& r : s.records) prompts[r.task_id] = r.to_prompt();

  // 3 for the first clean snippet in backend order, 2 for later ones
  const Assessor assessor;
  std::map<std::string, ManualLabels> labels;
  std::map<std::string, std::map<int, int>> rel;
  for (const auto& row : plain.rows) {
    if (row.task_id == "task-03") continue;  // left unlabeled on purpose
    ManualLabels l;
    for (const auto& c : row.eligible->cleaned) {
      const auto qa = assessor.assess(c, prompts.at(row.task_id));
      if (qa.score == 1.0) {
        l[c.position] = l.empty() ? 3 : 2;
        rel[row.task_id][c.position] = l[c.position];
      } else {
        rel[row.task_id][c.position] = 1;
      }
    }
    labels[row.task_id] = l;
  }
  s.cfg.labels = labels;
  const auto report = run_pipeline(s.records, s.cfg, *s.backend);
  CHECK(report.failures == 0);
  int rows_with_ndcg = 0;
  std::vector<double> model_scores;
  std::vector<double> framework_scores;
  for (const auto& row : report.rows) {
    CAPTURE(row.task_id);
    if (row.task_id == "task-03") {
      CHECK_FALSE(row.ndcg);
      continue;
    }
    REQUIRE(row.ndcg);
    ++rows_with_ndcg;
    const auto& r = rel[row.task_id];
    std::vector<int> model;
    for (int pos = 1; pos <= row.n; ++pos) model.push_back(r.count(pos) ? r.at(pos) : 0);
    std::vector<int> framework;
    for (int pos : row.ranking) framework.push_back(r.at(pos));
    framework.resize(static_cast<std::size_t>(row.n), 0);
    CHECK(std::fabs(row.ndcg->model - testsupport::ndcg_oracle(model)) < 1e-9);
    CHECK(std::fabs(row.ndcg->framework - testsupport::ndcg_oracle(framework)) < 1e-9);
    CHECK(row.ndcg->framework >= row.ndcg->model - 1e-12);
    CHECK(row.ndcg->model_rel1 == model[0]);
    CHECK(row.ndcg->framework_rel1 == framework[0]);
    model_scores.push_back(row.ndcg->model);
    framework_scores.push_back(row.ndcg->framework);
  }
  CHECK(report.overall.ndcg_prompts == rows_with_ndcg);
  double mean = 0;
  for (double v : framework_scores) mean += v;
  CHECK(report.overall.framework_ndcg == doctest::Approx(mean / static_cast<double>(framework_scores.size())));
  const auto j = report_json(report);
  CHECK(j["config"]["labels"] == true);
  CHECK(j["summary"]["overall"]["ndcg"]["prompts"] == rows_with_ndcg);

  // a clean snippet without a label fails that prompt only
  auto partial = labels;
  partial["task-04"].clear();
  s.cfg.labels = partial;
  const auto broken = run_pipeline(s.records, s.cfg, *s.backend);
  CHECK(broken.failures == 1);
  CHECK(broken.rows[4].task_id == "task-04");
  CHECK(broken.rows[4].error_code == std::optional<std::string>("MissingLabelError"));
}

TEST_CASE("report json layout") {
  auto s = setup(4);
  s.cfg.timings = false;
  const auto j = report_json(run_pipeline(s.records, s.cfg, *s.backend));
  CHECK(j["format_version"] == 1);
  CHECK(j["config"]["n"] == 10);
  CHECK(j["config"]["tau"] == 1.0);
  CHECK(j["config"]["repair_structure"] == "p1");
  CHECK(j["config"]["model"] == "test-model");
  CHECK_FALSE(j["config"].contains("jobs"));
  CHECK(j["prompts"].size() == 4);
  CHECK_FALSE(j["prompts"][0].contains("timings"));
  CHECK_FALSE(j["summary"]["overall"].contains("mean_timings"));
  CHECK(j["summary"]["languages"].contains("python"));
  CHECK(j["summary"]["languages"].contains("java"));
  CHECK(j["summary"]["overall"]["ndcg"]["model_mean"].is_null());

  s.cfg.timings = true;
  const auto t = report_json(run_pipeline(s.records, s.cfg, *s.backend));
  const auto& mt = t["summary"]["overall"]["mean_timings"];
  CHECK(mt["total_s"].get<double>() == doctest::Approx(mt["filtering_s"].get<double>() +
                                                       mt["ranking_s"].get<double>() +
                                                       mt["repair_prompt_s"].get<double>()));
  CHECK(t["prompts"][0].contains("timings"));
}

TEST_CASE("jobs do not change the report") {
  auto s = setup(10);
  s.cfg.jobs = 1;
  const auto one = dump(report_json(run_pipeline(s.records, s.cfg, *s.backend)));
  s.cfg.jobs = 4;
  const auto four = dump(report_json(run_pipeline(s.records, s.cfg, *s.backend)));
  CHECK(one == four);
}

TEST_CASE("config validation happens before any work") {
  auto s = setup(2);
  s.cfg.request.n = 0;
  CHECK_THROWS_AS(run_pipeline(s.records, s.cfg, *s.backend), InvalidValueError);
  s.cfg.request.n = 10;
  s.cfg.scheme = validate_scheme({{"not_registered", 1.0}});
  CHECK_THROWS_AS(run_pipeline(s.records, s.cfg, *s.backend), UnknownFactorError);
}

TEST_CASE("weights and quality config") {
  const auto scheme = parse_weights("smell_free=0.75,compilable=0.25");
  REQUIRE(scheme.m() == 2);
  CHECK(scheme.factors()[1].factor_id == "compilable");
  CHECK(scheme.factors()[1].weight == 0.25);
  CHECK_THROWS_AS(parse_weights("smell_free=0.5"), WeightSumError);
  CHECK_THROWS_AS(parse_weights("nope=1"), UnknownFactorError);
  CHECK_THROWS_AS(parse_weights("smell_free"), ConfigError);
  CHECK_THROWS_AS(parse_weights("smell_free=abc"), ConfigError);

  std::optional<QualityScheme> out;
  std::vector<AnalyzerSpec> analyzers;
  load_quality_config(parse_json(R"({"scheme": [{"factor": "smell_free", "weight": 1.0}],
      "analyzers": [{"name": "bandit", "command_template": "bandit -f json {file}", "language": "python",
                     "timeout_ms": 1000}]})",
                                 "cfg"),
                      out, analyzers);
  REQUIRE(out);
  CHECK(out->m() == 1);
  REQUIRE(analyzers.size() == 1);
  CHECK(analyzers[0].timeout_ms == 1000);
  CHECK(analyzers[0].command_template == "bandit -f json {file}");
  analyzers.clear();
  CHECK_THROWS_AS(load_quality_config(parse_json(R"({"analyzers": [{"name": "x", "command_template": "x"}]})", "c"),
                                      out, analyzers),
                  ConfigError);
  CHECK_THROWS_AS(load_quality_config(parse_json(R"({"scheme": [{"factor": "smell_free", "weight": 0.3}]})", "c"),
                                      out, analyzers),
                  WeightSumError);
  CHECK_THROWS_AS(load_quality_config(parse_json(R"({"analyzers": [{"name": "x", "command_template": "x",
                                                    "language": "python"}]})", "c"),
                                      out, analyzers),
                  ConfigError);
}

TEST_CASE("label files") {
  const std::string dir = testsupport::make_temp_dir("labels");
  testsupport::write_file(dir + "/ok.json", R"({"t1": {"1": 3, "4": 2}, "t2": {}})");
  const auto labels = load_labels(dir + "/ok.json");
  CHECK(labels.at("t1").at(4) == 2);
  CHECK(labels.at("t2").empty());
  testsupport::write_file(dir + "/bad.json", R"({"t1": {"1": 1}})");
  CHECK_THROWS_AS(load_labels(dir + "/bad.json"), IllegalLabelError);
  testsupport::write_file(dir + "/shape.json", R"([1, 2])");
  CHECK_THROWS_AS(load_labels(dir + "/shape.json"), MalformedRecord);
  CHECK_THROWS_AS(load_labels(dir + "/absent.json"), IoError);
}
