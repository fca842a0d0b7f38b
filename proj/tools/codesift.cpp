#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/json_io.hpp"
#include "codesift/metrics.hpp"
#include "codesift/pipeline.hpp"
#include "codesift/rank.hpp"
#include "codesift/repair.hpp"
#include "codesift/report.hpp"

using namespace codesift;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") return read_stream(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_stream(in);
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw IoError("cannot write " + path);
}

struct Options {
  std::string config_path;
  std::string dataset;
  std::string format = "jsonl_humaneval";
  std::string language = "python";
  std::string backend = "replay";
  std::string model;
  std::string endpoint;
  std::string auth_env;
  std::string fixtures;
  int n = 10;
  int max_tokens = 0;
  double temperature = 0.8;
  double top_p = 0.95;
  int max_inflight = 4;
  int retries = 3;
  int backoff_ms = 500;
  double tau = 1.0;
  std::string structure = "p1";
  std::string weights;
  std::string analyzers;
  bool no_builtin = false;
  int max_analyzer_procs = 4;
  std::string out;
  std::string tables;
  int jobs = 1;
  std::string labels;
  bool timings = false;
  std::string input;
  bool json_output = false;
  std::vector<std::string> reports;
};

// Config file values apply to options not given on the command line.
void apply_config(const CLI::App& app, Options& o) {
  if (o.config_path.empty()) return;
  const Json cfg = parse_json(read_input(o.config_path), o.config_path);
  if (!cfg.is_object()) throw ConfigError(o.config_path + ": expected a JSON object");
  auto take = [&](const char* flag, const char* key, auto& field) {
    if (app.count(flag) > 0 || !cfg.contains(key)) return;
    try {
      cfg.at(key).get_to(field);
    } catch (const Json::exception& e) {
      throw ConfigError(o.config_path + ": bad value for '" + key + "': " + e.what());
    }
  };
  take("--dataset", "dataset", o.dataset);
  take("--format", "format", o.format);
  take("--language", "language", o.language);
  take("--backend", "backend", o.backend);
  take("--model", "model", o.model);
  take("--endpoint", "endpoint", o.endpoint);
  take("--auth-env", "auth_env", o.auth_env);
  take("--fixtures", "fixtures", o.fixtures);
  take("--n", "n", o.n);
  take("--max-tokens", "max_tokens", o.max_tokens);
  take("--temperature", "temperature", o.temperature);
  take("--top-p", "top_p", o.top_p);
  take("--max-inflight", "max_inflight", o.max_inflight);
  take("--retries", "retries", o.retries);
  take("--backoff-ms", "backoff_ms", o.backoff_ms);
  take("--tau", "tau", o.tau);
  take("--repair-structure", "repair_structure", o.structure);
  take("--weights", "weights", o.weights);
  take("--jobs", "jobs", o.jobs);
  take("--labels", "labels", o.labels);
}

struct QualitySetup {
  QualityScheme scheme = QualityScheme::binary();
  std::vector<AnalyzerSpec> analyzers;
};

QualitySetup quality_setup(const Options& o) {
  QualitySetup q;
  std::optional<QualityScheme> scheme;
  if (!o.config_path.empty()) {
    load_quality_config(parse_json(read_input(o.config_path), o.config_path), scheme, q.analyzers);
  }
  if (!o.analyzers.empty()) {
    Json j = parse_json(read_input(o.analyzers), o.analyzers);
    if (j.is_array()) j = Json{{"analyzers", j}};
    q.analyzers.clear();
    std::optional<QualityScheme> ignored;
    load_quality_config(Json{{"analyzers", j.at("analyzers")}}, ignored, q.analyzers);
  }
  if (!o.weights.empty()) scheme = parse_weights(o.weights);
  if (scheme) q.scheme = *scheme;
  set_max_analyzer_processes(o.max_analyzer_procs);
  return q;
}

BackendConfig backend_config(const Options& o) {
  BackendConfig b;
  b.kind = parse_backend_kind(o.backend);
  if (!o.endpoint.empty()) b.endpoint_url = o.endpoint;
  if (!o.auth_env.empty()) b.auth_env_var = o.auth_env;
  if (!o.fixtures.empty()) b.fixture_path = o.fixtures;
  b.max_inflight = o.max_inflight;
  b.retry = {o.retries, o.backoff_ms};
  b.validate();
  return b;
}

GenerationRequest request_template(const Options& o, BackendKind kind) {
  GenerationRequest r;
  r.n = o.n;
  r.max_new_tokens = o.max_tokens > 0 ? o.max_tokens : default_max_tokens(kind);
  r.temperature = o.temperature;
  r.top_p = o.top_p;
  r.model_id = o.model;
  r.validate();
  return r;
}

// Prompt objects on stdin may omit the id and language.
Json normalize_prompt(Json j, const Options& o) {
  if (!j.is_object()) throw MalformedRecord("prompt must be an object");
  if (!j.contains("id")) j["id"] = "prompt";
  if (!j.contains("language")) j["language"] = o.language;
  return j;
}

int cmd_pipeline(const Options& o) {
  if (o.dataset.empty()) throw ConfigError("--dataset is required");
  const QualitySetup q = quality_setup(o);
  const BackendConfig bcfg = backend_config(o);
  PipelineConfig cfg;
  cfg.request = request_template(o, bcfg.kind);
  cfg.backend_kind = bcfg.kind;
  cfg.scheme = q.scheme;
  cfg.analyzers = q.analyzers;
  cfg.builtin_rules = !o.no_builtin;
  cfg.policy.tau = o.tau;
  cfg.policy.structure = parse_structure(o.structure);
  cfg.policy.validate();
  if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");
  cfg.jobs = o.jobs;
  cfg.timings = o.timings;
  if (!o.labels.empty()) cfg.labels = load_labels(o.labels);
  const auto records =
      load_dataset(o.dataset, parse_dataset_format(o.format), parse_language(o.language));
  auto backend = make_backend(bcfg);

  const PipelineReport report = run_pipeline(records, cfg, *backend);
  const Json j = report_json(report);
  write_output(o.out, dump(j));
  if (!o.tables.empty()) write_tables({j}, o.tables);
  for (const auto& row : report.rows) {
    if (row.error_code) {
      std::cerr << "error: " << *row.error_code << ": " << row.dataset << "/" << row.task_id << ": "
                << row.error_message.value_or("") << "\n";
    }
  }
  return report.failures > 0 ? kExitFailure : kExitOk;
}

int cmd_filter(const Options& o) {
  Json j = parse_json(read_input(o.input), "inventory");
  j["prompt"] = normalize_prompt(j.at("prompt"), o);
  SuggestionInventory inv = j.get<SuggestionInventory>();
  write_output(o.out, dump(Json(filter_inventory(inv))));
  return kExitOk;
}

int cmd_rank(const Options& o) {
  Json j = parse_json(read_input(o.input), "eligible set");
  j["prompt"] = normalize_prompt(j.at("prompt"), o);
  const EligibleSet eligible = j.get<EligibleSet>();
  const QualitySetup q = quality_setup(o);
  const Assessor assessor{q.scheme, q.analyzers, !o.no_builtin};
  write_output(o.out, dump(Json(rank(eligible, assess_all(assessor, eligible)))));
  return kExitOk;
}

// Accepts a ranked inventory (its top entry is used) or
// {"prompt": ..., "code": ..., "findings": [...]}.
int cmd_repair_prompt(const Options& o) {
  Json j = parse_json(read_input(o.input), "repair input");
  j["prompt"] = normalize_prompt(j.at("prompt"), o);
  const Prompt prompt = j["prompt"].get<Prompt>();
  std::string code;
  std::vector<Finding> findings;
  int position = 0;
  if (j.contains("entries")) {
    const RankedInventory ranked = j.get<RankedInventory>();
    const RankedEntry& top = top1(ranked);
    code = top.suggestion.text;
    findings = top.assessment.findings;
    position = top.suggestion.position;
  } else {
    code = j.at("code").get<std::string>();
    findings = j.value("findings", std::vector<Finding>());
    position = j.value("position", 1);
  }
  RepairPrompt rp = build_repair_prompt(parse_structure(o.structure), code, findings, prompt);
  rp.origin_prompt_id = prompt.id;
  rp.target_position = position;
  write_output(o.out, o.json_output ? dump(Json(rp)) : rp.text + "\n");
  return kExitOk;
}

// {"ndcg": [[labels], ...], "kappa": {"a": [...], "b": [...]},
//  "t_test": {"x": [...], "y": [...]}}; every key is optional.
int cmd_eval(const Options& o) {
  const Json in = parse_json(read_input(o.input), "eval input");
  Json out = Json::object();
  if (in.contains("ndcg")) {
    Json scores = Json::array();
    for (const auto& labels : in["ndcg"]) {
      RelevanceVector rv{labels.get<std::vector<int>>()};
      scores.push_back(ndcg_at_k(rv));
    }
    out["ndcg"] = scores;
  }
  if (in.contains("kappa")) {
    out["kappa"] = cohen_kappa(in["kappa"].at("a").get<std::vector<int>>(),
                               in["kappa"].at("b").get<std::vector<int>>());
  }
  if (in.contains("t_test")) {
    const auto r = paired_t_test(in["t_test"].at("x").get<std::vector<double>>(),
                                 in["t_test"].at("y").get<std::vector<double>>());
    out["t_test"] = Json{{"t", r.t}, {"p", r.p}};
  }
  write_output(o.out, dump(out));
  return kExitOk;
}

int cmd_tables(const Options& o) {
  if (o.reports.empty()) throw ConfigError("at least one report is required");
  std::vector<Json> reports;
  for (const auto& path : o.reports) reports.push_back(parse_json(read_input(path), path));
  if (o.tables.empty()) {
    std::cout << compilability_table_csv(reports) << "\n"
              << ndcg_table_csv(reports) << "\n"
              << timing_table_csv(reports);
  } else {
    write_tables(reports, o.tables);
  }
  return kExitOk;
}

// JSON lines of {"prompt": str, "completions": [str, ...]}.
int cmd_record(const Options& o) {
  if (o.fixtures.empty()) throw ConfigError("--fixtures is required");
  std::istringstream lines(read_input(o.input));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parse_json(line, "record line " + std::to_string(line_no));
    GenerationRequest req;
    req.model_id = o.model;
    req.prompt_text = j.at("prompt").get<std::string>();
    const auto completions = j.at("completions").get<std::vector<std::string>>();
    req.n = j.value("n", static_cast<int>(completions.size()));
    record_fixture(req, completions, o.fixtures);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-process LLM code suggestions: filter, rank by quality, repair."};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config; flags override its values");
  };
  auto add_language = [&](CLI::App* cmd) {
    cmd->add_option("--language", o.language, "Default language")
        ->check(CLI::IsMember({"python", "java"}));
  };
  auto add_quality = [&](CLI::App* cmd) {
    cmd->add_option("--weights", o.weights,
                    "Quality scheme as factor=weight,... (empty: smell_free=1.0)");
    cmd->add_option("--analyzers", o.analyzers, "JSON file listing external analyzers");
    cmd->add_flag("--no-builtin", o.no_builtin, "Disable the built-in rule set");
    cmd->add_option("--max-analyzer-procs", o.max_analyzer_procs,
                    "Concurrent analyzer processes");
  };
  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--in", o.input, "Input file (default stdin)");
    cmd->add_option("--out", o.out, "Output file (default stdout)");
  };

  auto* pipeline = app.add_subcommand("pipeline", "Run every phase over a dataset");
  add_config(pipeline);
  pipeline->add_option("--dataset", o.dataset, "Dataset path");
  pipeline->add_option("--format", o.format, "Dataset format")
      ->check(CLI::IsMember({"jsonl_humaneval", "jsonl_generic", "csv_prompts"}));
  add_language(pipeline);
  pipeline->add_option("--backend", o.backend, "Generation backend")
      ->check(CLI::IsMember({"replay", "http_completion", "http_chat"}));
  pipeline->add_option("--model", o.model, "Model id sent to the backend");
  pipeline->add_option("--endpoint", o.endpoint, "HTTP endpoint URL");
  pipeline->add_option("--auth-env", o.auth_env, "Environment variable holding the API token");
  pipeline->add_option("--fixtures", o.fixtures, "Replay fixture file (JSON lines)");
  pipeline->add_option("--n", o.n, "Suggestions per prompt");
  pipeline->add_option("--max-tokens", o.max_tokens, "New-token limit")
      ->default_str("128, or 512 for http_chat");
  pipeline->add_option("--temperature", o.temperature, "Sampling temperature");
  pipeline->add_option("--top-p", o.top_p, "Nucleus sampling mass");
  pipeline->add_option("--max-inflight", o.max_inflight, "Concurrent backend requests");
  pipeline->add_option("--retries", o.retries, "Retries for transient HTTP failures");
  pipeline->add_option("--backoff-ms", o.backoff_ms, "Base retry backoff");
  pipeline->add_option("--tau", o.tau, "Repair threshold on the top score")->default_str("1.0");
  pipeline->add_option("--repair-structure", o.structure, "Repair prompt structure")
      ->check(CLI::IsMember({"p1", "p2", "p3"}));
  add_quality(pipeline);
  pipeline->add_option("--out", o.out, "Report path (default stdout)");
  pipeline->add_option("--tables", o.tables, "Write CSV tables to <prefix>table{1,2,3}.csv");
  pipeline->add_option("--jobs", o.jobs, "Prompts processed in parallel");
  pipeline->add_option("--labels", o.labels, "Manual relevance labels (JSON)");
  pipeline->add_flag("--timings", o.timings, "Include phase timings in the report");

  auto* filter = app.add_subcommand("filter", "Inventory JSON -> eligible set JSON");
  add_language(filter);
  add_io(filter);

  auto* rank_cmd = app.add_subcommand("rank", "Eligible set JSON -> ranked inventory JSON");
  add_config(rank_cmd);
  add_language(rank_cmd);
  add_quality(rank_cmd);
  add_io(rank_cmd);

  auto* repair = app.add_subcommand("repair-prompt", "Ranked inventory JSON -> repair prompt");
  add_language(repair);
  repair->add_option("--structure,--repair-structure", o.structure, "Repair prompt structure")
      ->check(CLI::IsMember({"p1", "p2", "p3"}));
  repair->add_flag("--json", o.json_output, "Emit the prompt with metadata as JSON");
  add_io(repair);

  auto* eval = app.add_subcommand("eval", "NDCG, kappa and paired t-test over JSON input");
  add_io(eval);

  auto* tables = app.add_subcommand("tables", "Merge pipeline reports into CSV tables");
  tables->add_option("reports", o.reports, "Report files")->required();
  tables->add_option("--prefix", o.tables, "Write <prefix>table{1,2,3}.csv instead of stdout");

  auto* record = app.add_subcommand("record", "Append replay fixtures from JSON lines");
  record->add_option("--fixtures", o.fixtures, "Fixture file");
  record->add_option("--model", o.model, "Model id the records are keyed on");
  add_io(record);

  CLI11_PARSE(app, argc, argv);

  try {
    if (pipeline->parsed()) {
      apply_config(*pipeline, o);
      return cmd_pipeline(o);
    }
    if (rank_cmd->parsed()) {
      apply_config(*rank_cmd, o);
      return cmd_rank(o);
    }
    if (filter->parsed()) return cmd_filter(o);
    if (repair->parsed()) return cmd_repair_prompt(o);
    if (eval->parsed()) return cmd_eval(o);
    if (tables->parsed()) return cmd_tables(o);
    if (record->parsed()) return cmd_record(o);
  } catch (const Error& e) {
    // Per-prompt failures never reach here; they are rows in the report.
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed_record: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: internal_error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
