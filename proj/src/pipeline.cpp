#include "codesift/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/syntax.hpp"

namespace codesift {

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

TopSummary summarize(const RankedEntry& e) {
  return {e.suggestion.position, e.assessment.score, e.assessment.findings};
}

bool has_perfect(const RankedInventory& ranked) {
  return std::any_of(ranked.entries.begin(), ranked.entries.end(),
                     [](const RankedEntry& e) { return e.assessment.score >= 1.0; });
}

struct Scored {
  EligibleSet eligible;
  RankedInventory ranked;
};

Scored filter_and_rank(const SuggestionInventory& inv, const Assessor& assessor, PromptRow& row,
                       double& filter_s, double& rank_s) {
  Stopwatch sw;
  row.trace.emplace_back("filter");
  Scored s;
  s.eligible = filter_inventory(inv);
  filter_s += sw.lap();
  row.trace.emplace_back("rank");
  s.ranked = rank(s.eligible, assess_all(assessor, s.eligible));
  rank_s += sw.lap();
  return s;
}

PromptRow process(const DatasetRecord& rec, const PipelineConfig& cfg, const Assessor& assessor,
                  GenerationBackend& backend) {
  PromptRow row;
  row.dataset = rec.source_dataset;
  row.task_id = rec.task_id;
  row.language = rec.language;
  try {
    const Prompt prompt = rec.to_prompt();
    prompt.validate();
    GenerationRequest req = cfg.request;
    req.prompt_text = prompt.text;
    row.trace.emplace_back("generate");
    const SuggestionInventory inv = generate(prompt, req, backend);
    row.n = static_cast<int>(inv.n());
    for (const auto& s : inv.suggestions) {
      if (check_syntax(s.text, s.language).ok) ++row.raw_compilable;
    }

    auto first = filter_and_rank(inv, assessor, row, row.timings.filtering_s, row.timings.ranking_s);
    row.eligible = first.eligible;
    row.ranking = first.ranked.positions();
    if (first.ranked.entries.empty()) {
      row.timings.total_s = row.timings.filtering_s + row.timings.ranking_s;
      return row;
    }
    row.top1 = summarize(top1(first.ranked));
    row.good_before = has_perfect(first.ranked);

    if (cfg.labels) {
      auto it = cfg.labels->find(prompt.id);
      if (it != cfg.labels->end()) {
        const auto k = static_cast<std::size_t>(row.n);
        const auto model = model_order_relevance(first.ranked, &it->second, k);
        const auto framework = assign_relevance(first.ranked, &it->second, k);
        row.ndcg = NdcgSummary{ndcg_at_k(model), ndcg_at_k(framework), model.labels.front(),
                               framework.labels.front()};
      }
    }

    if (needs_repair(top1(first.ranked).assessment, cfg.policy)) {
      row.repair.triggered = true;
      Stopwatch sw;
      std::optional<RepairPrompt> rp;
      try {
        rp = prepare_repair(first.ranked, cfg.policy);
      } catch (const NoFindingsError& e) {
        row.repair.skipped = e.code();
      } catch (const NoLinedFindingError& e) {
        row.repair.skipped = e.code();
      }
      row.timings.repair_prompt_s += sw.lap();
      if (rp) {
        row.trace.emplace_back("repair_prompt");
        row.repair.prompt = rp;
        GenerationRequest repair_req = cfg.request;
        repair_req.prompt_text = rp->text;
        row.trace.emplace_back("generate");
        SuggestionInventory repaired = generate(prompt, repair_req, backend);
        const RankedEntry& top = top1(first.ranked);
        repaired.repair = RepairOrigin{top.suggestion.text, top.assessment.findings, rp->text};
        row.repair.rounds = 1;
        auto second = filter_and_rank(repaired, assessor, row, row.timings.repair_prompt_s,
                                      row.timings.repair_prompt_s);
        row.repair.eligible = second.eligible;
        row.repair.ranking = second.ranked.positions();
        if (!second.ranked.entries.empty()) {
          const RankedEntry& best = top1(second.ranked);
          row.repair.top1 = summarize(best);
          row.repair.good = has_perfect(second.ranked);
          row.repair.below_threshold = best.assessment.score < cfg.policy.tau;
        } else {
          row.repair.below_threshold = true;
        }
      }
    }
    row.timings.total_s =
        row.timings.filtering_s + row.timings.ranking_s + row.timings.repair_prompt_s;
  } catch (const Error& e) {
    row.error_code = e.code();
    row.error_message = e.what();
  } catch (const std::exception& e) {
    row.error_code = "internal_error";
    row.error_message = e.what();
  }
  return row;
}

void finish(LanguageSummary& s, const std::vector<const PromptRow*>& rows) {
  s.compilability = compilability_stats(s.counts);
  std::vector<double> model;
  std::vector<double> framework;
  int timed = 0;
  for (const auto* r : rows) {
    if (r->error_code) continue;
    ++timed;
    s.mean_timings += r->timings;
    if (r->repair.triggered) ++s.repair_triggered;
    if (r->repair.good) ++s.repair_good;
    if (r->good_before) ++s.good_before;
    if (!r->ndcg) continue;
    ++s.ndcg_prompts;
    if (r->ndcg->model_rel1 == kMaxRelevance) ++s.model_rel1_3;
    if (r->ndcg->framework_rel1 == kMaxRelevance) ++s.framework_rel1_3;
    model.push_back(r->ndcg->model);
    framework.push_back(r->ndcg->framework);
  }
  if (timed > 0) {
    s.mean_timings.filtering_s /= timed;
    s.mean_timings.ranking_s /= timed;
    s.mean_timings.repair_prompt_s /= timed;
    s.mean_timings.total_s /= timed;
  }
  if (!model.empty()) {
    for (std::size_t i = 0; i < model.size(); ++i) {
      s.model_ndcg += model[i];
      s.framework_ndcg += framework[i];
    }
    s.model_ndcg /= static_cast<double>(model.size());
    s.framework_ndcg /= static_cast<double>(model.size());
    try {
      s.t_test = paired_t_test(framework, model);
    } catch (const DegenerateSampleError&) {
    }
  }
}

}  // namespace

PhaseTimings& PhaseTimings::operator+=(const PhaseTimings& o) {
  filtering_s += o.filtering_s;
  ranking_s += o.ranking_s;
  repair_prompt_s += o.repair_prompt_s;
  total_s += o.total_s;
  return *this;
}

CompilabilityCounts PromptRow::counts() const {
  CompilabilityCounts c;
  if (error_code && !eligible) return c;
  c.total = n;
  c.raw_ok = raw_compilable;
  c.after_ok = eligible ? static_cast<long>(eligible->x()) : 0;
  c.prompts = 1;
  c.prompts_with_one_plus = c.after_ok >= 1 ? 1 : 0;
  return c;
}

PipelineReport run_pipeline(const std::vector<DatasetRecord>& records, const PipelineConfig& cfg,
                            GenerationBackend& backend) {
  cfg.request.validate();
  cfg.policy.validate();
  for (const auto& a : cfg.analyzers) a.validate();
  for (const auto& f : cfg.scheme.factors()) {
    if (!has_factor(f.factor_id)) throw UnknownFactorError("no quality factor '" + f.factor_id + "'");
  }
  Assessor assessor{cfg.scheme, cfg.analyzers, cfg.builtin_rules};

  PipelineReport report;
  report.config = cfg;
  report.rows.resize(records.size());
  const long count = static_cast<long>(records.size());
  const int jobs = std::max(1, cfg.jobs);
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    report.rows[static_cast<std::size_t>(i)] = process(records[static_cast<std::size_t>(i)], cfg,
                                                       assessor, backend);
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const PromptRow& a, const PromptRow& b) {
    return std::tie(a.dataset, a.task_id) < std::tie(b.dataset, b.task_id);
  });

  std::map<Language, std::vector<const PromptRow*>> grouped;
  std::vector<const PromptRow*> all;
  for (const auto& r : report.rows) {
    if (r.error_code) ++report.failures;
    grouped[r.language].push_back(&r);
    all.push_back(&r);
    report.by_language[r.language].counts += r.counts();
    report.overall.counts += r.counts();
  }
  for (auto& [lang, rows] : grouped) finish(report.by_language[lang], rows);
  finish(report.overall, all);
  if (!records.empty()) report.dataset_name = records.front().source_dataset;
  return report;
}

namespace {

Json timings_json(const PhaseTimings& t) {
  return Json{{"filtering_s", t.filtering_s},
              {"ranking_s", t.ranking_s},
              {"repair_prompt_s", t.repair_prompt_s},
              {"total_s", t.total_s}};
}

Json top_json(const std::optional<TopSummary>& t) {
  if (!t) return nullptr;
  return Json{{"position", t->position}, {"score", t->score}, {"findings", t->findings}};
}

Json eligible_json(const std::optional<EligibleSet>& e) {
  if (!e) return nullptr;
  Json cleaned = Json::array();
  for (const auto& s : e->cleaned) cleaned.push_back(Json{{"position", s.position}, {"text", s.text}});
  return Json{{"x", e->x()}, {"cleaned", cleaned}, {"dropped", e->dropped}};
}

Json summary_json(const LanguageSummary& s, bool timings) {
  Json j;
  j["compilability"] = Json{{"suggestions", s.counts.total},
                            {"compilable_before", s.counts.raw_ok},
                            {"compilable_after", s.counts.after_ok},
                            {"pct_before", s.compilability.pct_before},
                            {"pct_after", s.compilability.pct_after},
                            {"pct_increase", s.compilability.pct_increase},
                            {"prompts", s.counts.prompts},
                            {"prompts_with_one_plus_pct", s.compilability.prompts_with_one_plus}};
  Json ndcg = Json{{"prompts", s.ndcg_prompts},
                   {"model_rel1_eq_3", s.model_rel1_3},
                   {"framework_rel1_eq_3", s.framework_rel1_3}};
  if (s.ndcg_prompts > 0) {
    ndcg["model_mean"] = s.model_ndcg;
    ndcg["framework_mean"] = s.framework_ndcg;
  } else {
    ndcg["model_mean"] = nullptr;
    ndcg["framework_mean"] = nullptr;
  }
  ndcg["paired_t_test"] = s.t_test ? Json{{"t", s.t_test->t}, {"p", s.t_test->p}} : Json(nullptr);
  j["ndcg"] = ndcg;
  j["repair"] = Json{{"good_prompts_before", s.good_before},
                     {"triggered", s.repair_triggered},
                     {"good_after_repair", s.repair_good}};
  if (timings) j["mean_timings"] = timings_json(s.mean_timings);
  return j;
}

}  // namespace

Json report_json(const PipelineReport& report) {
  const auto& cfg = report.config;
  Json scheme = Json::array();
  for (const auto& f : cfg.scheme.factors()) {
    scheme.push_back(Json{{"factor", f.factor_id}, {"weight", f.weight}});
  }
  Json analyzers = Json::array();
  for (const auto& a : cfg.analyzers) analyzers.push_back(a.name);

  Json j;
  j["format_version"] = 1;
  j["config"] = Json{{"model", cfg.request.model_id},
                     {"backend", to_string(cfg.backend_kind)},
                     {"n", cfg.request.n},
                     {"max_new_tokens", cfg.request.max_new_tokens},
                     {"temperature", cfg.request.temperature},
                     {"top_p", cfg.request.top_p},
                     {"tau", cfg.policy.tau},
                     {"repair_structure", to_string(cfg.policy.structure)},
                     {"scheme", scheme},
                     {"builtin_rules", cfg.builtin_rules},
                     {"analyzers", analyzers},
                     {"labels", cfg.labels.has_value()}};
  j["dataset"] = report.dataset_name;

  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["dataset"] = r.dataset;
    row["task_id"] = r.task_id;
    row["language"] = to_string(r.language);
    row["n"] = r.n;
    row["raw_compilable"] = r.raw_compilable;
    row["eligible"] = eligible_json(r.eligible);
    row["ranking"] = r.ranking;
    row["top1"] = top_json(r.top1);
    row["good_before"] = r.good_before;
    Json repair;
    repair["triggered"] = r.repair.triggered;
    repair["rounds"] = r.repair.rounds;
    repair["skipped"] = r.repair.skipped ? Json(*r.repair.skipped) : Json(nullptr);
    repair["prompt"] = r.repair.prompt ? Json(*r.repair.prompt) : Json(nullptr);
    repair["eligible"] = eligible_json(r.repair.eligible);
    repair["ranking"] = r.repair.ranking;
    repair["top1"] = top_json(r.repair.top1);
    repair["good"] = r.repair.good;
    repair["below_threshold"] = r.repair.below_threshold;
    row["repair"] = repair;
    if (r.ndcg) {
      row["ndcg"] = Json{{"model", r.ndcg->model},
                         {"framework", r.ndcg->framework},
                         {"model_rel1", r.ndcg->model_rel1},
                         {"framework_rel1", r.ndcg->framework_rel1}};
    } else {
      row["ndcg"] = nullptr;
    }
    row["trace"] = r.trace;
    if (r.error_code) {
      row["error"] = Json{{"code", *r.error_code}, {"message", r.error_message.value_or("")}};
    } else {
      row["error"] = nullptr;
    }
    if (cfg.timings) row["timings"] = timings_json(r.timings);
    rows.push_back(std::move(row));
  }
  j["prompts"] = std::move(rows);

  Json summary;
  summary["prompts"] = report.rows.size();
  summary["failures"] = report.failures;
  summary["overall"] = summary_json(report.overall, cfg.timings);
  Json langs = Json::object();
  for (const auto& [lang, s] : report.by_language) {
    langs[std::string(to_string(lang))] = summary_json(s, cfg.timings);
  }
  summary["languages"] = std::move(langs);
  j["summary"] = std::move(summary);
  return j;
}

QualityScheme parse_weights(const std::string& spec) {
  std::vector<std::pair<std::string, double>> raw;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("weight '" + item + "' is not factor=weight");
    const std::string id = item.substr(0, eq);
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("weight '" + item + "' is not a number");
    }
    if (!has_factor(id)) throw UnknownFactorError("no quality factor '" + id + "'");
    raw.emplace_back(id, w);
  }
  return validate_scheme(raw);
}

void load_quality_config(const Json& j, std::optional<QualityScheme>& scheme,
                         std::vector<AnalyzerSpec>& analyzers) {
  try {
    if (j.contains("scheme")) {
      std::vector<std::pair<std::string, double>> raw;
      for (const auto& f : j.at("scheme")) {
        const auto id = f.at("factor").get<std::string>();
        if (!has_factor(id)) throw UnknownFactorError("no quality factor '" + id + "'");
        raw.emplace_back(id, f.at("weight").get<double>());
      }
      scheme = validate_scheme(raw);
    }
    if (j.contains("analyzers")) {
      for (const auto& a : j.at("analyzers")) {
        AnalyzerSpec spec;
        spec.name = a.at("name").get<std::string>();
        spec.command_template = a.at("command_template").get<std::string>();
        spec.report_format = a.value("report_format", std::string("native_json"));
        spec.timeout_ms = a.value("timeout_ms", 30000);
        spec.language = parse_language(a.at("language").get<std::string>());
        spec.validate();
        analyzers.push_back(std::move(spec));
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad quality config: ") + e.what());
  }
}

std::map<std::string, ManualLabels> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = parse_json(ss.str(), path);
  if (!j.is_object()) throw MalformedRecord(path + ": expected an object keyed by prompt id");
  std::map<std::string, ManualLabels> out;
  for (const auto& [prompt_id, positions] : j.items()) {
    if (!positions.is_object()) throw MalformedRecord(path + ": labels for " + prompt_id);
    ManualLabels labels;
    for (const auto& [pos, value] : positions.items()) {
      int p = 0;
      try {
        p = std::stoi(pos);
      } catch (const std::exception&) {
        throw MalformedRecord(path + ": position '" + pos + "' for " + prompt_id);
      }
      if (!value.is_number_integer() || (value.get<int>() != 2 && value.get<int>() != 3)) {
        throw IllegalLabelError(path + ": label for " + prompt_id + ":" + pos + " must be 2 or 3");
      }
      labels[p] = value.get<int>();
    }
    out.emplace(prompt_id, std::move(labels));
  }
  return out;
}

}  // namespace codesift
