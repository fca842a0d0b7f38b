#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codesift/analyzer.hpp"
#include "codesift/dataset.hpp"
#include "codesift/generation.hpp"
#include "codesift/json_io.hpp"
#include "codesift/metrics.hpp"
#include "codesift/repair.hpp"

namespace codesift {

struct PipelineConfig {
  GenerationRequest request;  // prompt_text ignored
  BackendKind backend_kind = BackendKind::replay;
  QualityScheme scheme = QualityScheme::binary();
  std::vector<AnalyzerSpec> analyzers;
  bool builtin_rules = true;
  RepairPolicy policy;
  int jobs = 1;
  // prompt id -> labels; prompts missing here get no NDCG
  std::optional<std::map<std::string, ManualLabels>> labels;
  bool timings = false;
};

struct PhaseTimings {
  double filtering_s = 0.0;
  double ranking_s = 0.0;
  double repair_prompt_s = 0.0;
  double total_s = 0.0;

  PhaseTimings& operator+=(const PhaseTimings& o);
};

struct TopSummary {
  int position = 0;
  double score = 0.0;
  std::vector<Finding> findings;
};

struct RepairSummary {
  bool triggered = false;
  int rounds = 0;
  std::optional<std::string> skipped;  // why no prompt was sent
  std::optional<RepairPrompt> prompt;
  std::optional<EligibleSet> eligible;
  std::vector<int> ranking;
  std::optional<TopSummary> top1;
  bool good = false;             // repaired set has a Q=1 snippet
  bool below_threshold = false;  // repaired top-1 still under tau
};

struct NdcgSummary {
  double model = 0.0;
  double framework = 0.0;
  int model_rel1 = 0;
  int framework_rel1 = 0;
};

struct PromptRow {
  std::string dataset;
  std::string task_id;
  Language language = Language::python;
  int n = 0;
  int raw_compilable = 0;
  std::optional<EligibleSet> eligible;
  std::vector<int> ranking;
  std::optional<TopSummary> top1;
  bool good_before = false;
  RepairSummary repair;
  std::optional<NdcgSummary> ndcg;
  std::vector<std::string> trace;
  std::optional<std::string> error_code;
  std::optional<std::string> error_message;
  PhaseTimings timings;

  CompilabilityCounts counts() const;
};

struct LanguageSummary {
  CompilabilityCounts counts;
  CompilabilityStats compilability;
  int ndcg_prompts = 0;
  int model_rel1_3 = 0;
  int framework_rel1_3 = 0;
  double model_ndcg = 0.0;
  double framework_ndcg = 0.0;
  std::optional<TTestResult> t_test;
  int repair_triggered = 0;
  int repair_good = 0;
  int good_before = 0;
  PhaseTimings mean_timings;
};

struct PipelineReport {
  PipelineConfig config;
  std::string dataset_name;
  std::vector<PromptRow> rows;  // sorted by (dataset, task_id)
  std::map<Language, LanguageSummary> by_language;
  LanguageSummary overall;
  int failures = 0;
};

// Runs every record through generate, filter, score, rank and at most one
// repair round. Per-prompt failures are recorded in the rows.
PipelineReport run_pipeline(const std::vector<DatasetRecord>& records, const PipelineConfig& cfg,
                            GenerationBackend& backend);

Json report_json(const PipelineReport& report);

// "factor=weight,..." Throws ConfigError for malformed items, UnknownFactorError,
// and the scheme validation errors.
QualityScheme parse_weights(const std::string& spec);

// Reads {"scheme": [...], "analyzers": [...]}; absent keys leave the outputs
// untouched. Throws ConfigError, UnknownFactorError and the scheme validation
// errors.
void load_quality_config(const Json& j, std::optional<QualityScheme>& scheme,
                         std::vector<AnalyzerSpec>& analyzers);

// prompt id -> position -> label. Throws MalformedRecord, IllegalLabelError.
std::map<std::string, ManualLabels> load_labels(const std::string& path);

}  // namespace codesift
