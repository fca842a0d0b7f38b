#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "codesift/model.hpp"

namespace testsupport {

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& body);

// Fresh directory under the build tree's temp area.
std::string make_temp_dir(const std::string& tag);

struct CorpusEntry {
  std::string id;
  codesift::Language language = codesift::Language::python;
  std::string prompt;
  std::optional<std::string> entry_point;
  std::string raw;
  bool achievable = false;
  std::vector<std::string> defects;

  codesift::Prompt make_prompt() const;
  std::string base() const;  // "py-yaml" for "py-yaml-echo"
};

const std::vector<CorpusEntry>& corpus();

// Independent reference computations.
double dcg_oracle(const std::vector<int>& labels);
double ndcg_oracle(const std::vector<int>& labels);
double kappa_oracle(const std::vector<int>& a, const std::vector<int>& b);
// Two-sided p-value via the regularized incomplete beta function.
double t_two_sided_p_oracle(double t, double df);

struct ReplaySet {
  std::string dataset_path;
  std::string fixture_path;
  std::string model;
  std::vector<std::string> prompt_ids;
};

// Writes a jsonl_generic dataset of `count` prompts drawn from the corpus
// bases plus replay records for every generation and repair request the
// default pipeline (built-in rules, tau 1, given structure) will issue.
ReplaySet build_replay_set(const std::string& dir, int count, const std::string& model,
                           codesift::RepairStructure structure = codesift::RepairStructure::P1);

}  // namespace testsupport
