#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codesift/model.hpp"
#include "codesift/syntax.hpp"

namespace codesift {

// Bundled offline rule set standing in for Bandit (python) and SpotBugs
// (java). Findings are deterministic and 1-based.
std::vector<Finding> run_builtin_rules(std::string_view code, Language language);

// Rule ids produced by run_builtin_rules for a language.
const std::vector<std::string>& builtin_rule_ids(Language language);

// A factor maps (code, findings, verdict) to a value in [0, 1].
using FactorFn = std::function<double(std::string_view code, const std::vector<Finding>& findings,
                                      const SyntaxVerdict& verdict)>;

// Registers or replaces a factor. "smell_free" is registered by default.
void register_factor(const std::string& factor_id, FactorFn fn);
bool has_factor(const std::string& factor_id);

// Throws UnknownFactorError.
double quality_factor(const std::string& factor_id, std::string_view code,
                      const std::vector<Finding>& findings, const SyntaxVerdict& verdict);

using FactorValues = std::vector<std::pair<std::string, double>>;

// Weighted sum over the scheme. Throws SchemeMismatchError unless the factor
// ids equal the scheme's ids in order.
double quality_score(const FactorValues& factors, const QualityScheme& scheme);

struct QualityAssessment {
  int suggestion_position = 0;
  std::vector<Finding> findings;
  FactorValues factor_values;
  double score = 0.0;
  bool syntax_ok = true;
};

// Line span occupied by the prompt when the snippet starts with it.
std::optional<std::pair<int, int>> prompt_region(std::string_view code, const Prompt& prompt);

// Drops findings lying entirely inside the prompt region. Lineless findings
// are kept.
std::vector<Finding> suppress_prompt_region(std::vector<Finding> findings, std::string_view code,
                                            const Prompt& prompt);

}  // namespace codesift
