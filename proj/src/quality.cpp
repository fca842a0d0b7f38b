#include "codesift/quality.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "codesift/errors.hpp"
#include "codesift/text.hpp"

namespace codesift {

namespace {

struct FactorRegistry {
  std::shared_mutex mutex;
  std::map<std::string, FactorFn> factors;

  FactorRegistry() {
    factors["smell_free"] = [](std::string_view, const std::vector<Finding>& findings,
                               const SyntaxVerdict& verdict) {
      return verdict.ok && findings.empty() ? 1.0 : 0.0;
    };
    factors["compilable"] = [](std::string_view, const std::vector<Finding>&,
                               const SyntaxVerdict& verdict) { return verdict.ok ? 1.0 : 0.0; };
  }
};

FactorRegistry& registry() {
  static FactorRegistry r;
  return r;
}

}  // namespace

void register_factor(const std::string& factor_id, FactorFn fn) {
  auto& r = registry();
  std::unique_lock lock(r.mutex);
  r.factors[factor_id] = std::move(fn);
}

bool has_factor(const std::string& factor_id) {
  auto& r = registry();
  std::shared_lock lock(r.mutex);
  return r.factors.count(factor_id) > 0;
}

double quality_factor(const std::string& factor_id, std::string_view code,
                      const std::vector<Finding>& findings, const SyntaxVerdict& verdict) {
  FactorFn fn;
  {
    auto& r = registry();
    std::shared_lock lock(r.mutex);
    auto it = r.factors.find(factor_id);
    if (it == r.factors.end()) throw UnknownFactorError("no quality factor '" + factor_id + "'");
    fn = it->second;
  }
  const double v = fn(code, findings, verdict);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidValueError("factor '" + factor_id + "' produced a value outside [0, 1]");
  }
  return v;
}

double quality_score(const FactorValues& factors, const QualityScheme& scheme) {
  const auto& weights = scheme.factors();
  if (factors.size() != weights.size()) {
    throw SchemeMismatchError("expected " + std::to_string(weights.size()) + " factor values, got " +
                              std::to_string(factors.size()));
  }
  double score = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (factors[j].first != weights[j].factor_id) {
      throw SchemeMismatchError("factor " + std::to_string(j) + " is '" + factors[j].first +
                                "', scheme expects '" + weights[j].factor_id + "'");
    }
    if (!(factors[j].second >= 0.0 && factors[j].second <= 1.0)) {
      throw InvalidValueError("factor '" + factors[j].first + "' value outside [0, 1]");
    }
    score += weights[j].weight * factors[j].second;
  }
  // weights may sum to 1 +- 1e-9
  return std::clamp(score, 0.0, 1.0);
}

std::optional<std::pair<int, int>> prompt_region(std::string_view code, const Prompt& prompt) {
  if (prompt.text.empty() || !text::starts_with(code, prompt.text)) return std::nullopt;
  // A final prompt line without '\n' is shared with generated code.
  const int lines = static_cast<int>(std::count(prompt.text.begin(), prompt.text.end(), '\n'));
  if (lines == 0) return std::nullopt;
  return std::make_pair(1, lines);
}

std::vector<Finding> suppress_prompt_region(std::vector<Finding> findings, std::string_view code,
                                            const Prompt& prompt) {
  const auto region = prompt_region(code, prompt);
  if (!region) return findings;
  std::erase_if(findings, [&](const Finding& f) {
    if (!f.line_start) return false;
    const int last = f.line_end.value_or(*f.line_start);
    return *f.line_start >= region->first && last <= region->second;
  });
  return findings;
}

}  // namespace codesift
