#include "codesift/assess.hpp"

#include <algorithm>
#include <exception>

#include "codesift/syntax.hpp"

namespace codesift {

QualityAssessment Assessor::assess(const CodeSuggestion& sugg, const Prompt& prompt) const {
  QualityAssessment out;
  out.suggestion_position = sugg.position;
  const SyntaxVerdict verdict = check_syntax(sugg.text, sugg.language);
  out.syntax_ok = verdict.ok;
  if (builtin) out.findings = run_builtin_rules(sugg.text, sugg.language);
  for (const auto& spec : analyzers) {
    if (spec.language != sugg.language) continue;
    auto more = run_external_analyzer(spec, sugg.text);
    out.findings.insert(out.findings.end(), more.begin(), more.end());
  }
  out.findings = suppress_prompt_region(std::move(out.findings), sugg.text, prompt);
  std::stable_sort(out.findings.begin(), out.findings.end(), [](const Finding& a, const Finding& b) {
    return a.line_start.value_or(0) < b.line_start.value_or(0);
  });
  for (const auto& f : scheme.factors()) {
    out.factor_values.emplace_back(
        f.factor_id, quality_factor(f.factor_id, sugg.text, out.findings, verdict));
  }
  out.score = quality_score(out.factor_values, scheme);
  return out;
}

std::vector<QualityAssessment> assess_all(const Assessor& assessor, const EligibleSet& eligible) {
  const auto count = static_cast<long>(eligible.cleaned.size());
  std::vector<QualityAssessment> out(eligible.cleaned.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = assessor.assess(eligible.cleaned[i], eligible.prompt);
    } catch (...) {
#pragma omp critical(codesift_assess_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<QualityAssessment> assess_all_serial(const Assessor& assessor,
                                                 const EligibleSet& eligible) {
  std::vector<QualityAssessment> out;
  out.reserve(eligible.cleaned.size());
  for (const auto& s : eligible.cleaned) out.push_back(assessor.assess(s, eligible.prompt));
  return out;
}

}  // namespace codesift
