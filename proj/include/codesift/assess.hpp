#pragma once

#include <vector>

#include "codesift/analyzer.hpp"
#include "codesift/filter.hpp"
#include "codesift/quality.hpp"

namespace codesift {

// Collects findings for a snippet and scores it under a scheme.
struct Assessor {
  QualityScheme scheme = QualityScheme::binary();
  std::vector<AnalyzerSpec> analyzers;  // only those matching the snippet language run
  bool builtin = true;

  QualityAssessment assess(const CodeSuggestion& sugg, const Prompt& prompt) const;
};

// One assessment per eligible snippet, in the order of eligible.cleaned.
std::vector<QualityAssessment> assess_all(const Assessor& assessor, const EligibleSet& eligible);
std::vector<QualityAssessment> assess_all_serial(const Assessor& assessor,
                                                 const EligibleSet& eligible);

}  // namespace codesift
