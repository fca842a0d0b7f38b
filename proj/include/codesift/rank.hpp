#pragma once

#include <utility>
#include <vector>

#include "codesift/filter.hpp"
#include "codesift/quality.hpp"

namespace codesift {

struct RankedEntry {
  CodeSuggestion suggestion;
  QualityAssessment assessment;
};

struct RankedInventory {
  Prompt prompt;
  std::vector<RankedEntry> entries;  // best first

  // Original backend position of the entry at 1-based rank r.
  int position_at(int rank) const;
  std::vector<int> positions() const;
};

// Stable sort by score, descending; ties keep backend order. Assessments are
// matched to snippets by position. Throws AssessmentMismatchError.
RankedInventory rank(const EligibleSet& eligible, const std::vector<QualityAssessment>& assessments);

// Throws EmptyRankError.
const RankedEntry& top1(const RankedInventory& ranked);

}  // namespace codesift
