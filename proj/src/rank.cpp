#include "codesift/rank.hpp"

#include <algorithm>
#include <map>

#include "codesift/errors.hpp"

namespace codesift {

int RankedInventory::position_at(int rank) const {
  if (rank < 1 || rank > static_cast<int>(entries.size())) {
    throw InvalidValueError("rank " + std::to_string(rank) + " out of range");
  }
  return entries[static_cast<std::size_t>(rank - 1)].suggestion.position;
}

std::vector<int> RankedInventory::positions() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.suggestion.position);
  return out;
}

RankedInventory rank(const EligibleSet& eligible, const std::vector<QualityAssessment>& assessments) {
  if (assessments.size() != eligible.cleaned.size()) {
    throw AssessmentMismatchError("got " + std::to_string(assessments.size()) +
                                  " assessments for " + std::to_string(eligible.cleaned.size()) +
                                  " snippets");
  }
  std::map<int, const QualityAssessment*> by_position;
  for (const auto& a : assessments) {
    if (!by_position.emplace(a.suggestion_position, &a).second) {
      throw AssessmentMismatchError("duplicate assessment for position " +
                                    std::to_string(a.suggestion_position));
    }
  }
  RankedInventory out;
  out.prompt = eligible.prompt;
  out.entries.reserve(eligible.cleaned.size());
  for (const auto& s : eligible.cleaned) {
    auto it = by_position.find(s.position);
    if (it == by_position.end()) {
      throw AssessmentMismatchError("no assessment for position " + std::to_string(s.position));
    }
    out.entries.push_back({s, *it->second});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) {
                     return a.assessment.score > b.assessment.score;
                   });
  return out;
}

const RankedEntry& top1(const RankedInventory& ranked) {
  if (ranked.entries.empty()) throw EmptyRankError("no eligible snippet for " + ranked.prompt.id);
  return ranked.entries.front();
}

}  // namespace codesift
