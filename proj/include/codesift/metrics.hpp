#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "codesift/filter.hpp"
#include "codesift/model.hpp"
#include "codesift/quality.hpp"
#include "codesift/rank.hpp"

namespace codesift {

inline constexpr int kMaxRelevance = 3;

// DCG of a list of k labels all equal to 3.
double idcg(std::size_t k);
double dcg(const std::vector<int>& labels);
double ndcg_at_k(const RelevanceVector& rel);

// position -> manual label (2 or 3)
using ManualLabels = std::map<int, int>;

// Relevance of one eligible snippet: 1 with findings or score below 1, else
// the manual label. Throws MissingLabelError.
int relevance_of(const QualityAssessment& a, const ManualLabels* labels);

// Ranked order, padded with zeros up to k for snippets that were filtered out.
// Throws MissingLabelError, IllegalLabelError.
RelevanceVector assign_relevance(const RankedInventory& ranked, const ManualLabels* labels,
                                 std::size_t k);

// Same labels laid out in backend order 1..k (dropped positions score 0).
RelevanceVector model_order_relevance(const RankedInventory& ranked, const ManualLabels* labels,
                                      std::size_t k);

// Throws LengthMismatchError, InvalidValueError for empty input.
double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

// Student t CDF, integrated numerically.
double student_t_cdf(double t, double df);

// Two-sided paired t-test on x - y. Throws LengthMismatchError,
// DegenerateSampleError.
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

struct CompilabilityCounts {
  long total = 0;          // raw suggestions
  long raw_ok = 0;         // parse before cleaning
  long after_ok = 0;       // eligible after cleaning
  long prompts = 0;
  long prompts_with_one_plus = 0;

  CompilabilityCounts& operator+=(const CompilabilityCounts& o);
};

struct CompilabilityStats {
  double pct_before = 0.0;
  double pct_after = 0.0;
  double pct_increase = 0.0;
  double prompts_with_one_plus = 0.0;  // percent of prompts with x >= 1
};

CompilabilityCounts count_compilability(const SuggestionInventory& before,
                                        const EligibleSet& after);
CompilabilityStats compilability_stats(const CompilabilityCounts& counts);

// Throws AlignmentError when the lists are not aligned by prompt id.
CompilabilityStats compilability_stats(const std::vector<SuggestionInventory>& before,
                                       const std::vector<EligibleSet>& after);

}  // namespace codesift
