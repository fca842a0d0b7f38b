#include <doctest.h>

#include <algorithm>
#include <random>

#include "codesift/errors.hpp"
#include "codesift/rank.hpp"

using namespace codesift;

namespace {

EligibleSet eligible_of(const std::vector<int>& positions) {
  EligibleSet es;
  es.prompt = Prompt{"p", Language::python, "def f():\n", "d", std::nullopt};
  for (int pos : positions) es.cleaned.push_back({"p", pos, "code" + std::to_string(pos), Language::python});
  es.n = positions.empty() ? 0 : positions.back();
  return es;
}

QualityAssessment qa(int pos, double score) {
  QualityAssessment a;
  a.suggestion_position = pos;
  a.score = score;
  a.factor_values = {{"smell_free", score}};
  return a;
}

}  // namespace

TEST_CASE("ties keep backend order") {
  // positions 3 and 8 both score 1, everything else 0
  std::vector<int> positions{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<QualityAssessment> as;
  for (int p : positions) as.push_back(qa(p, p == 3 || p == 8 ? 1.0 : 0.0));
  const auto r = rank(eligible_of(positions), as);
  CHECK(r.position_at(1) == 3);
  CHECK(r.position_at(2) == 8);
  CHECK(r.positions() == std::vector<int>{3, 8, 1, 2, 4, 5, 6, 7, 9, 10});
  CHECK(top1(r).suggestion.text == "code3");
}

TEST_CASE("assessments are matched by position, not order") {
  const auto r = rank(eligible_of({2, 5, 7}), {qa(7, 0.9), qa(2, 0.1), qa(5, 0.5)});
  CHECK(r.positions() == std::vector<int>{7, 5, 2});
  CHECK(r.entries[0].assessment.score == 0.9);
  CHECK(r.entries[0].suggestion.text == "code7");
}

TEST_CASE("rank errors") {
  CHECK_THROWS_AS(rank(eligible_of({1, 2}), {qa(1, 1)}), AssessmentMismatchError);
  CHECK_THROWS_AS(rank(eligible_of({1, 2}), {qa(1, 1), qa(1, 0)}), AssessmentMismatchError);
  CHECK_THROWS_AS(rank(eligible_of({1, 2}), {qa(1, 1), qa(3, 0)}), AssessmentMismatchError);
  const auto empty = rank(eligible_of({}), {});
  CHECK(empty.entries.empty());
  CHECK_THROWS_AS(top1(empty), EmptyRankError);
  CHECK_THROWS_AS(empty.position_at(1), InvalidValueError);
}

TEST_CASE("property: random scores with ties") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<int> positions;
    for (int p = 1; p <= n; ++p) {
      if (rng() % 4 != 0 || positions.empty()) positions.push_back(p);
    }
    std::vector<QualityAssessment> as;
    for (int p : positions) as.push_back(qa(p, static_cast<double>(rng() % 4) / 3.0));
    auto shuffled = as;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto r = rank(eligible_of(positions), shuffled);
    auto got = r.positions();
    std::sort(got.begin(), got.end());
    CHECK(got == positions);
    for (std::size_t i = 1; i < r.entries.size(); ++i) {
      const auto& a = r.entries[i - 1];
      const auto& b = r.entries[i];
      CHECK(a.assessment.score >= b.assessment.score);
      if (a.assessment.score == b.assessment.score) {
        CHECK(a.suggestion.position < b.suggestion.position);
      }
    }
  }
}
