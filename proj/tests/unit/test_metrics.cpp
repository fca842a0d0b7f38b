#include <doctest.h>

#include <cmath>
#include <random>

#include "codesift/errors.hpp"
#include "codesift/metrics.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

RankedEntry entry(int pos, bool syntax_ok, bool findings) {
  RankedEntry e;
  e.suggestion = {"p", pos, "c", Language::python};
  e.assessment.suggestion_position = pos;
  e.assessment.syntax_ok = syntax_ok;
  if (findings) e.assessment.findings.push_back({"r", "m", 1, std::nullopt, Severity::warning, "s"});
  e.assessment.score = syntax_ok && !findings ? 1.0 : 0.0;
  return e;
}

RankedInventory ranked_of(std::vector<RankedEntry> entries) {
  RankedInventory r;
  r.prompt = Prompt{"p", Language::python, "x", "d", std::nullopt};
  r.entries = std::move(entries);
  return r;
}

}  // namespace

TEST_CASE("idcg at 10") {
  CHECK(std::fabs(idcg(10) - 13.631) < 1e-3);
  CHECK(idcg(10) == doctest::Approx(testsupport::dcg_oracle(std::vector<int>(10, 3))));
  CHECK(idcg(1) == 3.0);
}

TEST_CASE("ndcg against the oracle") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> labels(1 + rng() % 10);
    for (auto& l : labels) l = static_cast<int>(rng() % 4);
    const double v = ndcg_at_k(RelevanceVector{labels});
    CHECK(std::fabs(v - testsupport::ndcg_oracle(labels)) < 1e-9);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(ndcg_at_k(RelevanceVector{{3, 3, 3}}) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(RelevanceVector{{0, 0}}) == 0.0);
  CHECK_THROWS_AS(ndcg_at_k(RelevanceVector{}), InvalidValueError);
}

TEST_CASE("relevance assignment") {
  const auto r = ranked_of({entry(4, true, false), entry(2, true, false), entry(7, true, true)});
  const ManualLabels labels{{4, 3}, {2, 2}};
  const auto rel = assign_relevance(r, &labels, 10);
  CHECK(rel.labels == std::vector<int>{3, 2, 1, 0, 0, 0, 0, 0, 0, 0});
  const auto model = model_order_relevance(r, &labels, 10);
  CHECK(model.labels == std::vector<int>{0, 2, 0, 3, 0, 0, 1, 0, 0, 0});
  CHECK(assign_relevance(r, &labels, 2).labels == std::vector<int>{3, 2});
  CHECK(ndcg_at_k(rel) >= ndcg_at_k(model));
}

TEST_CASE("relevance errors") {
  const auto r = ranked_of({entry(1, true, false), entry(2, true, true)});
  CHECK_THROWS_AS(assign_relevance(r, nullptr, 10), MissingLabelError);
  const ManualLabels bad_value{{1, 1}};
  CHECK_THROWS_AS(assign_relevance(r, &bad_value, 10), IllegalLabelError);
  const ManualLabels on_flawed{{1, 3}, {2, 3}};
  CHECK_THROWS_AS(assign_relevance(r, &on_flawed, 10), IllegalLabelError);
  const ManualLabels on_dropped{{1, 3}, {9, 2}};
  CHECK_THROWS_AS(model_order_relevance(r, &on_dropped, 10), IllegalLabelError);
  QualityAssessment broken;
  broken.syntax_ok = false;
  CHECK(relevance_of(broken, nullptr) == 0);
}

TEST_CASE("kappa against the contingency table") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<int> a(n);
    std::vector<int> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 4);
      b[i] = rng() % 3 == 0 ? static_cast<int>(rng() % 4) : a[i];
    }
    CHECK(std::fabs(cohen_kappa(a, b) - testsupport::kappa_oracle(a, b)) < 1e-9);
  }
  CHECK(cohen_kappa({1, 1}, {1, 1}) == 1.0);
  CHECK(cohen_kappa({1, 2}, {2, 1}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cohen_kappa({1}, {1, 2}), LengthMismatchError);
  CHECK_THROWS_AS(cohen_kappa({}, {}), InvalidValueError);
}

TEST_CASE("t distribution") {
  CHECK(student_t_cdf(0.0, 5) == doctest::Approx(0.5));
  // df = 1 is the Cauchy distribution
  CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(student_t_cdf(-2.0, 3) == doctest::Approx(1.0 - student_t_cdf(2.0, 3)).epsilon(1e-12));
  for (double df : {1.0, 2.0, 5.0, 30.0}) {
    for (double t : {0.1, 1.0, 2.5, 8.0}) {
      CHECK(std::fabs(2.0 * (1.0 - student_t_cdf(t, df)) - testsupport::t_two_sided_p_oracle(t, df)) < 1e-8);
    }
  }
}

TEST_CASE("paired t-test") {
  const auto r = paired_t_test({1, 2, 3}, {0, 0, 0});
  CHECK(r.t == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(std::fabs(r.p - testsupport::t_two_sided_p_oracle(r.t, 2)) < 1e-6);
  std::mt19937 rng(9);
  std::normal_distribution<double> nd(0.1, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(rng);
      y[i] = nd(rng) - 0.2;
    }
    const auto res = paired_t_test(x, y);
    CHECK(std::fabs(res.p - testsupport::t_two_sided_p_oracle(res.t, static_cast<double>(n - 1))) < 1e-4);
  }
  CHECK_THROWS_AS(paired_t_test({1, 2}, {1}), LengthMismatchError);
  CHECK_THROWS_AS(paired_t_test({1}, {0}), DegenerateSampleError);
  CHECK_THROWS_AS(paired_t_test({1, 2}, {0, 1}), DegenerateSampleError);
}

TEST_CASE("compilability") {
  const Prompt p{"p", Language::python, "def f():\n", "d", std::nullopt};
  const auto inv = make_inventory(p, {"def f():\n    return 1\n", "    return 1\n", "def f(:\n"});
  EligibleSet es;
  es.prompt = p;
  es.n = 3;
  es.cleaned = {inv.suggestions[0], inv.suggestions[1]};
  const auto c = count_compilability(inv, es);
  CHECK(c.total == 3);
  CHECK(c.raw_ok == 1);
  CHECK(c.after_ok == 2);
  CHECK(c.prompts_with_one_plus == 1);
  const auto s = compilability_stats(c);
  CHECK(s.pct_before == doctest::Approx(100.0 / 3));
  CHECK(s.pct_after == doctest::Approx(200.0 / 3));
  CHECK(s.pct_increase == doctest::Approx(100.0 / 3));
  CHECK(s.prompts_with_one_plus == 100.0);

  EligibleSet none;
  none.prompt = Prompt{"q", Language::python, "x", "d", std::nullopt};
  const auto inv2 = make_inventory(none.prompt, {"x(", "y("});
  const auto both = compilability_stats({inv, inv2}, {es, none});
  CHECK(both.pct_before == doctest::Approx(20.0));
  CHECK(both.prompts_with_one_plus == 50.0);
  CHECK_THROWS_AS(compilability_stats({inv, inv2}, {none, es}), AlignmentError);
  CHECK_THROWS_AS(compilability_stats({inv}, {}), AlignmentError);
  CHECK(compilability_stats(CompilabilityCounts{}).pct_before == 0.0);
}
