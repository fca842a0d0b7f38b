#include <doctest.h>

#include "codesift/errors.hpp"
#include "codesift/model.hpp"

using namespace codesift;

TEST_CASE("language and severity tags round-trip") {
  CHECK(parse_language("python") == Language::python);
  CHECK(parse_language(to_string(Language::java)) == Language::java);
  CHECK_THROWS_AS(parse_language("Python"), InvalidValueError);
  for (auto s : {Severity::info, Severity::warning, Severity::error}) {
    CHECK(parse_severity(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_severity("fatal"), InvalidValueError);
}

TEST_CASE("repair structure tags accept both cases") {
  CHECK(parse_structure("p2") == RepairStructure::P2);
  CHECK(parse_structure("P3") == RepairStructure::P3);
  CHECK(to_string(RepairStructure::P1) == "p1");
  CHECK_THROWS_AS(parse_structure("p4"), InvalidValueError);
}

TEST_CASE("scheme validation") {
  CHECK(QualityScheme::binary().m() == 1);
  CHECK(QualityScheme::binary().factors()[0].factor_id == "smell_free");
  CHECK_NOTHROW(validate_scheme({{"a", 0.25}, {"b", 0.75}}));
  CHECK_NOTHROW(validate_scheme({{"a", 0.5}, {"b", 0.5 + 5e-10}}));
  CHECK_THROWS_AS(validate_scheme({{"a", 0.5}, {"b", 0.6}}), WeightSumError);
  CHECK_THROWS_AS(validate_scheme({{"a", 1.5}, {"b", -0.5}}), NegativeWeightError);
  CHECK_THROWS_AS(validate_scheme({}), EmptySchemeError);
}

TEST_CASE("finding spans") {
  Finding f{"r", "m", 3, 5, Severity::warning, "s"};
  CHECK_NOTHROW(f.validate());
  f.line_end = 2;
  CHECK_THROWS_AS(f.validate(), InvalidValueError);
  f.line_start.reset();
  CHECK_THROWS_AS(f.validate(), InvalidValueError);
  f.line_end.reset();
  CHECK_NOTHROW(f.validate());
  f.line_start = 0;
  CHECK_THROWS_AS(f.validate(), InvalidValueError);
}

TEST_CASE("inventory positions") {
  Prompt p{"t1", Language::java, "class A {", "d", std::nullopt};
  auto inv = make_inventory(p, {"a", "b", "c"});
  CHECK(inv.n() == 3);
  CHECK(inv.suggestions[2].position == 3);
  CHECK(inv.suggestions[1].language == Language::java);
  CHECK(inv.suggestions[0].prompt_id == "t1");
  CHECK_NOTHROW(inv.validate());
  inv.suggestions[1].position = 5;
  CHECK_THROWS_AS(inv.validate(), InvalidValueError);
}

TEST_CASE("policy and relevance validation") {
  RepairPolicy policy;
  CHECK(policy.tau == 1.0);
  CHECK(policy.structure == RepairStructure::P1);
  CHECK(RepairPolicy::max_attempts == 1);
  policy.tau = 1.2;
  CHECK_THROWS_AS(policy.validate(), InvalidValueError);

  RelevanceVector rel{{3, 0, 1}};
  CHECK_NOTHROW(rel.validate());
  rel.labels.push_back(4);
  CHECK_THROWS_AS(rel.validate(), InvalidValueError);
  CHECK_THROWS_AS(RelevanceVector{}.validate(), InvalidValueError);
}

TEST_CASE("errors carry their class name as code") {
  try {
    throw FixtureMiss("x");
  } catch (const Error& e) {
    CHECK(e.code() == "FixtureMiss");
    CHECK(std::string(e.what()) == "x");
  }
}
