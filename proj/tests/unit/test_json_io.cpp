#include <doctest.h>

#include "codesift/errors.hpp"
#include "codesift/json_io.hpp"

using namespace codesift;

TEST_CASE("inventory round trip") {
  const Prompt p{"t/1", Language::java, "class A {\n", "ds", std::string("run")};
  auto inv = make_inventory(p, {"a", "b"});
  inv.repair = RepairOrigin{"orig", {Finding{"r", "m", 2, 3, Severity::error, "s"}}, "rp"};
  const Json j = inv;
  const auto back = j.get<SuggestionInventory>();
  CHECK(back.prompt.id == "t/1");
  CHECK(back.prompt.entry_point == std::optional<std::string>("run"));
  CHECK(back.prompt.language == Language::java);
  REQUIRE(back.suggestions.size() == 2);
  CHECK(back.suggestions[1].position == 2);
  CHECK(back.suggestions[1].text == "b");
  REQUIRE(back.repair);
  CHECK(back.repair->findings[0].line_end == 3);
  CHECK(back.repair->repair_prompt == "rp");
  CHECK(dump(Json(back)) == dump(j));
}

TEST_CASE("inventory from plain strings") {
  const auto j = parse_json(R"({"prompt": {"id": "p", "language": "python", "text": "x"},
                                "suggestions": ["a", "b"]})",
                            "stdin");
  const auto inv = j.get<SuggestionInventory>();
  REQUIRE(inv.n() == 2);
  CHECK(inv.suggestions[0].position == 1);
  CHECK(inv.suggestions[1].text == "b");
  CHECK(inv.suggestions[1].prompt_id == "p");
}

TEST_CASE("eligible and ranked round trips") {
  EligibleSet es;
  es.prompt = Prompt{"p", Language::python, "x", "d", std::nullopt};
  es.n = 3;
  es.cleaned = {{"p", 2, "c", Language::python}};
  es.dropped = {{1, "empty"}, {3, "syntax_error"}};
  const Json j = es;
  CHECK(j["x"] == 1);
  const auto back = j.get<EligibleSet>();
  CHECK(back.n == 3);
  CHECK(back.dropped == es.dropped);
  CHECK(back.cleaned[0].position == 2);

  RankedInventory r;
  r.prompt = es.prompt;
  QualityAssessment a;
  a.suggestion_position = 2;
  a.score = 0.5;
  a.factor_values = {{"smell_free", 0.5}};
  a.findings = {Finding{"r", "m", std::nullopt, std::nullopt, Severity::info, "s"}};
  r.entries = {{es.cleaned[0], a}};
  const Json rj = r;
  CHECK(rj["order"] == Json::array({2}));
  const auto rb = rj.get<RankedInventory>();
  CHECK(rb.entries[0].assessment.factor_values == a.factor_values);
  CHECK(rb.entries[0].assessment.findings == a.findings);
  CHECK(dump(Json(rb)) == dump(rj));
}

TEST_CASE("findings are validated on read") {
  CHECK_THROWS_AS(parse_json(R"({"rule_id": "x", "line_start": 3, "line_end": 1})", "f").get<Finding>(),
                  InvalidValueError);
  CHECK_THROWS_AS(parse_json(R"({"rule_id": "x", "severity": "fatal"})", "f").get<Finding>(),
                  InvalidValueError);
}

TEST_CASE("dump and parse") {
  CHECK(dump(Json{{"b", 1}, {"a", 2}}) == "{\n  \"b\": 1,\n  \"a\": 2\n}\n");
  CHECK(dump(Json(std::string("\xff"))) == "\"\xef\xbf\xbd\"\n");
  CHECK_THROWS_AS(parse_json("{", "x"), MalformedRecord);
}
