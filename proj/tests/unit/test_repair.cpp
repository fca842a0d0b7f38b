#include <doctest.h>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/repair.hpp"
#include "support.hpp"

using namespace codesift;
using testsupport::fixture_path;
using testsupport::read_file;

namespace {

struct Sql {
  Prompt prompt;
  std::string code;
  std::vector<Finding> findings;
};

Sql sql_fixture() {
  Sql s;
  s.prompt = Prompt{"show_user", Language::python, read_file(fixture_path("sql_show_user.prompt")),
                    "fixtures", std::nullopt};
  s.code = read_file(fixture_path("sql_show_user.py"));
  s.findings = Assessor{}.assess({"show_user", 1, s.code, Language::python}, s.prompt).findings;
  return s;
}

Finding lined(const std::string& msg, int line) {
  return Finding{"r", msg, line, std::nullopt, Severity::warning, "s"};
}

Finding lineless(const std::string& msg) {
  return Finding{"r", msg, std::nullopt, std::nullopt, Severity::warning, "s"};
}

class FixedBackend : public GenerationBackend {
 public:
  BackendKind kind() const override { return BackendKind::replay; }
  std::vector<std::string> complete(const GenerationRequest& req) override {
    last_prompt = req.prompt_text;
    ++calls;
    return std::vector<std::string>(static_cast<std::size_t>(req.n), "    return 1\n");
  }
  std::string last_prompt;
  int calls = 0;
};

}  // namespace

TEST_CASE("the sql fixture carries one finding at line 7") {
  const auto s = sql_fixture();
  REQUIRE(s.findings.size() == 1);
  CHECK(s.findings[0].line_start == 7);
  CHECK(s.findings[0].message == "Possible SQL Injection");
}

TEST_CASE("golden repair prompts") {
  const auto s = sql_fixture();
  CHECK(build_p1(s.code, s.findings, Language::python).text == read_file(fixture_path("golden/repair_p1.txt")));
  CHECK(build_p2(s.code, s.findings, s.prompt, Language::python).text ==
        read_file(fixture_path("golden/repair_p2.txt")));
  CHECK(build_p3(s.code, s.findings, Language::python).text == read_file(fixture_path("golden/repair_p3.txt")));
  for (auto st : {RepairStructure::P1, RepairStructure::P2, RepairStructure::P3}) {
    const auto p = build_repair_prompt(st, s.code, s.findings, s.prompt);
    CHECK(p.structure == st);
    CHECK(p.findings_used == s.findings);
  }
}

TEST_CASE("fix block ordering and formatting") {
  const auto block = fix_block({lineless("whole"), lined("b", 9), lined("a\nsplit", 2)}, Language::java);
  CHECK(block ==
        "// Fix: At line 2, a split\n// Fix: At line 9, b\n// Fix: whole\n// Fixed Code:");
  CHECK(comment_marker(Language::python) == "#");
}

TEST_CASE("trailing newlines in the code are not doubled") {
  CHECK(build_p1("x = 1\n\n", {lined("m", 1)}, Language::python).text ==
        "x = 1\n# Fix: At line 1, m\n# Fixed Code:");
}

TEST_CASE("p3 keeps lines before the first finding") {
  CHECK(build_p3("a\nb\nc\n", {lined("m", 3), lineless("w")}, Language::python).text ==
        "a\nb\n# Fix: At line 3, m\n# Fix: w\n# Fixed Code:");
  CHECK(build_p3("a\nb\n", {lined("m", 1)}, Language::python).text == "# Fix: At line 1, m\n# Fixed Code:");
  CHECK_THROWS_AS(build_p3("a\n", {lineless("w")}, Language::python), NoLinedFindingError);
}

TEST_CASE("no findings") {
  CHECK_THROWS_AS(build_p1("a", {}, Language::python), NoFindingsError);
  CHECK_THROWS_AS(build_p3("a", {}, Language::python), NoFindingsError);
}

TEST_CASE("threshold") {
  QualityAssessment a;
  a.score = 0.99;
  CHECK(needs_repair(a, RepairPolicy{}));
  a.score = 1.0;
  CHECK_FALSE(needs_repair(a, RepairPolicy{}));
  RepairPolicy low;
  low.tau = 0.5;
  a.score = 0.5;
  CHECK_FALSE(needs_repair(a, low));
}

TEST_CASE("repair round targets the top-ranked snippet") {
  const Prompt p{"t", Language::python, "def f(x):\n", "d", std::nullopt};
  const auto inv = make_inventory(p, {"    return 0\n", "    return eval(x)\n"});
  const Assessor assessor;
  const auto es = filter_inventory(inv);
  auto ranked = rank(es, assess_all(assessor, es));
  FixedBackend backend;
  GenerationRequest req;
  req.n = 3;
  CHECK_FALSE(repair_round(ranked, RepairPolicy{}, backend, req));
  CHECK(backend.calls == 0);

  const auto bad_es = filter_inventory(make_inventory(p, {"    return eval(x)\n"}));
  ranked = rank(bad_es, assess_all(assessor, bad_es));
  const auto prep = prepare_repair(ranked, RepairPolicy{});
  REQUIRE(prep);
  CHECK(prep->origin_prompt_id == "t");
  CHECK(prep->target_position == 1);
  const auto round = repair_round(ranked, RepairPolicy{}, backend, req);
  REQUIRE(round);
  CHECK(backend.calls == 1);
  CHECK(backend.last_prompt == round->prompt.text);
  CHECK(round->inventory.n() == 3);
  REQUIRE(round->inventory.repair);
  CHECK(round->inventory.repair->original_code == "def f(x):\n    return eval(x)");
  CHECK(round->inventory.repair->repair_prompt == round->prompt.text);

  const auto repaired = filter_inventory(round->inventory);
  REQUIRE(repaired.x() == 3);
  CHECK(repaired.cleaned[0].text == "def f(x):\n    return 1");
}

TEST_CASE("prepare_repair validates") {
  RankedInventory empty;
  CHECK_THROWS_AS(prepare_repair(empty, RepairPolicy{}), EmptyRankError);
  RepairPolicy bad;
  bad.tau = -1;
  CHECK_THROWS_AS(prepare_repair(empty, bad), InvalidValueError);
}
