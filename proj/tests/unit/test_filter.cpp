#include <doctest.h>

#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/syntax.hpp"
#include "codesift/text.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

Prompt py_prompt(const std::string& text, std::optional<std::string> entry = std::nullopt) {
  return Prompt{"p", Language::python, text, "d", std::move(entry)};
}

Prompt java_prompt(const std::string& text) {
  return Prompt{"j", Language::java, text, "d", std::nullopt};
}

}  // namespace

TEST_CASE("h1 takes the first fenced block") {
  CHECK(h1_strip_fences("plain") == "plain");
  CHECK(h1_strip_fences("x\n```python\na = 1\n```\ny\n```\nb\n```") == "a = 1");
  CHECK(h1_strip_fences("```\nunterminated\n") == "unterminated");
  CHECK(h1_strip_fences("```") == "");
}

TEST_CASE("h2 restores the missing prompt prefix") {
  const auto p = py_prompt("def f(x):\n    \"\"\"doc\"\"\"\n");
  CHECK(h2_ensure_prompt("    return x\n", p) == p.text + "    return x\n");
  CHECK(h2_ensure_prompt(p.text + "    return x\n", p) == p.text + "    return x\n");
  CHECK(h2_ensure_prompt("    \"\"\"doc\"\"\"\n    return x\n", p) == p.text + "    return x\n");
  CHECK(h2_ensure_prompt("abc", py_prompt("")) == "abc");
}

TEST_CASE("h3 cuts at sentinels") {
  CHECK(h3_strip_sentinels("a\n</code>\nb") == "a");
  CHECK(h3_strip_sentinels("a\n```\n\n## Notes") == "a");
  CHECK(h3_strip_sentinels("a\n```\nb") == "a\n```\nb");
}

TEST_CASE("h4 keeps the entry point and everything before it") {
  const auto p = py_prompt("def f():\n", "f");
  CHECK(h4_truncate_after_target("def f():\n    return 1\n\ndef g():\n    pass\n", p) ==
        "def f():\n    return 1");
  CHECK(h4_truncate_after_target("import os\ndef f():\n    return 1\nprint(f())\n", p) ==
        "import os\ndef f():\n    return 1");
  CHECK_THROWS_AS(h4_truncate_after_target("def g():\n    pass\n", p), TargetNotFoundError);
  CHECK_THROWS_AS(h4_truncate_after_target("x = 1\n", py_prompt("x = ")), TargetNotFoundError);
}

TEST_CASE("h4 on two functions with an unfinished second one keeps lines 1-8") {
  const std::string code = testsupport::read_file(testsupport::fixture_path("yaml_two_functions.py"));
  const auto p = py_prompt(testsupport::read_file(testsupport::fixture_path("yaml_two_functions.prompt")));
  CHECK(infer_entry_point(p) == std::optional<std::string>("yaml_load"));
  const auto lines = text::split_lines(code);
  REQUIRE(lines.size() == 19);
  const std::string expected = text::join_lines(lines, 0, 8);
  CHECK(h4_truncate_after_target(code, p) == expected);
  const auto r = clean(CodeSuggestion{"p", 1, code, Language::python}, p);
  CHECK_FALSE(r.drop_reason);
  CHECK(r.suggestion.text == expected);
  CHECK(check_syntax(r.suggestion.text, Language::python).ok);
}

TEST_CASE("h5 drops classes the prompt did not declare") {
  const auto p = java_prompt("public class A {\n    int f() {\n");
  const std::string code = "public class A {\n    int f() {\n        return 1;\n    }\n}\n"
                           "class B {\n    int g() { return 2; }\n}\n";
  CHECK(h5_drop_extra_classes(code, p) == "public class A {\n    int f() {\n        return 1;\n    }\n}");
  CHECK_THROWS_AS(h5_drop_extra_classes("class C {}\n", p), TargetNotFoundError);
  const auto bare = java_prompt("int f() {\n");
  CHECK(h5_drop_extra_classes("int f() {\n  return 1;\n}\n", bare) == "int f() {\n  return 1;\n}\n");
}

TEST_CASE("h6 appends braces then deletes trailing lines") {
  BraceRepairStats st;
  CHECK(h6_brace_repair("class A {\n  void f() {\n  }", &st) == "class A {\n  void f() {\n  }\n}");
  CHECK(st.rounds == 1);
  CHECK(h6_brace_repair("class A {\n  void f() {\n    int x = 1;") ==
        "class A {\n  void f() {\n    int x = 1;\n}}");
  st = {};
  CHECK(h6_brace_repair("class A {\n  int x = 1;\n  void g() {\n    int y = \n", &st) ==
        "class A {\n  int x = 1;\n  void g() {\n}}");
  CHECK(st.rounds == 2);
  CHECK(h6_brace_repair("int[] = new;\nreturn (;\n") == "");
  CHECK(h6_brace_repair("class A {\n  void f() {\n    int y = ", nullptr, 2) == "");
}

TEST_CASE("h7 splices over the finding span") {
  const std::string original = "a\nb\nc\nd\n";
  Finding f{"r", "m", 2, 3, Severity::warning, "s"};
  CHECK(h7_splice_repaired(original, {f}, "X\nY\nZ") == "a\nX\nY\nZ\nd");
  Finding g{"r", "m", 4, std::nullopt, Severity::warning, "s"};
  CHECK(h7_splice_repaired(original, {g}, "D") == "a\nb\nc\nD");
  CHECK(h7_splice_repaired(original, {f, g}, "-") == "a\n-");
  Finding whole{"r", "m", std::nullopt, std::nullopt, Severity::warning, "s"};
  CHECK(h7_splice_repaired(original, {whole, f}, "new") == "new");
  Finding out{"r", "m", 5, std::nullopt, Severity::warning, "s"};
  CHECK_THROWS_AS(h7_splice_repaired(original, {out}, "x"), SpanOutOfRangeError);
  CHECK_THROWS_AS(h7_splice_repaired(original, {}, "x"), SpanOutOfRangeError);
}

TEST_CASE("entry point inference") {
  CHECK(infer_entry_point(py_prompt("def a():\n    pass\ndef b(x):\n")) == std::optional<std::string>("b"));
  CHECK(infer_entry_point(py_prompt("def a():\n", "z")) == std::optional<std::string>("z"));
  CHECK_FALSE(infer_entry_point(py_prompt("# def hidden():\nx = 1\n")));
  CHECK(infer_entry_point(java_prompt("class A {\n  public int run(int a) throws E {\n")) ==
        std::optional<std::string>("run"));
}

TEST_CASE("clean reports drop reasons") {
  const auto p = py_prompt("def f(x):\n", "f");
  CHECK(clean({"p", 1, "", Language::python}, p).drop_reason == std::optional<std::string>("empty_body"));
  CHECK(clean({"p", 1, "def g():\n    pass\n", Language::python}, py_prompt("import os\n", "f")).drop_reason ==
        std::optional<std::string>("target_not_found"));
  const auto j = java_prompt("class A {\n  int f() {\n");
  CHECK(clean({"j", 1, "}\n}\n", Language::java}, j).drop_reason ==
        std::optional<std::string>("empty_body"));
}

TEST_CASE("repair context for a full rewrite and for a fragment") {
  const auto p = py_prompt("def f(x):\n", "f");
  RepairOrigin origin{"def f(x):\n    return eval(x)\n",
                      {Finding{"eval_exec", "m", 2, std::nullopt, Severity::warning, "builtin"}},
                      "PROMPT\n# Fixed Code:"};
  auto ctx = repair_context_for(origin, "PROMPT\n# Fixed Code:\n    return int(x)\n", p);
  CHECK(ctx.fragment == "\n    return int(x)\n");
  CHECK(ctx.findings == origin.findings);
  ctx = repair_context_for(origin, "```python\ndef f(x):\n    return int(x)\n```", p);
  REQUIRE(ctx.findings.size() == 1);
  CHECK_FALSE(ctx.findings[0].line_start);

  auto inv = make_inventory(p, {"    return int(x)", "def f(x):\n    return abs(x)\n", "    return ("});
  inv.repair = origin;
  const auto es = filter_inventory_serial(inv);
  REQUIRE(es.x() == 2);
  CHECK(es.cleaned[0].text == "def f(x):\n    return int(x)");
  CHECK(es.cleaned[1].text == "def f(x):\n    return abs(x)");
  REQUIRE(es.dropped.size() == 1);
  CHECK(es.dropped[0] == DroppedSuggestion{3, "syntax_error"});
}

TEST_CASE("corpus: cleaned snippets recover the achievable ones") {
  int achievable = 0;
  int passed = 0;
  for (const auto& e : testsupport::corpus()) {
    const auto p = e.make_prompt();
    const auto es = filter_inventory(make_inventory(p, {e.raw}));
    const bool ok = es.x() == 1;
    CAPTURE(e.id);
    CHECK(ok == e.achievable);
    achievable += e.achievable;
    passed += ok;
  }
  CHECK(passed >= achievable);
}

TEST_CASE("corpus: clean is idempotent") {
  for (const auto& e : testsupport::corpus()) {
    const auto p = e.make_prompt();
    const auto once = clean({p.id, 1, e.raw, e.language}, p);
    if (once.drop_reason) continue;
    const auto twice = clean(once.suggestion, p);
    CAPTURE(e.id);
    CHECK_FALSE(twice.drop_reason);
    CHECK(twice.suggestion.text == once.suggestion.text);
  }
}

TEST_CASE("filter keeps original order and records drops") {
  const auto& c = testsupport::corpus();
  std::vector<std::string> raws;
  Prompt p = c[0].make_prompt();
  for (std::size_t i = 0; i < 10; ++i) raws.push_back(c[i].raw);
  const auto inv = make_inventory(p, raws);
  const auto es = filter_inventory(inv);
  CHECK(es.n == 10);
  CHECK(es.x() + es.dropped.size() == 10);
  for (std::size_t i = 1; i < es.cleaned.size(); ++i) {
    CHECK(es.cleaned[i - 1].position < es.cleaned[i].position);
  }
}
