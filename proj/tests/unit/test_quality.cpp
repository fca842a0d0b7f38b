#include <doctest.h>

#include <algorithm>
#include <random>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/quality.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

std::vector<std::string> ids(const std::vector<Finding>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.rule_id);
  return out;
}

std::vector<std::string> py_rules(const std::string& code) {
  return ids(run_builtin_rules(code, Language::python));
}

std::vector<std::string> java_rules(const std::string& code) {
  return ids(run_builtin_rules(code, Language::java));
}

using Strings = std::vector<std::string>;

// Random weights summing to one.
std::vector<double> random_weights(std::mt19937& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(m);
  double sum = 0.0;
  for (auto& x : w) sum += (x = u(rng) + 1e-6);
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace

TEST_CASE("python rules fire on known patterns") {
  CHECK(py_rules("yaml.load(f)\n") == Strings{"unsafe_yaml_load"});
  CHECK(py_rules("yaml.load(f, Loader=yaml.SafeLoader)\n").empty());
  CHECK(py_rules("yaml.unsafe_load(f)\n") == Strings{"unsafe_yaml_load"});
  CHECK(py_rules("h = hashlib.md5(b)\n") == Strings{"weak_hash"});
  CHECK(py_rules("h = hashlib.new('sha1')\n") == Strings{"weak_hash"});
  CHECK(py_rules("h = hashlib.sha256(b)\n").empty());
  CHECK(py_rules("subprocess.run(cmd, shell=True)\n") == Strings{"shell_injection"});
  CHECK(py_rules("subprocess.run('ls', shell=True)\n").empty());
  CHECK(py_rules("os.system('rm ' + path)\n") == Strings{"shell_injection"});
  CHECK(py_rules("c.execute(\"SELECT * FROM t WHERE a = '%s'\" % a)\n") == Strings{"sql_injection"});
  CHECK(py_rules("c.execute(f\"DELETE FROM t WHERE a = {a}\")\n") == Strings{"sql_injection"});
  CHECK(py_rules("c.execute(\"SELECT * FROM t WHERE a = ?\", (a,))\n").empty());
  CHECK(py_rules("app.run(debug=True)\n") == Strings{"flask_debug"});
  CHECK(py_rules("try:\n    f()\nexcept Exception:\n    pass\n") == Strings{"try_except_pass"});
  CHECK(py_rules("try:\n    f()\nexcept Exception:\n    log()\n").empty());
  CHECK(py_rules("password = 'hunter2'\n") == Strings{"hardcoded_password"});
  CHECK(py_rules("if password == 'x':\n    pass\n").empty());
  CHECK(py_rules("eval(expr)\n") == Strings{"eval_exec"});
  CHECK(py_rules("exec(code)\n") == Strings{"eval_exec"});
  CHECK(py_rules("ast.literal_eval(expr)\n").empty());
  CHECK(py_rules("# hashlib.md5(x)\n").empty());
}

TEST_CASE("java rules fire on known patterns") {
  CHECK(java_rules("st.executeQuery(\"SELECT * FROM t WHERE a = '\" + a + \"'\");\n") ==
        Strings{"sql_injection"});
  CHECK(java_rules("String q = \"SELECT * FROM t WHERE a = \" + a;\nst.execute(q);\n") ==
        Strings{"sql_injection"});
  CHECK(java_rules("st.executeQuery(\"SELECT 1\");\n").empty());
  CHECK(java_rules("MessageDigest.getInstance(\"MD5\");\n") == Strings{"weak_hash"});
  CHECK(java_rules("MessageDigest.getInstance(\"SHA-256\");\n").empty());
  CHECK(java_rules("if (a == \"x\") {}\n") == Strings{"string_ref_equality"});
  CHECK(java_rules("s.trim();\n") == Strings{"ignored_return_value"});
  CHECK(java_rules("s = s.trim();\n").empty());
  const auto fs = run_builtin_rules("try {\n  f();\n} catch (E e) {\n}\n", Language::java);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].rule_id == "empty_catch");
  CHECK(fs[0].line_start == 3);
  CHECK(fs[0].line_end == 4);
}

TEST_CASE("builtin findings are sorted, 1-based and tagged") {
  const auto fs = run_builtin_rules("eval(a)\nimport hashlib\nx = hashlib.md5(a)\nyaml.load(f)\n",
                                    Language::python);
  REQUIRE(fs.size() == 3);
  CHECK(fs[0].line_start == 1);
  CHECK(fs[1].line_start == 3);
  CHECK(fs[2].line_start == 4);
  for (const auto& f : fs) {
    CHECK(f.source == "builtin");
    CHECK_NOTHROW(f.validate());
    const auto& known = builtin_rule_ids(Language::python);
    CHECK(std::find(known.begin(), known.end(), f.rule_id) != known.end());
  }
}

TEST_CASE("factor registry") {
  CHECK(has_factor("smell_free"));
  CHECK_FALSE(has_factor("nope"));
  CHECK_THROWS_AS(quality_factor("nope", "", {}, {}), UnknownFactorError);
  register_factor("short", [](std::string_view code, const std::vector<Finding>&, const SyntaxVerdict&) {
    return code.size() < 10 ? 1.0 : 0.0;
  });
  CHECK(quality_factor("short", "x", {}, {}) == 1.0);
  register_factor("bad", [](std::string_view, const std::vector<Finding>&, const SyntaxVerdict&) {
    return 2.0;
  });
  CHECK_THROWS_AS(quality_factor("bad", "", {}, {}), InvalidValueError);
  Finding f{"r", "m", 1, std::nullopt, Severity::info, "s"};
  CHECK(quality_factor("smell_free", "x", {f}, {}) == 0.0);
  CHECK(quality_factor("smell_free", "x", {}, SyntaxVerdict{false, 1, "e"}) == 0.0);
}

TEST_CASE("score mismatch errors") {
  const auto scheme = validate_scheme({{"a", 0.5}, {"b", 0.5}});
  CHECK(quality_score({{"a", 1.0}, {"b", 0.0}}, scheme) == doctest::Approx(0.5));
  CHECK_THROWS_AS(quality_score({{"a", 1.0}}, scheme), SchemeMismatchError);
  CHECK_THROWS_AS(quality_score({{"b", 1.0}, {"a", 0.0}}, scheme), SchemeMismatchError);
  CHECK_THROWS_AS(quality_score({{"a", 1.5}, {"b", 0.0}}, scheme), InvalidValueError);
}

TEST_CASE("property: score bounded and monotone in every factor") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 1 + rng() % 6;
    const auto w = random_weights(rng, m);
    std::vector<std::pair<std::string, double>> raw;
    FactorValues values;
    for (std::size_t j = 0; j < m; ++j) {
      raw.emplace_back("f" + std::to_string(j), w[j]);
      values.emplace_back("f" + std::to_string(j), u(rng));
    }
    const auto scheme = validate_scheme(raw);
    const double q = quality_score(values, scheme);
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
    const std::size_t j = rng() % m;
    auto bumped = values;
    bumped[j].second = values[j].second + (1.0 - values[j].second) * u(rng);
    CHECK(quality_score(bumped, scheme) >= q - 1e-15);

    auto off = raw;
    off[0].second += 1e-3 + u(rng);
    CHECK_THROWS_AS(validate_scheme(off), WeightSumError);
  }
}

TEST_CASE("prompt region suppression") {
  const Prompt p{"p", Language::python, "import yaml\ndef f():\n", "d", std::nullopt};
  const std::string code = "import yaml\ndef f():\n    return yaml.load(x)\n";
  CHECK(prompt_region(code, p) == std::optional<std::pair<int, int>>({1, 2}));
  CHECK_FALSE(prompt_region("other\n", p));
  CHECK_FALSE(prompt_region("abc", Prompt{"p", Language::python, "ab", "d", std::nullopt}));
  Finding in{"a", "m", 2, std::nullopt, Severity::info, "s"};
  Finding across{"b", "m", 2, 3, Severity::info, "s"};
  Finding after{"c", "m", 3, std::nullopt, Severity::info, "s"};
  Finding lineless{"d", "m", std::nullopt, std::nullopt, Severity::info, "s"};
  const auto kept = suppress_prompt_region({in, across, after, lineless}, code, p);
  CHECK(ids(kept) == Strings{"b", "c", "d"});
}

TEST_CASE("assessor suppresses prompt-region findings") {
  const Prompt p{"p", Language::python, "import hashlib\nh = hashlib.md5(b'')\ndef f(x):\n", "d",
                 std::nullopt};
  const Assessor a;
  const auto qa = a.assess({"p", 1, p.text + "    return x\n", Language::python}, p);
  CHECK(qa.findings.empty());
  CHECK(qa.score == 1.0);
  CHECK(qa.syntax_ok);
  const auto bad = a.assess({"p", 2, p.text + "    return eval(x)\n", Language::python}, p);
  CHECK(ids(bad.findings) == Strings{"eval_exec"});
  CHECK(bad.score == 0.0);
  CHECK(bad.suggestion_position == 2);
  REQUIRE(bad.factor_values.size() == 1);
  CHECK(bad.factor_values[0].first == "smell_free");
}

TEST_CASE("assessor with a weighted scheme") {
  const Prompt p{"p", Language::python, "def f(x):\n", "d", std::nullopt};
  Assessor a;
  a.scheme = validate_scheme({{"smell_free", 0.75}, {"compilable", 0.25}});
  const auto qa = a.assess({"p", 1, "def f(x):\n    return eval(x)\n", Language::python}, p);
  CHECK(qa.score == doctest::Approx(0.25));
  a.builtin = false;
  CHECK(a.assess({"p", 1, "def f(x):\n    return eval(x)\n", Language::python}, p).score == 1.0);
}

TEST_CASE("corpus: binary Q is 1 exactly for parse-ok snippets without findings") {
  const Assessor a;
  for (const auto& e : testsupport::corpus()) {
    const auto p = e.make_prompt();
    const auto r = clean({p.id, 1, e.raw, e.language}, p);
    const CodeSuggestion s = r.drop_reason ? CodeSuggestion{p.id, 1, e.raw, e.language} : r.suggestion;
    const auto qa = a.assess(s, p);
    CAPTURE(e.id);
    CHECK((qa.score == 1.0) == (qa.syntax_ok && qa.findings.empty()));
    CHECK((qa.score == 0.0) == !(qa.syntax_ok && qa.findings.empty()));
    if (e.achievable) {
      auto found = ids(qa.findings);
      std::sort(found.begin(), found.end());
      found.erase(std::unique(found.begin(), found.end()), found.end());
      auto expected = e.defects;
      std::sort(expected.begin(), expected.end());
      CHECK(found == expected);
    }
  }
}
