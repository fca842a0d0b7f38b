#include <doctest.h>

#include <chrono>

#include "codesift/analyzer.hpp"
#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

// Analyzer command that ignores its input and prints the given report.
AnalyzerSpec echo_analyzer(const std::string& report, const std::string& extra = "") {
  const std::string dir = testsupport::make_temp_dir("analyzer");
  testsupport::write_file(dir + "/report.json", report);
  AnalyzerSpec spec;
  spec.name = "fake";
  spec.command_template = "test -f {file} && cat '" + dir + "/report.json'" + extra;
  spec.timeout_ms = 5000;
  return spec;
}

const char* kBandit = R"({"results": [
  {"test_id": "B506", "issue_text": "Use of unsafe yaml load.", "line_number": 3,
   "line_range": [3, 4], "issue_severity": "MEDIUM"},
  {"test_id": "B303", "issue_text": "md5", "line_number": 1, "line_range": [1],
   "issue_severity": "HIGH"}]})";

const char* kSarif = R"({"version": "2.1.0", "runs": [{"results": [
  {"ruleId": "SQL_INJECTION", "level": "error", "message": {"text": "Nonconstant SQL"},
   "locations": [{"physicalLocation": {"region": {"startLine": 5, "endLine": 5}}}]},
  {"ruleId": "DM_DEFAULT", "level": "note", "message": {"text": "no location"}}]}]})";

}  // namespace

TEST_CASE("bandit reports") {
  const auto fs = parse_analyzer_report(kBandit, "bandit");
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].rule_id == "B506");
  CHECK(fs[0].line_start == 3);
  CHECK(fs[0].line_end == 4);
  CHECK(fs[0].severity == Severity::warning);
  CHECK(fs[0].source == "bandit");
  CHECK(fs[1].severity == Severity::error);
  CHECK_FALSE(fs[1].line_end);
}

TEST_CASE("sarif reports") {
  const auto fs = parse_analyzer_report(kSarif, "spotbugs");
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].rule_id == "SQL_INJECTION");
  CHECK(fs[0].message == "Nonconstant SQL");
  CHECK(fs[0].line_start == 5);
  CHECK_FALSE(fs[0].line_end);
  CHECK(fs[0].severity == Severity::error);
  CHECK_FALSE(fs[1].line_start);
  CHECK(fs[1].severity == Severity::info);
}

TEST_CASE("normalized reports") {
  const auto list = parse_analyzer_report(
      R"([{"rule_id": "x", "message": "m", "line_start": 2, "line_end": null, "severity": "info"}])", "n");
  REQUIRE(list.size() == 1);
  CHECK(list[0].line_start == 2);
  CHECK(list[0].severity == Severity::info);
  const auto obj = parse_analyzer_report(R"({"findings": [{"rule_id": "y", "line_start": 0}]})", "n");
  REQUIRE(obj.size() == 1);
  CHECK_FALSE(obj[0].line_start);
  CHECK(parse_analyzer_report("[]", "n").empty());
}

TEST_CASE("unparseable reports") {
  CHECK_THROWS_AS(parse_analyzer_report("not json", "n"), ReportParseError);
  CHECK_THROWS_AS(parse_analyzer_report(R"({"other": 1})", "n"), ReportParseError);
  CHECK_THROWS_AS(parse_analyzer_report(R"([{"message": "no id"}])", "n"), ReportParseError);
}

TEST_CASE("spec validation") {
  AnalyzerSpec spec{"a", "tool", "native_json", 1000, Language::python};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.command_template = "tool {file} {file}";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.command_template = "tool {file}";
  CHECK_NOTHROW(spec.validate());
  spec.timeout_ms = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.timeout_ms = 10;
  spec.report_format = "xml";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("run_shell captures output and exit code") {
  const auto r = run_shell("echo out; echo err >&2; exit 3", 5000);
  CHECK(r.out == "out\n");
  CHECK(r.err == "err\n");
  CHECK(r.exit_code == 3);
  CHECK_FALSE(r.timed_out);
}

TEST_CASE("external analyzer via stdout") {
  const auto fs = run_external_analyzer(echo_analyzer(kBandit), "x = 1\n");
  CHECK(fs.size() == 2);
}

TEST_CASE("external analyzer receives the snippet") {
  AnalyzerSpec spec;
  spec.name = "grep";
  spec.command_template =
      "if grep -q danger {file}; then echo '[{\"rule_id\": \"danger\", \"line_start\": 2}]'; "
      "else echo '[]'; fi";
  CHECK(run_external_analyzer(spec, "a\nb\n").empty());
  const auto fs = run_external_analyzer(spec, "a\ndanger()\n");
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].source == "grep");
}

TEST_CASE("external analyzer via report file") {
  AnalyzerSpec spec;
  spec.name = "to-file";
  spec.command_template = "cat {file} >/dev/null; echo '[{\"rule_id\": \"r\"}]' > {report}; exit 1";
  const auto fs = run_external_analyzer(spec, "x\n");
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].rule_id == "r");
}

TEST_CASE("external analyzer failures") {
  AnalyzerSpec spec;
  spec.name = "slow";
  spec.command_template = "sleep 5; cat {file}";
  spec.timeout_ms = 200;
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(run_external_analyzer(spec, "x\n"), AnalyzerTimeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));

  spec.name = "crash";
  spec.command_template = "cat {file} >/dev/null; exit 2";
  spec.timeout_ms = 5000;
  CHECK_THROWS_AS(run_external_analyzer(spec, "x\n"), AnalyzerCrashed);

  spec.command_template = "cat {file} >/dev/null; echo garbage; exit 2";
  CHECK_THROWS_AS(run_external_analyzer(spec, "x\n"), AnalyzerCrashed);

  spec.command_template = "cat {file} >/dev/null; echo garbage";
  CHECK_THROWS_AS(run_external_analyzer(spec, "x\n"), ReportParseError);

  spec.command_template = "cat {file} >/dev/null";
  CHECK(run_external_analyzer(spec, "x\n").empty());
}

TEST_CASE("external findings in the prompt region are dropped") {
  const Prompt p{"p", Language::python, "import hashlib\nimport yaml\n", "d", std::nullopt};
  const auto fs = run_external_analyzer(echo_analyzer(kBandit), "import hashlib\nimport yaml\nx\ny\n", &p);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].rule_id == "B506");
}

TEST_CASE("assessor runs analyzers for the matching language only") {
  Assessor a;
  a.builtin = false;
  auto py = echo_analyzer(kBandit);
  auto java = echo_analyzer(kSarif);
  java.language = Language::java;
  a.analyzers = {py, java};
  const Prompt p{"p", Language::python, "def f():\n", "d", std::nullopt};
  const auto qa = a.assess({"p", 1, "def f():\n    return 1\n", Language::python}, p);
  REQUIRE(qa.findings.size() == 1);
  CHECK(qa.findings[0].rule_id == "B506");
  CHECK(qa.score == 0.0);
}

TEST_CASE("analyzer process cap") {
  const int before = max_analyzer_processes();
  CHECK(before == 4);
  set_max_analyzer_processes(1);
  CHECK(max_analyzer_processes() == 1);
  CHECK(run_external_analyzer(echo_analyzer("[]"), "x").empty());
  set_max_analyzer_processes(before);
}
