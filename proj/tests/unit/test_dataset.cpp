#include <doctest.h>

#include "codesift/dataset.hpp"
#include "codesift/errors.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

std::string write(const std::string& name, const std::string& body) {
  const std::string dir = testsupport::make_temp_dir("dataset");
  const std::string path = dir + "/" + name;
  testsupport::write_file(path, body);
  return path;
}

}  // namespace

TEST_CASE("humaneval jsonl") {
  const auto path = write("HumanEval.jsonl",
                          R"({"task_id": "HumanEval/0", "prompt": "def f(x):\n", "entry_point": "f", "canonical_solution": "x"})"
                          "\n\n"
                          R"({"task_id": "HumanEval/1", "prompt": "def g():\n"})"
                          "\n");
  const auto recs = load_dataset(path, DatasetFormat::jsonl_humaneval);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].task_id == "HumanEval/0");
  CHECK(recs[0].entry_point == std::optional<std::string>("f"));
  CHECK(recs[0].source_dataset == "HumanEval");
  CHECK(recs[0].language == Language::python);
  CHECK_FALSE(recs[1].entry_point);
  const auto p = recs[0].to_prompt();
  CHECK(p.id == "HumanEval/0");
  CHECK(p.text == "def f(x):\n");
  CHECK(p.dataset == "HumanEval");
}

TEST_CASE("generic jsonl") {
  const auto path = write("mixed.jsonl",
                          R"({"id": "a", "prompt": "class A {", "language": "java", "dataset": "sec"})"
                          "\n"
                          R"({"task_id": "b", "prompt": "x"})"
                          "\n");
  const auto recs = load_dataset(path, DatasetFormat::jsonl_generic, Language::java);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].task_id == "a");
  CHECK(recs[0].source_dataset == "sec");
  CHECK(recs[1].language == Language::java);
  CHECK(recs[1].source_dataset == "mixed");
}

TEST_CASE("malformed jsonl names the line") {
  const auto path = write("bad.jsonl", "{\"task_id\": \"a\", \"prompt\": \"x\"}\n{\"task_id\": \"b\"}\n");
  try {
    load_dataset(path, DatasetFormat::jsonl_humaneval);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(std::string(e.what()).find("bad.jsonl:2:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_dataset(write("x.jsonl", "nope\n"), DatasetFormat::jsonl_generic), MalformedRecord);
  CHECK_THROWS_AS(load_dataset(write("x.jsonl", R"({"task_id": "a", "prompt": "x", "language": "go"})"),
                               DatasetFormat::jsonl_generic),
                  MalformedRecord);
  CHECK_THROWS_AS(load_dataset(write("x.jsonl", R"({"task_id": [3], "prompt": "x"})"),
                               DatasetFormat::jsonl_generic),
                  MalformedRecord);
  CHECK(load_dataset(write("x.jsonl", R"({"task_id": 3, "prompt": "x"})"), DatasetFormat::jsonl_generic)[0]
            .task_id == "3");
}

TEST_CASE("duplicate ids are rejected per dataset") {
  const auto dup = write("d.jsonl", R"({"task_id": "a", "prompt": "x"})"
                                    "\n"
                                    R"({"task_id": "a", "prompt": "y"})"
                                    "\n");
  CHECK_THROWS_AS(load_dataset(dup, DatasetFormat::jsonl_humaneval), MalformedRecord);
  const auto split = write("d.jsonl", R"({"task_id": "a", "prompt": "x", "dataset": "one"})"
                                      "\n"
                                      R"({"task_id": "a", "prompt": "y", "dataset": "two"})"
                                      "\n");
  CHECK(load_dataset(split, DatasetFormat::jsonl_generic).size() == 2);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/x.jsonl", DatasetFormat::jsonl_generic), IoError);
}

TEST_CASE("csv parsing") {
  const auto rows = parse_csv("a,b\n\"x, y\",\"multi\nline \"\"q\"\"\"\nlast,\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].first == 1);
  CHECK(rows[1].second == std::vector<std::string>{"x, y", "multi\nline \"q\""});
  CHECK(rows[2].first == 4);
  CHECK(rows[2].second == std::vector<std::string>{"last", ""});
  CHECK(parse_csv("a\r\nb\r\n").size() == 2);
  CHECK_THROWS_AS(parse_csv("\"open\n"), MalformedRecord);
}

TEST_CASE("csv prompts") {
  const auto path = write("sec.csv",
                          "task_id,prompt,language,entry_point\n"
                          "t1,\"def f():\n    pass\n\",python,f\n"
                          "t2,\"class A {\",java,\n");
  const auto recs = load_dataset(path, DatasetFormat::csv_prompts);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].prompt == "def f():\n    pass\n");
  CHECK(recs[0].entry_point == std::optional<std::string>("f"));
  CHECK(recs[1].language == Language::java);
  CHECK_FALSE(recs[1].entry_point);
  CHECK(recs[1].source_dataset == "sec");

  CHECK_THROWS_AS(load_dataset(write("h.csv", "id,text\n1,x\n"), DatasetFormat::csv_prompts), MalformedRecord);
  try {
    load_dataset(write("w.csv", "task_id,prompt\nt1,x\nt2,x,extra\n"), DatasetFormat::csv_prompts);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(std::string(e.what()).find("w.csv:3:") != std::string::npos);
  }
}

TEST_CASE("format tags") {
  CHECK(parse_dataset_format("csv_prompts") == DatasetFormat::csv_prompts);
  CHECK(to_string(DatasetFormat::jsonl_generic) == "jsonl_generic");
  CHECK_THROWS_AS(parse_dataset_format("xml"), InvalidValueError);
}
