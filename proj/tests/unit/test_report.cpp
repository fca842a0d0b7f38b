#include <doctest.h>

#include "codesift/errors.hpp"
#include "codesift/report.hpp"
#include "codesift/text.hpp"
#include "support.hpp"

using namespace codesift;
using testsupport::fixture_path;
using testsupport::read_file;

namespace {

Json fixture_report() { return parse_json(read_file(fixture_path("report_fixture.json")), "fixture"); }

std::vector<std::string> column(const std::string& csv, std::size_t index) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(csv)) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < index; ++i) start = line.find(',', start) + 1;
    out.push_back(line.substr(start, line.find(',', start) - start));
  }
  return out;
}

}  // namespace

TEST_CASE("tables match the goldens") {
  const std::vector<Json> reports{fixture_report()};
  CHECK(compilability_table_csv(reports) == read_file(fixture_path("golden/table1.csv")));
  CHECK(ndcg_table_csv(reports) == read_file(fixture_path("golden/table2.csv")));
  CHECK(timing_table_csv(reports) == read_file(fixture_path("golden/table3.csv")));
}

TEST_CASE("write_tables") {
  const std::string prefix = testsupport::make_temp_dir("tables") + "/run-";
  write_tables({fixture_report()}, prefix);
  for (int i = 1; i <= 3; ++i) {
    const std::string name = "table" + std::to_string(i) + ".csv";
    CHECK(read_file(prefix + name) == read_file(fixture_path("golden/" + name)));
  }
  CHECK_THROWS_AS(write_tables({fixture_report()}, "/nonexistent-dir/x-"), IoError);
}

TEST_CASE("reports for the same model are merged") {
  const Json r = fixture_report();
  const std::string merged = ndcg_table_csv({r, r});
  CHECK(merged.find("Python,# Prompts,26\n") != std::string::npos);
  CHECK(merged.find("Python,Model's NDCG@k,0.3297\n") != std::string::npos);
  CHECK(compilability_table_csv({r, r}) == compilability_table_csv({r}));
  CHECK(timing_table_csv({r, r}) == timing_table_csv({r}));
}

TEST_CASE("one column per model, languages fill in") {
  Json java = fixture_report();
  java["config"]["model"] = "other,model";
  java["summary"]["languages"]["java"] = java["summary"]["languages"]["python"];
  java["summary"]["languages"].erase("python");
  java["summary"]["languages"]["java"].erase("mean_timings");
  const std::string t1 = compilability_table_csv({fixture_report(), java});
  CHECK(text::split_lines(t1)[0] == "language,metric,codeparrot-small,\"other,model\"");
  CHECK(t1.find("Java,Before,-,22.22%\n") != std::string::npos);
  CHECK(t1.find("Python,Before,22.22%,-\n") != std::string::npos);
  const std::string t3 = timing_table_csv({fixture_report(), java});
  CHECK(t3.find("Java,Total,-,-\n") != std::string::npos);
}

TEST_CASE("table layout") {
  const std::vector<Json> reports{fixture_report()};
  CHECK(column(compilability_table_csv(reports), 1) ==
        std::vector<std::string>{"metric", "Before", "After", "% Increase", "Before", "After", "% Increase"});
  CHECK(column(timing_table_csv(reports), 0) ==
        std::vector<std::string>{"language", "Java", "Java", "Java", "Java", "Python", "Python", "Python",
                                 "Python"});
  CHECK(text::split_lines(ndcg_table_csv(reports)).size() == 11);
}
