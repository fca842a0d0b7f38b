#include <doctest.h>

#include <omp.h>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/json_io.hpp"
#include "support.hpp"

using namespace codesift;

namespace {

// Every corpus base as one inventory of its ten variants.
std::vector<SuggestionInventory> corpus_inventories() {
  std::vector<SuggestionInventory> out;
  const auto& c = testsupport::corpus();
  for (std::size_t i = 0; i < c.size(); i += 10) {
    std::vector<std::string> raws;
    for (std::size_t j = i; j < i + 10 && j < c.size(); ++j) raws.push_back(c[j].raw);
    out.push_back(make_inventory(c[i].make_prompt(), raws));
  }
  return out;
}

}  // namespace

TEST_CASE("parallel filter and assess equal the serial references") {
  omp_set_num_threads(4);
  const Assessor assessor;
  for (const auto& inv : corpus_inventories()) {
    const auto par = filter_inventory(inv);
    const auto ser = filter_inventory_serial(inv);
    CHECK(dump(Json(par)) == dump(Json(ser)));
    const auto a = assess_all(assessor, par);
    const auto b = assess_all_serial(assessor, ser);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(dump(Json(a[i])) == dump(Json(b[i])));
  }
}

TEST_CASE("worker exceptions reach the caller") {
  omp_set_num_threads(4);
  Assessor assessor;
  AnalyzerSpec crash;
  crash.name = "crash";
  crash.command_template = "cat {file} >/dev/null; exit 3";
  assessor.analyzers = {crash};
  const auto inv = corpus_inventories().front();
  const auto es = filter_inventory(inv);
  REQUIRE(es.x() > 1);
  CHECK_THROWS_AS(assess_all(assessor, es), AnalyzerCrashed);
  CHECK_THROWS_AS(assess_all_serial(assessor, es), AnalyzerCrashed);

  auto bad = make_inventory(inv.prompt, {"    return 1", "    pass", "x = 2"});
  bad.repair = RepairOrigin{"x\n", {Finding{"r", "m", 9, std::nullopt, Severity::info, "s"}}, ""};
  const auto spans = filter_inventory(bad);
  CHECK(spans.x() == 0);
  CHECK(spans.dropped.size() == 3);
  for (const auto& d : spans.dropped) CHECK(d.reason == "span_out_of_range");
}
