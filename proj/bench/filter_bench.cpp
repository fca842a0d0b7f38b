// Serial vs OpenMP timings for the filter and assessment kernels.
#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "codesift/assess.hpp"
#include "codesift/filter.hpp"
#include "codesift/model.hpp"

using namespace codesift;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<SuggestionInventory> load_inventories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::map<std::string, std::pair<Prompt, std::vector<std::string>>> groups;
  std::vector<std::string> order;
  for (const auto& r : nlohmann::json::parse(ss.str())) {
    const std::string prompt = r.at("prompt");
    auto [it, fresh] = groups.try_emplace(prompt);
    if (fresh) {
      order.push_back(prompt);
      Prompt& p = it->second.first;
      p.id = "bench-" + std::to_string(order.size());
      p.language = parse_language(r.at("language").get<std::string>());
      p.text = prompt;
      p.dataset = "bench";
      if (!r.at("entry_point").is_null()) p.entry_point = r.at("entry_point").get<std::string>();
    }
    it->second.second.push_back(r.at("raw"));
  }
  std::vector<SuggestionInventory> out;
  for (const auto& key : order) out.push_back(make_inventory(groups[key].first, groups[key].second));
  return out;
}

template <class F>
double best_of(int reps, F f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

bool same(const EligibleSet& a, const EligibleSet& b) {
  if (a.cleaned.size() != b.cleaned.size()) return false;
  for (std::size_t i = 0; i < a.cleaned.size(); ++i) {
    if (a.cleaned[i].text != b.cleaned[i].text || a.cleaned[i].position != b.cleaned[i].position) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"filter/assess kernel benchmark"};
  std::string corpus = CODESIFT_BENCH_CORPUS;
  int reps = 5;
  int threads = omp_get_max_threads();
  app.add_option("--corpus", corpus, "snippet corpus (json)")->capture_default_str();
  app.add_option("--reps", reps, "repetitions, best time is reported")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads")->capture_default_str()->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  omp_set_num_threads(threads);

  const auto inventories = load_inventories(corpus);
  const Assessor assessor;
  std::size_t suggestions = 0;
  for (const auto& inv : inventories) suggestions += inv.n();

  std::vector<EligibleSet> serial_sets;
  std::vector<EligibleSet> parallel_sets;
  const double filter_serial = best_of(reps, [&] {
    serial_sets.clear();
    for (const auto& inv : inventories) serial_sets.push_back(filter_inventory_serial(inv));
  });
  const double filter_parallel = best_of(reps, [&] {
    parallel_sets.clear();
    for (const auto& inv : inventories) parallel_sets.push_back(filter_inventory(inv));
  });
  bool agree = true;
  for (std::size_t i = 0; i < inventories.size(); ++i) agree = agree && same(serial_sets[i], parallel_sets[i]);

  std::size_t serial_findings = 0;
  std::size_t parallel_findings = 0;
  const double assess_serial = best_of(reps, [&] {
    serial_findings = 0;
    for (const auto& es : serial_sets) {
      for (const auto& a : assess_all_serial(assessor, es)) serial_findings += a.findings.size();
    }
  });
  const double assess_parallel = best_of(reps, [&] {
    parallel_findings = 0;
    for (const auto& es : serial_sets) {
      for (const auto& a : assess_all(assessor, es)) parallel_findings += a.findings.size();
    }
  });
  agree = agree && serial_findings == parallel_findings;

  std::printf("%zu inventories, %zu suggestions, %d threads, best of %d\n", inventories.size(), suggestions,
              threads, reps);
  std::printf("%-8s %12s %12s %8s\n", "kernel", "serial_s", "openmp_s", "speedup");
  std::printf("%-8s %12.6f %12.6f %8.2f\n", "filter", filter_serial, filter_parallel, filter_serial / filter_parallel);
  std::printf("%-8s %12.6f %12.6f %8.2f\n", "assess", assess_serial, assess_parallel, assess_serial / assess_parallel);
  std::printf("results %s\n", agree ? "identical" : "DIFFER");
  return agree ? 0 : 1;
}
