// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "codesift/analyzer.hpp"
#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/metrics.hpp"
#include "codesift/pipeline.hpp"
#include "codesift/rank.hpp"
#include "codesift/repair.hpp"
#include "codesift/report.hpp"
#include "codesift/syntax.hpp"
#include "codesift/text.hpp"
#include "support.hpp"

using namespace codesift;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome idcg_constant() {
  Outcome o;
  const auto t0 = Clock::now();
  const double v = idcg(10);
  const double dt = seconds_since(t0);
  o.require(std::fabs(v - 13.631) <= 0.001, fmt("IDCG@10 = %.6f", v));
  o.require(dt < 0.001, fmt("took %.6f s", dt));
  if (o.ok) o.detail = fmt("IDCG@10 = %.6f", v) + fmt(", %.2e s", dt);
  return o;
}

Outcome ndcg_oracle() {
  Outcome o;
  std::mt19937 rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> labels(1 + rng() % 10);
    for (auto& l : labels) l = static_cast<int>(rng() % 4);
    const double v = ndcg_at_k(RelevanceVector{labels});
    worst = std::max(worst, std::fabs(v - testsupport::ndcg_oracle(labels)));
    o.require(v >= 0.0 && v <= 1.0, fmt("NDCG %.6f out of bounds", v));
  }
  const double dt = seconds_since(t0);
  o.require(worst <= 1e-9, fmt("max deviation %.3e", worst));
  o.require(dt < 1.0, fmt("took %.3f s", dt));
  if (o.ok) o.detail = "1000 vectors, max deviation " + fmt("%.1e", worst) + fmt(", %.3f s", dt);
  return o;
}

Outcome quality_properties() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t m = 1 + rng() % 8;
    std::vector<std::pair<std::string, double>> raw;
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      raw.emplace_back("f" + std::to_string(j), u(rng) + 1e-6);
      sum += raw.back().second;
    }
    for (auto& r : raw) r.second /= sum;
    const auto scheme = validate_scheme(raw);
    FactorValues values;
    for (std::size_t j = 0; j < m; ++j) values.emplace_back(raw[j].first, u(rng));
    const double q = quality_score(values, scheme);
    o.require(q >= 0.0 && q <= 1.0, fmt("score %.6f out of range", q));
    const std::size_t j = rng() % m;
    auto up = values;
    up[j].second += (1.0 - up[j].second) * u(rng);
    o.require(quality_score(up, scheme) >= q - 1e-15, "score decreased when a factor increased");

    auto off = raw;
    off[rng() % m].second += 1e-6 + u(rng);
    bool rejected = false;
    try {
      validate_scheme(off);
    } catch (const WeightSumError&) {
      rejected = true;
    }
    o.require(rejected, "weights not summing to 1 were accepted");
  }

  const Assessor assessor;
  int py = 0;
  int java = 0;
  for (const auto& e : testsupport::corpus()) {
    (e.language == Language::python ? py : java)++;
    const auto p = e.make_prompt();
    const auto r = clean({p.id, 1, e.raw, e.language}, p);
    const CodeSuggestion s = r.drop_reason ? CodeSuggestion{p.id, 1, e.raw, e.language} : r.suggestion;
    const auto qa = assessor.assess(s, p);
    const bool expect = check_syntax(s.text, s.language).ok && qa.findings.empty();
    o.require((qa.score == 1.0) == expect, "binary scheme disagrees on " + e.id);
    if (e.achievable) {
      std::set<std::string> found;
      for (const auto& f : qa.findings) found.insert(f.rule_id);
      o.require(found == std::set<std::string>(e.defects.begin(), e.defects.end()),
                "findings differ from the recorded defects on " + e.id);
    }
  }
  o.require(py == 50 && java == 50, "corpus is not 50 python + 50 java");
  const double dt = seconds_since(t0);
  o.require(dt < 5.0, fmt("took %.3f s", dt));
  if (o.ok) o.detail = "5000 random schemes, 100 corpus snippets" + fmt(", %.3f s", dt);
  return o;
}

void idempotent(Outcome& o, const std::string& id, const char* h, const std::function<std::string(const std::string&)>& f,
                const std::string& input) {
  std::string once;
  try {
    once = f(input);
  } catch (const TargetNotFoundError&) {
    return;
  }
  o.require(f(once) == once, std::string(h) + " is not idempotent on " + id);
}

Outcome heuristic_corpus() {
  Outcome o;
  const auto t0 = Clock::now();
  int achievable = 0;
  int passed = 0;
  for (const auto& e : testsupport::corpus()) {
    const auto p = e.make_prompt();
    const auto es = filter_inventory(make_inventory(p, {e.raw}));
    passed += static_cast<int>(es.x());
    achievable += e.achievable;

    const auto once = clean({p.id, 1, e.raw, e.language}, p);
    if (!once.drop_reason) {
      const auto twice = clean(once.suggestion, p);
      o.require(!twice.drop_reason && twice.suggestion.text == once.suggestion.text,
                "clean is not idempotent on " + e.id);
    }
    const std::string t1 = h1_strip_fences(e.raw);
    idempotent(o, e.id, "H1", h1_strip_fences, e.raw);
    const std::string t2 = h2_ensure_prompt(t1, p);
    idempotent(o, e.id, "H2", [&](const std::string& s) { return h2_ensure_prompt(s, p); }, t1);
    if (e.language == Language::python) {
      const std::string t3 = h3_strip_sentinels(t2);
      idempotent(o, e.id, "H3", h3_strip_sentinels, t2);
      idempotent(o, e.id, "H4", [&](const std::string& s) { return h4_truncate_after_target(s, p); }, t3);
    } else {
      idempotent(o, e.id, "H5", [&](const std::string& s) { return h5_drop_extra_classes(s, p); }, t2);
      idempotent(o, e.id, "H6", [](const std::string& s) { return h6_brace_repair(s); }, t2);
    }
  }
  o.require(passed >= achievable,
            "post-filter passes " + std::to_string(passed) + " < achievable " + std::to_string(achievable));

  const std::string code = testsupport::read_file(testsupport::fixture_path("yaml_two_functions.py"));
  const Prompt yp{"yaml", Language::python,
                  testsupport::read_file(testsupport::fixture_path("yaml_two_functions.prompt")), "fixtures",
                  std::nullopt};
  const auto lines = text::split_lines(code);
  const auto cleaned = clean({"yaml", 1, code, Language::python}, yp);
  o.require(!cleaned.drop_reason && cleaned.suggestion.text == text::join_lines(lines, 0, 8),
            "two-function fixture is not cut to lines 1-8");
  const double dt = seconds_since(t0);
  o.require(dt < 5.0, fmt("took %.3f s", dt));
  if (o.ok) {
    o.detail = std::to_string(passed) + "/100 pass (achievable " + std::to_string(achievable) +
               "), idempotent, fixture -> lines 1-8" + fmt(", %.3f s", dt);
  }
  return o;
}

Outcome ranking_laws() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(303);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    EligibleSet es;
    es.prompt = Prompt{"p", Language::python, "x", "d", std::nullopt};
    std::vector<QualityAssessment> as;
    for (int pos = 1; pos <= n; ++pos) {
      es.cleaned.push_back({"p", pos, "", Language::python});
      QualityAssessment a;
      a.suggestion_position = pos;
      a.score = static_cast<double>(rng() % 5) / 4.0;
      as.push_back(a);
    }
    std::shuffle(as.begin(), as.end(), rng);
    const auto r = rank(es, as);
    auto positions = r.positions();
    std::sort(positions.begin(), positions.end());
    std::vector<int> expected(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) expected[static_cast<std::size_t>(i)] = i + 1;
    o.require(positions == expected, "output is not a permutation");
    double best = 0.0;
    for (const auto& a : as) best = std::max(best, a.score);
    o.require(top1(r).assessment.score == best, "top-1 is not maximal");
    for (std::size_t i = 1; i < r.entries.size(); ++i) {
      const auto& a = r.entries[i - 1];
      const auto& b = r.entries[i];
      o.require(a.assessment.score > b.assessment.score ||
                    (a.assessment.score == b.assessment.score && a.suggestion.position < b.suggestion.position),
                "tie order not stable");
    }
  }
  EligibleSet es;
  es.prompt = Prompt{"p", Language::python, "x", "d", std::nullopt};
  std::vector<QualityAssessment> as;
  for (int pos = 1; pos <= 10; ++pos) {
    es.cleaned.push_back({"p", pos, "", Language::python});
    QualityAssessment a;
    a.suggestion_position = pos;
    a.score = pos == 3 || pos == 8 ? 1.0 : 0.0;
    as.push_back(a);
  }
  const auto r = rank(es, as);
  o.require(r.position_at(1) == 3 && r.position_at(2) == 8, "c3/c8 tie does not place c3 first");
  const double dt = seconds_since(t0);
  o.require(dt < 2.0, fmt("took %.3f s", dt));
  if (o.ok) o.detail = "10000 score vectors, c3 before c8" + fmt(", %.3f s", dt);
  return o;
}

Outcome repair_goldens() {
  Outcome o;
  const auto t0 = Clock::now();
  using testsupport::fixture_path;
  using testsupport::read_file;
  const Prompt p{"show_user", Language::python, read_file(fixture_path("sql_show_user.prompt")), "fixtures",
                 std::nullopt};
  const std::string code = read_file(fixture_path("sql_show_user.py"));
  const auto findings = Assessor{}.assess({"show_user", 1, code, Language::python}, p).findings;
  const auto p1 = build_p1(code, findings, Language::python).text;
  const auto p2 = build_p2(code, findings, p, Language::python).text;
  const auto p3 = build_p3(code, findings, Language::python).text;
  o.require(p1 == read_file(fixture_path("golden/repair_p1.txt")), "P1 differs from golden");
  o.require(p2 == read_file(fixture_path("golden/repair_p2.txt")), "P2 differs from golden");
  o.require(p3 == read_file(fixture_path("golden/repair_p3.txt")), "P3 differs from golden");
  o.require(p1.find("# Fix: At line 7, Possible SQL Injection\n") != std::string::npos, "missing line-7 fix");
  const auto lines = text::split_lines(code);
  o.require(text::starts_with(p3, text::join_lines(lines, 0, 6) + "\n# Fix:"), "P3 does not keep lines 1-6");
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, fmt("took %.3f s", dt));
  if (o.ok) o.detail = "P1/P2/P3 byte-exact" + fmt(", %.3f s", dt);
  return o;
}

Outcome single_repair() {
  Outcome o;
  const std::string dir = testsupport::make_temp_dir("accept-repair");
  const auto set = testsupport::build_replay_set(dir, 50, "accept-model");
  const auto records = load_dataset(set.dataset_path, DatasetFormat::jsonl_generic);
  BackendConfig bc;
  bc.fixture_path = set.fixture_path;
  auto backend = make_backend(bc);
  PipelineConfig cfg;
  cfg.request.model_id = set.model;
  cfg.policy.tau = 1.0;
  const auto report = run_pipeline(records, cfg, *backend);
  o.require(report.rows.size() == 50, "expected 50 rows");
  o.require(report.failures == 0, std::to_string(report.failures) + " prompts failed");
  int repaired = 0;
  for (const auto& row : report.rows) {
    const long prompts = std::count(row.trace.begin(), row.trace.end(), "repair_prompt");
    o.require(prompts <= 1 && row.repair.rounds <= 1, row.task_id + " has more than one repair round");
    o.require(prompts == row.repair.rounds, row.task_id + " trace disagrees with rounds");
    if (!row.top1) {
      o.require(!row.repair.triggered, row.task_id + " repaired without a top-1");
      continue;
    }
    o.require(row.repair.triggered == (row.top1->score < 1.0), row.task_id + " trigger does not match Q(c1) < 1");
    o.require(!row.repair.triggered || row.repair.rounds == 1 || row.repair.skipped,
              row.task_id + " triggered without a round");
    repaired += row.repair.rounds;
  }
  if (o.ok) o.detail = "50 prompts, " + std::to_string(repaired) + " single repair rounds";
  return o;
}

Outcome replay_determinism() {
  Outcome o;
  const std::string dir = testsupport::make_temp_dir("accept-determinism");
  const auto set = testsupport::build_replay_set(dir, 20, "accept-model");
  auto run = [&](int jobs, int i) {
    const std::string out = dir + "/report-" + std::to_string(jobs) + "-" + std::to_string(i) + ".json";
    const std::string cmd = std::string("'") + CODESIFT_CLI + "' pipeline --dataset '" + set.dataset_path +
                            "' --format jsonl_generic --backend replay --model accept-model --fixtures '" +
                            set.fixture_path + "' --jobs " + std::to_string(jobs) + " --out '" + out + "'";
    const auto r = run_shell(cmd, 120000);
    o.require(r.exit_code == 0, "pipeline exited with " + std::to_string(r.exit_code) + ": " + r.err);
    return r.exit_code == 0 ? testsupport::read_file(out) : std::string();
  };
  const std::string first = run(1, 0);
  o.require(!first.empty(), "empty report");
  for (int i = 1; i < 3; ++i) o.require(run(1, i) == first, "run " + std::to_string(i + 1) + " differs");
  o.require(run(8, 0) == first, "--jobs 8 differs from --jobs 1");
  if (o.ok) o.detail = "3 runs + jobs 8 byte-identical (" + std::to_string(first.size()) + " bytes)";
  return o;
}

Outcome overhead() {
  Outcome o;
  const auto& c = testsupport::corpus();
  const Assessor assessor;
  RepairPolicy policy;
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); i += 10) {
    std::vector<std::string> raws;
    for (std::size_t j = i; j < i + 10; ++j) raws.push_back(c[j].raw);
    const auto inv = make_inventory(c[i].make_prompt(), raws);
    const auto t0 = Clock::now();
    const auto es = filter_inventory(inv);
    const auto ranked = rank(es, assess_all(assessor, es));
    if (!ranked.entries.empty()) {
      try {
        (void)prepare_repair(ranked, policy);
      } catch (const NoLinedFindingError&) {
      }
    }
    worst = std::max(worst, seconds_since(t0));
  }
  o.require(worst <= 2.0, fmt("slowest inventory took %.3f s", worst));
  if (o.ok) o.detail = fmt("slowest 10-suggestion inventory %.4f s (gate 2.0 s)", worst);
  return o;
}

Outcome statistics() {
  Outcome o;
  std::mt19937 rng(404);
  double kappa_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 80;
    std::vector<int> a(n);
    std::vector<int> b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = static_cast<int>(rng() % 4);
      b[j] = rng() % 3 == 0 ? static_cast<int>(rng() % 4) : a[j];
    }
    kappa_dev = std::max(kappa_dev, std::fabs(cohen_kappa(a, b) - testsupport::kappa_oracle(a, b)));
  }
  o.require(kappa_dev <= 1e-9, fmt("kappa deviation %.3e", kappa_dev));
  std::normal_distribution<double> nd(0.0, 1.0);
  double p_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 50;
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = nd(rng) + 0.3;
      y[j] = nd(rng);
    }
    const auto r = paired_t_test(x, y);
    p_dev = std::max(p_dev, std::fabs(r.p - testsupport::t_two_sided_p_oracle(r.t, static_cast<double>(n - 1))));
  }
  o.require(p_dev <= 1e-4, fmt("t-test p deviation %.3e", p_dev));
  const double t = paired_t_test({1, 2, 3}, {0, 0, 0}).t;
  o.require(std::fabs(t - 3.4641) <= 1e-4, fmt("d=[1,2,3] gives t = %.6f", t));
  if (o.ok) {
    o.detail = fmt("kappa dev %.1e", kappa_dev) + fmt(", p dev %.1e", p_dev) + fmt(", t = %.4f", t);
  }
  return o;
}

Outcome table_layout() {
  Outcome o;
  using testsupport::fixture_path;
  using testsupport::read_file;
  const std::vector<Json> reports{parse_json(read_file(fixture_path("report_fixture.json")), "fixture")};
  o.require(compilability_table_csv(reports) == read_file(fixture_path("golden/table1.csv")), "table 1 layout differs");
  o.require(ndcg_table_csv(reports) == read_file(fixture_path("golden/table2.csv")), "table 2 layout differs");
  o.require(timing_table_csv(reports) == read_file(fixture_path("golden/table3.csv")), "table 3 layout differs");
  if (o.ok) o.detail = "tables 1-3 match the layout golden; recorded model outputs are not reproduced";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"IDCG@10 normalization constant", idcg_constant},
      {"NDCG oracle equivalence", ndcg_oracle},
      {"quality score property suite", quality_properties},
      {"heuristic corpus", heuristic_corpus},
      {"ranking laws", ranking_laws},
      {"repair prompt goldens", repair_goldens},
      {"single repair round", single_repair},
      {"end-to-end replay determinism", replay_determinism},
      {"overhead bound", overhead},
      {"statistics oracles", statistics},
      {"report table layout", table_layout},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failed;
    std::printf("criterion %2zu: %s  %s: %s\n", i + 1, o.ok ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
