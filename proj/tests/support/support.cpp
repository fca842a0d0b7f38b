#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "codesift/assess.hpp"
#include "codesift/errors.hpp"
#include "codesift/filter.hpp"
#include "codesift/generation.hpp"
#include "codesift/rank.hpp"
#include "codesift/repair.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace codesift;

std::string fixture_path(const std::string& name) {
  return std::string(CODESIFT_FIXTURE_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string make_temp_dir(const std::string& tag) {
  static int counter = 0;
  fs::path dir = fs::path(CODESIFT_TEST_TMP) /
                 (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

Prompt CorpusEntry::make_prompt() const {
  Prompt p;
  p.id = id;
  p.language = language;
  p.text = prompt;
  p.dataset = "corpus";
  p.entry_point = entry_point;
  return p;
}

std::string CorpusEntry::base() const {
  const auto first = id.find('-');
  return id.substr(0, id.find('-', first + 1));
}

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    for (const auto& r : json::parse(read_file(fixture_path("corpus.json")))) {
      CorpusEntry e;
      e.id = r.at("id");
      e.language = parse_language(r.at("language").get<std::string>());
      e.prompt = r.at("prompt");
      if (!r.at("entry_point").is_null()) e.entry_point = r.at("entry_point").get<std::string>();
      e.raw = r.at("raw");
      e.achievable = r.at("achievable");
      e.defects = r.at("defects").get<std::vector<std::string>>();
      out.push_back(std::move(e));
    }
    return out;
  }();
  return entries;
}

double dcg_oracle(const std::vector<int>& labels) {
  double sum = 0.0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    sum += static_cast<double>(labels[i - 1]) / (std::log(static_cast<double>(i + 1)) / std::log(2.0));
  }
  return sum;
}

double ndcg_oracle(const std::vector<int>& labels) {
  return dcg_oracle(labels) / dcg_oracle(std::vector<int>(labels.size(), 3));
}

double kappa_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> cats = a;
  cats.insert(cats.end(), b.begin(), b.end());
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  const std::size_t k = cats.size();
  auto idx = [&](int v) {
    return static_cast<std::size_t>(std::lower_bound(cats.begin(), cats.end(), v) - cats.begin());
  };
  std::vector<std::vector<double>> table(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) table[idx(a[i])][idx(b[i])] += 1.0;
  const double n = static_cast<double>(a.size());
  double diag = 0.0;
  double expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    diag += table[i][i];
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row += table[i][j];
      col += table[j][i];
    }
    expected += row * col;
  }
  const double po = diag / n;
  const double pe = expected / (n * n);
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double t_two_sided_p_oracle(double t, double df) {
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

namespace {

struct Fix {
  std::string body;  // replacement for the whole completion after the prompt
  std::string line;  // single-line patch for the first finding
};

const std::map<std::string, Fix>& fixes() {
  static const std::map<std::string, Fix> table = {
      {"py-yaml",
       {"    with open(path) as f:\n        return yaml.safe_load(f)\n",
        "        return yaml.safe_load(f)"}},
      {"py-md5",
       {"    return hashlib.sha256(password.encode()).hexdigest()\n",
        "    return hashlib.sha256(password.encode()).hexdigest()"}},
      {"py-sql",
       {"    cur = conn.cursor()\n"
        "    cur.execute(\"SELECT * FROM users WHERE name = ?\", (name,))\n"
        "    return cur.fetchone()\n",
        "    cur.execute(\"SELECT * FROM users WHERE name = ?\", (name,))"}},
      {"java-sql",
       {"        PreparedStatement st = conn.prepareStatement(\"SELECT * FROM users WHERE name = ?\");\n"
        "        st.setString(1, name);\n        return st.executeQuery();\n    }\n}\n",
        "        return conn.prepareStatement(\"SELECT * FROM users WHERE name = ?\").executeQuery();"}},
      {"java-md5",
       {"        MessageDigest md = MessageDigest.getInstance(\"SHA-256\");\n"
        "        return md.digest(data);\n    }\n}\n",
        "        MessageDigest md = MessageDigest.getInstance(\"SHA-256\");"}},
      {"java-catch",
       {"        try {\n            return Integer.parseInt(s);\n"
        "        } catch (NumberFormatException e) {\n            return -1;\n        }\n    }\n}\n",
        "        } catch (NumberFormatException e) { return -1; }"}},
  };
  return table;
}

std::string tag_prompt(const CorpusEntry& e, int i) {
  const std::string marker = e.language == Language::python ? "# task " : "// task ";
  return marker + std::to_string(i) + "\n" + e.prompt;
}

}  // namespace

ReplaySet build_replay_set(const std::string& dir, int count, const std::string& model,
                           RepairStructure structure) {
  std::map<std::string, std::vector<const CorpusEntry*>> by_base;
  std::vector<std::string> py_bases;
  std::vector<std::string> java_bases;
  for (const auto& e : corpus()) {
    if (!by_base.count(e.base())) {
      (e.language == Language::python ? py_bases : java_bases).push_back(e.base());
    }
    by_base[e.base()].push_back(&e);
  }
  // alternate languages so small sets cover both
  std::vector<std::string> bases;
  for (std::size_t i = 0; i < std::max(py_bases.size(), java_bases.size()); ++i) {
    if (i < py_bases.size()) bases.push_back(py_bases[i]);
    if (i < java_bases.size()) bases.push_back(java_bases[i]);
  }

  ReplaySet set;
  set.dataset_path = dir + "/dataset.jsonl";
  set.fixture_path = dir + "/fixtures.jsonl";
  set.model = model;
  fs::remove(set.fixture_path);
  std::ofstream dataset(set.dataset_path);

  std::mt19937 rng(20240601);
  RepairPolicy policy;
  policy.structure = structure;
  const Assessor assessor;
  for (int i = 0; i < count; ++i) {
    const std::string& base = bases[static_cast<std::size_t>(i) % bases.size()];
    const auto& variants = by_base[base];
    const CorpusEntry& first = *variants.front();

    Prompt prompt = first.make_prompt();
    prompt.id = "task-" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    prompt.dataset = "synthetic";
    prompt.text = tag_prompt(first, i);
    set.prompt_ids.push_back(prompt.id);
    json rec = {{"task_id", prompt.id},
                {"prompt", prompt.text},
                {"language", std::string(to_string(prompt.language))},
                {"dataset", prompt.dataset}};
    if (prompt.entry_point) rec["entry_point"] = *prompt.entry_point;
    dataset << rec.dump() << "\n";

    std::vector<std::string> completions;
    for (const auto* v : variants) completions.push_back(v->raw);
    std::shuffle(completions.begin(), completions.end(), rng);
    GenerationRequest req;
    req.prompt_text = prompt.text;
    req.model_id = model;
    req.n = static_cast<int>(completions.size());
    record_fixture(req, completions, set.fixture_path);

    const auto ranked = rank(filter_inventory(make_inventory(prompt, completions)),
                             assess_all_serial(assessor, filter_inventory(make_inventory(prompt, completions))));
    if (ranked.entries.empty()) continue;
    std::optional<RepairPrompt> rp;
    try {
      rp = prepare_repair(ranked, policy);
    } catch (const NoLinedFindingError&) {
    }
    if (!rp) continue;
    auto it = fixes().find(base);
    const Fix fix = it != fixes().end() ? it->second : Fix{"", ""};
    std::vector<std::string> repaired = {
        prompt.text + fix.body,
        "```\n" + prompt.text + fix.body + "```\n",
        fix.line,
        rp->text + "\n" + fix.line + "\n",
        "",
        "I could not fix this.\n",
        prompt.text + fix.body,
        fix.line,
        prompt.text,
        fix.body};
    std::shuffle(repaired.begin(), repaired.end(), rng);
    GenerationRequest repair_req = req;
    repair_req.prompt_text = rp->text;
    record_fixture(repair_req, repaired, set.fixture_path);
  }
  return set;
}

}  // namespace testsupport
