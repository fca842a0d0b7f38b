#include "codesift/report.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <fstream>
#include <map>
#include <optional>

#include "codesift/errors.hpp"

namespace codesift {

namespace {

const std::vector<std::pair<std::string, std::string>> kLanguages = {{"java", "Java"},
                                                                     {"python", "Python"}};

// Per (model, language) totals merged across reports.
struct Cell {
  long suggestions = 0;
  long before = 0;
  long after = 0;
  long ndcg_prompts = 0;
  long model_rel1 = 0;
  long framework_rel1 = 0;
  double model_ndcg_sum = 0.0;
  double framework_ndcg_sum = 0.0;
  long timed_prompts = 0;
  double filtering = 0.0;
  double ranking = 0.0;
  double repairing = 0.0;
  double total = 0.0;
  bool has_timings = false;
};

struct Merged {
  std::vector<std::string> models;  // first-seen order
  std::map<std::pair<std::string, std::string>, Cell> cells;

  const Cell* find(const std::string& model, const std::string& lang) const {
    auto it = cells.find({model, lang});
    return it == cells.end() ? nullptr : &it->second;
  }
};

Merged merge(const std::vector<Json>& reports) {
  Merged m;
  for (const auto& r : reports) {
    std::string model = r.at("config").at("model").get<std::string>();
    if (model.empty()) model = "model";
    if (std::find(m.models.begin(), m.models.end(), model) == m.models.end()) {
      m.models.push_back(model);
    }
    const auto& langs = r.at("summary").at("languages");
    for (const auto& [lang, s] : langs.items()) {
      Cell& c = m.cells[{model, lang}];
      const auto& comp = s.at("compilability");
      c.suggestions += comp.at("suggestions").get<long>();
      c.before += comp.at("compilable_before").get<long>();
      c.after += comp.at("compilable_after").get<long>();
      const auto& nd = s.at("ndcg");
      const long np = nd.at("prompts").get<long>();
      c.ndcg_prompts += np;
      c.model_rel1 += nd.at("model_rel1_eq_3").get<long>();
      c.framework_rel1 += nd.at("framework_rel1_eq_3").get<long>();
      if (np > 0) {
        c.model_ndcg_sum += nd.at("model_mean").get<double>() * static_cast<double>(np);
        c.framework_ndcg_sum += nd.at("framework_mean").get<double>() * static_cast<double>(np);
      }
      if (s.contains("mean_timings")) {
        const long prompts = comp.at("prompts").get<long>();
        const auto& t = s["mean_timings"];
        c.has_timings = true;
        c.timed_prompts += prompts;
        c.filtering += t.at("filtering_s").get<double>() * static_cast<double>(prompts);
        c.ranking += t.at("ranking_s").get<double>() * static_cast<double>(prompts);
        c.repairing += t.at("repair_prompt_s").get<double>() * static_cast<double>(prompts);
        c.total += t.at("total_s").get<double>() * static_cast<double>(prompts);
      }
    }
  }
  return m;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits, const char* suffix = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f%s", digits, v, suffix);
  return buf;
}

using CellFn = std::function<std::optional<std::string>(const Cell&)>;

std::string table(const Merged& m, const std::vector<std::pair<std::string, CellFn>>& rows) {
  std::string out = "language,metric";
  for (const auto& model : m.models) out += "," + csv_field(model);
  out += "\n";
  for (const auto& [lang, label] : kLanguages) {
    for (const auto& [metric, fn] : rows) {
      out += label + "," + csv_field(metric);
      for (const auto& model : m.models) {
        const Cell* c = m.find(model, lang);
        std::optional<std::string> v;
        if (c) v = fn(*c);
        out += "," + v.value_or("-");
      }
      out += "\n";
    }
  }
  return out;
}

std::optional<double> pct(long part, long whole) {
  if (whole <= 0) return std::nullopt;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::string compilability_table_csv(const std::vector<Json>& reports) {
  const Merged m = merge(reports);
  return table(m, {{"Before",
                    [](const Cell& c) -> std::optional<std::string> {
                      auto v = pct(c.before, c.suggestions);
                      if (!v) return std::nullopt;
                      return fixed(*v, 2, "%");
                    }},
                   {"After",
                    [](const Cell& c) -> std::optional<std::string> {
                      auto v = pct(c.after, c.suggestions);
                      if (!v) return std::nullopt;
                      return fixed(*v, 2, "%");
                    }},
                   {"% Increase", [](const Cell& c) -> std::optional<std::string> {
                      auto b = pct(c.before, c.suggestions);
                      auto a = pct(c.after, c.suggestions);
                      if (!a || !b) return std::nullopt;
                      return fixed(*a - *b, 2, "%");
                    }}});
}

std::string ndcg_table_csv(const std::vector<Json>& reports) {
  const Merged m = merge(reports);
  auto count = [](long Cell::*field) {
    return [field](const Cell& c) -> std::optional<std::string> {
      if (c.ndcg_prompts == 0) return std::nullopt;
      return std::to_string(c.*field);
    };
  };
  auto mean = [](double Cell::*field) {
    return [field](const Cell& c) -> std::optional<std::string> {
      if (c.ndcg_prompts == 0) return std::nullopt;
      return fixed(c.*field / static_cast<double>(c.ndcg_prompts), 4);
    };
  };
  return table(m, {{"# Prompts", count(&Cell::ndcg_prompts)},
                   {"Model's # prompts (rel_1=3)", count(&Cell::model_rel1)},
                   {"Reranked # prompts (rel_1=3)", count(&Cell::framework_rel1)},
                   {"Model's NDCG@k", mean(&Cell::model_ndcg_sum)},
                   {"Reranked NDCG@k", mean(&Cell::framework_ndcg_sum)}});
}

std::string timing_table_csv(const std::vector<Json>& reports) {
  const Merged m = merge(reports);
  auto mean = [](double Cell::*field) {
    return [field](const Cell& c) -> std::optional<std::string> {
      if (!c.has_timings || c.timed_prompts == 0) return std::nullopt;
      return fixed(c.*field / static_cast<double>(c.timed_prompts), 6);
    };
  };
  return table(m, {{"Filtering Phase", mean(&Cell::filtering)},
                   {"Ranking Phase", mean(&Cell::ranking)},
                   {"Repairing Phase", mean(&Cell::repairing)},
                   {"Total", mean(&Cell::total)}});
}

void write_tables(const std::vector<Json>& reports, const std::string& prefix) {
  const std::pair<const char*, std::string> files[] = {
      {"table1.csv", compilability_table_csv(reports)},
      {"table2.csv", ndcg_table_csv(reports)},
      {"table3.csv", timing_table_csv(reports)}};
  for (const auto& [name, body] : files) {
    const std::string path = prefix + name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw IoError("cannot write " + path);
  }
}

}  // namespace codesift
