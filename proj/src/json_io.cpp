#include "codesift/json_io.hpp"

#include "codesift/errors.hpp"

namespace codesift {

namespace {

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

void to_json(Json& j, const Prompt& p) {
  j = Json{{"id", p.id},
           {"language", to_string(p.language)},
           {"dataset", p.dataset},
           {"entry_point", opt(p.entry_point)},
           {"text", p.text}};
}

void from_json(const Json& j, Prompt& p) {
  p.id = j.at("id").get<std::string>();
  p.language = parse_language(j.at("language").get<std::string>());
  p.text = j.at("text").get<std::string>();
  p.dataset = j.value("dataset", std::string());
  p.entry_point = get_opt<std::string>(j, "entry_point");
}

void to_json(Json& j, const CodeSuggestion& s) {
  j = Json{{"prompt_id", s.prompt_id},
           {"position", s.position},
           {"language", to_string(s.language)},
           {"text", s.text}};
}

void from_json(const Json& j, CodeSuggestion& s) {
  s.prompt_id = j.value("prompt_id", std::string());
  s.position = j.at("position").get<int>();
  s.language = parse_language(j.at("language").get<std::string>());
  s.text = j.at("text").get<std::string>();
}

void to_json(Json& j, const Finding& f) {
  j = Json{{"rule_id", f.rule_id},
           {"message", f.message},
           {"line_start", opt(f.line_start)},
           {"line_end", opt(f.line_end)},
           {"severity", to_string(f.severity)},
           {"source", f.source}};
}

void from_json(const Json& j, Finding& f) {
  f.rule_id = j.at("rule_id").get<std::string>();
  f.message = j.value("message", std::string());
  f.line_start = get_opt<int>(j, "line_start");
  f.line_end = get_opt<int>(j, "line_end");
  f.severity = parse_severity(j.value("severity", std::string("warning")));
  f.source = j.value("source", std::string());
  f.validate();
}

void to_json(Json& j, const RepairOrigin& r) {
  j = Json{{"original_code", r.original_code},
           {"findings", r.findings},
           {"repair_prompt", r.repair_prompt}};
}

void from_json(const Json& j, RepairOrigin& r) {
  r.original_code = j.at("original_code").get<std::string>();
  r.findings = j.at("findings").get<std::vector<Finding>>();
  r.repair_prompt = j.value("repair_prompt", std::string());
}

void to_json(Json& j, const SuggestionInventory& inv) {
  j = Json{{"prompt", inv.prompt}, {"suggestions", inv.suggestions}};
  if (inv.repair) j["repair"] = *inv.repair;
}

void from_json(const Json& j, SuggestionInventory& inv) {
  inv.prompt = j.at("prompt").get<Prompt>();
  if (j.contains("suggestions")) {
    const auto& list = j["suggestions"];
    inv.suggestions.clear();
    int pos = 1;
    for (const auto& s : list) {
      if (s.is_string()) {
        inv.suggestions.push_back({inv.prompt.id, pos, s.get<std::string>(), inv.prompt.language});
      } else {
        auto cs = s.get<CodeSuggestion>();
        if (cs.prompt_id.empty()) cs.prompt_id = inv.prompt.id;
        inv.suggestions.push_back(std::move(cs));
      }
      ++pos;
    }
  }
  if (j.contains("repair") && !j["repair"].is_null()) inv.repair = j["repair"].get<RepairOrigin>();
  inv.validate();
}

void to_json(Json& j, const DroppedSuggestion& d) {
  j = Json{{"position", d.position}, {"reason", d.reason}};
}

void from_json(const Json& j, DroppedSuggestion& d) {
  d.position = j.at("position").get<int>();
  d.reason = j.at("reason").get<std::string>();
}

void to_json(Json& j, const EligibleSet& e) {
  j = Json{{"prompt", e.prompt}, {"n", e.n}, {"x", e.x()}, {"cleaned", e.cleaned},
           {"dropped", e.dropped}};
}

void from_json(const Json& j, EligibleSet& e) {
  e.prompt = j.at("prompt").get<Prompt>();
  e.cleaned = j.at("cleaned").get<std::vector<CodeSuggestion>>();
  e.dropped = j.value("dropped", std::vector<DroppedSuggestion>());
  e.n = j.value("n", static_cast<int>(e.cleaned.size() + e.dropped.size()));
}

void to_json(Json& j, const QualityAssessment& a) {
  Json factors = Json::array();
  for (const auto& [id, v] : a.factor_values) factors.push_back(Json{{"factor", id}, {"value", v}});
  j = Json{{"suggestion_position", a.suggestion_position},
           {"syntax_ok", a.syntax_ok},
           {"score", a.score},
           {"factor_values", factors},
           {"findings", a.findings}};
}

void from_json(const Json& j, QualityAssessment& a) {
  a.suggestion_position = j.at("suggestion_position").get<int>();
  a.syntax_ok = j.value("syntax_ok", true);
  a.score = j.at("score").get<double>();
  a.factor_values.clear();
  for (const auto& f : j.value("factor_values", Json::array())) {
    a.factor_values.emplace_back(f.at("factor").get<std::string>(), f.at("value").get<double>());
  }
  a.findings = j.value("findings", std::vector<Finding>());
}

void to_json(Json& j, const RankedEntry& e) {
  j = Json{{"suggestion", e.suggestion}, {"assessment", e.assessment}};
}

void from_json(const Json& j, RankedEntry& e) {
  e.suggestion = j.at("suggestion").get<CodeSuggestion>();
  e.assessment = j.at("assessment").get<QualityAssessment>();
}

void to_json(Json& j, const RankedInventory& r) {
  j = Json{{"prompt", r.prompt}, {"order", r.positions()}, {"entries", r.entries}};
}

void from_json(const Json& j, RankedInventory& r) {
  r.prompt = j.at("prompt").get<Prompt>();
  r.entries = j.at("entries").get<std::vector<RankedEntry>>();
}

void to_json(Json& j, const RepairPrompt& p) {
  j = Json{{"structure", to_string(p.structure)},
           {"origin_prompt_id", p.origin_prompt_id},
           {"target_position", p.target_position},
           {"findings_used", p.findings_used},
           {"text", p.text}};
}

std::string dump(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedRecord(what + ": " + e.what());
  }
}

}  // namespace codesift
