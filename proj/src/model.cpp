#include "codesift/model.hpp"

#include <cmath>

#include "codesift/errors.hpp"

namespace codesift {

std::string_view to_string(Language lang) {
  return lang == Language::python ? "python" : "java";
}

Language parse_language(std::string_view tag) {
  if (tag == "python") return Language::python;
  if (tag == "java") return Language::java;
  throw InvalidValueError("unknown language tag '" + std::string(tag) + "'");
}

void Prompt::validate() const {
  if (text.empty()) throw InvalidValueError("prompt '" + id + "' has empty text");
}

void SuggestionInventory::validate() const {
  for (std::size_t i = 0; i < suggestions.size(); ++i) {
    if (suggestions[i].position != static_cast<int>(i) + 1) {
      throw InvalidValueError("inventory for '" + prompt.id +
                              "' has non-contiguous positions");
    }
  }
}

SuggestionInventory make_inventory(const Prompt& prompt,
                                   const std::vector<std::string>& texts) {
  SuggestionInventory inv;
  inv.prompt = prompt;
  inv.suggestions.reserve(texts.size());
  int pos = 1;
  for (const auto& t : texts) {
    inv.suggestions.push_back({prompt.id, pos++, t, prompt.language});
  }
  return inv;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "warning";
}

Severity parse_severity(std::string_view tag) {
  if (tag == "info") return Severity::info;
  if (tag == "warning") return Severity::warning;
  if (tag == "error") return Severity::error;
  throw InvalidValueError("unknown severity '" + std::string(tag) + "'");
}

void Finding::validate() const {
  if (line_end && !line_start) {
    throw InvalidValueError("finding '" + rule_id + "' has line_end without line_start");
  }
  if (line_start && *line_start < 1) {
    throw InvalidValueError("finding '" + rule_id + "' has line_start < 1");
  }
  if (line_start && line_end && *line_end < *line_start) {
    throw InvalidValueError("finding '" + rule_id + "' has line_end < line_start");
  }
}

QualityScheme QualityScheme::binary() { return validate_scheme({{"smell_free", 1.0}}); }

QualityScheme validate_scheme(
    const std::vector<std::pair<std::string, double>>& raw) {
  if (raw.empty()) throw EmptySchemeError("quality scheme has no factors");
  double sum = 0.0;
  QualityScheme scheme;
  for (const auto& [id, w] : raw) {
    if (!(w >= 0.0)) {
      throw NegativeWeightError("factor '" + id + "' has negative weight");
    }
    sum += w;
    scheme.factors_.push_back({id, w});
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw WeightSumError("factor weights sum to " + std::to_string(sum) + ", expected 1");
  }
  return scheme;
}

std::string_view to_string(RepairStructure s) {
  switch (s) {
    case RepairStructure::P1: return "p1";
    case RepairStructure::P2: return "p2";
    case RepairStructure::P3: return "p3";
  }
  return "p1";
}

RepairStructure parse_structure(std::string_view tag) {
  if (tag == "p1" || tag == "P1") return RepairStructure::P1;
  if (tag == "p2" || tag == "P2") return RepairStructure::P2;
  if (tag == "p3" || tag == "P3") return RepairStructure::P3;
  throw InvalidValueError("unknown repair structure '" + std::string(tag) + "'");
}

void RepairPolicy::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidValueError("tau must lie in [0, 1]");
}

void RelevanceVector::validate() const {
  if (labels.empty()) throw InvalidValueError("relevance vector needs k >= 1");
  for (int l : labels) {
    if (l < 0 || l > 3) throw InvalidValueError("relevance label outside 0..3");
  }
}

}  // namespace codesift
