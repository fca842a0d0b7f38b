#pragma once

#include <json.hpp>

#include "codesift/filter.hpp"
#include "codesift/model.hpp"
#include "codesift/quality.hpp"
#include "codesift/rank.hpp"
#include "codesift/repair.hpp"

namespace codesift {

using Json = nlohmann::ordered_json;

// Key order is fixed so that dumps are byte-stable.
void to_json(Json& j, const Prompt& p);
void from_json(const Json& j, Prompt& p);
void to_json(Json& j, const CodeSuggestion& s);
void from_json(const Json& j, CodeSuggestion& s);
void to_json(Json& j, const Finding& f);
void from_json(const Json& j, Finding& f);
void to_json(Json& j, const RepairOrigin& r);
void from_json(const Json& j, RepairOrigin& r);
void to_json(Json& j, const SuggestionInventory& inv);
void from_json(const Json& j, SuggestionInventory& inv);
void to_json(Json& j, const DroppedSuggestion& d);
void from_json(const Json& j, DroppedSuggestion& d);
void to_json(Json& j, const EligibleSet& e);
void from_json(const Json& j, EligibleSet& e);
void to_json(Json& j, const QualityAssessment& a);
void from_json(const Json& j, QualityAssessment& a);
void to_json(Json& j, const RankedEntry& e);
void from_json(const Json& j, RankedEntry& e);
void to_json(Json& j, const RankedInventory& r);
void from_json(const Json& j, RankedInventory& r);
void to_json(Json& j, const RepairPrompt& p);

// Output with a trailing newline; invalid UTF-8 is replaced.
std::string dump(const Json& j);

// Throws MalformedRecord when the text is not valid JSON.
Json parse_json(std::string_view text, const std::string& what);

}  // namespace codesift
