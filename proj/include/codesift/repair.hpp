#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codesift/generation.hpp"
#include "codesift/model.hpp"
#include "codesift/quality.hpp"
#include "codesift/rank.hpp"

namespace codesift {

struct RepairPrompt {
  RepairStructure structure = RepairStructure::P1;
  std::string text;
  std::string origin_prompt_id;
  int target_position = 0;
  std::vector<Finding> findings_used;
};

bool needs_repair(const QualityAssessment& top, const RepairPolicy& policy);

// "# " for python, "// " for java, without the space.
std::string_view comment_marker(Language language);

// The Fix/Fixed-Code comment lines, without a trailing newline. Findings are
// ordered by line, lineless ones last.
std::string fix_block(const std::vector<Finding>& findings, Language language);

// Throw NoFindingsError.
RepairPrompt build_p1(std::string_view code, const std::vector<Finding>& findings,
                      Language language);
RepairPrompt build_p2(std::string_view code, const std::vector<Finding>& findings,
                      const Prompt& original_prompt, Language language);
// Throws NoLinedFindingError when no finding carries a line.
RepairPrompt build_p3(std::string_view code, const std::vector<Finding>& findings,
                      Language language);

RepairPrompt build_repair_prompt(RepairStructure structure, std::string_view code,
                                 const std::vector<Finding>& findings, const Prompt& prompt);

// The repair prompt for the top-ranked snippet, or nothing when it already
// meets the threshold. Throws EmptyRankError, NoFindingsError,
// NoLinedFindingError.
std::optional<RepairPrompt> prepare_repair(const RankedInventory& ranked,
                                           const RepairPolicy& policy);

struct RepairRound {
  RepairPrompt prompt;
  SuggestionInventory inventory;  // carries RepairOrigin
};

// Single repair attempt for the top-ranked snippet. `request` supplies n,
// model and token limits; its prompt text is replaced by the repair prompt.
std::optional<RepairRound> repair_round(const RankedInventory& ranked, const RepairPolicy& policy,
                                        GenerationBackend& backend,
                                        const GenerationRequest& request);

}  // namespace codesift
