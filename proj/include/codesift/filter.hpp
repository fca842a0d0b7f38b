#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codesift/model.hpp"

namespace codesift {

// Cleaning heuristics. Each is a pure string transform; clean() composes
// them in the fixed order H7, H1, H2, H3, H4, H5, H6.

// H1: content of the first ``` fenced block, or the input when unfenced.
std::string h1_strip_fences(std::string_view text);

// H2: prepends whatever prefix of the prompt is missing. The longest prompt
// suffix that the text already starts with is not repeated.
std::string h2_ensure_prompt(std::string_view text, const Prompt& prompt);

// H3 (python): cut at the first "\n```\n\n##" or "\n</code>".
std::string h3_strip_sentinels(std::string_view text);

// H4 (python): keep everything up to the end of the entry-point definition.
// Throws TargetNotFoundError.
std::string h4_truncate_after_target(std::string_view text, const Prompt& prompt);

// H5 (java): drop top-level classes other than the one the prompt declares.
// Throws TargetNotFoundError.
std::string h5_drop_extra_classes(std::string_view text, const Prompt& prompt);

struct BraceRepairStats {
  int rounds = 0;
  int parse_attempts = 0;
};

// H6 (java): try as-is, then "}" and "}}" appended; otherwise delete the last
// non-blank line and retry. Returns "" once fewer than keep_lines + 1 lines
// remain without a parse-passing candidate.
std::string h6_brace_repair(std::string_view text, BraceRepairStats* stats = nullptr,
                            int keep_lines = 0);

// H7: replace the line range covered by the findings with the fragment.
// Findings without lines cover the whole snippet. Throws SpanOutOfRangeError.
std::string h7_splice_repaired(std::string_view original,
                               const std::vector<Finding>& findings,
                               std::string_view repaired_fragment);

// Name of the target function/method: prompt.entry_point, else the last one
// declared in the prompt text.
std::optional<std::string> infer_entry_point(const Prompt& prompt);

struct RepairContext {
  std::vector<Finding> findings;
  std::string fragment;
};

struct CleanResult {
  CodeSuggestion suggestion;
  std::optional<std::string> drop_reason;  // set when the heuristics gave up
};

// In repair mode `sugg.text` is the flawed original and ctx carries the
// repaired fragment.
CleanResult clean(const CodeSuggestion& sugg, const Prompt& prompt,
                  const RepairContext* ctx = nullptr);

// Text a repair-round completion contributes to H7: the echoed repair prompt
// is removed and fences are stripped. A completion that redefines the entry
// point replaces the whole original (the returned context spans every line).
RepairContext repair_context_for(const RepairOrigin& origin, std::string_view completion,
                                 const Prompt& prompt);

struct DroppedSuggestion {
  int position = 0;
  std::string reason;

  bool operator==(const DroppedSuggestion&) const = default;
};

struct EligibleSet {
  Prompt prompt;
  std::vector<CodeSuggestion> cleaned;  // survivors, original order
  std::vector<DroppedSuggestion> dropped;
  int n = 0;  // size of the source inventory

  std::size_t x() const { return cleaned.size(); }
};

// Drop reasons.
inline constexpr std::string_view kDropEmpty = "empty";
inline constexpr std::string_view kDropEmptyBody = "empty_body";
inline constexpr std::string_view kDropSyntax = "syntax_error";
inline constexpr std::string_view kDropTargetNotFound = "target_not_found";
inline constexpr std::string_view kDropSpan = "span_out_of_range";

// Cleans every suggestion (in parallel) and keeps the parse-passing ones.
EligibleSet filter_inventory(const SuggestionInventory& inv);

// Single-threaded reference implementation of filter_inventory.
EligibleSet filter_inventory_serial(const SuggestionInventory& inv);

}  // namespace codesift
