#include "codesift/repair.hpp"

#include <algorithm>

#include "codesift/errors.hpp"
#include "codesift/text.hpp"

namespace codesift {

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::string_view strip_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<Finding> ordered(const std::vector<Finding>& findings) {
  std::vector<Finding> out = findings;
  std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    if (a.line_start.has_value() != b.line_start.has_value()) return a.line_start.has_value();
    return a.line_start.value_or(0) < b.line_start.value_or(0);
  });
  return out;
}

void require_findings(const std::vector<Finding>& findings) {
  if (findings.empty()) throw NoFindingsError("a repair prompt needs at least one finding");
}

}  // namespace

bool needs_repair(const QualityAssessment& top, const RepairPolicy& policy) {
  return top.score < policy.tau;
}

std::string_view comment_marker(Language language) {
  return language == Language::python ? "#" : "//";
}

std::string fix_block(const std::vector<Finding>& findings, Language language) {
  const std::string cc(comment_marker(language));
  std::string out;
  for (const auto& f : ordered(findings)) {
    out += cc + " Fix: ";
    if (f.line_start) out += "At line " + std::to_string(*f.line_start) + ", ";
    out += one_line(f.message) + "\n";
  }
  out += cc + " Fixed Code:";
  return out;
}

RepairPrompt build_p1(std::string_view code, const std::vector<Finding>& findings,
                      Language language) {
  require_findings(findings);
  RepairPrompt p;
  p.structure = RepairStructure::P1;
  p.text = std::string(strip_trailing_newlines(code)) + "\n" + fix_block(findings, language);
  p.findings_used = ordered(findings);
  return p;
}

RepairPrompt build_p2(std::string_view code, const std::vector<Finding>& findings,
                      const Prompt& original_prompt, Language language) {
  RepairPrompt p = build_p1(code, findings, language);
  p.structure = RepairStructure::P2;
  p.text += "\n" + original_prompt.text;
  return p;
}

RepairPrompt build_p3(std::string_view code, const std::vector<Finding>& findings,
                      Language language) {
  require_findings(findings);
  std::optional<int> first;
  for (const auto& f : findings) {
    if (f.line_start && (!first || *f.line_start < *first)) first = f.line_start;
  }
  if (!first) throw NoLinedFindingError("no finding carries a line number");
  const auto lines = text::split_lines(code);
  const std::size_t keep = std::min(lines.size(), static_cast<std::size_t>(*first - 1));
  RepairPrompt p;
  p.structure = RepairStructure::P3;
  if (keep > 0) p.text = text::join_lines(lines, 0, keep) + "\n";
  p.text += fix_block(findings, language);
  p.findings_used = ordered(findings);
  return p;
}

RepairPrompt build_repair_prompt(RepairStructure structure, std::string_view code,
                                 const std::vector<Finding>& findings, const Prompt& prompt) {
  switch (structure) {
    case RepairStructure::P1: return build_p1(code, findings, prompt.language);
    case RepairStructure::P2: return build_p2(code, findings, prompt, prompt.language);
    case RepairStructure::P3: return build_p3(code, findings, prompt.language);
  }
  throw InvalidValueError("unknown repair structure");
}

std::optional<RepairPrompt> prepare_repair(const RankedInventory& ranked,
                                           const RepairPolicy& policy) {
  policy.validate();
  const RankedEntry& top = top1(ranked);
  if (!needs_repair(top.assessment, policy)) return std::nullopt;
  RepairPrompt p = build_repair_prompt(policy.structure, top.suggestion.text,
                                       top.assessment.findings, ranked.prompt);
  p.origin_prompt_id = ranked.prompt.id;
  p.target_position = top.suggestion.position;
  return p;
}

std::optional<RepairRound> repair_round(const RankedInventory& ranked, const RepairPolicy& policy,
                                        GenerationBackend& backend,
                                        const GenerationRequest& request) {
  auto prompt = prepare_repair(ranked, policy);
  if (!prompt) return std::nullopt;
  const RankedEntry& top = top1(ranked);
  RepairRound round;
  round.prompt = std::move(*prompt);
  GenerationRequest req = request;
  req.prompt_text = round.prompt.text;
  round.inventory = generate(ranked.prompt, req, backend);
  round.inventory.repair =
      RepairOrigin{top.suggestion.text, top.assessment.findings, round.prompt.text};
  return round;
}

}  // namespace codesift
