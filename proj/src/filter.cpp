#include "codesift/filter.hpp"

#include <algorithm>
#include <exception>
#include <regex>
#include <set>

#include "codesift/errors.hpp"
#include "codesift/source_mask.hpp"
#include "codesift/syntax.hpp"
#include "codesift/text.hpp"

namespace codesift {

namespace {

std::string regex_escape(std::string_view s) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
  return std::regex_replace(std::string(s), special, R"(\$&)");
}

int indent_of(std::string_view line) {
  int n = 0;
  for (char c : line) {
    if (c == ' ') ++n;
    else if (c == '\t') n += 8 - n % 8;
    else break;
  }
  return n;
}

// Indentation-based fallback for H4 when the error-tolerant parse does not
// expose the target as a top-level unit (broken code, or a method nested in a
// class). Returns the 1-based last line of the last `def <entry>`.
std::optional<int> python_def_end_by_indent(std::string_view text, const std::string& entry) {
  const std::string masked = mask_comments(text, Language::python);
  const auto lines = text::split_lines(text);
  const auto mlines = text::split_lines(masked);
  const std::regex header("^([ \\t]*)(async[ \\t]+)?def[ \\t]+" + regex_escape(entry) +
                          "[ \\t]*\\(");
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < mlines.size(); ++i) {
    if (std::regex_search(mlines[i], header)) start = i;
  }
  if (!start) return std::nullopt;
  const int base = indent_of(lines[*start]);
  std::size_t end = *start;
  bool in_body = false;
  for (std::size_t j = *start; j < mlines.size(); ++j) {
    const std::string_view m = mlines[j];
    if (j > *start && !text::is_blank(m)) {
      if (in_body && indent_of(m) <= base) break;
      end = j;
    }
    // The header ends at the first line whose code ends with ':'.
    if (!in_body && !text::trim(m).empty() && text::trim(m).back() == ':') in_body = true;
  }
  return static_cast<int>(end) + 1;
}

std::vector<std::string> declared_java_types(std::string_view prompt_text) {
  const std::string masked = mask_comments(prompt_text, Language::java);
  static const std::regex decl(R"(\b(?:class|interface|enum|record)\s+([A-Za-z_$][\w$]*))");
  std::vector<std::string> names;
  for (std::sregex_iterator it(masked.begin(), masked.end(), decl), end; it != end; ++it) {
    names.push_back((*it)[1].str());
  }
  return names;
}

bool defines_entry(std::string_view code, const std::string& entry, Language lang) {
  const std::string masked = mask_comments(code, lang);
  const std::string name = regex_escape(entry);
  if (lang == Language::python) {
    const std::regex re("(^|\\n)[ \\t]*(async[ \\t]+)?def[ \\t]+" + name + "[ \\t]*\\(");
    return std::regex_search(masked, re);
  }
  const std::regex re("\\b" + name + R"(\s*\([^;{}]*\)\s*(throws[^{;]*)?\{)");
  return std::regex_search(masked, re);
}

// True when nothing beyond the prompt (and closing braces) survived.
bool is_empty_body(std::string_view cleaned, const Prompt& prompt) {
  std::string_view rest;
  if (text::starts_with(cleaned, prompt.text)) {
    rest = cleaned.substr(prompt.text.size());
  } else if (text::starts_with(prompt.text, cleaned)) {
    rest = {};
  } else {
    return false;
  }
  return rest.find_first_not_of(" \t\r\n};") == std::string_view::npos;
}

}  // namespace

std::string h1_strip_fences(std::string_view text) {
  const std::size_t open = text.find("```");
  if (open == std::string_view::npos) return std::string(text);
  const std::size_t line_end = text.find('\n', open);
  if (line_end == std::string_view::npos) return {};
  const std::size_t body = line_end + 1;
  std::size_t close = text.find("```", body);
  std::string_view content =
      close == std::string_view::npos ? text.substr(body) : text.substr(body, close - body);
  while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) {
    content.remove_suffix(1);
  }
  return std::string(content);
}

std::string h2_ensure_prompt(std::string_view text, const Prompt& prompt) {
  const std::string& p = prompt.text;
  if (p.empty() || text.find(p) != std::string_view::npos) return std::string(text);
  std::size_t overlap = 0;
  for (std::size_t len = std::min(p.size(), text.size()); len > 0; --len) {
    if (text.substr(0, len) == std::string_view(p).substr(p.size() - len)) {
      overlap = len;
      break;
    }
  }
  return p.substr(0, p.size() - overlap) + std::string(text);
}

std::string h3_strip_sentinels(std::string_view text) {
  std::size_t cut = std::string_view::npos;
  for (std::string_view sentinel : {std::string_view("\n```\n\n##"), std::string_view("\n</code>")}) {
    cut = std::min(cut, text.find(sentinel));
  }
  return std::string(cut == std::string_view::npos ? text : text.substr(0, cut));
}

std::string h4_truncate_after_target(std::string_view text, const Prompt& prompt) {
  const auto entry = infer_entry_point(prompt);
  if (!entry) throw TargetNotFoundError("prompt '" + prompt.id + "' names no entry point");
  std::optional<int> end;
  for (const auto& u : top_level_units(text, Language::python)) {
    if ((u.kind == UnitKind::function || u.kind == UnitKind::class_) && u.name == *entry) {
      end = u.line_end;
    }
  }
  if (!end) end = python_def_end_by_indent(text, *entry);
  if (!end) throw TargetNotFoundError("'" + *entry + "' is not defined in the snippet");
  const auto lines = text::split_lines(text);
  return text::join_lines(lines, 0, static_cast<std::size_t>(*end));
}

std::string h5_drop_extra_classes(std::string_view text, const Prompt& prompt) {
  const auto units = top_level_units(text, Language::java);
  std::vector<UnitSpan> classes;
  bool bare_methods = false;
  for (const auto& u : units) {
    if (u.kind == UnitKind::class_) classes.push_back(u);
    if (u.kind == UnitKind::method) bare_methods = true;
  }
  if (classes.empty()) {
    if (declared_java_types(prompt.text).empty()) return std::string(text);
  }

  std::optional<UnitSpan> target;
  const auto declared = declared_java_types(prompt.text);
  if (!declared.empty()) {
    for (const auto& c : classes) {
      if (c.name == declared.front()) {
        target = c;
        break;
      }
    }
    if (!target) {
      // Error recovery can fold a badly broken class into an ERROR node; if
      // the declaration is still there textually, leave the text to H6.
      const std::regex decl("\\b(class|interface|enum|record)\\s+" +
                            regex_escape(declared.front()) + "\\b");
      if (std::regex_search(mask_comments(text, Language::java), decl)) {
        return std::string(text);
      }
      throw TargetNotFoundError("class '" + declared.front() + "' is not in the snippet");
    }
  } else if (!bare_methods) {
    // The prompt declares no class (the synthetic wrapper is the target) but
    // the model wrapped its code in one; keep the first.
    target = classes.front();
  }

  const auto lines = text::split_lines(text);
  std::vector<bool> drop(lines.size(), false);
  bool removed = false;
  for (const auto& c : classes) {
    if (target && c == *target) continue;
    for (int l = c.line_start; l <= c.line_end && l <= static_cast<int>(lines.size()); ++l) {
      if (target && l >= target->line_start && l <= target->line_end) continue;
      drop[static_cast<std::size_t>(l - 1)] = true;
      removed = true;
    }
  }
  if (!removed) return std::string(text);
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!drop[i]) kept.push_back(lines[i]);
  }
  return text::rtrim_lines(text::join_lines(kept));
}

std::string h6_brace_repair(std::string_view text, BraceRepairStats* stats, int keep_lines) {
  BraceRepairStats local;
  BraceRepairStats& st = stats ? *stats : local;
  auto lines = text::split_lines(text);
  std::string candidate(text);
  bool first = true;
  while (true) {
    if (!first) {
      while (!lines.empty() && text::is_blank(lines.back())) lines.pop_back();
      if (!lines.empty()) lines.pop_back();
      while (!lines.empty() && text::is_blank(lines.back())) lines.pop_back();
      candidate = text::join_lines(lines);
    }
    first = false;
    if (static_cast<int>(lines.size()) <= keep_lines || text::is_blank(candidate)) return {};
    ++st.rounds;
    for (std::string_view suffix : {"", "\n}", "\n}}"}) {
      ++st.parse_attempts;
      std::string attempt = candidate + std::string(suffix);
      if (check_syntax(attempt, Language::java).ok) return attempt;
    }
  }
}

std::string h7_splice_repaired(std::string_view original, const std::vector<Finding>& findings,
                               std::string_view repaired_fragment) {
  if (findings.empty()) throw SpanOutOfRangeError("no findings to splice over");
  const auto lines = text::split_lines(original);
  const int count = static_cast<int>(lines.size());
  int first = count + 1;
  int last = 0;
  bool whole = false;
  for (const auto& f : findings) {
    if (!f.line_start) {
      whole = true;
      continue;
    }
    const int s = *f.line_start;
    const int e = f.line_end.value_or(s);
    if (s < 1 || e > count || e < s) {
      throw SpanOutOfRangeError("finding '" + f.rule_id + "' spans lines " + std::to_string(s) +
                                "-" + std::to_string(e) + " of a " + std::to_string(count) +
                                "-line snippet");
    }
    first = std::min(first, s);
    last = std::max(last, e);
  }
  if (whole) {
    first = 1;
    last = count;
  }
  std::vector<std::string> out(lines.begin(), lines.begin() + (first - 1));
  for (auto& l : text::split_lines(repaired_fragment)) out.push_back(std::move(l));
  out.insert(out.end(), lines.begin() + std::max(last, 0), lines.end());
  return text::join_lines(out);
}

std::optional<std::string> infer_entry_point(const Prompt& prompt) {
  if (prompt.entry_point && !prompt.entry_point->empty()) return prompt.entry_point;
  const std::string masked = mask_comments(prompt.text, prompt.language);
  std::optional<std::string> last;
  if (prompt.language == Language::python) {
    static const std::regex def(R"((?:^|\n)[ \t]*(?:async[ \t]+)?def[ \t]+([A-Za-z_]\w*))");
    for (std::sregex_iterator it(masked.begin(), masked.end(), def), end; it != end; ++it) {
      last = (*it)[1].str();
    }
    return last;
  }
  static const std::regex method(
      R"(\b([A-Za-z_$][\w$]*)\s*\([^()]*\)\s*(?:throws\s+[\w$.,\s]+?)?\s*(?:\{|;|$))");
  static const std::set<std::string> keywords{"if",     "for",  "while", "switch",
                                              "catch",  "synchronized", "return",
                                              "new",    "super", "this", "try"};
  for (std::sregex_iterator it(masked.begin(), masked.end(), method), end; it != end; ++it) {
    std::string name = (*it)[1].str();
    if (!keywords.count(name)) last = std::move(name);
  }
  return last;
}

CleanResult clean(const CodeSuggestion& sugg, const Prompt& prompt, const RepairContext* ctx) {
  CleanResult result{sugg, std::nullopt};
  std::string& text = result.suggestion.text;
  auto drop = [&](std::string_view reason) {
    result.drop_reason = std::string(reason);
    return result;
  };
  if (ctx) {
    try {
      text = h7_splice_repaired(text, ctx->findings, ctx->fragment);
    } catch (const SpanOutOfRangeError&) {
      return drop(kDropSpan);
    }
  }
  text = h1_strip_fences(text);
  text = h2_ensure_prompt(text, prompt);
  if (sugg.language == Language::python) {
    text = h3_strip_sentinels(text);
    if (infer_entry_point(prompt)) {
      try {
        text = h4_truncate_after_target(text, prompt);
      } catch (const TargetNotFoundError&) {
        return drop(kDropTargetNotFound);
      }
    }
  } else {
    try {
      text = h5_drop_extra_classes(text, prompt);
    } catch (const TargetNotFoundError&) {
      return drop(kDropTargetNotFound);
    }
    const int keep = text::starts_with(text, prompt.text) ? text::line_count(prompt.text) : 0;
    text = h6_brace_repair(text, nullptr, keep);
  }
  if (text::is_blank(text)) return drop(kDropEmpty);
  if (is_empty_body(text, prompt)) return drop(kDropEmptyBody);
  return result;
}

RepairContext repair_context_for(const RepairOrigin& origin, std::string_view completion,
                                 const Prompt& prompt) {
  std::string_view c = completion;
  if (!origin.repair_prompt.empty() && text::starts_with(c, origin.repair_prompt)) {
    c.remove_prefix(origin.repair_prompt.size());
  }
  RepairContext ctx;
  ctx.fragment = h1_strip_fences(c);
  const auto entry = infer_entry_point(prompt);
  if (entry && defines_entry(ctx.fragment, *entry, prompt.language)) {
    Finding whole;
    whole.rule_id = "full_rewrite";
    whole.source = "repair";
    ctx.findings = {whole};
  } else {
    ctx.findings = origin.findings;
  }
  return ctx;
}

namespace {

struct Outcome {
  CodeSuggestion cleaned;
  std::optional<std::string> reason;
};

Outcome process(const SuggestionInventory& inv, std::size_t i) {
  const CodeSuggestion& raw = inv.suggestions[i];
  CleanResult r;
  if (inv.repair) {
    RepairContext ctx = repair_context_for(*inv.repair, raw.text, inv.prompt);
    CodeSuggestion original = raw;
    original.text = inv.repair->original_code;
    r = clean(original, inv.prompt, &ctx);
  } else {
    r = clean(raw, inv.prompt);
  }
  if (!r.drop_reason && !check_syntax(r.suggestion.text, raw.language).ok) {
    r.drop_reason = std::string(kDropSyntax);
  }
  return {std::move(r.suggestion), std::move(r.drop_reason)};
}

EligibleSet assemble(const SuggestionInventory& inv, std::vector<Outcome>& outcomes) {
  EligibleSet out;
  out.prompt = inv.prompt;
  out.n = static_cast<int>(inv.n());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].reason) {
      out.dropped.push_back({inv.suggestions[i].position, *outcomes[i].reason});
    } else {
      out.cleaned.push_back(std::move(outcomes[i].cleaned));
    }
  }
  return out;
}

}  // namespace

EligibleSet filter_inventory(const SuggestionInventory& inv) {
  const long n = static_cast<long>(inv.n());
  std::vector<Outcome> outcomes(inv.n());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      outcomes[static_cast<std::size_t>(i)] = process(inv, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(codesift_filter_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(inv, outcomes);
}

EligibleSet filter_inventory_serial(const SuggestionInventory& inv) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(inv.n());
  for (std::size_t i = 0; i < inv.n(); ++i) outcomes.push_back(process(inv, i));
  return assemble(inv, outcomes);
}

}  // namespace codesift
