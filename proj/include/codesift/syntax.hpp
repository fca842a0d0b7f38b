#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codesift/model.hpp"

namespace codesift {

struct SyntaxVerdict {
  bool ok = true;
  std::optional<int> first_error_line;  // 1-based
  std::optional<std::string> message;
};

enum class UnitKind { function, method, class_, other };

std::string_view to_string(UnitKind k);

struct UnitSpan {
  UnitKind kind = UnitKind::other;
  std::string name;
  int line_start = 1;  // 1-based, inclusive
  int line_end = 1;

  bool operator==(const UnitSpan&) const = default;
};

// Strict grammar check. Java code without a top-level type declaration is
// parsed inside a synthetic class. Python 2 statements (print/exec) are
// rejected even though the grammar tolerates them.
SyntaxVerdict check_syntax(std::string_view code, Language language);

// Top-level definitions in source order, located with an error-tolerant
// parse. Module-level statements are not reported; unparseable regions come
// back as UnitKind::other.
std::vector<UnitSpan> top_level_units(std::string_view code, Language language);

}  // namespace codesift
