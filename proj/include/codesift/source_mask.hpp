#pragma once

#include <string>
#include <string_view>

#include "codesift/model.hpp"

namespace codesift {

// Returns a copy of code of identical length where comments (and, for
// Python, triple-quoted strings) are overwritten with spaces. Newlines are
// kept so offsets and line numbers stay valid. Ordinary string literals are
// left intact.
std::string mask_comments(std::string_view code, Language language);

}  // namespace codesift
