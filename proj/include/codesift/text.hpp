#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codesift::text {

// Splits on '\n'. A trailing newline does not produce an extra empty line;
// "" yields no lines.
std::vector<std::string> split_lines(std::string_view s);

// Joins with '\n', no trailing newline.
std::string join_lines(const std::vector<std::string>& lines);
std::string join_lines(const std::vector<std::string>& lines, std::size_t first,
                       std::size_t count);

int line_count(std::string_view s);

bool is_blank(std::string_view s);
std::string_view trim(std::string_view s);
std::string rtrim_lines(std::string_view s);  // drops trailing blank lines

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace codesift::text
