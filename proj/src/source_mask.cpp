#include "codesift/source_mask.hpp"

namespace codesift {

namespace {

void blank(std::string& s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to && i < s.size(); ++i) {
    if (s[i] != '\n') s[i] = ' ';
  }
}

// Skips a single-line string literal starting at i (the quote char).
std::size_t skip_string(std::string_view code, std::size_t i) {
  const char quote = code[i];
  ++i;
  while (i < code.size() && code[i] != quote && code[i] != '\n') {
    if (code[i] == '\\') ++i;
    ++i;
  }
  return i < code.size() && code[i] == quote ? i + 1 : i;
}

std::string mask_python(std::string_view code) {
  std::string out(code);
  std::size_t i = 0;
  while (i < code.size()) {
    const char c = code[i];
    if (c == '#') {
      const std::size_t end = code.find('\n', i);
      const std::size_t stop = end == std::string_view::npos ? code.size() : end;
      blank(out, i, stop);
      i = stop;
    } else if ((c == '"' || c == '\'') && code.substr(i, 3) == std::string(3, c)) {
      const std::size_t end = code.find(std::string(3, c), i + 3);
      const std::size_t stop = end == std::string_view::npos ? code.size() : end + 3;
      blank(out, i, stop);
      i = stop;
    } else if (c == '"' || c == '\'') {
      i = skip_string(code, i);
    } else {
      ++i;
    }
  }
  return out;
}

std::string mask_java(std::string_view code) {
  std::string out(code);
  std::size_t i = 0;
  while (i < code.size()) {
    const char c = code[i];
    if (c == '/' && i + 1 < code.size() && code[i + 1] == '/') {
      const std::size_t end = code.find('\n', i);
      const std::size_t stop = end == std::string_view::npos ? code.size() : end;
      blank(out, i, stop);
      i = stop;
    } else if (c == '/' && i + 1 < code.size() && code[i + 1] == '*') {
      const std::size_t end = code.find("*/", i + 2);
      const std::size_t stop = end == std::string_view::npos ? code.size() : end + 2;
      blank(out, i, stop);
      i = stop;
    } else if (c == '"' || c == '\'') {
      i = skip_string(code, i);
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::string mask_comments(std::string_view code, Language language) {
  return language == Language::python ? mask_python(code) : mask_java(code);
}

}  // namespace codesift
