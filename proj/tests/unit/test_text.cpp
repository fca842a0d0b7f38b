#include <doctest.h>

#include "codesift/source_mask.hpp"
#include "codesift/text.hpp"

using namespace codesift;

TEST_CASE("split and join lines") {
  CHECK(text::split_lines("").empty());
  CHECK(text::split_lines("a\nb\n") == std::vector<std::string>{"a", "b"});
  CHECK(text::split_lines("a\n\nb") == std::vector<std::string>{"a", "", "b"});
  CHECK(text::join_lines({"a", "b"}) == "a\nb");
  CHECK(text::join_lines({"a", "b", "c"}, 1, 2) == "b\nc");
  CHECK(text::line_count("x\ny\n") == 2);
  CHECK(text::line_count("x\ny") == 2);
}

TEST_CASE("trimming") {
  CHECK(text::is_blank(" \t\n"));
  CHECK_FALSE(text::is_blank(" x "));
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::rtrim_lines("a\nb\n\n  \n") == "a\nb");
  CHECK(text::starts_with("abc", "ab"));
  CHECK_FALSE(text::starts_with("a", "ab"));
}

TEST_CASE("python comments and docstrings are masked") {
  const std::string code = "x = 1  # md5\n'''doc\nmore'''\ny = \"# kept\"\n";
  const std::string masked = mask_comments(code, Language::python);
  REQUIRE(masked.size() == code.size());
  CHECK(masked.find("md5") == std::string::npos);
  CHECK(masked.find("doc") == std::string::npos);
  CHECK(masked.find("\"# kept\"") != std::string::npos);
  CHECK(std::count(masked.begin(), masked.end(), '\n') == 4);
}

TEST_CASE("java comments are masked") {
  const std::string code = "int a; // b\n/* c\n d */ String s = \"/* e */\";\n";
  const std::string masked = mask_comments(code, Language::java);
  REQUIRE(masked.size() == code.size());
  CHECK(masked.find('b') == std::string::npos);
  CHECK(masked.find(" d ") == std::string::npos);
  CHECK(masked.find("\"/* e */\"") != std::string::npos);
  CHECK(masked.substr(0, 6) == "int a;");
}
