#include <doctest.h>

#include "codesift/syntax.hpp"

using namespace codesift;

namespace {
bool py_ok(const std::string& s) { return check_syntax(s, Language::python).ok; }
bool java_ok(const std::string& s) { return check_syntax(s, Language::java).ok; }
}  // namespace

TEST_CASE("python accepts valid code") {
  CHECK(py_ok("def f(a):\n    return a + 1\n"));
  CHECK(py_ok("class A:\n    def m(self):\n        return 1\n"));
  CHECK(py_ok("for i in range(3):\n    if i:\n        continue\n    break\n"));
  CHECK(py_ok("x = [1,\n  2]\n"));
  CHECK(py_ok(""));
}

TEST_CASE("python rejects broken code") {
  CHECK_FALSE(py_ok("def f(:\n    pass\n"));
  CHECK_FALSE(py_ok("def f(a):\n    return a +\n"));
  CHECK_FALSE(py_ok("print 'hello'\n"));
  CHECK_FALSE(py_ok("  x = 1\n"));
  CHECK_FALSE(py_ok("def f():\n    x = 1\n      y = 2\n"));
  CHECK_FALSE(py_ok("return 1\n"));
  CHECK_FALSE(py_ok("class A:\n    return 1\n"));
  CHECK_FALSE(py_ok("break\n"));
  CHECK_FALSE(py_ok("def f():\n    continue\n"));
}

TEST_CASE("python error carries a line") {
  const auto v = check_syntax("a = 1\nb = (\n", Language::python);
  CHECK_FALSE(v.ok);
  REQUIRE(v.first_error_line);
  CHECK(*v.first_error_line >= 2);
  CHECK(v.message);
}

TEST_CASE("java accepts classes and bare members") {
  CHECK(java_ok("public class A {\n  int f() { return 1; }\n}\n"));
  CHECK(java_ok("int f() { return 1; }\n"));
  CHECK(java_ok("import java.util.*;\nclass B {}\n"));
}

TEST_CASE("java rejects broken code") {
  CHECK_FALSE(java_ok("public class A {\n  int f() { return 1; }\n"));
  CHECK_FALSE(java_ok("class A { int[] = new; }"));
  CHECK_FALSE(java_ok("class A { void f() { int x = } }"));
}

TEST_CASE("top-level units") {
  const std::string py = "import os\n\ndef a():\n    pass\n\nclass B:\n    x = 1\n";
  const auto units = top_level_units(py, Language::python);
  REQUIRE(units.size() == 2);
  CHECK(units[0] == UnitSpan{UnitKind::function, "a", 3, 4});
  CHECK(units[1] == UnitSpan{UnitKind::class_, "B", 6, 7});

  const std::string java = "class A {\n}\nclass C {\n  void m() {}\n}\n";
  const auto ju = top_level_units(java, Language::java);
  REQUIRE(ju.size() == 2);
  CHECK(ju[1].name == "C");
  CHECK(ju[1].line_start == 3);
  CHECK(ju[1].line_end == 5);
}

TEST_CASE("unit kind names") {
  CHECK(to_string(UnitKind::function) == "function");
  CHECK(to_string(UnitKind::class_) == "class");
}
