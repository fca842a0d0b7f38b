#include "codesift/syntax.hpp"

#include <tree_sitter/api.h>

#include <cstring>
#include <memory>
#include <set>

#include "codesift/errors.hpp"
#include "codesift/text.hpp"

extern "C" {
const TSLanguage* tree_sitter_python(void);
const TSLanguage* tree_sitter_java(void);
}

namespace codesift {

std::string_view to_string(UnitKind k) {
  switch (k) {
    case UnitKind::function: return "function";
    case UnitKind::method: return "method";
    case UnitKind::class_: return "class";
    case UnitKind::other: return "other";
  }
  return "other";
}

namespace {

constexpr std::string_view kWrapperHeader = "class __CodesiftWrapper__ { ";

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TreeDeleter {
  void operator()(TSTree* t) const { ts_tree_delete(t); }
};
using ParserPtr = std::unique_ptr<TSParser, ParserDeleter>;
using TreePtr = std::unique_ptr<TSTree, TreeDeleter>;

// TSParser is not thread-safe; one per thread and language.
TSParser* parser_for(Language lang) {
  thread_local ParserPtr python_parser;
  thread_local ParserPtr java_parser;
  ParserPtr& slot = lang == Language::python ? python_parser : java_parser;
  if (!slot) {
    const TSLanguage* grammar =
        lang == Language::python ? tree_sitter_python() : tree_sitter_java();
    ParserPtr p(ts_parser_new());
    if (!grammar || !ts_parser_set_language(p.get(), grammar)) {
      throw ParserUnavailableError("grammar for " + std::string(to_string(lang)) +
                                   " could not be loaded");
    }
    slot = std::move(p);
  }
  return slot.get();
}

TreePtr parse(std::string_view code, Language lang) {
  TSParser* parser = parser_for(lang);
  TreePtr tree(ts_parser_parse_string(parser, nullptr, code.data(),
                                      static_cast<uint32_t>(code.size())));
  if (!tree) throw ParserUnavailableError("parser returned no tree");
  return tree;
}

std::string node_type(TSNode n) { return ts_node_type(n); }

int start_line(TSNode n) { return static_cast<int>(ts_node_start_point(n).row) + 1; }

int end_line(TSNode n) {
  const TSPoint s = ts_node_start_point(n);
  const TSPoint e = ts_node_end_point(n);
  if (e.column == 0 && e.row > s.row) return static_cast<int>(e.row);
  return static_cast<int>(e.row) + 1;
}

std::string node_text(TSNode n, std::string_view src) {
  const uint32_t b = ts_node_start_byte(n);
  const uint32_t e = ts_node_end_byte(n);
  if (b >= src.size()) return {};
  return std::string(src.substr(b, e - b));
}

std::string field_text(TSNode n, const char* field, std::string_view src) {
  TSNode child = ts_node_child_by_field_name(n, field, static_cast<uint32_t>(strlen(field)));
  if (ts_node_is_null(child)) return {};
  return node_text(child, src);
}

// First ERROR or MISSING node in document order.
std::optional<TSNode> first_error(TSNode n) {
  if (ts_node_is_error(n) || ts_node_is_missing(n)) return n;
  if (!ts_node_has_error(n)) return std::nullopt;
  const uint32_t count = ts_node_child_count(n);
  for (uint32_t i = 0; i < count; ++i) {
    if (auto e = first_error(ts_node_child(n, i))) return e;
  }
  return n;
}

std::optional<TSNode> find_type(TSNode n, const std::set<std::string>& types) {
  if (types.count(node_type(n))) return n;
  const uint32_t count = ts_node_named_child_count(n);
  for (uint32_t i = 0; i < count; ++i) {
    if (auto hit = find_type(ts_node_named_child(n, i), types)) return hit;
  }
  return std::nullopt;
}

SyntaxVerdict fail(int line, std::string message) {
  return {false, line < 1 ? 1 : line, std::move(message)};
}

SyntaxVerdict verdict_from_tree(TSNode root) {
  if (!ts_node_has_error(root)) return {};
  TSNode err = *first_error(root);
  if (ts_node_is_missing(err)) {
    return fail(start_line(err), "missing '" + node_type(err) + "'");
  }
  return fail(start_line(err), "syntax error");
}

const std::set<std::string>& java_type_declarations() {
  static const std::set<std::string> types{
      "class_declaration",  "interface_declaration",
      "enum_declaration",   "record_declaration",
      "annotation_type_declaration", "module_declaration"};
  return types;
}

const std::set<std::string>& java_compilation_unit_members() {
  static const std::set<std::string> types = [] {
    std::set<std::string> t = java_type_declarations();
    t.insert({"package_declaration", "import_declaration", "line_comment",
              "block_comment"});
    return t;
  }();
  return types;
}

bool has_type_declaration(TSNode root) {
  const uint32_t count = ts_node_named_child_count(root);
  for (uint32_t i = 0; i < count; ++i) {
    if (java_type_declarations().count(node_type(ts_node_named_child(root, i)))) {
      return true;
    }
  }
  return false;
}

// Puts the wrapper header on the first line that is not a package/import
// line, so line numbers are unchanged.
std::string wrap_java(std::string_view code) {
  auto lines = text::split_lines(code);
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto t = text::trim(lines[i]);
    if (!(t.empty() || text::starts_with(t, "import ") ||
          text::starts_with(t, "package ") || text::starts_with(t, "//"))) {
      break;
    }
  }
  std::string out;
  for (std::size_t j = 0; j < lines.size(); ++j) {
    if (j) out += '\n';
    if (j == i) out += kWrapperHeader;
    out += lines[j];
  }
  if (i == lines.size()) {
    if (!out.empty()) out += '\n';
    out += kWrapperHeader;
  }
  out += "\n}";
  return out;
}

struct JavaParse {
  TreePtr tree;
  std::string source;  // what was actually parsed
  bool wrapped = false;
};

JavaParse parse_java(std::string_view code) {
  TreePtr raw = parse(code, Language::java);
  if (has_type_declaration(ts_tree_root_node(raw.get()))) {
    return {std::move(raw), std::string(code), false};
  }
  std::string wrapped = wrap_java(code);
  TreePtr tree = parse(wrapped, Language::java);
  return {std::move(tree), std::move(wrapped), true};
}

int start_column(TSNode n) { return static_cast<int>(ts_node_start_point(n).column); }

// Statements of a module or block that begin a line must share a column; the
// module's start at column 0.
std::optional<SyntaxVerdict> check_indentation(TSNode scope, bool is_module) {
  std::optional<int> column;
  int last_row = -1;
  if (!is_module) last_row = static_cast<int>(ts_node_start_point(scope).row) - 1;
  const uint32_t count = ts_node_named_child_count(scope);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(scope, i);
    if (node_type(child) == "comment") continue;
    const int row = static_cast<int>(ts_node_start_point(child).row);
    if (row != last_row) {
      const int col = start_column(child);
      if (!column) column = is_module ? 0 : col;
      if (col != *column) return fail(row + 1, "unexpected indent");
    }
    last_row = static_cast<int>(ts_node_end_point(child).row);
  }
  return std::nullopt;
}

struct PyScope {
  bool in_function = false;
  bool in_loop = false;
};

std::optional<SyntaxVerdict> check_python_scopes(TSNode n, PyScope scope) {
  const std::string type = node_type(n);
  if (type == "module" || type == "block") {
    if (auto v = check_indentation(n, type == "module")) return v;
  }
  if (type == "return_statement" && !scope.in_function) {
    return fail(start_line(n), "'return' outside function");
  }
  if (type == "yield" && !scope.in_function) return fail(start_line(n), "'yield' outside function");
  if ((type == "break_statement" || type == "continue_statement") && !scope.in_loop) {
    return fail(start_line(n), "'" + type.substr(0, type.find('_')) + "' outside loop");
  }
  if (type == "function_definition") {
    scope = {true, false};
  } else if (type == "class_definition") {
    scope = {false, false};
  } else if (type == "lambda") {
    return std::nullopt;
  }
  const uint32_t count = ts_node_named_child_count(n);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(n, i);
    PyScope child_scope = scope;
    // only the body of a loop is inside it; the else clause is not
    if ((type == "for_statement" || type == "while_statement") &&
        node_type(child) == "block") {
      child_scope.in_loop = true;
    }
    if (auto v = check_python_scopes(child, child_scope)) return v;
  }
  return std::nullopt;
}

SyntaxVerdict check_python(std::string_view code) {
  TreePtr tree = parse(code, Language::python);
  TSNode root = ts_tree_root_node(tree.get());
  SyntaxVerdict v = verdict_from_tree(root);
  if (!v.ok) return v;
  static const std::set<std::string> legacy{"print_statement", "exec_statement"};
  if (auto n = find_type(root, legacy)) {
    return fail(start_line(*n), "python 2 " + node_type(*n));
  }
  if (auto bad = check_python_scopes(root, {})) return *bad;
  return v;
}

SyntaxVerdict check_java(std::string_view code) {
  JavaParse jp = parse_java(code);
  TSNode root = ts_tree_root_node(jp.tree.get());
  const int last_line = std::max(1, text::line_count(code));
  SyntaxVerdict v = verdict_from_tree(root);
  if (!v.ok) {
    if (v.first_error_line && *v.first_error_line > last_line) v.first_error_line = last_line;
    return v;
  }
  // The grammar accepts bare statements and methods at top level; a
  // compilation unit does not.
  TSNode scope = root;
  const uint32_t count = ts_node_named_child_count(scope);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(scope, i);
    if (!java_compilation_unit_members().count(node_type(child))) {
      return fail(std::min(start_line(child), last_line),
                  "unexpected top-level " + node_type(child));
    }
  }
  return v;
}

UnitSpan unit(UnitKind kind, std::string name, TSNode n) {
  return {kind, std::move(name), start_line(n), end_line(n)};
}

std::vector<UnitSpan> python_units(std::string_view code) {
  std::vector<UnitSpan> out;
  TreePtr tree = parse(code, Language::python);
  TSNode root = ts_tree_root_node(tree.get());
  const uint32_t count = ts_node_named_child_count(root);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(root, i);
    std::string type = node_type(child);
    TSNode def = child;
    if (type == "decorated_definition") {
      def = ts_node_child_by_field_name(child, "definition", 10);
      if (ts_node_is_null(def)) def = child;
      type = node_type(def);
    }
    if (type == "function_definition") {
      out.push_back(unit(UnitKind::function, field_text(def, "name", code), child));
    } else if (type == "class_definition") {
      out.push_back(unit(UnitKind::class_, field_text(def, "name", code), child));
    } else if (type == "ERROR") {
      out.push_back(unit(UnitKind::other, "", child));
    }
  }
  return out;
}

void java_members(TSNode scope, std::string_view src, std::vector<UnitSpan>& out) {
  const uint32_t count = ts_node_named_child_count(scope);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(scope, i);
    const std::string type = node_type(child);
    if (java_type_declarations().count(type)) {
      out.push_back(unit(UnitKind::class_, field_text(child, "name", src), child));
    } else if (type == "method_declaration" || type == "constructor_declaration") {
      out.push_back(unit(UnitKind::method, field_text(child, "name", src), child));
    } else if (type == "ERROR") {
      out.push_back(unit(UnitKind::other, "", child));
    }
  }
}

std::vector<UnitSpan> java_units(std::string_view code) {
  std::vector<UnitSpan> out;
  JavaParse jp = parse_java(code);
  TSNode root = ts_tree_root_node(jp.tree.get());
  if (!jp.wrapped) {
    java_members(root, jp.source, out);
    return out;
  }
  // Report the wrapper's members, not the wrapper itself.
  const uint32_t count = ts_node_named_child_count(root);
  for (uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_named_child(root, i);
    const std::string type = node_type(child);
    if (type == "class_declaration" &&
        field_text(child, "name", jp.source) == "__CodesiftWrapper__") {
      TSNode body = ts_node_child_by_field_name(child, "body", 4);
      if (!ts_node_is_null(body)) java_members(body, jp.source, out);
    } else if (type == "ERROR") {
      out.push_back(unit(UnitKind::other, "", child));
    }
  }
  const int last_line = text::line_count(code);
  std::vector<UnitSpan> clamped;
  for (auto u : out) {
    if (u.line_start > last_line) continue;
    u.line_end = std::min(u.line_end, last_line);
    clamped.push_back(std::move(u));
  }
  return clamped;
}

}  // namespace

SyntaxVerdict check_syntax(std::string_view code, Language language) {
  return language == Language::python ? check_python(code) : check_java(code);
}

std::vector<UnitSpan> top_level_units(std::string_view code, Language language) {
  return language == Language::python ? python_units(code) : java_units(code);
}

}  // namespace codesift
