#include <algorithm>
#include <regex>
#include <set>

#include "codesift/quality.hpp"
#include "codesift/source_mask.hpp"
#include "codesift/text.hpp"

namespace codesift {

namespace {

constexpr const char* kSource = "builtin";

Finding make(std::string rule, std::string message, int line, Severity sev,
             std::optional<int> line_end = std::nullopt) {
  Finding f;
  f.rule_id = std::move(rule);
  f.message = std::move(message);
  f.line_start = line;
  if (line_end && *line_end > line) f.line_end = line_end;
  f.severity = sev;
  f.source = kSource;
  return f;
}

int line_of_offset(std::string_view s, std::size_t offset) {
  return 1 + static_cast<int>(std::count(s.begin(), s.begin() + static_cast<long>(offset), '\n'));
}

int indent_of(std::string_view line) {
  return static_cast<int>(std::min(line.find_first_not_of(" \t"), line.size()));
}

// Index just past the string literal starting at i (which must be a quote,
// optionally preceded by a python prefix such as f or rb).
std::size_t literal_end(std::string_view s, std::size_t i) {
  const char q = s[i];
  ++i;
  while (i < s.size() && s[i] != q) {
    if (s[i] == '\\') ++i;
    ++i;
  }
  return std::min(i + 1, s.size());
}

// A string expression is dynamic when it is an f-string with a placeholder,
// or a literal combined with %, + or .format, or not a literal at all.
bool is_dynamic_string(std::string_view arg) {
  arg = text::trim(arg);
  if (arg.empty()) return false;
  std::size_t i = 0;
  bool fstring = false;
  while (i < arg.size() && std::isalpha(static_cast<unsigned char>(arg[i])) && i < 2) {
    if (arg[i] == 'f' || arg[i] == 'F') fstring = true;
    ++i;
  }
  if (i >= arg.size() || (arg[i] != '"' && arg[i] != '\'')) return true;
  const std::size_t end = literal_end(arg, i);
  if (fstring && arg.substr(i, end - i).find('{') != std::string_view::npos) return true;
  const auto rest = text::trim(arg.substr(end));
  return text::starts_with(rest, "%") || text::starts_with(rest, "+") ||
         text::starts_with(rest, ".format");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const std::regex& sql_keyword() {
  static const std::regex re(R"(\b(select\s.+\sfrom|insert\s+into|update\s.+\sset|delete\s+from)\b)",
                             std::regex::icase);
  return re;
}

// ---- python ---------------------------------------------------------------

void py_yaml(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex load(R"(\byaml\.(unsafe_)?load\s*\()");
  static const std::regex safe(R"(\b(C?SafeLoader|BaseLoader)\b)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_search(lines[i], m, load)) continue;
    if (!m[1].matched && std::regex_search(lines[i], safe)) continue;
    out.push_back(make("unsafe_yaml_load",
                       "Use of unsafe yaml load. Allows instantiation of arbitrary objects. "
                       "Consider yaml.safe_load().",
                       static_cast<int>(i) + 1, Severity::warning));
  }
}

void py_hash(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex call(R"(\bhashlib\.(md5|sha1)\s*\()");
  static const std::regex named(R"(\bhashlib\.new\s*\(\s*['"](md5|sha1)['"])", std::regex::icase);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_search(lines[i], m, call) || std::regex_search(lines[i], m, named)) {
      std::string algo = lower(m[1].str());
      std::string shown = algo == "md5" ? "MD5" : "SHA1";
      out.push_back(make("weak_hash",
                         "Use of weak " + shown + " hash for security. Consider usedforsecurity=False",
                         static_cast<int>(i) + 1, Severity::error));
    }
  }
}

void py_shell(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex sub(R"(\bsubprocess\.(call|run|Popen|check_call|check_output)\s*\((.*)\bshell\s*=\s*True)");
  static const std::regex system(R"(\bos\.(system|popen)\s*\((.*)\))");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_search(lines[i], m, sub)) {
      std::string args = m[2].str();
      // first positional argument
      std::string first = args.substr(0, args.find(','));
      if (is_dynamic_string(first)) {
        out.push_back(make("shell_injection",
                           "subprocess call with shell=True identified, security issue.",
                           static_cast<int>(i) + 1, Severity::error));
      }
    } else if (std::regex_search(lines[i], m, system) && is_dynamic_string(m[2].str())) {
      out.push_back(make("shell_injection",
                         "Starting a process with a shell, possible injection detected, "
                         "security issue.",
                         static_cast<int>(i) + 1, Severity::error));
    }
  }
}

void py_sql(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    // every string literal on the line carrying an SQL statement
    for (std::size_t p = 0; p < line.size(); ++p) {
      if (line[p] != '"' && line[p] != '\'') continue;
      std::size_t start = p;
      if (start > 0 && (line[start - 1] == 'f' || line[start - 1] == 'F')) --start;
      const std::size_t end = literal_end(line, p);
      const std::string literal = line.substr(p, end - p);
      if (std::regex_search(literal, sql_keyword()) &&
          is_dynamic_string(std::string_view(line).substr(start))) {
        out.push_back(make("sql_injection", "Possible SQL Injection", static_cast<int>(i) + 1,
                           Severity::warning));
        break;
      }
      p = end - 1;
    }
  }
}

void py_flask(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex run(R"(\.run\s*\(.*\bdebug\s*=\s*True)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (std::regex_search(lines[i], run)) {
      out.push_back(make("flask_debug",
                         "A Flask app appears to be run with debug=True, which exposes the "
                         "Werkzeug debugger and allows the execution of arbitrary code.",
                         static_cast<int>(i) + 1, Severity::error));
    }
  }
}

void py_except_pass(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex header(R"(^\s*except\b[^:]*:\s*(pass)?\s*$)");
  static const std::regex pass(R"(^\s*pass\s*$)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, header)) continue;
    const int line = static_cast<int>(i) + 1;
    if (m[1].matched) {
      out.push_back(make("try_except_pass", "Try, Except, Pass detected.", line, Severity::info));
      continue;
    }
    // the handler body must be exactly one `pass`
    std::size_t j = i + 1;
    while (j < lines.size() && text::is_blank(lines[j])) ++j;
    if (j >= lines.size() || !std::regex_match(lines[j], pass) ||
        indent_of(lines[j]) <= indent_of(lines[i])) {
      continue;
    }
    std::size_t k = j + 1;
    while (k < lines.size() && text::is_blank(lines[k])) ++k;
    if (k < lines.size() && indent_of(lines[k]) > indent_of(lines[i])) continue;
    out.push_back(make("try_except_pass", "Try, Except, Pass detected.", line, Severity::info,
                       static_cast<int>(j) + 1));
  }
}

void py_password(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex assign(
      R"(\b\w*(password|passwd|pwd|secret)\w*\s*(?::\s*\w+\s*)?=\s*(['"])([^'"]+)\2)",
      std::regex::icase);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_search(lines[i], m, assign)) {
      // `x == "..."` is a comparison, not an assignment
      const auto eq = static_cast<std::size_t>(m.position(0)) + m.str(0).find('=');
      if (eq > 0 && (lines[i][eq - 1] == '=' || lines[i][eq - 1] == '!')) continue;
      if (eq + 1 < lines[i].size() && lines[i][eq + 1] == '=') continue;
      out.push_back(make("hardcoded_password", "Possible hardcoded password: '" + m[4].str() + "'",
                         static_cast<int>(i) + 1, Severity::info));
    }
  }
}

void py_eval(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex call(R"((^|[^.\w])(eval|exec)\s*\((.*)\))");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_search(lines[i], m, call)) continue;
    std::string arg = m[3].str();
    arg = std::string(text::trim(arg.substr(0, arg.find(','))));
    const bool literal = !arg.empty() && (arg.front() == '"' || arg.front() == '\'') &&
                         !is_dynamic_string(arg);
    if (literal) continue;
    if (m[2].str() == "eval") {
      out.push_back(make("eval_exec",
                         "Use of possibly insecure function - consider using safer "
                         "ast.literal_eval.",
                         static_cast<int>(i) + 1, Severity::warning));
    } else {
      out.push_back(make("eval_exec", "Use of exec detected.", static_cast<int>(i) + 1,
                         Severity::warning));
    }
  }
}

// ---- java -----------------------------------------------------------------

void java_sql(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex built(R"re(\b(\w+)\s*(?:\+)?=\s*(.*"[^"]*"\s*\+.*|.*\+\s*"[^"]*".*)$)re");
  static const std::regex exec(
      R"(\.(execute|executeQuery|executeUpdate|executeLargeUpdate|addBatch|prepareStatement|prepareCall)\s*\((.*)\))");
  std::set<std::string> tainted;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    std::smatch m;
    if (std::regex_search(line, m, built) && std::regex_search(line, sql_keyword())) {
      tainted.insert(m[1].str());
    }
    if (!std::regex_search(line, m, exec)) continue;
    const std::string arg = m[2].str();
    const bool concatenated =
        arg.find('+') != std::string::npos && arg.find('"') != std::string::npos;
    const bool via_variable = tainted.count(std::string(text::trim(arg))) > 0;
    if (concatenated || via_variable) {
      out.push_back(make("sql_injection",
                         "Nonconstant string passed to execute or addBatch method on an SQL "
                         "statement",
                         static_cast<int>(i) + 1, Severity::error));
    }
  }
}

void java_hash(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex md(R"re(MessageDigest\.getInstance\s*\(\s*"(MD5|MD2|SHA-?1)")re",
                             std::regex::icase);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_search(lines[i], m, md)) {
      std::string algo = m[1].str();
      std::transform(algo.begin(), algo.end(), algo.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      out.push_back(make("weak_hash",
                         "This API MessageDigest (" + algo +
                             ") is not a recommended cryptographic hash function",
                         static_cast<int>(i) + 1, Severity::error));
    }
  }
}

void java_empty_catch(std::string_view masked, std::vector<Finding>& out) {
  static const std::regex empty(R"(\bcatch\s*\([^)]*\)\s*\{\s*\})");
  const std::string s(masked);
  for (std::sregex_iterator it(s.begin(), s.end(), empty), end; it != end; ++it) {
    const auto pos = static_cast<std::size_t>(it->position(0));
    const int first = line_of_offset(s, pos);
    const int last = line_of_offset(s, pos + static_cast<std::size_t>(it->length(0)) - 1);
    out.push_back(make("empty_catch", "Method might ignore exception (empty catch block)", first,
                       Severity::warning, last));
  }
}

void java_string_eq(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex cmp(R"re("[^"]*"\s*[!=]=[^=]|[^=!<>][!=]=\s*")re");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (std::regex_search(lines[i], cmp)) {
      out.push_back(make("string_ref_equality", "Comparison of String objects using == or !=",
                         static_cast<int>(i) + 1, Severity::warning));
    }
  }
}

void java_ignored_return(const std::vector<std::string>& lines, std::vector<Finding>& out) {
  static const std::regex stmt(
      R"(^\s*[\w.\[\]]+\.(trim|toUpperCase|toLowerCase|replace|replaceAll|replaceFirst|substring|concat|strip|intern)\s*\([^;]*\)\s*;\s*$)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (std::regex_match(lines[i], stmt)) {
      out.push_back(make("ignored_return_value",
                         "Return value of method without side effect is ignored",
                         static_cast<int>(i) + 1, Severity::warning));
    }
  }
}

}  // namespace

std::vector<Finding> run_builtin_rules(std::string_view code, Language language) {
  const std::string masked = mask_comments(code, language);
  const auto lines = text::split_lines(masked);
  std::vector<Finding> out;
  if (language == Language::python) {
    py_yaml(lines, out);
    py_hash(lines, out);
    py_shell(lines, out);
    py_sql(lines, out);
    py_flask(lines, out);
    py_except_pass(lines, out);
    py_password(lines, out);
    py_eval(lines, out);
  } else {
    java_sql(lines, out);
    java_hash(lines, out);
    java_empty_catch(masked, out);
    java_string_eq(lines, out);
    java_ignored_return(lines, out);
  }
  std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    return std::tie(*a.line_start, a.rule_id) < std::tie(*b.line_start, b.rule_id);
  });
  return out;
}

const std::vector<std::string>& builtin_rule_ids(Language language) {
  static const std::vector<std::string> python{
      "unsafe_yaml_load", "weak_hash",       "shell_injection",    "sql_injection",
      "flask_debug",      "try_except_pass", "hardcoded_password", "eval_exec"};
  static const std::vector<std::string> java{"sql_injection", "weak_hash", "empty_catch",
                                             "string_ref_equality", "ignored_return_value"};
  return language == Language::python ? python : java;
}

}  // namespace codesift
