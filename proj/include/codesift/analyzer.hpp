#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "codesift/model.hpp"

namespace codesift {

// External static analyzer invoked as a child process. The command template
// is run through /bin/sh with {file} replaced by a temp file holding the
// snippet; an optional {report} placeholder names a file the tool writes its
// JSON report to (stdout is read otherwise).
struct AnalyzerSpec {
  std::string name;
  std::string command_template;
  std::string report_format = "native_json";
  int timeout_ms = 30000;
  Language language = Language::python;

  void validate() const;
};

// Caps concurrently running analyzer processes across the process (default 4).
void set_max_analyzer_processes(int n);
int max_analyzer_processes();

// Translates a report into findings. Recognizes Bandit's JSON, SARIF (as
// written by SpotBugs), and the normalized schema (a list of findings or an
// object with a "findings" list). Throws ReportParseError.
std::vector<Finding> parse_analyzer_report(std::string_view report, const std::string& source);

// Runs the tool on the code. When a prompt is given, findings inside the
// prompt region are discarded. Throws AnalyzerTimeout, AnalyzerCrashed,
// ReportParseError.
std::vector<Finding> run_external_analyzer(const AnalyzerSpec& spec, std::string_view code,
                                           const Prompt* prompt = nullptr);

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
  bool timed_out = false;
};

// Runs `sh -c command`, capturing stdout/stderr; kills it after timeout_ms.
ProcessResult run_shell(const std::string& command, int timeout_ms);

}  // namespace codesift
