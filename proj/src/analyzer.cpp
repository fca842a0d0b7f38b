#include "codesift/analyzer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "codesift/errors.hpp"
#include "codesift/quality.hpp"
#include "codesift/text.hpp"
#include "gate.hpp"

namespace codesift {

using nlohmann::json;

namespace {

detail::Gate& slots() {
  static detail::Gate g(4);
  return g;
}

// Temp file removed on scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& suffix) {
    const char* dir = std::getenv("TMPDIR");
    std::string pattern = std::string(dir && *dir ? dir : "/tmp") + "/codesift-XXXXXX" + suffix;
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    const int fd = mkstemps(buf.data(), static_cast<int>(suffix.size()));
    if (fd < 0) throw IoError("cannot create temp file: " + std::string(std::strerror(errno)));
    ::close(fd);
    path_ = buf.data();
  }
  ~TempFile() { ::unlink(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::size_t count_of(const std::string& s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (auto p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
    s.replace(p, from.size(), to);
  }
}

Severity severity_from(std::string level) {
  std::transform(level.begin(), level.end(), level.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (level == "high" || level == "error") return Severity::error;
  if (level == "low" || level == "note" || level == "info" || level == "none") {
    return Severity::info;
  }
  return Severity::warning;
}

std::optional<int> positive_int(const json& j) {
  if (j.is_number_integer() && j.get<long>() >= 1) return static_cast<int>(j.get<long>());
  return std::nullopt;
}

void fix_span(Finding& f) {
  if (f.line_end && !f.line_start) f.line_end.reset();
  if (f.line_start && f.line_end && *f.line_end <= *f.line_start) f.line_end.reset();
}

// Bandit: {"results": [{"test_id", "issue_text", "line_number", "line_range",
// "issue_severity"}]}
std::vector<Finding> from_bandit(const json& report, const std::string& source) {
  std::vector<Finding> out;
  for (const auto& r : report.at("results")) {
    Finding f;
    f.rule_id = r.value("test_id", r.value("test_name", std::string("unknown")));
    f.message = r.value("issue_text", std::string());
    f.source = source;
    f.severity = severity_from(r.value("issue_severity", std::string("medium")));
    if (r.contains("line_number")) f.line_start = positive_int(r["line_number"]);
    if (r.contains("line_range") && r["line_range"].is_array() && !r["line_range"].empty()) {
      f.line_end = positive_int(r["line_range"].back());
    }
    fix_span(f);
    out.push_back(std::move(f));
  }
  return out;
}

// SARIF 2.1: runs[].results[] with ruleId, message.text, level and
// locations[0].physicalLocation.region.{startLine,endLine}
std::vector<Finding> from_sarif(const json& report, const std::string& source) {
  std::vector<Finding> out;
  for (const auto& run : report.at("runs")) {
    if (!run.contains("results")) continue;
    for (const auto& r : run.at("results")) {
      Finding f;
      f.rule_id = r.value("ruleId", std::string("unknown"));
      if (r.contains("message") && r["message"].is_object()) {
        f.message = r["message"].value("text", std::string());
      }
      f.severity = severity_from(r.value("level", std::string("warning")));
      f.source = source;
      if (r.contains("locations") && r["locations"].is_array() && !r["locations"].empty()) {
        const json& loc = r["locations"][0];
        if (loc.contains("physicalLocation") && loc["physicalLocation"].contains("region")) {
          const json& region = loc["physicalLocation"]["region"];
          if (region.contains("startLine")) f.line_start = positive_int(region["startLine"]);
          if (region.contains("endLine")) f.line_end = positive_int(region["endLine"]);
        }
      }
      fix_span(f);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<Finding> from_normalized(const json& list, const std::string& source) {
  std::vector<Finding> out;
  for (const auto& r : list) {
    Finding f;
    f.rule_id = r.at("rule_id").get<std::string>();
    f.message = r.value("message", std::string());
    if (r.contains("line_start") && !r["line_start"].is_null()) {
      f.line_start = positive_int(r["line_start"]);
    }
    if (r.contains("line_end") && !r["line_end"].is_null()) f.line_end = positive_int(r["line_end"]);
    f.severity = severity_from(r.value("severity", std::string("warning")));
    f.source = r.value("source", source);
    fix_span(f);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

void AnalyzerSpec::validate() const {
  if (count_of(command_template, "{file}") != 1) {
    throw ConfigError("analyzer '" + name + "': command template must contain {file} exactly once");
  }
  if (timeout_ms <= 0) throw ConfigError("analyzer '" + name + "': timeout_ms must be positive");
  if (report_format != "native_json") {
    throw ConfigError("analyzer '" + name + "': unsupported report format '" + report_format + "'");
  }
}

void set_max_analyzer_processes(int n) { slots().set_limit(n); }
int max_analyzer_processes() { return slots().limit(); }

std::vector<Finding> parse_analyzer_report(std::string_view report, const std::string& source) {
  json j;
  try {
    j = json::parse(report);
  } catch (const json::exception& e) {
    throw ReportParseError(source + ": report is not JSON: " + e.what());
  }
  try {
    if (j.is_array()) return from_normalized(j, source);
    if (j.is_object() && j.contains("runs")) return from_sarif(j, source);
    if (j.is_object() && j.contains("results")) return from_bandit(j, source);
    if (j.is_object() && j.contains("findings")) return from_normalized(j["findings"], source);
  } catch (const json::exception& e) {
    throw ReportParseError(source + ": unexpected report shape: " + e.what());
  }
  throw ReportParseError(source + ": unrecognized report layout");
}

ProcessResult run_shell(const std::string& command, int timeout_ms) {
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw IoError("pipe failed: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) throw IoError("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    const int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    close(out_pipe[0]);
    close(err_pipe[0]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - std::chrono::steady_clock::now())
                          .count();
    if (left <= 0) {
      result.timed_out = true;
      break;
    }
    const int ready = poll(fds, 2, static_cast<int>(left));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        (i == 0 ? result.out : result.err).append(buf, static_cast<std::size_t>(n));
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  if (result.timed_out) kill(-pid, SIGKILL);
  for (auto& f : fds) {
    if (f.fd >= 0) close(f.fd);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
  return result;
}

std::vector<Finding> run_external_analyzer(const AnalyzerSpec& spec, std::string_view code,
                                           const Prompt* prompt) {
  spec.validate();
  TempFile source(spec.language == Language::python ? ".py" : ".java");
  {
    std::ofstream f(source.path(), std::ios::binary);
    f.write(code.data(), static_cast<std::streamsize>(code.size()));
    if (!f) throw IoError("cannot write " + source.path());
  }
  std::optional<TempFile> report_file;
  std::string command = spec.command_template;
  replace_all(command, "{file}", shell_quote(source.path()));
  if (command.find("{report}") != std::string::npos) {
    report_file.emplace(".json");
    replace_all(command, "{report}", shell_quote(report_file->path()));
  }

  ProcessResult pr;
  {
    detail::GateGuard slot(slots());
    pr = run_shell(command, spec.timeout_ms);
  }
  if (pr.timed_out) {
    throw AnalyzerTimeout(spec.name + " exceeded " + std::to_string(spec.timeout_ms) + " ms");
  }
  std::string report = pr.out;
  if (report_file) {
    std::ifstream in(report_file->path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    report = ss.str();
  }
  auto crashed = [&] {
    return AnalyzerCrashed(spec.name + " exited with code " + std::to_string(pr.exit_code) + ": " +
                           pr.err.substr(0, 400));
  };
  if (text::is_blank(text::trim(report))) {
    if (pr.exit_code != 0) throw crashed();
    return {};
  }
  std::vector<Finding> findings;
  try {
    findings = parse_analyzer_report(report, spec.name);
  } catch (const ReportParseError&) {
    if (pr.exit_code != 0) throw crashed();
    throw;
  }
  if (prompt) findings = suppress_prompt_region(std::move(findings), code, *prompt);
  return findings;
}

}  // namespace codesift
