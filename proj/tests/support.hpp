#pragma once

// Shared test helpers: parse/run shortcuts and the CPython oracle bridge.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "safexec/engine.hpp"
#include "safexec/corpus.hpp"

namespace testutil {

inline std::string repo_path(const std::string& rel) {
  return std::string(SAFEXEC_REPO_DIR) + "/" + rel;
}

inline std::string bin_path(const std::string& rel) {
  return std::string(SAFEXEC_BIN_DIR) + "/" + rel;
}

inline safexec::SyntaxTree parse_ok(const std::string& source) {
  safexec::ParseResult result = safexec::parse({source, "test"});
  REQUIRE_MESSAGE(result.ok(), "parse failed: ",
                  result.diagnostics.empty() ? "?" : result.diagnostics.front().message,
                  " in: ", source);
  return std::move(*result.tree);
}

inline safexec::RunResult run_program(const std::string& source,
                                      const safexec::PolicyConfig& policy,
                                      const safexec::ToolRegistry* tools = nullptr) {
  return safexec::run_source({source, "test"}, policy, tools, {});
}

inline safexec::RunResult run_default(const std::string& source) {
  return run_program(source, safexec::default_eval_policy());
}

struct CommandResult {
  int exit_code{0};
  std::string output;
};

inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) {
    result.exit_code = -1;
    return result;
  }
  char buf[4096];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) result.output += buf;
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline bool python_available() {
  static int cached = -1;
  if (cached == -1) {
    cached = run_command("python3 -c 'print(1)'").exit_code == 0 ? 1 : 0;
  }
  return cached == 1;
}

// Runs the reference interpreter on a file through the rendering oracle;
// returns the JSON line {"stdout": ..., "variables": {...}}.
inline std::optional<std::string> python_oracle(const std::string& program_path) {
  std::string script = repo_path("tests/data/oracle_render.py");
  CommandResult result = run_command("python3 \"" + script + "\" \"" + program_path + "\"");
  if (result.exit_code != 0) return std::nullopt;
  return result.output;
}

inline std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = bin_path("tmp_" + name);
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace testutil
