#pragma once

#include "safexec/interpreter.hpp"
#include "safexec/parser.hpp"
#include "safexec/validator.hpp"

namespace safexec {

// Full parse -> validate -> execute pipeline over one program. Parse and
// validation failures are folded into a Blocked/Failed outcome so every
// program yields exactly one ExecutionOutcome.
struct RunResult {
  bool parsed{false};
  std::optional<SyntaxTree> tree;
  std::vector<SyntaxDiagnostic> diagnostics;
  ValidationReport validation;
  ExecutionOutcome outcome;
};

struct RunConfig {
  ExecOptions exec;
  bool skip_validation{false};  // guards still re-enforce dynamically
};

RunResult run_source(const SourceProgram& src, const PolicyConfig& policy,
                     const ToolRegistry* tools = nullptr, const RunConfig& config = {});

// Exception kind reported when a static rule blocks a program.
ExcKind violation_exc_kind(ViolationRule rule);

}  // namespace safexec
