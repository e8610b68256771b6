#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safexec/ast.hpp"
#include "safexec/clock.hpp"
#include "safexec/policy.hpp"
#include "safexec/tools.hpp"
#include "safexec/value.hpp"

namespace safexec {

#define SAFEXEC_EXC_KINDS(X)                                                                  \
  X(FunctionNotAllowedError)                                                                  \
  X(WhileTrueError)                                                                           \
  X(ImportNotAllowedError)                                                                    \
  X(TimeoutException)                                                                         \
  X(KeyError)                                                                                 \
  X(StackDepthException)                                                                      \
  X(TypeError)                                                                                \
  X(OverflowError)                                                                            \
  X(NodeNotAllowedError)                                                                      \
  X(NestedLoopDepthThresholdReachedError)                                                     \
  X(DivideByZeroError)                                                                        \
  X(ToolError)                                                                                \
  X(OutOfBoundsError)

enum class ExcKind : uint8_t {
#define X(name) name,
  SAFEXEC_EXC_KINDS(X)
#undef X
};

constexpr int kExcKindCount = 0
#define X(name) +1
    SAFEXEC_EXC_KINDS(X)
#undef X
    ;

const char* exc_kind_name(ExcKind kind);
bool exc_kind_from_name(const std::string& name, ExcKind& out);

struct ExceptionRecord {
  ExcKind kind{ExcKind::TypeError};
  std::string message;
  Span span{};
  std::vector<std::string> stack_summary;  // outermost first, "<module>" at [0]
};

enum class ExecStatus : uint8_t { Completed, Blocked, Failed };

const char* exec_status_name(ExecStatus status);

struct ExecutionOutcome {
  ExecStatus status{ExecStatus::Completed};
  std::optional<ExceptionRecord> exception;
  std::string console_output;
  std::vector<std::pair<std::string, std::string>> final_variables;  // insertion order
  uint64_t steps_used{0};
  double elapsed_ms{0};
  std::vector<ToolCallRecord> tool_trace;
};

// JSON form {status, exception?, console_output, final_variables, steps_used,
// elapsed_ms, tool_trace[]}.
std::string serialize_outcome(const ExecutionOutcome& outcome, bool pretty = false);

struct ExecOptions {
  uint64_t rng_seed{0};
  Clock* clock{nullptr};                   // defaults to the steady clock
  std::vector<std::string>* trace{nullptr};  // per-node guarded steps when set
};

// Runs a parsed tree under the policy's runtime guards. Validation is not
// assumed: every static rule is re-enforced dynamically.
ExecutionOutcome execute(const SyntaxTree& tree, const PolicyConfig& policy,
                         const ToolRegistry* tools = nullptr, const ExecOptions& opts = {});

}  // namespace safexec
