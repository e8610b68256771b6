#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safexec/clock.hpp"
#include "safexec/policy.hpp"
#include "safexec/value.hpp"

namespace safexec {

enum class AttemptOutcome : uint8_t { Ok, Timeout, Error };

const char* attempt_outcome_name(AttemptOutcome outcome);

struct AttemptResult {
  AttemptOutcome outcome{AttemptOutcome::Error};
  Value value;          // meaningful when outcome == Ok
  std::string error;    // meaningful when outcome == Error
  double elapsed_ms{0};
};

// The isolation boundary the executor talks through. A transport performs
// exactly one attempt and is responsible for honoring the per-call timeout.
class ToolTransport {
 public:
  virtual ~ToolTransport() = default;
  virtual AttemptResult attempt(const ToolSpec& spec, const std::vector<Value>& args,
                                int64_t timeout_ms) = 0;
};

using ToolHandler = std::function<Value(const std::vector<Value>&)>;

// Default in-process transport: runs registered handlers synchronously and
// reports a timeout post hoc when a handler overruns its budget. Handlers
// are trusted embedder code; preemptive isolation belongs to out-of-process
// transports.
class CallableTransport : public ToolTransport {
 public:
  explicit CallableTransport(Clock& clock = SteadyClock::instance()) : clock_(clock) {}
  void bind(const std::string& name, ToolHandler handler);
  bool has(const std::string& name) const { return handlers_.count(name) > 0; }
  AttemptResult attempt(const ToolSpec& spec, const std::vector<Value>& args,
                        int64_t timeout_ms) override;

 private:
  Clock& clock_;
  std::map<std::string, ToolHandler> handlers_;
};

// Test transport driven by a scripted list of per-attempt behaviors:
// [{outcome: "ok"|"timeout"|"error", value?, delay_ms?}] consumed in order.
class ScriptedTransport : public ToolTransport {
 public:
  struct Step {
    AttemptOutcome outcome{AttemptOutcome::Error};
    Value value;
    std::string error{"scripted failure"};
    int64_t delay_ms{0};
  };

  ScriptedTransport(std::vector<Step> steps, Clock& clock)
      : steps_(std::move(steps)), clock_(clock) {}

  // Parses the JSON fixture format documented above.
  static std::vector<Step> parse_fixture(const std::string& json_text);

  AttemptResult attempt(const ToolSpec& spec, const std::vector<Value>& args,
                        int64_t timeout_ms) override;

  size_t consumed() const { return next_; }

 private:
  std::vector<Step> steps_;
  Clock& clock_;
  size_t next_{0};
};

struct ArgError {
  std::string message;
  std::string slot;  // name of the first mismatching slot, or "" for arity
};

// Arity and coarse type check; Int satisfies float slots.
std::optional<ArgError> check_args(const ToolSpec& spec, const std::vector<Value>& args);

// JSON bridge for tool payloads crossing a process boundary: null/bool/
// number/string/array/object only. Parsing an unsupported shape throws
// std::runtime_error.
std::string value_to_json_text(const Value& value);
Value value_from_json_text(const std::string& text);

struct ToolAttemptRecord {
  double elapsed_ms{0};
  AttemptOutcome outcome{AttemptOutcome::Error};
};

struct ToolCallRecord {
  std::string tool;
  std::vector<std::string> args_rendered;
  int attempts{0};
  std::vector<ToolAttemptRecord> per_attempt;
  std::vector<int64_t> backoff_delays_ms;
  bool ok{false};
  std::string final_rendered;  // value repr on success, reason on failure
};

struct ToolInvokeResult {
  bool ok{false};
  Value value;
  std::string error;
  ToolCallRecord record;
};

// Declared tools bound to a transport. Immutable once executions start.
class ToolRegistry {
 public:
  explicit ToolRegistry(std::shared_ptr<ToolTransport> transport = nullptr)
      : transport_(std::move(transport)) {}

  // Registers a spec; fails (returns false) on duplicate names.
  bool register_tool(const ToolSpec& spec);
  // Convenience: registers spec and binds an in-process handler.
  bool register_tool(const ToolSpec& spec, ToolHandler handler);

  const ToolSpec* find(const std::string& name) const;
  void set_transport(std::shared_ptr<ToolTransport> transport) {
    transport_ = std::move(transport);
  }
  ToolTransport* transport() const { return transport_.get(); }

  // Argument names matching any of these substrings render redacted in call
  // records.
  void set_redaction_patterns(std::vector<std::string> patterns) {
    redaction_patterns_ = std::move(patterns);
  }

  // Runs the retry-with-backoff protocol for one call. `deadline_ms` is the
  // executing program's absolute deadline; attempts and backoff sleeps stop
  // when it passes (deadline_hit set in that case).
  ToolInvokeResult invoke(const ToolSpec& spec, const std::vector<Value>& args, Clock& clock,
                          int64_t deadline_ms, bool& deadline_hit) const;

 private:
  std::map<std::string, ToolSpec> specs_;
  std::shared_ptr<ToolTransport> transport_;
  std::vector<std::string> redaction_patterns_{"password", "secret", "token"};

  std::string render_arg(const ToolSpec& spec, size_t index, const Value& value) const;
};

}  // namespace safexec
