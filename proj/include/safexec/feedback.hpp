#pragma once

#include <functional>
#include <string>
#include <vector>

#include "safexec/engine.hpp"
#include "safexec/risk.hpp"

namespace safexec {

// The structured report sent upstream after each run. Serializes to the
// fixed five-field text layout (see report_text).
struct FeedbackReport {
  std::string input_code;
  std::string result;
  std::string exception;       // last line of the exception message, or "None"
  std::string console_output;  // entire console log, or "None"
  std::vector<std::pair<std::string, std::string>> last_state;
  RiskCategory category{RiskCategory::NoRisk};
  std::string guidance;
};

// Deterministic risk classification: validator categories pass through,
// executor exception kinds map by a fixed table.
RiskCategory classify(const ExecutionOutcome& outcome, const ValidationReport& validation);

FeedbackReport render_report(const std::string& code, const ValidationReport& validation,
                             const ExecutionOutcome& outcome);

// The five-field template block.
std::string report_text(const FeedbackReport& report);

// Fills {unsafe_code} and {feedback} in the repair prompt template.
std::string build_repair_prompt(const std::string& template_text, const std::string& code,
                                const std::string& feedback);
std::string default_repair_template();

using Generator = std::function<std::string(const std::string& prompt)>;

struct RepairAttempt {
  std::string code;
  ValidationReport validation;
  ExecutionOutcome outcome;
  FeedbackReport report;
  bool generator_failure{false};
};

struct RepairSession {
  std::vector<RepairAttempt> attempts;
  int max_retries{0};
  bool repaired{false};
};

// validate -> execute -> report -> regenerate, bounded by max_retries.
// Generator failures are recorded as OperationalError attempts and consume
// a retry.
RepairSession run_repair_loop(const std::string& initial_code, const PolicyConfig& policy,
                              const ToolRegistry* tools, const Generator& generator,
                              int max_retries,
                              const std::string& repair_template = default_repair_template(),
                              const ExecOptions& exec = {});

// One attempt per line, JSON.
std::string serialize_session(const RepairSession& session);

}  // namespace safexec
