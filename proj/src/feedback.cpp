#include "safexec/feedback.hpp"

#include <nlohmann/json.hpp>

#include "safexec/printer.hpp"

namespace safexec {

namespace {

// First 'quoted' substring of a guard message; our message formats put the
// offending symbol there.
std::string extract_quoted(const std::string& message) {
  size_t first = message.find('\'');
  if (first == std::string::npos) return "";
  size_t second = message.find('\'', first + 1);
  if (second == std::string::npos) return "";
  return message.substr(first + 1, second - first - 1);
}

std::string guidance_for(RiskCategory category, const std::string& offending,
                         const std::string& detail, ViolationRule rule) {
  const std::string sym = offending.empty() ? "the offending construct" : "'" + offending + "'";
  const bool is_import =
      rule == ViolationRule::ImportNotAllowed || detail.rfind("import", 0) == 0 ||
      detail.find("import of") != std::string::npos;
  switch (category) {
    case RiskCategory::ToolNotAllowed:
      return "The generated code failed to execute because it calls " + sym +
             ", which is not a declared tool. Please regenerate using only the declared tools.";
    case RiskCategory::ToolError:
      return "The generated code failed because tool " + sym +
             " failed at runtime (" + detail + "). Please regenerate with a fallback or without "
             "this tool call.";
    case RiskCategory::CodeInjection:
      if (is_import) {
        return "The generated code failed to execute because it imports " + sym +
               ", which is not allowed. Please regenerate without this import.";
      }
      return "The generated code failed to execute because it contains the " + sym +
             " call, which is not allowed. Please regenerate without this function call.";
    case RiskCategory::InfiniteLoop:
      return "The generated code contains a loop with no reachable exit condition. Please "
             "regenerate with a bounded loop.";
    case RiskCategory::UnsafeReflection:
      return "The generated code accesses the dunder attribute " + sym +
             ", which is not allowed. Please regenerate without reflective attribute access.";
    case RiskCategory::Deserialization:
      return "The generated code imports " + sym +
             " to deserialize untrusted data, which is not allowed. Please regenerate without "
             "this import.";
    case RiskCategory::UntrustedInclusion:
      return "The generated code imports " + sym +
             ", which can pull in functionality from an untrusted source. Please regenerate "
             "without this import.";
    case RiskCategory::ResourceExhaustion:
      return "The generated code exceeded a resource limit (" + detail +
             "). Please regenerate with smaller bounds on loops, recursion, and data sizes.";
    case RiskCategory::OutOfBoundsWrite:
      return "The generated code accesses a collection outside its bounds (" + detail +
             "). Please regenerate with valid indices.";
    case RiskCategory::TypeConfusion:
      return "The generated code failed with a type error: " + detail +
             ". Please regenerate with consistent types.";
    case RiskCategory::Deadlock:
      return "The generated code can deadlock. Please regenerate without blocking "
             "synchronization.";
    case RiskCategory::FileAccess:
      return "The generated code accesses files, which is not allowed. Please regenerate "
             "without file access.";
    case RiskCategory::ResourceLeak:
      return "The generated code acquires a resource it never releases. Please regenerate with "
             "proper cleanup.";
    case RiskCategory::OperationalError:
      return "The generated code failed with an operational error: " + detail +
             ". Please correct it and regenerate.";
    case RiskCategory::NoRisk:
      return "";
  }
  return "";
}

}  // namespace

RiskCategory classify(const ExecutionOutcome& outcome, const ValidationReport& validation) {
  if (outcome.status == ExecStatus::Completed) return RiskCategory::NoRisk;
  if (validation.verdict == Verdict::Blocked && !validation.violations.empty()) {
    return validation.violations.front().category;
  }
  if (!outcome.exception) return RiskCategory::OperationalError;
  const ExceptionRecord& exc = *outcome.exception;
  switch (exc.kind) {
    case ExcKind::FunctionNotAllowedError: {
      std::string name = extract_quoted(exc.message);
      return is_well_known_builtin(name) ? RiskCategory::CodeInjection
                                         : RiskCategory::ToolNotAllowed;
    }
    case ExcKind::WhileTrueError:
      return RiskCategory::InfiniteLoop;
    case ExcKind::ImportNotAllowedError:
      return import_category(extract_quoted(exc.message));
    case ExcKind::TimeoutException:
    case ExcKind::NestedLoopDepthThresholdReachedError:
    case ExcKind::OverflowError:
    case ExcKind::StackDepthException:
      return RiskCategory::ResourceExhaustion;
    case ExcKind::OutOfBoundsError:
      return RiskCategory::OutOfBoundsWrite;
    case ExcKind::TypeError:
      return RiskCategory::TypeConfusion;
    case ExcKind::KeyError:
    case ExcKind::DivideByZeroError:
      return RiskCategory::OperationalError;
    case ExcKind::ToolError:
      return RiskCategory::ToolError;
    case ExcKind::NodeNotAllowedError:
      return RiskCategory::CodeInjection;
  }
  return RiskCategory::OperationalError;
}

FeedbackReport render_report(const std::string& code, const ValidationReport& validation,
                             const ExecutionOutcome& outcome) {
  FeedbackReport report;
  report.input_code = code;
  report.category = classify(outcome, validation);

  if (outcome.status == ExecStatus::Completed) {
    report.result = "Code executed successfully.";
    report.exception = "None";
  } else {
    report.result = "Code failed to execute.";
    if (outcome.exception) {
      const std::string& message = outcome.exception->message;
      size_t last_newline = message.find_last_of('\n');
      std::string last_line =
          last_newline == std::string::npos ? message : message.substr(last_newline + 1);
      report.exception =
          std::string(exc_kind_name(outcome.exception->kind)) + ": " + last_line;
    } else {
      report.exception = "None";
    }
  }
  report.console_output = outcome.console_output.empty() ? "None" : outcome.console_output;
  report.last_state = outcome.final_variables;

  if (outcome.status != ExecStatus::Completed) {
    std::string offending;
    std::string detail;
    ViolationRule rule = ViolationRule::KindNotAllowed;
    if (validation.verdict == Verdict::Blocked && !validation.violations.empty()) {
      offending = validation.violations.front().offending;
      detail = validation.violations.front().detail;
      rule = validation.violations.front().rule;
    } else if (outcome.exception) {
      offending = extract_quoted(outcome.exception->message);
      detail = outcome.exception->message;
      if (outcome.exception->kind == ExcKind::ImportNotAllowedError) {
        rule = ViolationRule::ImportNotAllowed;
      }
    }
    report.guidance = guidance_for(report.category, offending, detail, rule);
  }
  return report;
}

std::string report_text(const FeedbackReport& report) {
  std::string state = "{";
  for (size_t i = 0; i < report.last_state.size(); ++i) {
    if (i) state += ", ";
    state += quote_string(report.last_state[i].first);
    state += ": ";
    state += quote_string(report.last_state[i].second);
  }
  state += "}";

  std::string out;
  out += "Input Code - " + report.input_code + "\n";
  out += "Result - " + report.result + "\n";
  out += "Exception - " + report.exception + "\n";
  out += "Console output - " + report.console_output + "\n";
  out += "Last state of variables - " + state + "\n";
  return out;
}

std::string default_repair_template() {
  return
      "The code below was blocked or failed under the safe execution policy. Rewrite it so it "
      "runs cleanly under the same policy.\n"
      "\n"
      "Instructions:\n"
      "- Use the feedback to remove the blocked construct or fix the failure.\n"
      "- Keep the original logic and variable names wherever possible.\n"
      "- Reply with code only, no surrounding text.\n"
      "\n"
      "Unsafe Code:\n"
      "{unsafe_code}\n"
      "\n"
      "Feedback for Improvement:\n"
      "{feedback}\n";
}

std::string build_repair_prompt(const std::string& template_text, const std::string& code,
                                const std::string& feedback) {
  std::string out = template_text;
  auto replace_all = [&out](const std::string& key, const std::string& value) {
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all("{unsafe_code}", code);
  replace_all("{feedback}", feedback);
  return out;
}

RepairSession run_repair_loop(const std::string& initial_code, const PolicyConfig& policy,
                              const ToolRegistry* tools, const Generator& generator,
                              int max_retries, const std::string& repair_template,
                              const ExecOptions& exec) {
  RepairSession session;
  session.max_retries = max_retries;
  const size_t max_attempts = static_cast<size_t>(max_retries) + 1;
  std::string code = initial_code;

  while (session.attempts.size() < max_attempts) {
    RunConfig config;
    config.exec = exec;
    RunResult run = run_source({code, "repair-loop"}, policy, tools, config);

    RepairAttempt attempt;
    attempt.code = code;
    attempt.validation = run.validation;
    attempt.outcome = run.outcome;
    attempt.report = render_report(code, run.validation, run.outcome);
    const bool completed = run.outcome.status == ExecStatus::Completed;
    session.attempts.push_back(std::move(attempt));
    if (completed) {
      session.repaired = true;
      break;
    }
    if (session.attempts.size() >= max_attempts) break;

    const RepairAttempt& last = session.attempts.back();
    std::string prompt = build_repair_prompt(
        repair_template, code, report_text(last.report) + "Feedback - " + last.report.guidance);
    try {
      code = generator(prompt);
    } catch (const std::exception& e) {
      RepairAttempt failure;
      failure.code = code;
      failure.generator_failure = true;
      failure.outcome.status = ExecStatus::Failed;
      failure.outcome.exception =
          ExceptionRecord{ExcKind::ToolError,
                          std::string("text generator failed: ") + e.what(),
                          {},
                          {"<module>"}};
      failure.report.input_code = code;
      failure.report.result = "Code regeneration failed.";
      failure.report.exception = failure.outcome.exception->message;
      failure.report.console_output = "None";
      failure.report.category = RiskCategory::OperationalError;
      failure.report.guidance = "The text generator failed; no new code was produced.";
      session.attempts.push_back(std::move(failure));
    }
  }
  return session;
}

std::string serialize_session(const RepairSession& session) {
  std::string out;
  for (size_t i = 0; i < session.attempts.size(); ++i) {
    const RepairAttempt& attempt = session.attempts[i];
    nlohmann::ordered_json line;
    line["attempt"] = i + 1;
    line["code"] = attempt.code;
    line["generator_failure"] = attempt.generator_failure;
    line["verdict"] = attempt.validation.verdict == Verdict::Allowed ? "Allowed" : "Blocked";
    line["status"] = exec_status_name(attempt.outcome.status);
    if (attempt.outcome.exception) {
      line["exception_kind"] = exc_kind_name(attempt.outcome.exception->kind);
    } else {
      line["exception_kind"] = nullptr;
    }
    line["category"] = risk_category_name(attempt.report.category);
    line["guidance"] = attempt.report.guidance;
    if (i + 1 == session.attempts.size()) {
      line["terminal"] = session.repaired ? "Repaired" : "GaveUp";
    } else {
      line["terminal"] = nullptr;
    }
    out += line.dump();
    out += "\n";
  }
  return out;
}

}  // namespace safexec
