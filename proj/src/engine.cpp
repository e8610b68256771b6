#include "safexec/engine.hpp"

namespace safexec {

ExcKind violation_exc_kind(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::KindNotAllowed: return ExcKind::NodeNotAllowedError;
    case ViolationRule::ImportNotAllowed: return ExcKind::ImportNotAllowedError;
    case ViolationRule::CallNotAllowed: return ExcKind::FunctionNotAllowedError;
    case ViolationRule::DunderAccess: return ExcKind::NodeNotAllowedError;
    case ViolationRule::WhileTrue: return ExcKind::WhileTrueError;
    case ViolationRule::NestedLoopDepth: return ExcKind::NestedLoopDepthThresholdReachedError;
    case ViolationRule::SyntaxOutsideGrammar: return ExcKind::NodeNotAllowedError;
    case ViolationRule::MalformedSyntax: return ExcKind::NodeNotAllowedError;
  }
  return ExcKind::NodeNotAllowedError;
}

RunResult run_source(const SourceProgram& src, const PolicyConfig& policy,
                     const ToolRegistry* tools, const RunConfig& config) {
  RunResult result;
  result.validation.policy_id = policy.policy_id;

  ParseResult parsed = parse(src);
  if (!parsed.ok()) {
    result.diagnostics = parsed.diagnostics;
    const SyntaxDiagnostic& diag = parsed.diagnostics.front();
    Violation violation;
    violation.span = diag.span;
    violation.detail = diag.message;
    if (diag.outside_safe_grammar) {
      violation.category = RiskCategory::CodeInjection;
      violation.offending = diag.offending;
      violation.rule = ViolationRule::SyntaxOutsideGrammar;
    } else {
      violation.category = RiskCategory::OperationalError;
      violation.offending = "syntax";
      violation.rule = ViolationRule::MalformedSyntax;
    }
    result.validation.verdict = Verdict::Blocked;
    result.validation.violations.push_back(violation);

    // Grammar violations block; plain malformed syntax is an ordinary
    // failure the caller may surface differently.
    result.outcome.status =
        diag.outside_safe_grammar ? ExecStatus::Blocked : ExecStatus::Failed;
    result.outcome.exception =
        ExceptionRecord{violation_exc_kind(violation.rule), diag.message, diag.span,
                        {"<module>"}};
    return result;
  }

  result.parsed = true;
  result.tree = std::move(parsed.tree);

  if (!config.skip_validation) {
    result.validation = validate_tree(*result.tree, policy);
    if (!result.validation.allowed()) {
      const Violation& first = result.validation.violations.front();
      result.outcome.status = ExecStatus::Blocked;
      result.outcome.exception = ExceptionRecord{violation_exc_kind(first.rule), first.detail,
                                                 first.span, {"<module>"}};
      return result;
    }
  } else {
    result.validation.verdict = Verdict::Allowed;
    result.validation.node_count = result.tree->node_count;
  }

  result.outcome = execute(*result.tree, policy, tools, config.exec);
  return result;
}

}  // namespace safexec
