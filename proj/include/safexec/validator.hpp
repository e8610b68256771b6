#pragma once

#include <string>
#include <vector>

#include "safexec/ast.hpp"
#include "safexec/policy.hpp"
#include "safexec/risk.hpp"

namespace safexec {

enum class Verdict : uint8_t { Allowed, Blocked };

// Which static rule fired; drives the exception kind the pipeline reports
// for validation blocks.
enum class ViolationRule : uint8_t {
  KindNotAllowed,
  ImportNotAllowed,
  CallNotAllowed,
  DunderAccess,
  WhileTrue,
  NestedLoopDepth,
  SyntaxOutsideGrammar,  // synthesized from parse diagnostics
  MalformedSyntax,
};

struct Violation {
  RiskCategory category{RiskCategory::OperationalError};
  std::string detail;
  Span span{};
  std::string offending;  // node kind, function name, or module name
  ViolationRule rule{ViolationRule::KindNotAllowed};
};

struct ValidationReport {
  Verdict verdict{Verdict::Allowed};
  std::vector<Violation> violations;
  std::string policy_id;
  size_t node_count{0};

  bool allowed() const { return verdict == Verdict::Allowed; }
};

// Static gate over a parsed tree: node-kind allowlist, import allowlist,
// callable resolution (tools > builtins > user functions defined earlier),
// dunder-attribute blocking, the obvious-infinite-loop rule, and the static
// nested-loop depth bound. Accumulates every violation.
ValidationReport validate_tree(const SyntaxTree& tree, const PolicyConfig& policy);

// One-sentence human-readable explanation, deterministic per violation.
std::string explain_violation(const Violation& violation);

// Category for a blocked import, shared with the feedback classifier.
RiskCategory import_category(const std::string& module);

// Whether a name is a builtin in the reference language at large (not just
// our engine). Unknown names in call position look like hallucinated tools.
bool is_well_known_builtin(const std::string& name);

// True when a loop body contains a break belonging to that loop. Shared by
// the static check and the executor's dynamic mirror of it.
bool loop_has_break(const AstNode& loop);

std::string serialize_validation_report(const ValidationReport& report);

}  // namespace safexec
