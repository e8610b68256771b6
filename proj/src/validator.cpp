#include "safexec/validator.hpp"

#include <unordered_set>

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

bool is_dunder(const std::string& name) {
  return name.size() > 4 && name.compare(0, 2, "__") == 0 &&
         name.compare(name.size() - 2, 2, "__") == 0;
}

bool const_truthy(const AstNode& node) {
  if (node.kind != NodeKind::Const) return false;
  switch (node.const_tag) {
    case ConstTag::NoneLit: return false;
    case ConstTag::Bool: return node.bval;
    case ConstTag::Int: return mpz_sgn(node.ival.get_mpz_t()) != 0;
    case ConstTag::Float: return node.fval != 0.0;
    case ConstTag::Str: return !node.text.empty();
  }
  return false;
}

class Walker {
 public:
  Walker(const PolicyConfig& policy, std::vector<Violation>& out)
      : policy_(policy), out_(out) {
    scopes_.emplace_back();
  }

  void walk(const AstNode& node) {
    checkKind(node);
    switch (node.kind) {
      case NodeKind::Import:
      case NodeKind::ImportFrom:
        checkImport(node);
        break;
      case NodeKind::Call:
        checkCall(node);
        break;
      case NodeKind::Attribute:
        checkDunder(node);
        break;
      case NodeKind::Assign:
        // A name bound directly to a lambda counts as a defined function.
        if (node.children[0].kind == NodeKind::Name &&
            node.children[1].kind == NodeKind::Lambda) {
          walk(node.children[0]);
          walk(node.children[1]);
          scopes_.back().insert(node.children[0].text);
          return;
        }
        break;
      case NodeKind::While:
        checkWhileTrue(node);
        walkLoop(node, 1);
        return;
      case NodeKind::For:
        walkLoop(node, 2);
        return;
      case NodeKind::ListComp:
      case NodeKind::DictComp: {
        ++loop_depth_;
        checkLoopDepth(node);
        for (const AstNode& child : node.children) walk(child);
        --loop_depth_;
        return;
      }
      case NodeKind::FunctionDef: {
        scopes_.back().insert(node.text);
        int saved_depth = loop_depth_;
        loop_depth_ = 0;
        scopes_.emplace_back();
        scopes_.back().insert(node.text);  // recursion
        for (const AstNode& child : node.children) walk(child);
        scopes_.pop_back();
        loop_depth_ = saved_depth;
        return;
      }
      case NodeKind::Lambda: {
        int saved_depth = loop_depth_;
        loop_depth_ = 0;
        for (const AstNode& child : node.children) walk(child);
        loop_depth_ = saved_depth;
        return;
      }
      default:
        break;
    }
    for (const AstNode& child : node.children) walk(child);
  }

 private:
  const PolicyConfig& policy_;
  std::vector<Violation>& out_;
  std::vector<std::unordered_set<std::string>> scopes_;
  int loop_depth_{0};

  void add(RiskCategory category, std::string detail, Span span, std::string offending,
           ViolationRule rule) {
    out_.push_back({category, std::move(detail), span, std::move(offending), rule});
  }

  void checkKind(const AstNode& node) {
    if (!policy_.kind_allowed(node.kind)) {
      add(RiskCategory::CodeInjection,
          std::string("syntax element '") + kind_name(node.kind) +
              "' is outside the allowed grammar subset",
          node.span, kind_name(node.kind), ViolationRule::KindNotAllowed);
    }
  }

  void checkImport(const AstNode& node) {
    if (!policy_.allowed_imports.count(node.text)) {
      add(import_category(node.text),
          "import of '" + node.text + "' is not in the allowed imports", node.span, node.text,
          ViolationRule::ImportNotAllowed);
    }
  }

  void checkCall(const AstNode& node) {
    const AstNode& callee = node.children[0];
    if (callee.kind != NodeKind::Name) return;  // attribute calls gated by import rule
    const std::string& name = callee.text;
    if (policy_.find_tool(name) != nullptr) return;
    if (policy_.allowed_builtins.count(name)) return;
    if (definedEarlier(name)) return;
    if (is_well_known_builtin(name)) {
      add(RiskCategory::CodeInjection,
          "call to '" + name + "' is not in the allowed builtins", callee.span, name,
          ViolationRule::CallNotAllowed);
    } else {
      add(RiskCategory::ToolNotAllowed,
          "call to '" + name + "' does not match any declared tool or allowed builtin",
          callee.span, name, ViolationRule::CallNotAllowed);
    }
  }

  bool definedEarlier(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->count(name)) return true;
    }
    return false;
  }

  void checkDunder(const AstNode& node) {
    if (!policy_.allowed_dunder_access && is_dunder(node.text)) {
      add(RiskCategory::UnsafeReflection,
          "access to dunder attribute '" + node.text + "' is not allowed", node.span, node.text,
          ViolationRule::DunderAccess);
    }
  }

  void checkWhileTrue(const AstNode& node) {
    const AstNode& test = node.children[0];
    if (const_truthy(test) && !loop_has_break(node)) {
      add(RiskCategory::InfiniteLoop,
          "'while' loop with a constant-true test and no reachable break in its body",
          node.span, "while", ViolationRule::WhileTrue);
    }
  }

  void checkLoopDepth(const AstNode& node) {
    if (loop_depth_ == policy_.limits.max_nested_loop_depth + 1) {
      // Reported once, at the first loop that crosses the bound.
      add(RiskCategory::ResourceExhaustion,
          "loops nest " + std::to_string(loop_depth_) + " deep, exceeding the configured limit of " +
              std::to_string(policy_.limits.max_nested_loop_depth),
          node.span, "loop nesting", ViolationRule::NestedLoopDepth);
    }
  }

  void walkLoop(const AstNode& node, size_t body_offset) {
    for (size_t i = 0; i < body_offset; ++i) walk(node.children[i]);
    ++loop_depth_;
    checkLoopDepth(node);
    for (size_t i = body_offset; i < node.children.size(); ++i) walk(node.children[i]);
    --loop_depth_;
  }
};

}  // namespace

bool loop_has_break(const AstNode& loop) {
  for (const AstNode& child : loop.children) {
    if (child.kind == NodeKind::Break) return true;
    // A break inside a nested loop or function body belongs to that
    // construct, not to the loop under test.
    if (child.kind == NodeKind::For || child.kind == NodeKind::While ||
        child.kind == NodeKind::FunctionDef || child.kind == NodeKind::Lambda) {
      continue;
    }
    if (loop_has_break(child)) return true;
  }
  return false;
}

RiskCategory import_category(const std::string& module) {
  if (module == "pickle") return RiskCategory::Deserialization;
  if (module == "socket" || module == "requests") return RiskCategory::UntrustedInclusion;
  return RiskCategory::CodeInjection;
}

bool is_well_known_builtin(const std::string& name) {
  static const std::unordered_set<std::string> kKnown = {
      "abs",      "aiter",     "all",       "any",      "anext",     "ascii",    "bin",
      "bool",     "breakpoint", "bytearray", "bytes",    "callable",  "chr",      "classmethod",
      "compile",  "complex",   "delattr",   "dict",     "dir",       "divmod",   "enumerate",
      "eval",     "exec",      "filter",    "float",    "format",    "frozenset", "getattr",
      "globals",  "hasattr",   "hash",      "help",     "hex",       "id",       "input",
      "int",      "isinstance", "issubclass", "iter",   "len",       "list",     "locals",
      "map",      "max",       "memoryview", "min",     "next",      "object",   "oct",
      "open",     "ord",       "pow",       "print",    "property",  "range",    "repr",
      "reversed", "round",     "set",       "setattr",  "slice",     "sorted",   "staticmethod",
      "str",      "sum",       "super",     "tuple",    "type",      "vars",     "zip",
      "__import__",
  };
  return kKnown.count(name) > 0;
}

ValidationReport validate_tree(const SyntaxTree& tree, const PolicyConfig& policy) {
  ValidationReport report;
  report.policy_id = policy.policy_id;
  report.node_count = tree.node_count ? tree.node_count : count_nodes(tree.root);
  Walker walker(policy, report.violations);
  walker.walk(tree.root);
  report.verdict = report.violations.empty() ? Verdict::Allowed : Verdict::Blocked;
  return report;
}

std::string explain_violation(const Violation& violation) {
  return "Blocked: " + violation.detail +
         " (category: " + risk_category_display(violation.category) + ").";
}

std::string serialize_validation_report(const ValidationReport& report) {
  nlohmann::ordered_json out;
  out["verdict"] = report.verdict == Verdict::Allowed ? "Allowed" : "Blocked";
  out["policy_id"] = report.policy_id;
  nlohmann::ordered_json violations = nlohmann::ordered_json::array();
  for (const Violation& v : report.violations) {
    nlohmann::ordered_json item;
    item["category"] = risk_category_name(v.category);
    item["detail"] = v.detail;
    item["offending"] = v.offending;
    item["span"] =
        nlohmann::ordered_json::array({v.span.start_line, v.span.start_col, v.span.end_line,
                                       v.span.end_col});
    violations.push_back(item);
  }
  out["violations"] = violations;
  return out.dump();
}

}  // namespace safexec
