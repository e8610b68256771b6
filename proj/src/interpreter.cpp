#include "safexec/interpreter.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "safexec/numfmt.hpp"
#include "safexec/printer.hpp"
#include "src/interp_internal.hpp"

namespace safexec {

namespace {

const char* const kExcKindNames[] = {
#define X(name) #name,
    SAFEXEC_EXC_KINDS(X)
#undef X
};

constexpr size_t kConsoleLimit = 8 * 1024 * 1024;

}  // namespace

const char* exc_kind_name(ExcKind kind) { return kExcKindNames[static_cast<size_t>(kind)]; }

bool exc_kind_from_name(const std::string& name, ExcKind& out) {
  for (int i = 0; i < kExcKindCount; ++i) {
    if (name == kExcKindNames[i]) {
      out = static_cast<ExcKind>(i);
      return true;
    }
  }
  return false;
}

const char* exec_status_name(ExecStatus status) {
  switch (status) {
    case ExecStatus::Completed: return "Completed";
    case ExecStatus::Blocked: return "Blocked";
    case ExecStatus::Failed: return "Failed";
  }
  return "?";
}

std::string serialize_outcome(const ExecutionOutcome& outcome, bool pretty) {
  nlohmann::ordered_json out;
  out["status"] = exec_status_name(outcome.status);
  if (outcome.exception) {
    nlohmann::ordered_json exc;
    exc["kind"] = exc_kind_name(outcome.exception->kind);
    exc["message"] = outcome.exception->message;
    exc["span"] = nlohmann::ordered_json::array(
        {outcome.exception->span.start_line, outcome.exception->span.start_col,
         outcome.exception->span.end_line, outcome.exception->span.end_col});
    exc["stack_summary"] = outcome.exception->stack_summary;
    out["exception"] = exc;
  }
  out["console_output"] = outcome.console_output;
  nlohmann::ordered_json vars = nlohmann::ordered_json::object();
  for (const auto& [name, rendered] : outcome.final_variables) {
    vars[name] = rendered;
  }
  out["final_variables"] = vars;
  out["steps_used"] = outcome.steps_used;
  out["elapsed_ms"] = outcome.elapsed_ms;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const ToolCallRecord& record : outcome.tool_trace) {
    nlohmann::ordered_json item;
    item["tool"] = record.tool;
    item["args_rendered"] = record.args_rendered;
    item["attempts"] = record.attempts;
    nlohmann::ordered_json attempts = nlohmann::ordered_json::array();
    for (const ToolAttemptRecord& attempt : record.per_attempt) {
      nlohmann::ordered_json a;
      a["elapsed_ms"] = attempt.elapsed_ms;
      a["outcome"] = attempt_outcome_name(attempt.outcome);
      attempts.push_back(a);
    }
    item["per_attempt"] = attempts;
    item["backoff_delays"] = record.backoff_delays_ms;
    nlohmann::ordered_json final_obj;
    final_obj["ok"] = record.ok;
    final_obj[record.ok ? "value" : "reason"] = record.final_rendered;
    item["final"] = final_obj;
    trace.push_back(item);
  }
  out["tool_trace"] = trace;
  return pretty ? out.dump(2) : out.dump();
}

ExecutionOutcome execute(const SyntaxTree& tree, const PolicyConfig& policy,
                         const ToolRegistry* tools, const ExecOptions& opts) {
  ExecutionOutcome outcome;
  detail::Interpreter interp(tree, policy, tools, opts, outcome);
  interp.run();
  return outcome;
}

namespace detail {

double float_floordiv(double a, double b) { return std::floor(a / b); }

double float_mod(double a, double b) {
  double m = std::fmod(a, b);
  if (m != 0.0 && ((b < 0.0) != (m < 0.0))) m += b;
  return m;
}

struct Interpreter::LoopGuard {
  Interpreter& interp;
  explicit LoopGuard(Interpreter& in, Span span) : interp(in) {
    ++interp.loop_depth_;
    if (interp.loop_depth_ > interp.policy_.limits.max_nested_loop_depth) {
      interp.trip(ExcKind::NestedLoopDepthThresholdReachedError,
                  "loops nested " + std::to_string(interp.loop_depth_) +
                      " deep at runtime, limit is " +
                      std::to_string(interp.policy_.limits.max_nested_loop_depth),
                  span);
    }
  }
  ~LoopGuard() { --interp.loop_depth_; }
};

Interpreter::Interpreter(const SyntaxTree& tree, const PolicyConfig& policy,
                         const ToolRegistry* tools, const ExecOptions& opts,
                         ExecutionOutcome& outcome)
    : tree_(tree),
      policy_(policy),
      tools_(tools),
      outcome_(outcome),
      clock_(opts.clock ? *opts.clock : SteadyClock::instance()),
      trace_(opts.trace) {
  globals_ = std::make_shared<Env>();
  for (NodeKind kind : policy_.allowed_node_kinds) {
    kind_mask_ |= uint64_t{1} << static_cast<unsigned>(kind);
  }
  mpz_ui_pow_ui(int_threshold_.get_mpz_t(), 10,
                static_cast<unsigned long>(policy_.limits.max_int_magnitude));
}

void Interpreter::run() {
  const int64_t start = clock_.now_ms();
  deadline_ms_ = start + policy_.limits.wall_clock_timeout_ms;
  try {
    exec_block(tree_.root.children.data(), tree_.root.children.data() + tree_.root.children.size(),
               *globals_);
    outcome_.status = ExecStatus::Completed;
  } catch (GuardTrip& trip) {
    outcome_.status = ExecStatus::Blocked;
    outcome_.exception = std::move(trip.rec);
  } catch (ReturnSignal&) {
    outcome_.status = ExecStatus::Blocked;
    outcome_.exception = ExceptionRecord{ExcKind::NodeNotAllowedError,
                                         "'return' outside of a function", {}, stack_summary()};
  } catch (BreakSignal&) {
    outcome_.status = ExecStatus::Blocked;
    outcome_.exception = ExceptionRecord{ExcKind::NodeNotAllowedError,
                                         "'break' outside of a loop", {}, stack_summary()};
  } catch (ContinueSignal&) {
    outcome_.status = ExecStatus::Blocked;
    outcome_.exception = ExceptionRecord{ExcKind::NodeNotAllowedError,
                                         "'continue' outside of a loop", {}, stack_summary()};
  }
  snapshot_globals();
  outcome_.steps_used = steps_;
  outcome_.elapsed_ms = static_cast<double>(clock_.now_ms() - start);
}

void Interpreter::trip(ExcKind kind, std::string message, Span span) {
  throw GuardTrip{{kind, std::move(message), span, stack_summary()}};
}

std::vector<std::string> Interpreter::stack_summary() const {
  std::vector<std::string> summary{"<module>"};
  for (const Frame& frame : frames_) summary.push_back(frame.name);
  return summary;
}

void Interpreter::snapshot_globals() {
  outcome_.final_variables.clear();
  for (const auto& [name, value] : globals_->slots) {
    outcome_.final_variables.emplace_back(name, render_snapshot(value));
  }
}

void Interpreter::step(Span span) {
  if (++steps_ > policy_.limits.max_total_steps) {
    trip(ExcKind::TimeoutException,
         "step budget exhausted (" + std::to_string(policy_.limits.max_total_steps) + " steps)",
         span);
  }
  if (clock_.now_ms() >= deadline_ms_) {
    trip(ExcKind::TimeoutException,
         "wall clock timeout exceeded (" +
             std::to_string(policy_.limits.wall_clock_timeout_ms) + " ms)",
         span);
  }
}

void Interpreter::trace(const char* verb, const AstNode& node) {
  if (trace_ == nullptr) return;
  trace_->push_back(std::string(verb) + "_" + kind_name(node.kind) + " @" +
                    std::to_string(node.span.start_line) + ":" +
                    std::to_string(node.span.start_col));
}

void Interpreter::check_kind(const AstNode& node) {
  if ((kind_mask_ & (uint64_t{1} << static_cast<unsigned>(node.kind))) == 0) {
    trip(ExcKind::NodeNotAllowedError,
         std::string("syntax element '") + kind_name(node.kind) +
             "' is outside the allowed grammar subset",
         node.span);
  }
}

void Interpreter::check_collection(size_t size, Span span) {
  if (size > policy_.limits.max_collection_size) {
    trip(ExcKind::OverflowError,
         "collection size " + std::to_string(size) + " exceeds the limit of " +
             std::to_string(policy_.limits.max_collection_size),
         span);
  }
}

void Interpreter::check_int(const mpz_class& z, Span span) {
  mpz_class magnitude = abs(z);
  if (magnitude >= int_threshold_) {
    trip(ExcKind::OverflowError,
         "integer magnitude exceeds " + std::to_string(policy_.limits.max_int_magnitude) +
             " decimal digits",
         span);
  }
}

void Interpreter::console_write(const std::string& text, Span span) {
  if (outcome_.console_output.size() + text.size() > kConsoleLimit) {
    trip(ExcKind::OverflowError, "console output limit exceeded", span);
  }
  outcome_.console_output += text;
}

// ---- statements ----

void Interpreter::exec_block(const AstNode* begin, const AstNode* end, Env& env) {
  for (const AstNode* it = begin; it != end; ++it) exec_stmt(*it, env);
}

void Interpreter::exec_stmt(const AstNode& node, Env& env) {
  check_kind(node);
  step(node.span);
  trace("execute", node);
  switch (node.kind) {
    case NodeKind::Assign: {
      Value value = eval(node.children[1], env);
      assign_target(node.children[0], std::move(value), env);
      return;
    }
    case NodeKind::AugAssign: {
      const AstNode& target = node.children[0];
      if (target.kind == NodeKind::Name) {
        Value* slot = env.find(target.text);
        if (slot == nullptr) {
          trip(ExcKind::KeyError, "name '" + target.text + "' is not defined", target.span);
        }
        Value current = *slot;
        Value result = binary_op(node.text, current, eval(node.children[1], env), node.span);
        env.set(target.text, std::move(result));
        return;
      }
      if (target.kind == NodeKind::Subscript) {
        check_kind(target);
        Value obj = eval(target.children[0], env);
        if (target.children[1].kind == NodeKind::Slice) {
          trip(ExcKind::TypeError, "augmented assignment to a slice is not supported",
               target.span);
        }
        Value index = eval(target.children[1], env);
        Value current = subscript_get(obj, index, target.span);
        Value result = binary_op(node.text, current, eval(node.children[1], env), node.span);
        subscript_set(obj, index, std::move(result), target.span);
        return;
      }
      trip(ExcKind::TypeError, "unsupported augmented assignment target", target.span);
    }
    case NodeKind::ExprStmt:
      eval(node.children[0], env);
      return;
    case NodeKind::If:
      exec_if(node, env);
      return;
    case NodeKind::While:
      exec_while(node, env);
      return;
    case NodeKind::For:
      exec_for(node, env);
      return;
    case NodeKind::FunctionDef: {
      auto fn = std::make_shared<FunctionObj>();
      fn->name = node.text;
      fn->params = node.names;
      fn->body_owner = &node;
      fn->closure = frames_.empty() ? globals_ : frames_.back().env;
      env.set(node.text, Value::function(fn));
      return;
    }
    case NodeKind::Return: {
      Value value = node.children.empty() ? Value::none() : eval(node.children[0], env);
      throw ReturnSignal{std::move(value)};
    }
    case NodeKind::Break:
      throw BreakSignal{};
    case NodeKind::Continue:
      throw ContinueSignal{};
    case NodeKind::Pass:
      return;
    case NodeKind::Import:
      exec_import(node, env);
      return;
    case NodeKind::ImportFrom:
      exec_import_from(node, env);
      return;
    case NodeKind::Raise: {
      eval(node.children[0], env);
      trip(ExcKind::TypeError, "exceptions must derive from BaseException", node.span);
    }
    default:
      // Expression grammar in statement position cannot reach here.
      eval(node, env);
      return;
  }
}

void Interpreter::exec_if(const AstNode& node, Env& env) {
  const AstNode* then_begin = node.children.data() + 1;
  const AstNode* then_end = then_begin + node.split;
  const AstNode* else_end = node.children.data() + node.children.size();
  if (value_truthy(eval(node.children[0], env))) {
    exec_block(then_begin, then_end, env);
  } else {
    exec_block(then_end, else_end, env);
  }
}

void Interpreter::exec_while(const AstNode& node, Env& env) {
  const AstNode& test = node.children[0];
  // Dynamic mirror of the static obvious-infinite-loop rule.
  bool const_true_test = test.kind == NodeKind::Const && value_truthy(eval_const(test));
  if (const_true_test && !loop_has_break(node)) {
    trip(ExcKind::WhileTrueError,
         "'while' loop with a constant-true test and no reachable break in its body", node.span);
  }
  LoopGuard guard(*this, node.span);
  uint64_t iterations = 0;
  while (true) {
    step(test.span);
    if (!value_truthy(eval(test, env))) break;
    if (++iterations > policy_.limits.max_loop_iterations) {
      trip(ExcKind::TimeoutException,
           "loop iteration budget exceeded (" +
               std::to_string(policy_.limits.max_loop_iterations) + " iterations)",
           node.span);
    }
    try {
      exec_block(node.children.data() + 1, node.children.data() + node.children.size(), env);
    } catch (BreakSignal&) {
      break;
    } catch (ContinueSignal&) {
      continue;
    }
  }
}

void Interpreter::exec_for(const AstNode& node, Env& env) {
  const AstNode& target = node.children[0];
  Value iterable = eval(node.children[1], env);
  LoopGuard guard(*this, node.span);
  uint64_t iterations = 0;
  auto iteration_budget = [&]() {
    if (++iterations > policy_.limits.max_loop_iterations) {
      trip(ExcKind::TimeoutException,
           "loop iteration budget exceeded (" +
               std::to_string(policy_.limits.max_loop_iterations) + " iterations)",
           node.span);
    }
  };
  auto body = [&]() -> bool {  // returns false on break
    try {
      exec_block(node.children.data() + 2, node.children.data() + node.children.size(), env);
    } catch (BreakSignal&) {
      return false;
    } catch (ContinueSignal&) {
    }
    return true;
  };

  if (iterable.is_list()) {
    // Live, index-based iteration matches the reference semantics when the
    // body mutates the list.
    const auto& list = iterable.as_list();
    for (size_t i = 0; i < list->items.size(); ++i) {
      step(node.span);
      iteration_budget();
      assign_target(target, list->items[i], env);
      if (!body()) break;
    }
    return;
  }
  std::vector<Value> items = iterable_snapshot(iterable, node.children[1].span, "for loop");
  for (Value& item : items) {
    step(node.span);
    iteration_budget();
    assign_target(target, std::move(item), env);
    if (!body()) break;
  }
}

void Interpreter::exec_import(const AstNode& node, Env& env) {
  if (!policy_.allowed_imports.count(node.text)) {
    trip(ExcKind::ImportNotAllowedError,
         "import of '" + node.text + "' is not in the allowed imports", node.span);
  }
  env.set(node.text, Value::module(node.text));
}

void Interpreter::exec_import_from(const AstNode& node, Env& env) {
  if (!policy_.allowed_imports.count(node.text)) {
    trip(ExcKind::ImportNotAllowedError,
         "import of '" + node.text + "' is not in the allowed imports", node.span);
  }
  for (const std::string& name : node.names) {
    if (!module_has_attr(node.text, name)) {
      trip(ExcKind::ImportNotAllowedError,
           "cannot import name '" + name + "' from '" + node.text + "'", node.span);
    }
    env.set(name, module_attr(node.text, name, node.span));
  }
}

void Interpreter::assign_target(const AstNode& target, Value value, Env& env) {
  switch (target.kind) {
    case NodeKind::Name:
      env.set(target.text, std::move(value));
      return;
    case NodeKind::Tuple:
    case NodeKind::List: {
      std::vector<Value> items = iterable_snapshot(value, target.span, "unpacking");
      if (items.size() != target.children.size()) {
        trip(ExcKind::TypeError,
             "cannot unpack " + std::to_string(items.size()) + " values into " +
                 std::to_string(target.children.size()) + " targets",
             target.span);
      }
      for (size_t i = 0; i < items.size(); ++i) {
        assign_target(target.children[i], std::move(items[i]), env);
      }
      return;
    }
    case NodeKind::Subscript: {
      check_kind(target);
      Value obj = eval(target.children[0], env);
      if (target.children[1].kind == NodeKind::Slice) {
        trip(ExcKind::TypeError, "slice assignment is not supported", target.span);
      }
      Value index = eval(target.children[1], env);
      subscript_set(obj, index, std::move(value), target.span);
      return;
    }
    case NodeKind::Attribute:
      trip(ExcKind::TypeError,
           "cannot set attribute '" + target.text + "' on a '" +
               eval(target.children[0], env).type_name() + "' object",
           target.span);
    default:
      trip(ExcKind::TypeError, "invalid assignment target", target.span);
  }
}

// ---- expressions ----

Value Interpreter::eval(const AstNode& node, Env& env) {
  check_kind(node);
  step(node.span);
  trace("evaluate", node);
  switch (node.kind) {
    case NodeKind::Const:
      return eval_const(node);
    case NodeKind::Name:
      return eval_name(node, env);
    case NodeKind::BinOp:
      return eval_binop(node, env);
    case NodeKind::UnaryOp: {
      Value operand = eval(node.children[0], env);
      if (node.text == "not") return Value::boolean(!value_truthy(operand));
      if (operand.is_bool()) return Value::integer(operand.as_bool() ? -1L : 0L);
      if (operand.is_int()) {
        mpz_class neg = -operand.as_int();
        return Value::integer(std::move(neg));
      }
      if (operand.is_float()) return Value::floating(-operand.as_float());
      trip(ExcKind::TypeError,
           "bad operand type for unary -: '" + operand.type_name() + "'", node.span);
    }
    case NodeKind::BoolOp: {
      const bool is_and = node.text == "and";
      Value value;
      for (size_t i = 0; i < node.children.size(); ++i) {
        value = eval(node.children[i], env);
        if (i + 1 == node.children.size()) break;
        if (is_and && !value_truthy(value)) break;
        if (!is_and && value_truthy(value)) break;
      }
      return value;
    }
    case NodeKind::Compare:
      return eval_compare(node, env);
    case NodeKind::Call:
      return eval_call(node, env);
    case NodeKind::Attribute:
      return eval_attribute(node, env);
    case NodeKind::Subscript:
      return eval_subscript(node, env);
    case NodeKind::List: {
      std::vector<Value> items;
      items.reserve(node.children.size());
      for (const AstNode& child : node.children) items.push_back(eval(child, env));
      check_collection(items.size(), node.span);
      return make_list(std::move(items));
    }
    case NodeKind::Tuple: {
      std::vector<Value> items;
      items.reserve(node.children.size());
      for (const AstNode& child : node.children) items.push_back(eval(child, env));
      check_collection(items.size(), node.span);
      return make_tuple(std::move(items));
    }
    case NodeKind::Set: {
      std::vector<Value> items;
      for (const AstNode& child : node.children) items.push_back(eval(child, env));
      return make_set(std::move(items), node.span);
    }
    case NodeKind::Dict: {
      Value dict = make_dict_empty();
      for (size_t i = 0; i + 1 < node.children.size(); i += 2) {
        Value key = eval(node.children[i], env);
        Value value = eval(node.children[i + 1], env);
        dict_set(*dict.as_dict(), key, std::move(value), node.span);
      }
      return dict;
    }
    case NodeKind::ListComp:
    case NodeKind::DictComp:
      return eval_comprehension(node, env);
    case NodeKind::Lambda: {
      auto fn = std::make_shared<FunctionObj>();
      fn->name = "<lambda>";
      fn->params = node.names;
      fn->body_owner = &node;
      fn->closure = frames_.empty() ? globals_ : frames_.back().env;
      fn->is_lambda = true;
      return Value::function(fn);
    }
    case NodeKind::JoinedStr:
      return eval_fstring(node, env);
    case NodeKind::Slice:
      trip(ExcKind::TypeError, "slice outside of a subscript", node.span);
    default:
      trip(ExcKind::NodeNotAllowedError,
           std::string("unexpected node '") + kind_name(node.kind) + "' in expression position",
           node.span);
  }
}

Value Interpreter::eval_const(const AstNode& node) {
  switch (node.const_tag) {
    case ConstTag::NoneLit: return Value::none();
    case ConstTag::Bool: return Value::boolean(node.bval);
    case ConstTag::Int: {
      check_int(node.ival, node.span);
      return Value::integer(node.ival);
    }
    case ConstTag::Float: return Value::floating(node.fval);
    case ConstTag::Str: return Value::str(node.text);
  }
  return Value::none();
}

Value Interpreter::eval_name(const AstNode& node, Env& env) {
  if (Value* found = env.find(node.text)) return *found;
  if (policy_.allowed_builtins.count(node.text)) return Value::builtin(node.text);
  trip(ExcKind::KeyError, "name '" + node.text + "' is not defined", node.span);
}

Value Interpreter::eval_attribute(const AstNode& node, Env& env) {
  if (!policy_.allowed_dunder_access && node.text.size() > 4 &&
      node.text.compare(0, 2, "__") == 0 &&
      node.text.compare(node.text.size() - 2, 2, "__") == 0) {
    trip(ExcKind::NodeNotAllowedError,
         "access to dunder attribute '" + node.text + "' is not allowed", node.span);
  }
  Value obj = eval(node.children[0], env);
  if (obj.is_module()) {
    return module_attr(obj.as_module().name, node.text, node.span);
  }
  // Value attributes are method references; they only make sense in call
  // position, which eval_call short-circuits before reaching here.
  trip(ExcKind::TypeError,
       "attribute '" + node.text + "' of '" + obj.type_name() +
           "' object is only supported in call position",
       node.span);
}

Value Interpreter::eval_subscript(const AstNode& node, Env& env) {
  Value obj = eval(node.children[0], env);
  const AstNode& index_node = node.children[1];
  if (index_node.kind == NodeKind::Slice) {
    check_kind(index_node);
    step(index_node.span);
    return slice_get(obj, index_node, env, node.span);
  }
  Value index = eval(index_node, env);
  return subscript_get(obj, index, node.span);
}

Value Interpreter::eval_binop(const AstNode& node, Env& env) {
  Value lhs = eval(node.children[0], env);
  Value rhs = eval(node.children[1], env);
  return binary_op(node.text, lhs, rhs, node.span);
}

Value Interpreter::eval_compare(const AstNode& node, Env& env) {
  Value lhs = eval(node.children[0], env);
  for (size_t i = 0; i < node.names.size(); ++i) {
    Value rhs = eval(node.children[i + 1], env);
    if (!compare_once(node.names[i], lhs, rhs, node.span)) return Value::boolean(false);
    lhs = std::move(rhs);
  }
  return Value::boolean(true);
}

Value Interpreter::eval_comprehension(const AstNode& node, Env& env) {
  const bool is_dict = node.kind == NodeKind::DictComp;
  const size_t target_index = is_dict ? 2 : 1;
  const AstNode& target = node.children[target_index];
  const AstNode& iter_node = node.children[target_index + 1];
  const AstNode* cond = node.split ? &node.children[target_index + 2] : nullptr;

  Value iterable = eval(iter_node, env);
  // Comprehensions have their own scope; the target does not leak. The
  // parent pointer is non-owning: the enclosing env outlives the evaluation.
  auto scope = std::make_shared<Env>();
  scope->parent = std::shared_ptr<Env>(&env, [](Env*) {});

  LoopGuard guard(*this, node.span);
  uint64_t iterations = 0;
  Value result = is_dict ? make_dict_empty() : make_list({});

  auto run_item = [&](const Value& item) {
    step(node.span);
    if (++iterations > policy_.limits.max_loop_iterations) {
      trip(ExcKind::TimeoutException,
           "loop iteration budget exceeded (" +
               std::to_string(policy_.limits.max_loop_iterations) + " iterations)",
           node.span);
    }
    assign_target(target, item, *scope);
    if (cond != nullptr && !value_truthy(eval(*cond, *scope))) return;
    if (is_dict) {
      Value key = eval(node.children[0], *scope);
      Value value = eval(node.children[1], *scope);
      dict_set(*result.as_dict(), key, std::move(value), node.span);
    } else {
      auto& items = result.as_list()->items;
      items.push_back(eval(node.children[0], *scope));
      check_collection(items.size(), node.span);
    }
  };

  if (iterable.is_list()) {
    const auto& list = iterable.as_list();
    for (size_t i = 0; i < list->items.size(); ++i) run_item(list->items[i]);
  } else {
    for (const Value& item : iterable_snapshot(iterable, iter_node.span, "comprehension")) {
      run_item(item);
    }
  }
  return result;
}

Value Interpreter::eval_fstring(const AstNode& node, Env& env) {
  std::string out;
  for (const AstNode& part : node.children) {
    if (part.kind == NodeKind::Const) {
      out += part.text;
    } else {
      check_kind(part);
      step(part.span);
      out += value_str(eval(part.children[0], env));
    }
    check_collection(out.size(), node.span);
  }
  return Value::str(std::move(out));
}

Value Interpreter::eval_call(const AstNode& node, Env& env) {
  const AstNode& callee = node.children[0];

  auto eval_args = [&]() {
    std::vector<Value> args;
    args.reserve(node.children.size() - 1);
    for (size_t i = 1; i < node.children.size(); ++i) {
      args.push_back(eval(node.children[i], env));
    }
    return args;
  };

  if (callee.kind == NodeKind::Name) {
    check_kind(callee);
    const std::string& name = callee.text;
    // Resolution order: tools > builtins > user functions.
    if (const ToolSpec* spec = policy_.find_tool(name)) {
      std::vector<Value> args = eval_args();
      return invoke_tool(*spec, args, node.span);
    }
    if (policy_.allowed_builtins.count(name)) {
      std::vector<Value> args = eval_args();
      return builtin_call(name, args, node.span);
    }
    if (Value* found = env.find(name)) {
      if (found->is_function()) {
        auto fn = found->as_function();
        std::vector<Value> args = eval_args();
        return call_user_function(fn, args, node.span);
      }
      if (found->is_builtin()) {
        std::vector<Value> args = eval_args();
        return builtin_call(found->as_builtin().name, args, node.span);
      }
      if (found->is_module_func()) {
        std::vector<Value> args = eval_args();
        return module_func_call(found->as_module_func().module, found->as_module_func().name,
                                args, node.span);
      }
      trip(ExcKind::TypeError, "'" + found->type_name() + "' object is not callable",
           node.span);
    }
    trip(ExcKind::FunctionNotAllowedError,
         "call to '" + name + "' is not allowed: not an allowed builtin, declared tool, or "
         "defined function",
         node.span);
  }

  if (callee.kind == NodeKind::Attribute) {
    check_kind(callee);
    step(callee.span);
    trace("evaluate", callee);
    if (!policy_.allowed_dunder_access && callee.text.size() > 4 &&
        callee.text.compare(0, 2, "__") == 0 &&
        callee.text.compare(callee.text.size() - 2, 2, "__") == 0) {
      trip(ExcKind::NodeNotAllowedError,
           "access to dunder attribute '" + callee.text + "' is not allowed", callee.span);
    }
    Value obj = eval(callee.children[0], env);
    std::vector<Value> args = eval_args();
    if (obj.is_module()) {
      return module_func_call(obj.as_module().name, callee.text, args, node.span);
    }
    return method_call(obj, callee.text, args, node.span);
  }

  // General case: any expression evaluating to a callable value.
  Value target = eval(callee, env);
  std::vector<Value> args = eval_args();
  return call_callable(target, std::move(args), node.span);
}

Value Interpreter::call_callable(const Value& callee, std::vector<Value> args, Span span) {
  if (callee.is_function()) {
    auto fn = callee.as_function();
    return call_user_function(fn, args, span);
  }
  if (callee.is_builtin()) return builtin_call(callee.as_builtin().name, args, span);
  if (callee.is_module_func()) {
    return module_func_call(callee.as_module_func().module, callee.as_module_func().name, args,
                            span);
  }
  trip(ExcKind::TypeError, "'" + callee.type_name() + "' object is not callable", span);
}

Value Interpreter::call_user_function(const std::shared_ptr<FunctionObj>& fn,
                                      std::vector<Value>& args, Span span) {
  if (args.size() != fn->params.size()) {
    trip(ExcKind::TypeError,
         fn->name + "() takes " + std::to_string(fn->params.size()) +
             " positional argument" + (fn->params.size() == 1 ? "" : "s") + " but " +
             std::to_string(args.size()) + (args.size() == 1 ? " was" : " were") + " given",
         span);
  }
  if (static_cast<int>(frames_.size()) + 1 > policy_.limits.max_stack_depth) {
    trip(ExcKind::StackDepthException,
         "call stack depth limit (" + std::to_string(policy_.limits.max_stack_depth) +
             ") exceeded when calling " + fn->name + "()",
         span);
  }
  auto locals = std::make_shared<Env>();
  locals->parent = fn->closure;
  for (size_t i = 0; i < args.size(); ++i) {
    locals->set(fn->params[i], std::move(args[i]));
  }
  frames_.push_back({fn->name, locals, span});
  struct FramePop {
    std::vector<Frame>& frames;
    ~FramePop() { frames.pop_back(); }
  } pop{frames_};

  const AstNode& owner = *fn->body_owner;
  if (fn->is_lambda) {
    return eval(owner.children[0], *locals);
  }
  try {
    exec_block(owner.children.data(), owner.children.data() + owner.children.size(), *locals);
  } catch (ReturnSignal& ret) {
    return std::move(ret.value);
  }
  return Value::none();
}

Value Interpreter::invoke_tool(const ToolSpec& spec, std::vector<Value>& args, Span span) {
  if (policy_.limits.max_tool_calls == 0 || tool_calls_ >= policy_.limits.max_tool_calls) {
    trip(ExcKind::ToolError,
         "tool call budget exceeded (" + std::to_string(policy_.limits.max_tool_calls) +
             " calls allowed)",
         span);
  }
  ++tool_calls_;
  if (auto arg_error = check_args(spec, args)) {
    trip(ExcKind::ToolError, "invalid arguments: " + arg_error->message, span);
  }
  if (tools_ == nullptr) {
    trip(ExcKind::ToolError, "no tool registry configured, cannot call '" + spec.name + "'",
         span);
  }
  bool deadline_hit = false;
  ToolInvokeResult result = tools_->invoke(spec, args, clock_, deadline_ms_, deadline_hit);
  outcome_.tool_trace.push_back(result.record);
  if (deadline_hit) {
    trip(ExcKind::TimeoutException,
         "wall clock timeout exceeded (" +
             std::to_string(policy_.limits.wall_clock_timeout_ms) + " ms) during tool call",
         span);
  }
  if (!result.ok) {
    trip(ExcKind::ToolError, result.error, span);
  }
  return result.value;
}

// ---- operators ----

Value Interpreter::binary_op(const std::string& op, const Value& lhs, const Value& rhs,
                             Span span) {
  if (lhs.is_number() && rhs.is_number()) return numeric_binop(op, lhs, rhs, span);

  if (op == "+") {
    if (lhs.is_str() && rhs.is_str()) {
      check_collection(lhs.as_str().size() + rhs.as_str().size(), span);
      return Value::str(lhs.as_str() + rhs.as_str());
    }
    if (lhs.is_list() && rhs.is_list()) {
      const auto& a = lhs.as_list()->items;
      const auto& b = rhs.as_list()->items;
      check_collection(a.size() + b.size(), span);
      std::vector<Value> items = a;
      items.insert(items.end(), b.begin(), b.end());
      return make_list(std::move(items));
    }
    if (lhs.is_tuple() && rhs.is_tuple()) {
      const auto& a = lhs.as_tuple()->items;
      const auto& b = rhs.as_tuple()->items;
      check_collection(a.size() + b.size(), span);
      std::vector<Value> items = a;
      items.insert(items.end(), b.begin(), b.end());
      return make_tuple(std::move(items));
    }
    trip(ExcKind::TypeError,
         "unsupported operand type(s) for +: '" + lhs.type_name() + "' and '" +
             rhs.type_name() + "'",
         span);
  }

  if (op == "*") {
    const Value* seq = nullptr;
    const Value* num = nullptr;
    if ((lhs.is_str() || lhs.is_list() || lhs.is_tuple()) && (rhs.is_int() || rhs.is_bool())) {
      seq = &lhs;
      num = &rhs;
    } else if ((rhs.is_str() || rhs.is_list() || rhs.is_tuple()) &&
               (lhs.is_int() || lhs.is_bool())) {
      seq = &rhs;
      num = &lhs;
    }
    if (seq != nullptr) {
      mpz_class zcount = to_mpz(*num, span);
      if (zcount < 0) zcount = 0;
      size_t base = seq->is_str() ? seq->as_str().size()
                    : seq->is_list() ? seq->as_list()->items.size()
                                     : seq->as_tuple()->items.size();
      mpz_class total = zcount * static_cast<unsigned long>(base);
      if (total > static_cast<unsigned long>(policy_.limits.max_collection_size)) {
        trip(ExcKind::OverflowError,
             "collection size " + total.get_str() + " exceeds the limit of " +
                 std::to_string(policy_.limits.max_collection_size),
             span);
      }
      size_t count = static_cast<size_t>(zcount.get_ui());
      if (seq->is_str()) {
        std::string out;
        out.reserve(seq->as_str().size() * count);
        for (size_t i = 0; i < count; ++i) out += seq->as_str();
        return Value::str(std::move(out));
      }
      const auto& items =
          seq->is_list() ? seq->as_list()->items : seq->as_tuple()->items;
      std::vector<Value> out;
      out.reserve(items.size() * count);
      for (size_t i = 0; i < count; ++i) out.insert(out.end(), items.begin(), items.end());
      return seq->is_list() ? make_list(std::move(out)) : make_tuple(std::move(out));
    }
  }

  trip(ExcKind::TypeError,
       "unsupported operand type(s) for " + op + ": '" + lhs.type_name() + "' and '" +
           rhs.type_name() + "'",
       span);
}

Value Interpreter::numeric_binop(const std::string& op, const Value& lhs, const Value& rhs,
                                 Span span) {
  const bool float_math = lhs.is_float() || rhs.is_float();
  if (op == "/") {
    double a = to_double(lhs, span);
    double b = to_double(rhs, span);
    if (b == 0.0) trip(ExcKind::DivideByZeroError, "division by zero", span);
    return float_result(a / b, span);
  }
  if (float_math) {
    double a = to_double(lhs, span);
    double b = to_double(rhs, span);
    if (op == "+") return float_result(a + b, span);
    if (op == "-") return float_result(a - b, span);
    if (op == "*") return float_result(a * b, span);
    if (op == "//") {
      if (b == 0.0) trip(ExcKind::DivideByZeroError, "float floor division by zero", span);
      return float_result(float_floordiv(a, b), span);
    }
    if (op == "%") {
      if (b == 0.0) trip(ExcKind::DivideByZeroError, "float modulo", span);
      return float_result(float_mod(a, b), span);
    }
    if (op == "**") {
      if (a < 0.0 && b != std::floor(b)) {
        trip(ExcKind::TypeError, "complex results from ** are not supported", span);
      }
      if (a == 0.0 && b < 0.0) {
        trip(ExcKind::DivideByZeroError, "0.0 cannot be raised to a negative power", span);
      }
      return float_result(std::pow(a, b), span);
    }
  }
  mpz_class a = to_mpz(lhs, span);
  mpz_class b = to_mpz(rhs, span);
  mpz_class result;
  if (op == "+") {
    result = a + b;
  } else if (op == "-") {
    result = a - b;
  } else if (op == "*") {
    // Cheap early cut before a giant multiply.
    size_t da = mpz_sizeinbase(a.get_mpz_t(), 10);
    size_t db = mpz_sizeinbase(b.get_mpz_t(), 10);
    if (da + db > policy_.limits.max_int_magnitude + 2) {
      trip(ExcKind::OverflowError,
           "integer magnitude exceeds " + std::to_string(policy_.limits.max_int_magnitude) +
               " decimal digits",
           span);
    }
    result = a * b;
  } else if (op == "//") {
    if (b == 0) trip(ExcKind::DivideByZeroError, "integer division or modulo by zero", span);
    mpz_fdiv_q(result.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  } else if (op == "%") {
    if (b == 0) trip(ExcKind::DivideByZeroError, "integer division or modulo by zero", span);
    mpz_fdiv_r(result.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  } else if (op == "**") {
    return int_pow(a, b, span);
  } else {
    trip(ExcKind::TypeError, "unknown operator " + op, span);
  }
  check_int(result, span);
  return Value::integer(std::move(result));
}

Value Interpreter::int_pow(const mpz_class& base, const mpz_class& exp, Span span) {
  if (exp < 0) {
    double a = to_double(Value::integer(base), span);
    if (a == 0.0) {
      trip(ExcKind::DivideByZeroError, "0 cannot be raised to a negative power", span);
    }
    return float_result(std::pow(a, exp.get_d()), span);
  }
  if (base == 0) return Value::integer(exp == 0 ? 1L : 0L);
  if (base == 1) return Value::integer(1L);
  if (base == -1) return Value::integer(mpz_even_p(exp.get_mpz_t()) ? 1L : -1L);
  if (!exp.fits_ulong_p()) {
    trip(ExcKind::OverflowError,
         "integer magnitude exceeds " + std::to_string(policy_.limits.max_int_magnitude) +
             " decimal digits",
         span);
  }
  unsigned long e = exp.get_ui();
  size_t base_digits = mpz_sizeinbase(base.get_mpz_t(), 10);
  // Upper bound on result digits; avoids allocating a colossal value first.
  if (base_digits * e > policy_.limits.max_int_magnitude + 2) {
    trip(ExcKind::OverflowError,
         "integer magnitude exceeds " + std::to_string(policy_.limits.max_int_magnitude) +
             " decimal digits",
         span);
  }
  mpz_class result;
  mpz_pow_ui(result.get_mpz_t(), base.get_mpz_t(), e);
  check_int(result, span);
  return Value::integer(std::move(result));
}

double Interpreter::to_double(const Value& num, Span span) {
  if (num.is_bool()) return num.as_bool() ? 1.0 : 0.0;
  if (num.is_float()) return num.as_float();
  if (num.is_int()) {
    double d = num.as_int().get_d();
    if (!std::isfinite(d)) {
      trip(ExcKind::OverflowError, "int too large to convert to float", span);
    }
    return d;
  }
  trip(ExcKind::TypeError, "a number is required, got '" + num.type_name() + "'", span);
}

mpz_class Interpreter::to_mpz(const Value& num, Span span) {
  if (num.is_bool()) return mpz_class(num.as_bool() ? 1 : 0);
  if (num.is_int()) return num.as_int();
  trip(ExcKind::TypeError, "an integer is required, got '" + num.type_name() + "'", span);
}

Value Interpreter::float_result(double value, Span span) {
  if (!std::isfinite(value)) {
    trip(ExcKind::OverflowError, "float result out of range", span);
  }
  return Value::floating(value);
}

// Three-way ordering; trips TypeError for unorderable pairs. NaN is handled
// by the callers through compare_once.
int Interpreter::compare3(const Value& a, const Value& b, Span span) {
  if (a.is_number() && b.is_number()) {
    if (a.is_float() || b.is_float()) {
      double da = a.is_float() ? a.as_float() : 0.0;
      double db = b.is_float() ? b.as_float() : 0.0;
      if ((a.is_float() && std::isnan(da)) || (b.is_float() && std::isnan(db))) {
        trip(ExcKind::TypeError, "nan is unordered", span);
      }
      // Exact mixed comparison through rationals (doubles are rationals).
      mpq_class qa = a.is_float() ? mpq_class(a.as_float())
                     : a.is_bool() ? mpq_class(a.as_bool() ? 1 : 0)
                                   : mpq_class(a.as_int());
      mpq_class qb = b.is_float() ? mpq_class(b.as_float())
                     : b.is_bool() ? mpq_class(b.as_bool() ? 1 : 0)
                                   : mpq_class(b.as_int());
      int c = cmp(qa, qb);
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    mpz_class za = to_mpz(a, span);
    mpz_class zb = to_mpz(b, span);
    int c = cmp(za, zb);
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  if (a.is_str() && b.is_str()) {
    int c = a.as_str().compare(b.as_str());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  if ((a.is_list() && b.is_list()) || (a.is_tuple() && b.is_tuple())) {
    const auto& xs = a.is_list() ? a.as_list()->items : a.as_tuple()->items;
    const auto& ys = b.is_list() ? b.as_list()->items : b.as_tuple()->items;
    size_t n = std::min(xs.size(), ys.size());
    for (size_t i = 0; i < n; ++i) {
      if (!value_equal(xs[i], ys[i])) return compare3(xs[i], ys[i], span);
    }
    return xs.size() < ys.size() ? -1 : xs.size() > ys.size() ? 1 : 0;
  }
  trip(ExcKind::TypeError,
       "'<' not supported between instances of '" + a.type_name() + "' and '" + b.type_name() +
           "'",
       span);
}

bool Interpreter::compare_once(const std::string& op, const Value& lhs, const Value& rhs,
                               Span span) {
  if (op == "==") return value_equal(lhs, rhs);
  if (op == "!=") return !value_equal(lhs, rhs);
  if (op == "in") return contains(lhs, rhs, span);
  if (op == "not in") return !contains(lhs, rhs, span);
  // Ordering: NaN comparisons are always false.
  auto is_nan = [](const Value& v) { return v.is_float() && std::isnan(v.as_float()); };
  if (is_nan(lhs) || is_nan(rhs)) {
    if (!(lhs.is_number() && rhs.is_number())) {
      compare3(lhs, rhs, span);  // raise the usual TypeError
    }
    return false;
  }
  int c = compare3(lhs, rhs, span);
  if (op == "<") return c < 0;
  if (op == "<=") return c <= 0;
  if (op == ">") return c > 0;
  if (op == ">=") return c >= 0;
  trip(ExcKind::TypeError, "unknown comparison " + op, span);
}

bool Interpreter::contains(const Value& item, const Value& container, Span span) {
  if (container.is_str()) {
    if (!item.is_str()) {
      trip(ExcKind::TypeError,
           "'in <string>' requires string as left operand, not '" + item.type_name() + "'",
           span);
    }
    return container.as_str().find(item.as_str()) != std::string::npos;
  }
  if (container.is_list() || container.is_tuple()) {
    const auto& items =
        container.is_list() ? container.as_list()->items : container.as_tuple()->items;
    for (const Value& candidate : items) {
      if (value_equal(candidate, item)) return true;
    }
    return false;
  }
  if (container.is_dict()) {
    size_t h = hash_or_trip(item, span);
    return container.as_dict()->find(item, h) != DictObj::npos;
  }
  if (container.is_set()) {
    size_t h = hash_or_trip(item, span);
    return container.as_set()->find(item, h) != SetObj::npos;
  }
  trip(ExcKind::TypeError, "argument of type '" + container.type_name() + "' is not iterable",
       span);
}

// ---- collections ----

Value Interpreter::make_list(std::vector<Value> items) {
  auto list = std::make_shared<ListObj>();
  list->items = std::move(items);
  return Value::list(std::move(list));
}

Value Interpreter::make_tuple(std::vector<Value> items) {
  auto tuple = std::make_shared<TupleObj>();
  tuple->items = std::move(items);
  return Value::tuple(std::move(tuple));
}

Value Interpreter::make_dict_empty() { return Value::dict(std::make_shared<DictObj>()); }

size_t Interpreter::hash_or_trip(const Value& v, Span span) {
  size_t h;
  if (!value_hash(v, h)) {
    trip(ExcKind::TypeError, "unhashable type: '" + v.type_name() + "'", span);
  }
  return h;
}

void Interpreter::dict_set(DictObj& dict, const Value& key, Value value, Span span) {
  size_t h = hash_or_trip(key, span);
  size_t pos = dict.find(key, h);
  if (pos != DictObj::npos) {
    dict.entries[pos].second = std::move(value);
    return;
  }
  check_collection(dict.entries.size() + 1, span);
  dict.index[h].push_back(dict.entries.size());
  dict.entries.emplace_back(key, std::move(value));
}

void Interpreter::set_add(SetObj& set, const Value& value, Span span) {
  size_t h = hash_or_trip(value, span);
  if (set.find(value, h) != SetObj::npos) return;
  check_collection(set.items.size() + 1, span);
  set.index[h].push_back(set.items.size());
  set.items.push_back(value);
}

Value Interpreter::make_set(std::vector<Value> items, Span span) {
  auto set = std::make_shared<SetObj>();
  for (Value& item : items) {
    set_add(*set, item, span);
  }
  return Value::set(std::move(set));
}

std::vector<Value> Interpreter::iterable_snapshot(const Value& v, Span span, const char* what) {
  if (v.is_list()) return v.as_list()->items;
  if (v.is_tuple()) return v.as_tuple()->items;
  if (v.is_set()) return v.as_set()->items;
  if (v.is_str()) {
    std::vector<Value> chars;
    chars.reserve(v.as_str().size());
    for (char c : v.as_str()) chars.push_back(Value::str(std::string(1, c)));
    return chars;
  }
  if (v.is_dict()) {
    std::vector<Value> keys;
    keys.reserve(v.as_dict()->entries.size());
    for (const auto& [key, _] : v.as_dict()->entries) keys.push_back(key);
    return keys;
  }
  trip(ExcKind::TypeError,
       std::string("'") + v.type_name() + "' object is not iterable (" + what + ")", span);
}

// ---- subscripts and slices ----

namespace {

// Python index normalization: negative wraps once.
bool normalize_index(const mpz_class& raw, size_t size, size_t& out) {
  mpz_class idx = raw;
  if (idx < 0) idx += static_cast<unsigned long>(size);
  if (idx < 0 || idx >= static_cast<unsigned long>(size)) return false;
  out = static_cast<size_t>(idx.get_ui());
  return true;
}

}  // namespace

Value Interpreter::subscript_get(const Value& obj, const Value& index, Span span) {
  if (obj.is_dict()) {
    size_t h = hash_or_trip(index, span);
    size_t pos = obj.as_dict()->find(index, h);
    if (pos == DictObj::npos) {
      trip(ExcKind::KeyError, value_repr(index), span);
    }
    return obj.as_dict()->entries[pos].second;
  }
  if (obj.is_list() || obj.is_tuple() || obj.is_str()) {
    if (!index.is_int() && !index.is_bool()) {
      trip(ExcKind::TypeError,
           obj.type_name() + " indices must be integers, not '" + index.type_name() + "'", span);
    }
    mpz_class raw = to_mpz(index, span);
    size_t size = obj.is_str() ? obj.as_str().size()
                  : obj.is_list() ? obj.as_list()->items.size()
                                  : obj.as_tuple()->items.size();
    size_t i;
    if (!normalize_index(raw, size, i)) {
      trip(ExcKind::OutOfBoundsError, obj.type_name() + " index out of range", span);
    }
    if (obj.is_str()) return Value::str(std::string(1, obj.as_str()[i]));
    if (obj.is_list()) return obj.as_list()->items[i];
    return obj.as_tuple()->items[i];
  }
  trip(ExcKind::TypeError, "'" + obj.type_name() + "' object is not subscriptable", span);
}

void Interpreter::subscript_set(const Value& obj, const Value& index, Value value, Span span) {
  if (obj.is_dict()) {
    dict_set(*obj.as_dict(), index, std::move(value), span);
    return;
  }
  if (obj.is_list()) {
    if (!index.is_int() && !index.is_bool()) {
      trip(ExcKind::TypeError,
           "list indices must be integers, not '" + index.type_name() + "'", span);
    }
    mpz_class raw = to_mpz(index, span);
    size_t i;
    if (!normalize_index(raw, obj.as_list()->items.size(), i)) {
      trip(ExcKind::OutOfBoundsError, "list assignment index out of range", span);
    }
    obj.as_list()->items[i] = std::move(value);
    return;
  }
  trip(ExcKind::TypeError,
       "'" + obj.type_name() + "' object does not support item assignment", span);
}

Value Interpreter::slice_get(const Value& obj, const AstNode& slice, Env& env, Span span) {
  if (!obj.is_list() && !obj.is_tuple() && !obj.is_str()) {
    trip(ExcKind::TypeError, "'" + obj.type_name() + "' object is not sliceable", span);
  }
  size_t size = obj.is_str() ? obj.as_str().size()
                : obj.is_list() ? obj.as_list()->items.size()
                                : obj.as_tuple()->items.size();

  auto part = [&](int bit, size_t& cursor) -> std::optional<mpz_class> {
    if ((slice.split & bit) == 0) return std::nullopt;
    Value v = eval(slice.children[cursor++], env);
    if (!v.is_int() && !v.is_bool()) {
      trip(ExcKind::TypeError, "slice indices must be integers or None", span);
    }
    return to_mpz(v, span);
  };
  size_t cursor = 0;
  std::optional<mpz_class> lower = part(1, cursor);
  std::optional<mpz_class> upper = part(2, cursor);
  std::optional<mpz_class> step_v = part(4, cursor);

  long step = 1;
  if (step_v) {
    if (*step_v == 0) trip(ExcKind::TypeError, "slice step cannot be zero", span);
    step = step_v->fits_slong_p() ? step_v->get_si() : (*step_v < 0 ? -1 : 1) * long(size + 1);
  }

  auto clamp = [&](const mpz_class& raw, long lo, long hi) -> long {
    mpz_class idx = raw;
    if (idx < 0) idx += static_cast<unsigned long>(size);
    if (idx < lo) return lo;
    if (idx > hi) return hi;
    return static_cast<long>(idx.get_si());
  };

  long start, stop;
  const long n = static_cast<long>(size);
  if (step > 0) {
    start = lower ? clamp(*lower, 0, n) : 0;
    stop = upper ? clamp(*upper, 0, n) : n;
  } else {
    start = lower ? clamp(*lower, -1, n - 1) : n - 1;
    stop = upper ? clamp(*upper, -1, n - 1) : -1;
  }

  std::vector<size_t> picks;
  if (step > 0) {
    for (long i = start; i < stop; i += step) picks.push_back(static_cast<size_t>(i));
  } else {
    for (long i = start; i > stop; i += step) picks.push_back(static_cast<size_t>(i));
  }

  if (obj.is_str()) {
    std::string out;
    out.reserve(picks.size());
    for (size_t i : picks) out += obj.as_str()[i];
    return Value::str(std::move(out));
  }
  const auto& items = obj.is_list() ? obj.as_list()->items : obj.as_tuple()->items;
  std::vector<Value> out;
  out.reserve(picks.size());
  for (size_t i : picks) out.push_back(items[i]);
  return obj.is_list() ? make_list(std::move(out)) : make_tuple(std::move(out));
}

}  // namespace detail

}  // namespace safexec
