#pragma once

// Internal interpreter machinery shared between the core evaluator and the
// builtin/method dispatch. Not installed.

#include <memory>
#include <string>
#include <vector>

#include "safexec/interpreter.hpp"
#include "safexec/validator.hpp"

namespace safexec::detail {

struct GuardTrip {
  ExceptionRecord rec;
};

struct BreakSignal {};
struct ContinueSignal {};
struct ReturnSignal {
  Value value;
};

struct Frame {
  std::string name;
  std::shared_ptr<Env> env;
  Span call_span;
};

class Interpreter {
 public:
  Interpreter(const SyntaxTree& tree, const PolicyConfig& policy, const ToolRegistry* tools,
              const ExecOptions& opts, ExecutionOutcome& outcome);

  void run();

  // Exposed to the builtin dispatch.
  [[noreturn]] void trip(ExcKind kind, std::string message, Span span);
  void check_collection(size_t size, Span span);
  void check_int(const mpz_class& z, Span span);
  void console_write(const std::string& text, Span span);
  Value call_callable(const Value& callee, std::vector<Value> args, Span span);
  int compare3(const Value& a, const Value& b, Span span);  // throws on unorderable
  const PolicyConfig& policy() const { return policy_; }
  uint64_t max_collection() const { return policy_.limits.max_collection_size; }

  Value builtin_call(const std::string& name, std::vector<Value>& args, Span span);
  Value method_call(const Value& self, const std::string& name, std::vector<Value>& args,
                    Span span);
  Value module_attr(const std::string& module, const std::string& name, Span span);
  Value module_func_call(const std::string& module, const std::string& name,
                         std::vector<Value>& args, Span span);
  bool module_has_attr(const std::string& module, const std::string& name) const;

  Value make_list(std::vector<Value> items);
  Value make_tuple(std::vector<Value> items);
  Value make_set(std::vector<Value> items, Span span);   // dedups, checks hashability
  Value make_dict_empty();
  void dict_set(DictObj& dict, const Value& key, Value value, Span span);
  void set_add(SetObj& set, const Value& value, Span span);
  size_t hash_or_trip(const Value& v, Span span);

  // Snapshot of an iterable's items; lists are referenced live by the for
  // loop instead.
  std::vector<Value> iterable_snapshot(const Value& v, Span span, const char* what);

  double to_double(const Value& num, Span span);
  mpz_class to_mpz(const Value& num, Span span);
  Value float_result(double value, Span span);  // OverflowError on non-finite

 private:
  const SyntaxTree& tree_;
  const PolicyConfig& policy_;
  const ToolRegistry* tools_;
  ExecutionOutcome& outcome_;
  Clock& clock_;
  std::vector<std::string>* trace_;

  std::shared_ptr<Env> globals_;
  std::vector<Frame> frames_;
  uint64_t steps_{0};
  int loop_depth_{0};
  uint64_t tool_calls_{0};
  int64_t deadline_ms_{0};
  uint64_t kind_mask_{0};
  mpz_class int_threshold_;  // 10^max_int_magnitude

  void step(Span span);
  void trace(const char* verb, const AstNode& node);
  void check_kind(const AstNode& node);
  std::vector<std::string> stack_summary() const;
  void snapshot_globals();

  void exec_block(const AstNode* begin, const AstNode* end, Env& env);
  void exec_stmt(const AstNode& node, Env& env);
  void exec_if(const AstNode& node, Env& env);
  void exec_while(const AstNode& node, Env& env);
  void exec_for(const AstNode& node, Env& env);
  void exec_import(const AstNode& node, Env& env);
  void exec_import_from(const AstNode& node, Env& env);
  void assign_target(const AstNode& target, Value value, Env& env);

  Value eval(const AstNode& node, Env& env);
  Value eval_call(const AstNode& node, Env& env);
  Value eval_name(const AstNode& node, Env& env);
  Value eval_attribute(const AstNode& node, Env& env);
  Value eval_subscript(const AstNode& node, Env& env);
  Value eval_binop(const AstNode& node, Env& env);
  Value eval_compare(const AstNode& node, Env& env);
  Value eval_comprehension(const AstNode& node, Env& env);
  Value eval_fstring(const AstNode& node, Env& env);
  Value eval_const(const AstNode& node);

  Value binary_op(const std::string& op, const Value& lhs, const Value& rhs, Span span);
  Value numeric_binop(const std::string& op, const Value& lhs, const Value& rhs, Span span);
  Value int_pow(const mpz_class& base, const mpz_class& exp, Span span);
  bool compare_once(const std::string& op, const Value& lhs, const Value& rhs, Span span);
  bool contains(const Value& item, const Value& container, Span span);

  Value call_user_function(const std::shared_ptr<FunctionObj>& fn, std::vector<Value>& args,
                           Span span);
  Value invoke_tool(const ToolSpec& spec, std::vector<Value>& args, Span span);

  Value subscript_get(const Value& obj, const Value& index, Span span);
  void subscript_set(const Value& obj, const Value& index, Value value, Span span);
  Value slice_get(const Value& obj, const AstNode& slice, Env& env, Span span);

  struct LoopGuard;
  friend struct LoopGuard;
};

// Python floor-division semantics for doubles.
double float_floordiv(double a, double b);
double float_mod(double a, double b);

}  // namespace safexec::detail
