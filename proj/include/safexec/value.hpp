#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "safexec/ast.hpp"

namespace safexec {

class Value;

struct NoneVal {
  bool operator==(const NoneVal&) const { return true; }
};

struct ListObj;
struct TupleObj;
struct DictObj;
struct SetObj;
struct FunctionObj;
struct Env;

// Builtin functions / type constructors usable as first-class values
// (needed for isinstance and for rendering).
struct BuiltinRef {
  std::string name;
};

// An imported module binding, e.g. the value of `math` after `import math`.
struct ModuleRef {
  std::string name;
};

// A module attribute bound by `from math import sqrt`.
struct ModuleFuncRef {
  std::string module;
  std::string name;
};

class Value {
 public:
  using Variant =
      std::variant<NoneVal, bool, mpz_class, double, std::string, std::shared_ptr<ListObj>,
                   std::shared_ptr<TupleObj>, std::shared_ptr<DictObj>, std::shared_ptr<SetObj>,
                   std::shared_ptr<FunctionObj>, BuiltinRef, ModuleRef, ModuleFuncRef>;

  Value() : data_(NoneVal{}) {}
  explicit Value(Variant data) : data_(std::move(data)) {}

  static Value none() { return Value(); }
  static Value boolean(bool b) { return Value(Variant(b)); }
  static Value integer(mpz_class z) { return Value(Variant(std::move(z))); }
  static Value integer(long n) { return Value(Variant(mpz_class(n))); }
  static Value floating(double d) { return Value(Variant(d)); }
  static Value str(std::string s) { return Value(Variant(std::move(s))); }
  static Value list(std::shared_ptr<ListObj> l) { return Value(Variant(std::move(l))); }
  static Value tuple(std::shared_ptr<TupleObj> t) { return Value(Variant(std::move(t))); }
  static Value dict(std::shared_ptr<DictObj> d) { return Value(Variant(std::move(d))); }
  static Value set(std::shared_ptr<SetObj> s) { return Value(Variant(std::move(s))); }
  static Value function(std::shared_ptr<FunctionObj> f) { return Value(Variant(std::move(f))); }
  static Value builtin(std::string name) { return Value(Variant(BuiltinRef{std::move(name)})); }
  static Value module(std::string name) { return Value(Variant(ModuleRef{std::move(name)})); }
  static Value module_func(std::string module, std::string name) {
    return Value(Variant(ModuleFuncRef{std::move(module), std::move(name)}));
  }

  const Variant& data() const { return data_; }

  bool is_none() const { return std::holds_alternative<NoneVal>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_int() const { return std::holds_alternative<mpz_class>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_str() const { return std::holds_alternative<std::string>(data_); }
  bool is_list() const { return std::holds_alternative<std::shared_ptr<ListObj>>(data_); }
  bool is_tuple() const { return std::holds_alternative<std::shared_ptr<TupleObj>>(data_); }
  bool is_dict() const { return std::holds_alternative<std::shared_ptr<DictObj>>(data_); }
  bool is_set() const { return std::holds_alternative<std::shared_ptr<SetObj>>(data_); }
  bool is_function() const { return std::holds_alternative<std::shared_ptr<FunctionObj>>(data_); }
  bool is_builtin() const { return std::holds_alternative<BuiltinRef>(data_); }
  bool is_module() const { return std::holds_alternative<ModuleRef>(data_); }
  bool is_module_func() const { return std::holds_alternative<ModuleFuncRef>(data_); }
  bool is_number() const { return is_bool() || is_int() || is_float(); }

  bool as_bool() const { return std::get<bool>(data_); }
  const mpz_class& as_int() const { return std::get<mpz_class>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  const std::shared_ptr<ListObj>& as_list() const {
    return std::get<std::shared_ptr<ListObj>>(data_);
  }
  const std::shared_ptr<TupleObj>& as_tuple() const {
    return std::get<std::shared_ptr<TupleObj>>(data_);
  }
  const std::shared_ptr<DictObj>& as_dict() const {
    return std::get<std::shared_ptr<DictObj>>(data_);
  }
  const std::shared_ptr<SetObj>& as_set() const {
    return std::get<std::shared_ptr<SetObj>>(data_);
  }
  const std::shared_ptr<FunctionObj>& as_function() const {
    return std::get<std::shared_ptr<FunctionObj>>(data_);
  }
  const BuiltinRef& as_builtin() const { return std::get<BuiltinRef>(data_); }
  const ModuleRef& as_module() const { return std::get<ModuleRef>(data_); }
  const ModuleFuncRef& as_module_func() const { return std::get<ModuleFuncRef>(data_); }

  // The reference language's type name: 'int', 'list', 'NoneType', ...
  std::string type_name() const;

 private:
  Variant data_;
};

struct ListObj {
  std::vector<Value> items;
};

struct TupleObj {
  std::vector<Value> items;
};

// Insertion-ordered map with hashed lookup; numeric keys compare across
// int/float/bool the way the reference language does.
struct DictObj {
  std::vector<std::pair<Value, Value>> entries;
  std::unordered_map<size_t, std::vector<size_t>> index;

  // Returns entry position or npos. `hash` must come from value_hash(key).
  size_t find(const Value& key, size_t hash) const;
  static constexpr size_t npos = static_cast<size_t>(-1);
};

struct SetObj {
  std::vector<Value> items;
  std::unordered_map<size_t, std::vector<size_t>> index;

  size_t find(const Value& value, size_t hash) const;
  static constexpr size_t npos = static_cast<size_t>(-1);
};

struct FunctionObj {
  std::string name;  // "<lambda>" for lambdas
  std::vector<std::string> params;
  const AstNode* body_owner{nullptr};  // FunctionDef or Lambda node
  std::shared_ptr<Env> closure;
  bool is_lambda{false};
};

// Name -> value bindings with stable insertion order and lexical parent.
struct Env {
  std::vector<std::pair<std::string, Value>> slots;
  std::unordered_map<std::string, size_t> by_name;
  std::shared_ptr<Env> parent;

  Value* find_local(const std::string& name);
  const Value* find_local(const std::string& name) const;
  Value* find(const std::string& name);
  void set(const std::string& name, Value value);
};

// Structural equality per the reference language's ==. Values of unrelated
// types compare unequal rather than erroring.
bool value_equal(const Value& a, const Value& b);

// Hash consistent with value_equal (1, 1.0 and True hash alike). Returns
// false for unhashable values (lists, dicts, sets, functions).
bool value_hash(const Value& v, size_t& out);

bool value_truthy(const Value& v);

// repr-style rendering ("'s'", "[1, 2]", "{'a': 1}").
std::string value_repr(const Value& v);
// str-style rendering (strings unquoted; containers same as repr).
std::string value_str(const Value& v);

// Rendering used for variable snapshots: truncated to 256 characters with a
// "…(truncated)" suffix.
std::string render_snapshot(const Value& v);

}  // namespace safexec
