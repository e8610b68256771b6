#include "safexec/value.hpp"

#include <cmath>

#include "safexec/numfmt.hpp"
#include "safexec/printer.hpp"

namespace safexec {

namespace {

// Numeric normalization for cross-type equality and hashing.
bool numeric_as_mpz(const Value& v, mpz_class& out) {
  if (v.is_bool()) {
    out = v.as_bool() ? 1 : 0;
    return true;
  }
  if (v.is_int()) {
    out = v.as_int();
    return true;
  }
  if (v.is_float()) {
    double d = v.as_float();
    if (std::isfinite(d) && d == std::floor(d)) {
      out = mpz_class(d);
      return true;
    }
  }
  return false;
}

bool numeric_equal(const Value& a, const Value& b) {
  if (a.is_float() || b.is_float()) {
    // Use exact comparison through mpz when both are integral to avoid
    // precision loss on huge ints.
    mpz_class za, zb;
    if (numeric_as_mpz(a, za) && numeric_as_mpz(b, zb)) return za == zb;
    double da = a.is_float() ? a.as_float()
                : a.is_bool() ? (a.as_bool() ? 1.0 : 0.0)
                              : a.as_int().get_d();
    double db = b.is_float() ? b.as_float()
                : b.is_bool() ? (b.as_bool() ? 1.0 : 0.0)
                              : b.as_int().get_d();
    return da == db;
  }
  mpz_class za, zb;
  numeric_as_mpz(a, za);
  numeric_as_mpz(b, zb);
  return za == zb;
}

size_t hash_combine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string Value::type_name() const {
  if (is_none()) return "NoneType";
  if (is_bool()) return "bool";
  if (is_int()) return "int";
  if (is_float()) return "float";
  if (is_str()) return "str";
  if (is_list()) return "list";
  if (is_tuple()) return "tuple";
  if (is_dict()) return "dict";
  if (is_set()) return "set";
  if (is_function()) return "function";
  if (is_builtin()) return "builtin_function_or_type";
  if (is_module_func()) return "builtin_function_or_method";
  return "module";
}

size_t DictObj::find(const Value& key, size_t hash) const {
  auto it = index.find(hash);
  if (it == index.end()) return npos;
  for (size_t pos : it->second) {
    if (value_equal(entries[pos].first, key)) return pos;
  }
  return npos;
}

size_t SetObj::find(const Value& value, size_t hash) const {
  auto it = index.find(hash);
  if (it == index.end()) return npos;
  for (size_t pos : it->second) {
    if (value_equal(items[pos], value)) return pos;
  }
  return npos;
}

Value* Env::find_local(const std::string& name) {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &slots[it->second].second;
}

const Value* Env::find_local(const std::string& name) const {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &slots[it->second].second;
}

Value* Env::find(const std::string& name) {
  for (Env* env = this; env != nullptr; env = env->parent.get()) {
    if (Value* v = env->find_local(name)) return v;
  }
  return nullptr;
}

void Env::set(const std::string& name, Value value) {
  auto it = by_name.find(name);
  if (it != by_name.end()) {
    slots[it->second].second = std::move(value);
    return;
  }
  by_name.emplace(name, slots.size());
  slots.emplace_back(name, std::move(value));
}

bool value_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return numeric_equal(a, b);
  if (a.data().index() != b.data().index()) return false;
  if (a.is_none()) return true;
  if (a.is_str()) return a.as_str() == b.as_str();
  if (a.is_list() || a.is_tuple()) {
    const auto& xs = a.is_list() ? a.as_list()->items : a.as_tuple()->items;
    const auto& ys = b.is_list() ? b.as_list()->items : b.as_tuple()->items;
    if (xs.size() != ys.size()) return false;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (!value_equal(xs[i], ys[i])) return false;
    }
    return true;
  }
  if (a.is_dict()) {
    const auto& da = *a.as_dict();
    const auto& db = *b.as_dict();
    if (da.entries.size() != db.entries.size()) return false;
    for (const auto& [key, value] : da.entries) {
      size_t h;
      if (!value_hash(key, h)) return false;
      size_t pos = db.find(key, h);
      if (pos == DictObj::npos || !value_equal(value, db.entries[pos].second)) return false;
    }
    return true;
  }
  if (a.is_set()) {
    const auto& sa = *a.as_set();
    const auto& sb = *b.as_set();
    if (sa.items.size() != sb.items.size()) return false;
    for (const Value& item : sa.items) {
      size_t h;
      if (!value_hash(item, h)) return false;
      if (sb.find(item, h) == SetObj::npos) return false;
    }
    return true;
  }
  if (a.is_function()) return a.as_function() == b.as_function();
  if (a.is_builtin()) return a.as_builtin().name == b.as_builtin().name;
  if (a.is_module()) return a.as_module().name == b.as_module().name;
  if (a.is_module_func()) {
    return a.as_module_func().module == b.as_module_func().module &&
           a.as_module_func().name == b.as_module_func().name;
  }
  return false;
}

bool value_hash(const Value& v, size_t& out) {
  if (v.is_none()) {
    out = 0x5f3e8a01;
    return true;
  }
  if (v.is_number()) {
    mpz_class z;
    if (numeric_as_mpz(v, z)) {
      // All integral numerics share a hash so 1, 1.0 and True collide.
      out = hash_combine(0x11, mpz_fdiv_ui(z.get_mpz_t(), 0xfffffffbUL));
      return true;
    }
    out = hash_combine(0x12, std::hash<double>{}(v.as_float()));
    return true;
  }
  if (v.is_str()) {
    out = hash_combine(0x13, std::hash<std::string>{}(v.as_str()));
    return true;
  }
  if (v.is_tuple()) {
    size_t h = 0x14;
    for (const Value& item : v.as_tuple()->items) {
      size_t hi;
      if (!value_hash(item, hi)) return false;
      h = hash_combine(h, hi);
    }
    out = h;
    return true;
  }
  return false;
}

bool value_truthy(const Value& v) {
  if (v.is_none()) return false;
  if (v.is_bool()) return v.as_bool();
  if (v.is_int()) return mpz_sgn(v.as_int().get_mpz_t()) != 0;
  if (v.is_float()) return v.as_float() != 0.0;
  if (v.is_str()) return !v.as_str().empty();
  if (v.is_list()) return !v.as_list()->items.empty();
  if (v.is_tuple()) return !v.as_tuple()->items.empty();
  if (v.is_dict()) return !v.as_dict()->entries.empty();
  if (v.is_set()) return !v.as_set()->items.empty();
  return true;
}

std::string value_repr(const Value& v) {
  if (v.is_none()) return "None";
  if (v.is_bool()) return v.as_bool() ? "True" : "False";
  if (v.is_int()) return v.as_int().get_str();
  if (v.is_float()) return python_float_repr(v.as_float());
  if (v.is_str()) return quote_string(v.as_str());
  if (v.is_list() || v.is_tuple()) {
    const bool is_tuple = v.is_tuple();
    const auto& items = is_tuple ? v.as_tuple()->items : v.as_list()->items;
    std::string out(1, is_tuple ? '(' : '[');
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += value_repr(items[i]);
    }
    if (is_tuple && items.size() == 1) out += ",";
    out += is_tuple ? ')' : ']';
    return out;
  }
  if (v.is_dict()) {
    const auto& entries = v.as_dict()->entries;
    std::string out = "{";
    for (size_t i = 0; i < entries.size(); ++i) {
      if (i) out += ", ";
      out += value_repr(entries[i].first);
      out += ": ";
      out += value_repr(entries[i].second);
    }
    out += "}";
    return out;
  }
  if (v.is_set()) {
    const auto& items = v.as_set()->items;
    if (items.empty()) return "set()";
    std::string out = "{";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += value_repr(items[i]);
    }
    out += "}";
    return out;
  }
  if (v.is_function()) return "<function " + v.as_function()->name + ">";
  if (v.is_builtin()) {
    const std::string& name = v.as_builtin().name;
    static const std::set<std::string> kTypes = {"int",  "float", "str",  "bool",
                                                 "list", "dict",  "set",  "tuple"};
    if (kTypes.count(name)) return "<class '" + name + "'>";
    return "<built-in function " + name + ">";
  }
  if (v.is_module()) return "<module '" + v.as_module().name + "'>";
  return "<built-in function " + v.as_module_func().name + ">";
}

std::string value_str(const Value& v) {
  if (v.is_str()) return v.as_str();
  return value_repr(v);
}

std::string render_snapshot(const Value& v) {
  std::string rendered = value_repr(v);
  if (rendered.size() <= 256) return rendered;
  return rendered.substr(0, 256) + "…(truncated)";
}

}  // namespace safexec
