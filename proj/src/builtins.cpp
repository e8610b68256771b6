#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "safexec/numfmt.hpp"
#include "safexec/printer.hpp"
#include "src/interp_internal.hpp"

namespace safexec::detail {

namespace {

[[noreturn]] void arity_error(Interpreter& interp, const std::string& name, const char* expected,
                              size_t got, Span span) {
  interp.trip(ExcKind::TypeError,
              name + "() takes " + expected + " arguments but " + std::to_string(got) +
                  (got == 1 ? " was" : " were") + " given",
              span);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

mpz_class parse_int_literal(Interpreter& interp, const std::string& text, Span span) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  std::string body = text.substr(begin, end - begin);
  std::string digits = body;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) digits = digits.substr(1);
  bool valid = !digits.empty() &&
               std::all_of(digits.begin(), digits.end(),
                           [](char c) { return c >= '0' && c <= '9'; });
  if (!valid) {
    interp.trip(ExcKind::TypeError,
                "invalid literal for int() with base 10: " + quote_string(text), span);
  }
  return mpz_class(body, 10);
}

std::string quote_wrap(const std::string& s) { return "'" + s + "'"; }

double parse_float_literal(Interpreter& interp, const std::string& text, Span span) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  std::string body = text.substr(begin, end - begin);
  if (body.empty()) {
    interp.trip(ExcKind::TypeError, "could not convert string to float: " + quote_wrap(text),
                span);
  }
  char* parse_end = nullptr;
  double value = std::strtod(body.c_str(), &parse_end);
  if (parse_end != body.c_str() + body.size()) {
    interp.trip(ExcKind::TypeError, "could not convert string to float: " + quote_wrap(text),
                span);
  }
  return value;
}

// Banker's rounding to an integer, as the reference round() does.
double round_half_even(double x) {
  double floor_v = std::floor(x);
  double diff = x - floor_v;
  if (diff > 0.5) return floor_v + 1.0;
  if (diff < 0.5) return floor_v;
  return std::fmod(floor_v, 2.0) == 0.0 ? floor_v : floor_v + 1.0;
}

}  // namespace

Value Interpreter::builtin_call(const std::string& name, std::vector<Value>& args, Span span) {
  const size_t n = args.size();

  if (name == "print") {
    std::string line;
    for (size_t i = 0; i < n; ++i) {
      if (i) line += " ";
      line += value_str(args[i]);
    }
    line += "\n";
    console_write(line, span);
    return Value::none();
  }

  if (name == "len") {
    if (n != 1) arity_error(*this, name, "exactly 1", n, span);
    const Value& v = args[0];
    if (v.is_str()) return Value::integer(long(v.as_str().size()));
    if (v.is_list()) return Value::integer(long(v.as_list()->items.size()));
    if (v.is_tuple()) return Value::integer(long(v.as_tuple()->items.size()));
    if (v.is_dict()) return Value::integer(long(v.as_dict()->entries.size()));
    if (v.is_set()) return Value::integer(long(v.as_set()->items.size()));
    trip(ExcKind::TypeError, "object of type '" + v.type_name() + "' has no len()", span);
  }

  if (name == "range") {
    if (n < 1 || n > 3) arity_error(*this, name, "1 to 3", n, span);
    mpz_class start = 0, stop, step = 1;
    if (n == 1) {
      stop = to_mpz(args[0], span);
    } else {
      start = to_mpz(args[0], span);
      stop = to_mpz(args[1], span);
      if (n == 3) step = to_mpz(args[2], span);
    }
    if (step == 0) trip(ExcKind::TypeError, "range() arg 3 must not be zero", span);
    mpz_class count = 0;
    if (step > 0 && stop > start) {
      count = (stop - start + step - 1) / step;
    } else if (step < 0 && stop < start) {
      count = (start - stop - step - 1) / (-step);
    }
    if (count > static_cast<unsigned long>(policy_.limits.max_collection_size)) {
      trip(ExcKind::OverflowError,
           "collection size " + count.get_str() + " exceeds the limit of " +
               std::to_string(policy_.limits.max_collection_size),
           span);
    }
    std::vector<Value> items;
    items.reserve(count.get_ui());
    mpz_class v = start;
    for (unsigned long i = 0; i < count.get_ui(); ++i) {
      items.push_back(Value::integer(v));
      v += step;
    }
    return make_list(std::move(items));
  }

  if (name == "abs") {
    if (n != 1) arity_error(*this, name, "exactly 1", n, span);
    const Value& v = args[0];
    if (v.is_bool()) return Value::integer(v.as_bool() ? 1L : 0L);
    if (v.is_int()) {
      mpz_class m = abs(v.as_int());
      return Value::integer(std::move(m));
    }
    if (v.is_float()) return Value::floating(std::fabs(v.as_float()));
    trip(ExcKind::TypeError, "bad operand type for abs(): '" + v.type_name() + "'", span);
  }

  if (name == "min" || name == "max") {
    const bool want_min = name == "min";
    std::vector<Value> candidates;
    if (n == 0) arity_error(*this, name, "at least 1", n, span);
    if (n == 1) {
      candidates = iterable_snapshot(args[0], span, name.c_str());
      if (candidates.empty()) {
        trip(ExcKind::TypeError, name + "() arg is an empty sequence", span);
      }
    } else {
      candidates = args;
    }
    Value best = candidates[0];
    for (size_t i = 1; i < candidates.size(); ++i) {
      int c = compare3(candidates[i], best, span);
      if (want_min ? c < 0 : c > 0) best = candidates[i];
    }
    return best;
  }

  if (name == "sum") {
    if (n < 1 || n > 2) arity_error(*this, name, "1 or 2", n, span);
    std::vector<Value> items = iterable_snapshot(args[0], span, "sum");
    Value acc = n == 2 ? args[1] : Value::integer(0L);
    if (acc.is_str()) {
      trip(ExcKind::TypeError, "sum() can't sum strings [use ''.join(seq) instead]", span);
    }
    for (const Value& item : items) {
      acc = binary_op("+", acc, item, span);
    }
    return acc;
  }

  if (name == "sorted") {
    if (n != 1) arity_error(*this, name, "exactly 1", n, span);
    std::vector<Value> items = iterable_snapshot(args[0], span, "sorted");
    std::stable_sort(items.begin(), items.end(), [&](const Value& a, const Value& b) {
      return compare3(a, b, span) < 0;
    });
    return make_list(std::move(items));
  }

  if (name == "enumerate") {
    if (n < 1 || n > 2) arity_error(*this, name, "1 or 2", n, span);
    mpz_class counter = n == 2 ? to_mpz(args[1], span) : mpz_class(0);
    std::vector<Value> out;
    for (Value& item : iterable_snapshot(args[0], span, "enumerate")) {
      out.push_back(make_tuple({Value::integer(counter), std::move(item)}));
      counter += 1;
    }
    return make_list(std::move(out));
  }

  if (name == "zip") {
    std::vector<std::vector<Value>> columns;
    size_t shortest = n == 0 ? 0 : static_cast<size_t>(-1);
    for (const Value& arg : args) {
      columns.push_back(iterable_snapshot(arg, span, "zip"));
      shortest = std::min(shortest, columns.back().size());
    }
    std::vector<Value> out;
    for (size_t row = 0; row < shortest; ++row) {
      std::vector<Value> tuple_items;
      tuple_items.reserve(n);
      for (auto& column : columns) tuple_items.push_back(std::move(column[row]));
      out.push_back(make_tuple(std::move(tuple_items)));
    }
    return make_list(std::move(out));
  }

  if (name == "int") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return Value::integer(0L);
    const Value& v = args[0];
    if (v.is_bool()) return Value::integer(v.as_bool() ? 1L : 0L);
    if (v.is_int()) return v;
    if (v.is_float()) {
      double d = v.as_float();
      if (!std::isfinite(d)) {
        trip(ExcKind::OverflowError, "cannot convert float infinity or NaN to integer", span);
      }
      mpz_class z(std::trunc(d));
      check_int(z, span);
      return Value::integer(std::move(z));
    }
    if (v.is_str()) {
      mpz_class z = parse_int_literal(*this, v.as_str(), span);
      check_int(z, span);
      return Value::integer(std::move(z));
    }
    trip(ExcKind::TypeError,
         "int() argument must be a string or a number, not '" + v.type_name() + "'", span);
  }

  if (name == "float") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return Value::floating(0.0);
    const Value& v = args[0];
    if (v.is_bool()) return Value::floating(v.as_bool() ? 1.0 : 0.0);
    if (v.is_float()) return v;
    if (v.is_int()) return Value::floating(to_double(v, span));
    if (v.is_str()) return Value::floating(parse_float_literal(*this, v.as_str(), span));
    trip(ExcKind::TypeError,
         "float() argument must be a string or a number, not '" + v.type_name() + "'", span);
  }

  if (name == "str") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return Value::str("");
    std::string out = value_str(args[0]);
    check_collection(out.size(), span);
    return Value::str(std::move(out));
  }

  if (name == "bool") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    return Value::boolean(n == 1 && value_truthy(args[0]));
  }

  if (name == "list") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return make_list({});
    std::vector<Value> items = iterable_snapshot(args[0], span, "list");
    check_collection(items.size(), span);
    return make_list(std::move(items));
  }

  if (name == "tuple") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return make_tuple({});
    std::vector<Value> items = iterable_snapshot(args[0], span, "tuple");
    check_collection(items.size(), span);
    return make_tuple(std::move(items));
  }

  if (name == "set") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return Value::set(std::make_shared<SetObj>());
    return make_set(iterable_snapshot(args[0], span, "set"), span);
  }

  if (name == "dict") {
    if (n > 1) arity_error(*this, name, "at most 1", n, span);
    if (n == 0) return make_dict_empty();
    const Value& v = args[0];
    Value out = make_dict_empty();
    if (v.is_dict()) {
      for (const auto& [key, value] : v.as_dict()->entries) {
        dict_set(*out.as_dict(), key, value, span);
      }
      return out;
    }
    // Iterable of key/value pairs.
    for (const Value& pair : iterable_snapshot(v, span, "dict")) {
      std::vector<Value> kv = iterable_snapshot(pair, span, "dict");
      if (kv.size() != 2) {
        trip(ExcKind::TypeError, "dict update sequence elements must have length 2", span);
      }
      dict_set(*out.as_dict(), kv[0], std::move(kv[1]), span);
    }
    return out;
  }

  if (name == "round") {
    if (n < 1 || n > 2) arity_error(*this, name, "1 or 2", n, span);
    const Value& v = args[0];
    if (v.is_bool() || v.is_int()) {
      mpz_class z = to_mpz(v, span);
      return Value::integer(std::move(z));  // round(int[, n]) is the int itself
    }
    if (!v.is_float()) {
      trip(ExcKind::TypeError,
           "type '" + v.type_name() + "' doesn't define __round__ method", span);
    }
    double d = v.as_float();
    if (n == 1) {
      if (!std::isfinite(d)) {
        trip(ExcKind::OverflowError, "cannot convert float infinity or NaN to integer", span);
      }
      mpz_class z(round_half_even(d));
      check_int(z, span);
      return Value::integer(std::move(z));
    }
    mpz_class digits = to_mpz(args[1], span);
    long nd = digits.fits_slong_p() ? digits.get_si() : (digits < 0 ? -400 : 400);
    nd = std::clamp(nd, -400L, 400L);
    if (!std::isfinite(d)) return Value::floating(d);
    // Correctly-rounded decimal rounding via the runtime's formatter.
    char buf[600];
    std::snprintf(buf, sizeof(buf), "%.*f", nd > 0 ? static_cast<int>(nd) : 0, d);
    double rounded;
    if (nd >= 0) {
      rounded = std::strtod(buf, nullptr);
    } else {
      double scale = std::pow(10.0, -static_cast<double>(nd));
      rounded = round_half_even(d / scale) * scale;
    }
    return float_result(rounded, span);
  }

  if (name == "isinstance") {
    if (n != 2) arity_error(*this, name, "exactly 2", n, span);
    auto matches = [&](const Value& type_v) -> bool {
      if (!type_v.is_builtin()) {
        trip(ExcKind::TypeError, "isinstance() arg 2 must be a type or tuple of types", span);
      }
      const std::string& type_name = type_v.as_builtin().name;
      const Value& v = args[0];
      if (type_name == "bool") return v.is_bool();
      if (type_name == "int") return v.is_int() || v.is_bool();  // bool subclasses int
      if (type_name == "float") return v.is_float();
      if (type_name == "str") return v.is_str();
      if (type_name == "list") return v.is_list();
      if (type_name == "tuple") return v.is_tuple();
      if (type_name == "dict") return v.is_dict();
      if (type_name == "set") return v.is_set();
      trip(ExcKind::TypeError, "isinstance() arg 2 must be a type or tuple of types", span);
    };
    if (args[1].is_tuple()) {
      for (const Value& t : args[1].as_tuple()->items) {
        if (matches(t)) return Value::boolean(true);
      }
      return Value::boolean(false);
    }
    return Value::boolean(matches(args[1]));
  }

  trip(ExcKind::FunctionNotAllowedError, "builtin '" + name + "' is not implemented", span);
}

// ---- methods ----

Value Interpreter::method_call(const Value& self, const std::string& name,
                               std::vector<Value>& args, Span span) {
  const size_t n = args.size();
  auto need = [&](size_t lo, size_t hi, const char* desc) {
    if (n < lo || n > hi) {
      trip(ExcKind::TypeError,
           self.type_name() + "." + name + "() takes " + desc + " arguments (" +
               std::to_string(n) + " given)",
           span);
    }
  };

  if (self.is_list()) {
    auto& items = self.as_list()->items;
    if (name == "append") {
      need(1, 1, "exactly 1");
      check_collection(items.size() + 1, span);
      items.push_back(std::move(args[0]));
      return Value::none();
    }
    if (name == "extend") {
      need(1, 1, "exactly 1");
      std::vector<Value> extra = iterable_snapshot(args[0], span, "extend");
      check_collection(items.size() + extra.size(), span);
      for (Value& item : extra) items.push_back(std::move(item));
      return Value::none();
    }
    if (name == "pop") {
      need(0, 1, "at most 1");
      if (items.empty()) trip(ExcKind::OutOfBoundsError, "pop from empty list", span);
      mpz_class raw = n == 1 ? to_mpz(args[0], span) : mpz_class(-1);
      mpz_class idx = raw;
      if (idx < 0) idx += static_cast<unsigned long>(items.size());
      if (idx < 0 || idx >= static_cast<unsigned long>(items.size())) {
        trip(ExcKind::OutOfBoundsError, "pop index out of range", span);
      }
      size_t i = static_cast<size_t>(idx.get_ui());
      Value out = std::move(items[i]);
      items.erase(items.begin() + static_cast<long>(i));
      return out;
    }
    if (name == "insert") {
      need(2, 2, "exactly 2");
      check_collection(items.size() + 1, span);
      mpz_class idx = to_mpz(args[0], span);
      if (idx < 0) idx += static_cast<unsigned long>(items.size());
      if (idx < 0) idx = 0;
      if (idx > static_cast<unsigned long>(items.size())) idx = items.size();
      items.insert(items.begin() + static_cast<long>(idx.get_ui()), std::move(args[1]));
      return Value::none();
    }
    if (name == "remove") {
      need(1, 1, "exactly 1");
      for (size_t i = 0; i < items.size(); ++i) {
        if (value_equal(items[i], args[0])) {
          items.erase(items.begin() + static_cast<long>(i));
          return Value::none();
        }
      }
      trip(ExcKind::TypeError, "list.remove(x): x not in list", span);
    }
    if (name == "sort") {
      need(0, 0, "no");
      std::stable_sort(items.begin(), items.end(), [&](const Value& a, const Value& b) {
        return compare3(a, b, span) < 0;
      });
      return Value::none();
    }
    if (name == "reverse") {
      need(0, 0, "no");
      std::reverse(items.begin(), items.end());
      return Value::none();
    }
    if (name == "count") {
      need(1, 1, "exactly 1");
      long count = 0;
      for (const Value& item : items) {
        if (value_equal(item, args[0])) ++count;
      }
      return Value::integer(count);
    }
    if (name == "index") {
      need(1, 1, "exactly 1");
      for (size_t i = 0; i < items.size(); ++i) {
        if (value_equal(items[i], args[0])) return Value::integer(long(i));
      }
      trip(ExcKind::TypeError, value_repr(args[0]) + " is not in list", span);
    }
    if (name == "clear") {
      need(0, 0, "no");
      items.clear();
      return Value::none();
    }
    if (name == "copy") {
      need(0, 0, "no");
      return make_list(items);
    }
  }

  if (self.is_str()) {
    const std::string& s = self.as_str();
    auto str_arg = [&](size_t i) -> const std::string& {
      if (!args[i].is_str()) {
        trip(ExcKind::TypeError,
             name + "() argument must be str, not '" + args[i].type_name() + "'", span);
      }
      return args[i].as_str();
    };
    if (name == "upper" || name == "lower") {
      need(0, 0, "no");
      std::string out = s;
      for (char& c : out) {
        c = name == "upper" ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                            : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      return Value::str(std::move(out));
    }
    if (name == "capitalize") {
      need(0, 0, "no");
      std::string out = s;
      for (size_t i = 0; i < out.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(out[i]);
        out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
      }
      return Value::str(std::move(out));
    }
    if (name == "strip" || name == "lstrip" || name == "rstrip") {
      need(0, 1, "at most 1");
      std::string chars = n == 1 ? str_arg(0) : " \t\n\r\v\f";
      size_t begin = 0;
      size_t end = s.size();
      if (name != "rstrip") {
        while (begin < end && chars.find(s[begin]) != std::string::npos) ++begin;
      }
      if (name != "lstrip") {
        while (end > begin && chars.find(s[end - 1]) != std::string::npos) --end;
      }
      return Value::str(s.substr(begin, end - begin));
    }
    if (name == "split") {
      need(0, 1, "at most 1");
      std::vector<Value> parts;
      if (n == 0) {
        size_t i = 0;
        while (i < s.size()) {
          while (i < s.size() && is_space(s[i])) ++i;
          if (i >= s.size()) break;
          size_t start = i;
          while (i < s.size() && !is_space(s[i])) ++i;
          parts.push_back(Value::str(s.substr(start, i - start)));
        }
      } else {
        const std::string& sep = str_arg(0);
        if (sep.empty()) trip(ExcKind::TypeError, "empty separator", span);
        size_t start = 0;
        while (true) {
          size_t pos = s.find(sep, start);
          if (pos == std::string::npos) {
            parts.push_back(Value::str(s.substr(start)));
            break;
          }
          parts.push_back(Value::str(s.substr(start, pos - start)));
          start = pos + sep.size();
        }
      }
      check_collection(parts.size(), span);
      return make_list(std::move(parts));
    }
    if (name == "join") {
      need(1, 1, "exactly 1");
      std::vector<Value> items = iterable_snapshot(args[0], span, "join");
      std::string out;
      for (size_t i = 0; i < items.size(); ++i) {
        if (!items[i].is_str()) {
          trip(ExcKind::TypeError,
               "sequence item " + std::to_string(i) + ": expected str instance, '" +
                   items[i].type_name() + "' found",
               span);
        }
        if (i) out += s;
        out += items[i].as_str();
        check_collection(out.size(), span);
      }
      return Value::str(std::move(out));
    }
    if (name == "replace") {
      need(2, 2, "exactly 2");
      const std::string& old_s = str_arg(0);
      const std::string& new_s = str_arg(1);
      std::string out;
      if (old_s.empty()) {
        out = new_s;
        for (char c : s) {
          out += c;
          out += new_s;
          check_collection(out.size(), span);
        }
      } else {
        size_t start = 0;
        while (true) {
          size_t pos = s.find(old_s, start);
          if (pos == std::string::npos) {
            out += s.substr(start);
            break;
          }
          out += s.substr(start, pos - start);
          out += new_s;
          check_collection(out.size(), span);
          start = pos + old_s.size();
        }
      }
      check_collection(out.size(), span);
      return Value::str(std::move(out));
    }
    if (name == "startswith" || name == "endswith") {
      need(1, 1, "exactly 1");
      const std::string& prefix = str_arg(0);
      if (prefix.size() > s.size()) return Value::boolean(false);
      bool match = name == "startswith"
                       ? s.compare(0, prefix.size(), prefix) == 0
                       : s.compare(s.size() - prefix.size(), prefix.size(), prefix) == 0;
      return Value::boolean(match);
    }
    if (name == "find" || name == "index") {
      need(1, 1, "exactly 1");
      size_t pos = s.find(str_arg(0));
      if (pos == std::string::npos) {
        if (name == "index") trip(ExcKind::TypeError, "substring not found", span);
        return Value::integer(-1L);
      }
      return Value::integer(long(pos));
    }
    if (name == "count") {
      need(1, 1, "exactly 1");
      const std::string& sub = str_arg(0);
      if (sub.empty()) return Value::integer(long(s.size() + 1));
      long count = 0;
      size_t start = 0;
      while (true) {
        size_t pos = s.find(sub, start);
        if (pos == std::string::npos) break;
        ++count;
        start = pos + sub.size();
      }
      return Value::integer(count);
    }
    if (name == "isdigit" || name == "isalpha" || name == "isalnum" || name == "islower" ||
        name == "isupper") {
      need(0, 0, "no");
      if (s.empty()) return Value::boolean(false);
      bool ok = true;
      bool has_cased = false;
      for (unsigned char c : s) {
        if (name == "isdigit") ok = ok && std::isdigit(c);
        else if (name == "isalpha") ok = ok && std::isalpha(c);
        else if (name == "isalnum") ok = ok && std::isalnum(c);
        else if (name == "islower") {
          if (std::isupper(c)) ok = false;
          if (std::islower(c)) has_cased = true;
        } else {
          if (std::islower(c)) ok = false;
          if (std::isupper(c)) has_cased = true;
        }
      }
      if (name == "islower" || name == "isupper") ok = ok && has_cased;
      return Value::boolean(ok);
    }
  }

  if (self.is_dict()) {
    auto& dict = *self.as_dict();
    if (name == "get") {
      need(1, 2, "1 or 2");
      size_t h = hash_or_trip(args[0], span);
      size_t pos = dict.find(args[0], h);
      if (pos != DictObj::npos) return dict.entries[pos].second;
      return n == 2 ? args[1] : Value::none();
    }
    if (name == "keys" || name == "values" || name == "items") {
      need(0, 0, "no");
      std::vector<Value> out;
      out.reserve(dict.entries.size());
      for (const auto& [key, value] : dict.entries) {
        if (name == "keys") out.push_back(key);
        else if (name == "values") out.push_back(value);
        else out.push_back(make_tuple({key, value}));
      }
      return make_list(std::move(out));
    }
    if (name == "pop") {
      need(1, 2, "1 or 2");
      size_t h = hash_or_trip(args[0], span);
      size_t pos = dict.find(args[0], h);
      if (pos == DictObj::npos) {
        if (n == 2) return args[1];
        trip(ExcKind::KeyError, value_repr(args[0]), span);
      }
      Value out = std::move(dict.entries[pos].second);
      dict.entries.erase(dict.entries.begin() + static_cast<long>(pos));
      // Rebuild the index: erase shifted every later position.
      dict.index.clear();
      for (size_t i = 0; i < dict.entries.size(); ++i) {
        size_t eh = hash_or_trip(dict.entries[i].first, span);
        dict.index[eh].push_back(i);
      }
      return out;
    }
    if (name == "update") {
      need(1, 1, "exactly 1");
      if (!args[0].is_dict()) {
        trip(ExcKind::TypeError, "update() argument must be a dict", span);
      }
      for (const auto& [key, value] : args[0].as_dict()->entries) {
        dict_set(dict, key, value, span);
      }
      return Value::none();
    }
    if (name == "setdefault") {
      need(1, 2, "1 or 2");
      size_t h = hash_or_trip(args[0], span);
      size_t pos = dict.find(args[0], h);
      if (pos != DictObj::npos) return dict.entries[pos].second;
      Value value = n == 2 ? args[1] : Value::none();
      dict_set(dict, args[0], value, span);
      return value;
    }
    if (name == "clear") {
      need(0, 0, "no");
      dict.entries.clear();
      dict.index.clear();
      return Value::none();
    }
    if (name == "copy") {
      need(0, 0, "no");
      Value out = make_dict_empty();
      for (const auto& [key, value] : dict.entries) {
        dict_set(*out.as_dict(), key, value, span);
      }
      return out;
    }
  }

  if (self.is_set()) {
    auto& set = *self.as_set();
    if (name == "add") {
      need(1, 1, "exactly 1");
      set_add(set, args[0], span);
      return Value::none();
    }
    if (name == "remove" || name == "discard") {
      need(1, 1, "exactly 1");
      size_t h = hash_or_trip(args[0], span);
      size_t pos = set.find(args[0], h);
      if (pos == SetObj::npos) {
        if (name == "remove") trip(ExcKind::KeyError, value_repr(args[0]), span);
        return Value::none();
      }
      set.items.erase(set.items.begin() + static_cast<long>(pos));
      set.index.clear();
      for (size_t i = 0; i < set.items.size(); ++i) {
        size_t eh = hash_or_trip(set.items[i], span);
        set.index[eh].push_back(i);
      }
      return Value::none();
    }
    if (name == "union" || name == "intersection" || name == "difference") {
      need(1, 1, "exactly 1");
      if (!args[0].is_set()) {
        trip(ExcKind::TypeError, name + "() argument must be a set", span);
      }
      const auto& other = *args[0].as_set();
      auto out = std::make_shared<SetObj>();
      Value out_v = Value::set(out);
      if (name == "union") {
        for (const Value& item : set.items) set_add(*out, item, span);
        for (const Value& item : other.items) set_add(*out, item, span);
      } else if (name == "intersection") {
        for (const Value& item : set.items) {
          size_t h = hash_or_trip(item, span);
          if (other.find(item, h) != SetObj::npos) set_add(*out, item, span);
        }
      } else {
        for (const Value& item : set.items) {
          size_t h = hash_or_trip(item, span);
          if (other.find(item, h) == SetObj::npos) set_add(*out, item, span);
        }
      }
      return out_v;
    }
    if (name == "clear") {
      need(0, 0, "no");
      set.items.clear();
      set.index.clear();
      return Value::none();
    }
    if (name == "copy") {
      need(0, 0, "no");
      return make_set(set.items, span);
    }
  }

  if (self.is_tuple()) {
    const auto& items = self.as_tuple()->items;
    if (name == "count") {
      need(1, 1, "exactly 1");
      long count = 0;
      for (const Value& item : items) {
        if (value_equal(item, args[0])) ++count;
      }
      return Value::integer(count);
    }
    if (name == "index") {
      need(1, 1, "exactly 1");
      for (size_t i = 0; i < items.size(); ++i) {
        if (value_equal(items[i], args[0])) return Value::integer(long(i));
      }
      trip(ExcKind::TypeError, "tuple.index(x): x not in tuple", span);
    }
  }

  trip(ExcKind::TypeError,
       "'" + self.type_name() + "' object has no attribute '" + name + "'", span);
}

// ---- modules ----

namespace {

const char* const kMathConsts[][2] = {{"pi", ""}, {"e", ""}, {"inf", ""}, {"tau", ""}};
const char* const kMathFuncs[] = {"sqrt", "floor", "ceil",      "fabs", "exp", "log",
                                  "log10", "pow",  "gcd",       "factorial", "sin", "cos",
                                  "tan"};
const char* const kStringConsts[][2] = {
    {"ascii_lowercase", "abcdefghijklmnopqrstuvwxyz"},
    {"ascii_uppercase", "ABCDEFGHIJKLMNOPQRSTUVWXYZ"},
    {"ascii_letters", "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"},
    {"digits", "0123456789"},
    {"punctuation", "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"},
    {"whitespace", " \t\n\r\x0b\x0c"},
};

bool in_list(const char* const* names, size_t count, const std::string& name) {
  for (size_t i = 0; i < count; ++i) {
    if (name == names[i]) return true;
  }
  return false;
}

}  // namespace

bool Interpreter::module_has_attr(const std::string& module, const std::string& name) const {
  if (module == "math") {
    for (const auto& c : kMathConsts) {
      if (name == c[0]) return true;
    }
    return in_list(kMathFuncs, std::size(kMathFuncs), name);
  }
  if (module == "string") {
    for (const auto& c : kStringConsts) {
      if (name == c[0]) return true;
    }
    return false;
  }
  return false;
}

Value Interpreter::module_attr(const std::string& module, const std::string& name, Span span) {
  if (module == "math") {
    if (name == "pi") return Value::floating(M_PI);
    if (name == "e") return Value::floating(M_E);
    if (name == "tau") return Value::floating(2.0 * M_PI);
    if (name == "inf") return Value::floating(HUGE_VAL);
    if (in_list(kMathFuncs, std::size(kMathFuncs), name)) {
      return Value::module_func(module, name);
    }
  }
  if (module == "string") {
    for (const auto& c : kStringConsts) {
      if (name == c[0]) return Value::str(c[1]);
    }
  }
  trip(ExcKind::TypeError, "module '" + module + "' has no attribute '" + name + "'", span);
}

Value Interpreter::module_func_call(const std::string& module, const std::string& name,
                                    std::vector<Value>& args, Span span) {
  if (module != "math") {
    // string has no functions; anything else cannot be imported.
    Value attr = module_attr(module, name, span);
    trip(ExcKind::TypeError, "'" + attr.type_name() + "' object is not callable", span);
  }
  const size_t n = args.size();
  auto need = [&](size_t want) {
    if (n != want) {
      trip(ExcKind::TypeError,
           "math." + name + "() takes exactly " + std::to_string(want) + " arguments (" +
               std::to_string(n) + " given)",
           span);
    }
  };
  auto farg = [&](size_t i) { return to_double(args[i], span); };

  if (name == "sqrt") {
    need(1);
    double x = farg(0);
    if (x < 0.0) trip(ExcKind::TypeError, "math domain error", span);
    return Value::floating(std::sqrt(x));
  }
  if (name == "floor" || name == "ceil") {
    need(1);
    if (args[0].is_int()) return args[0];
    if (args[0].is_bool()) return Value::integer(args[0].as_bool() ? 1L : 0L);
    double x = farg(0);
    if (!std::isfinite(x)) {
      trip(ExcKind::OverflowError, "cannot convert float infinity or NaN to integer", span);
    }
    mpz_class z(name == "floor" ? std::floor(x) : std::ceil(x));
    check_int(z, span);
    return Value::integer(std::move(z));
  }
  if (name == "fabs") {
    need(1);
    return Value::floating(std::fabs(farg(0)));
  }
  if (name == "exp") {
    need(1);
    double result = std::exp(farg(0));
    if (std::isinf(result)) trip(ExcKind::OverflowError, "math range error", span);
    return Value::floating(result);
  }
  if (name == "log" || name == "log10") {
    need(1);
    double x = farg(0);
    if (x <= 0.0) trip(ExcKind::TypeError, "math domain error", span);
    return Value::floating(name == "log" ? std::log(x) : std::log10(x));
  }
  if (name == "pow") {
    need(2);
    double a = farg(0);
    double b = farg(1);
    if (a < 0.0 && b != std::floor(b)) trip(ExcKind::TypeError, "math domain error", span);
    double result = std::pow(a, b);
    if (std::isinf(result) && std::isfinite(a) && std::isfinite(b)) {
      trip(ExcKind::OverflowError, "math range error", span);
    }
    return Value::floating(result);
  }
  if (name == "gcd") {
    need(2);
    mpz_class a = to_mpz(args[0], span);
    mpz_class b = to_mpz(args[1], span);
    mpz_class result;
    mpz_gcd(result.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return Value::integer(std::move(result));
  }
  if (name == "factorial") {
    need(1);
    mpz_class x = to_mpz(args[0], span);
    if (x < 0) {
      trip(ExcKind::TypeError, "factorial() not defined for negative values", span);
    }
    if (!x.fits_ulong_p() || x.get_ui() > 200000) {
      trip(ExcKind::OverflowError,
           "integer magnitude exceeds " + std::to_string(policy_.limits.max_int_magnitude) +
               " decimal digits",
           span);
    }
    mpz_class result;
    mpz_fac_ui(result.get_mpz_t(), x.get_ui());
    check_int(result, span);
    return Value::integer(std::move(result));
  }
  if (name == "sin" || name == "cos" || name == "tan") {
    need(1);
    double x = farg(0);
    return Value::floating(name == "sin" ? std::sin(x) : name == "cos" ? std::cos(x)
                                                                       : std::tan(x));
  }
  trip(ExcKind::TypeError, "module 'math' has no attribute '" + name + "'", span);
}

}  // namespace safexec::detail
