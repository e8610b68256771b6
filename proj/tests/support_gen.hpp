#pragma once

// Deterministic random program generator for property tests. Emits small
// programs inside the safe subset that always terminate quickly.

#include <random>
#include <string>
#include <vector>

namespace testutil {

class ProgramGen {
 public:
  explicit ProgramGen(uint64_t seed) : rng_(seed) {}

  std::string program() {
    vars_ = {"a", "b", "c"};
    std::string out = "a = 1\nb = 2\nc = 3\n";
    int statements = 1 + pick(4);
    for (int i = 0; i < statements; ++i) {
      out += statement(0);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> vars_;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }
  std::string var() { return vars_[static_cast<size_t>(pick(static_cast<int>(vars_.size())))]; }

  std::string indent(int level) { return std::string(static_cast<size_t>(level) * 4, ' '); }

  std::string expr(int depth) {
    if (depth > 2) return atom();
    switch (pick(6)) {
      case 0: return atom();
      case 1: return expr(depth + 1) + " + " + expr(depth + 1);
      case 2: return expr(depth + 1) + " * " + atom();
      case 3: return "(" + expr(depth + 1) + " - " + expr(depth + 1) + ")";
      case 4: return "-" + atom();
      default: return atom() + " % 7 + 1";
    }
  }

  std::string atom() {
    switch (pick(4)) {
      case 0: return std::to_string(pick(100));
      case 1: return var();
      case 2: return std::to_string(pick(10));
      default: return "len(" + quoted() + ")";
    }
  }

  std::string quoted() {
    static const char* words[] = {"'abc'", "'hello'", "''", "'xy'"};
    return words[pick(4)];
  }

  std::string cond() {
    switch (pick(3)) {
      case 0: return var() + " < " + std::to_string(pick(50));
      case 1: return var() + " % 2 == 0";
      default: return var() + " != " + var();
    }
  }

  std::string statement(int level) {
    if (level >= 2) return indent(level) + var() + " = " + expr(0) + "\n";
    switch (pick(6)) {
      case 0:
      case 1:
        return indent(level) + var() + " = " + expr(0) + "\n";
      case 2:
        return indent(level) + "print(" + expr(0) + ")\n";
      case 3: {
        std::string out = indent(level) + "if " + cond() + ":\n";
        out += statement(level + 1);
        if (pick(2)) {
          out += indent(level) + "else:\n";
          out += statement(level + 1);
        }
        return out;
      }
      case 4: {
        std::string loop_var = "i" + std::to_string(level);
        vars_.push_back(loop_var);
        std::string out =
            indent(level) + "for " + loop_var + " in range(" + std::to_string(1 + pick(5)) +
            "):\n";
        out += statement(level + 1);
        vars_.pop_back();
        return out;
      }
      default: {
        return indent(level) + var() + " += " + std::to_string(1 + pick(5)) + "\n";
      }
    }
  }
};

}  // namespace testutil
