#pragma once

#include <optional>
#include <string>

#include "safexec/ast.hpp"

namespace safexec {

// A lexing or parsing failure. `outside_safe_grammar` marks encounters with
// constructs the grammar deliberately excludes (class, try, yield, ...) so
// downstream layers can report them as grammar violations rather than plain
// syntax errors.
struct SyntaxDiagnostic {
  std::string message;
  Span span{};
  std::optional<std::string> expected;
  bool outside_safe_grammar{false};
  std::string offending;
};

}  // namespace safexec
