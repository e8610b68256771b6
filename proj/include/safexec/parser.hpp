#pragma once

#include <optional>

#include "safexec/lexer.hpp"

namespace safexec {

struct ParseResult {
  std::optional<SyntaxTree> tree;
  std::vector<SyntaxDiagnostic> diagnostics;
  bool ok() const { return tree.has_value(); }
};

// Parses a program in the safe subset. Stops at the first unrecoverable
// error; excluded constructs come back as diagnostics flagged
// outside_safe_grammar.
ParseResult parse(const SourceProgram& src);

}  // namespace safexec
