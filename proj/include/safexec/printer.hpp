#pragma once

#include <string>

#include "safexec/ast.hpp"

namespace safexec {

// Canonical source form: 4-space indents, minimal parentheses that preserve
// tree structure, repr-style string literals. Reparsing the output yields a
// tree structurally equal to the input.
std::string pretty_print(const SyntaxTree& tree);
std::string pretty_print_expr(const AstNode& expr);

// repr-style quoting shared with the value renderer.
std::string quote_string(const std::string& s);

}  // namespace safexec
