#pragma once

#include <string>
#include <vector>

#include "safexec/diagnostics.hpp"

namespace safexec {

struct SourceProgram {
  std::string text;
  std::string origin{"<input>"};
};

enum class TokenType : uint8_t {
  Name,
  Keyword,
  IntLit,
  FloatLit,
  StrLit,
  FStrLit,
  Op,
  Newline,
  Indent,
  Dedent,
  EndMarker,
};

struct Token {
  TokenType type{TokenType::EndMarker};
  std::string text;    // raw spelling for names/keywords/ops/numbers
  std::string value;   // cooked value for string literals, raw body for f-strings
  Span span{};
};

const char* token_type_name(TokenType type);

struct LexResult {
  std::vector<Token> tokens;
  std::vector<SyntaxDiagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Indentation-sensitive tokenizer. Lines inside brackets join implicitly;
// tabs in indentation are rejected. Stops at the first error.
LexResult tokenize(const SourceProgram& src);

// Used by the parser to lex f-string interpolations with absolute positions.
LexResult tokenize_fragment(const std::string& text, int base_line, int base_col);

bool is_reserved_excluded_keyword(const std::string& word);

}  // namespace safexec
