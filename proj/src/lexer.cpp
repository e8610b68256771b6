#include "safexec/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace safexec {

namespace {

const std::unordered_set<std::string> kKeywords = {
    "def",   "return", "if",     "elif", "else",  "for",  "while", "break",
    "continue", "pass", "import", "from", "raise", "lambda", "and", "or",
    "not",   "in",     "True",   "False", "None",
};

// Reserved words for constructs the safe grammar excludes on purpose. They
// never become identifiers; the parser reports them as grammar violations.
const std::unordered_set<std::string> kExcludedKeywords = {
    "class", "with",  "try",    "except", "finally", "yield",
    "async", "await", "global", "nonlocal", "del",   "assert",
    "is",    "as",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Multi-character operators, longest first.
const std::array<const char*, 12> kLongOps = {
    "//=", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "->", ":=",
};

const char kSingleOps[] = "+-*/%<>=()[]{},:.;";

class Lexer {
 public:
  Lexer(const std::string& text, int base_line, int base_col, bool fragment)
      : text_(text), line_(base_line), col_(base_col), fragment_(fragment) {}

  LexResult run() {
    indents_.push_back(0);
    if (!fragment_) {
      lexLines();
    } else {
      // Fragments (f-string interpolations) have no line structure.
      while (!done() && !failed()) {
        skipSpaces();
        if (done()) break;
        lexToken();
      }
    }
    return {std::move(tokens_), std::move(diags_)};
  }

 private:
  const std::string& text_;
  size_t pos_{0};
  int line_;
  int col_;
  bool fragment_;
  std::vector<Token> tokens_;
  std::vector<SyntaxDiagnostic> diags_;
  std::vector<int> indents_;
  // Open bracket stack with spans, for implicit line joining and the
  // "unterminated parenthesis" diagnostic.
  std::vector<std::pair<char, Span>> brackets_;

  bool done() const { return pos_ >= text_.size(); }
  bool failed() const { return !diags_.empty(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  Span here() const { return Span{line_, col_, line_, col_}; }

  void error(const std::string& message, Span span, std::optional<std::string> expected = {},
             bool outside = false, std::string offending = {}) {
    diags_.push_back({message, span, std::move(expected), outside, std::move(offending)});
  }

  void push(TokenType type, std::string text, Span span, std::string value = {}) {
    tokens_.push_back({type, std::move(text), std::move(value), span});
  }

  void lexLines() {
    while (!done() && !failed()) {
      if (brackets_.empty()) {
        if (!lexIndentation()) return;
        if (done() || failed()) break;
      }
      // Lex tokens until end of logical line.
      bool line_had_token = false;
      while (!done() && !failed()) {
        skipSpaces();
        if (done()) break;
        char c = peek();
        if (c == '#') {
          while (!done() && peek() != '\n') advance();
          continue;
        }
        if (c == '\n') {
          if (brackets_.empty()) {
            if (line_had_token) {
              push(TokenType::Newline, "\n", here());
            }
            advance();
            break;
          }
          advance();  // implicit joining inside brackets
          continue;
        }
        if (c == '\t') {
          error("tab character is not allowed", here());
          return;
        }
        if (c == '\r') {
          advance();
          continue;
        }
        lexToken();
        line_had_token = true;
      }
    }
    if (failed()) return;
    if (!brackets_.empty()) {
      error("unterminated parenthesis", brackets_.back().second,
            std::string(1, closingFor(brackets_.back().first)));
      return;
    }
    // Final NEWLINE for a last line without one.
    if (!tokens_.empty() && tokens_.back().type != TokenType::Newline) {
      push(TokenType::Newline, "\n", here());
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenType::Dedent, "", here());
    }
  }

  static char closingFor(char open) {
    switch (open) {
      case '(': return ')';
      case '[': return ']';
      default: return '}';
    }
  }

  // Measures leading spaces of the next non-blank line and emits
  // INDENT/DEDENT. Returns false when the input is exhausted or on error.
  bool lexIndentation() {
    while (!done()) {
      int spaces = 0;
      Span start = here();
      while (!done() && peek() == ' ') {
        ++spaces;
        advance();
      }
      if (!done() && peek() == '\t') {
        error("tab character in indentation", here());
        return false;
      }
      if (done()) return false;
      if (peek() == '\n') {
        advance();
        continue;  // blank line
      }
      if (peek() == '\r') {
        advance();
        continue;
      }
      if (peek() == '#') {
        while (!done() && peek() != '\n') advance();
        continue;  // comment-only line
      }
      int current = indents_.back();
      if (spaces > current) {
        indents_.push_back(spaces);
        push(TokenType::Indent, "", start);
      } else if (spaces < current) {
        while (indents_.size() > 1 && indents_.back() > spaces) {
          indents_.pop_back();
          push(TokenType::Dedent, "", start);
        }
        if (indents_.back() != spaces) {
          error("inconsistent indentation: dedent does not match any outer level", here());
          return false;
        }
      }
      return true;
    }
    return false;
  }

  void skipSpaces() {
    while (!done() && peek() == ' ') advance();
  }

  void lexToken() {
    char c = peek();
    Span start = here();

    if (is_ident_start(c)) {
      // f-string prefix
      if ((c == 'f' || c == 'F') && (peek(1) == '"' || peek(1) == '\'')) {
        advance();
        lexString(start, /*fstring=*/true);
        return;
      }
      std::string word;
      while (!done() && is_ident_cont(peek())) {
        word += peek();
        advance();
      }
      Span span{start.start_line, start.start_col, line_, col_ - 1};
      if (kKeywords.count(word) || kExcludedKeywords.count(word)) {
        push(TokenType::Keyword, word, span);
      } else {
        push(TokenType::Name, word, span);
      }
      return;
    }

    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
      lexNumber(start);
      return;
    }

    if (c == '"' || c == '\'') {
      lexString(start, /*fstring=*/false);
      return;
    }

    // Operators.
    for (const char* op : kLongOps) {
      size_t n = std::strlen(op);
      if (text_.compare(pos_, n, op) == 0) {
        for (size_t i = 0; i < n; ++i) advance();
        push(TokenType::Op, op, Span{start.start_line, start.start_col, line_, col_ - 1});
        return;
      }
    }
    if (std::strchr(kSingleOps, c) != nullptr) {
      advance();
      std::string op(1, c);
      if (c == '(' || c == '[' || c == '{') {
        brackets_.emplace_back(c, start);
      } else if (c == ')' || c == ']' || c == '}') {
        if (brackets_.empty() || closingFor(brackets_.back().first) != c) {
          error(std::string("unmatched '") + c + "'", start);
          return;
        }
        brackets_.pop_back();
      }
      push(TokenType::Op, op, start);
      return;
    }

    error(std::string("illegal character '") + c + "'", start);
  }

  void lexNumber(Span start) {
    std::string digits;
    bool is_float = false;
    while (!done() && is_digit(peek())) {
      digits += peek();
      advance();
    }
    if (digits.size() > 1 && digits[0] == '0') {
      // Reject 0-prefixed ints the way the reference grammar does, unless it
      // turns out to be a float like 0.5.
      if (done() || (peek() != '.' && peek() != 'e' && peek() != 'E')) {
        error("leading zeros in decimal integer literals are not permitted", start);
        return;
      }
    }
    if (!done() && peek() == '.') {
      is_float = true;
      digits += '.';
      advance();
      while (!done() && is_digit(peek())) {
        digits += peek();
        advance();
      }
    }
    if (!done() && (peek() == 'e' || peek() == 'E')) {
      is_float = true;
      digits += 'e';
      advance();
      if (!done() && (peek() == '+' || peek() == '-')) {
        digits += peek();
        advance();
      }
      if (done() || !is_digit(peek())) {
        error("malformed float exponent", here());
        return;
      }
      while (!done() && is_digit(peek())) {
        digits += peek();
        advance();
      }
    }
    if (!done() && is_ident_start(peek())) {
      error("invalid character after numeric literal", here());
      return;
    }
    Span span{start.start_line, start.start_col, line_, col_ - 1};
    push(is_float ? TokenType::FloatLit : TokenType::IntLit, digits, span);
  }

  void lexString(Span start, bool fstring) {
    char quote = peek();
    advance();
    std::string cooked;  // escaped-processed for plain strings, raw for f-strings
    while (true) {
      if (done() || peek() == '\n') {
        error("unterminated string literal", start, std::string(1, quote));
        return;
      }
      char c = peek();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        if (fstring) {
          // Keep escapes raw; the parser cooks literal parts after splitting
          // out interpolations.
          cooked += c;
          advance();
          if (done() || peek() == '\n') {
            error("unterminated string literal", start, std::string(1, quote));
            return;
          }
          cooked += peek();
          advance();
          continue;
        }
        advance();
        if (done()) {
          error("unterminated string literal", start, std::string(1, quote));
          return;
        }
        char esc = peek();
        switch (esc) {
          case 'n': cooked += '\n'; break;
          case 't': cooked += '\t'; break;
          case 'r': cooked += '\r'; break;
          case '\\': cooked += '\\'; break;
          case '\'': cooked += '\''; break;
          case '"': cooked += '"'; break;
          case '0': cooked += '\0'; break;
          default:
            error(std::string("unsupported escape sequence '\\") + esc + "'", here());
            return;
        }
        advance();
        continue;
      }
      cooked += c;
      advance();
    }
    Span span{start.start_line, start.start_col, line_, col_ - 1};
    if (fstring) {
      push(TokenType::FStrLit, "", span, cooked);
    } else {
      push(TokenType::StrLit, "", span, cooked);
    }
  }
};

}  // namespace

const char* token_type_name(TokenType type) {
  switch (type) {
    case TokenType::Name: return "NAME";
    case TokenType::Keyword: return "KEYWORD";
    case TokenType::IntLit: return "INT";
    case TokenType::FloatLit: return "FLOAT";
    case TokenType::StrLit: return "STRING";
    case TokenType::FStrLit: return "FSTRING";
    case TokenType::Op: return "OP";
    case TokenType::Newline: return "NEWLINE";
    case TokenType::Indent: return "INDENT";
    case TokenType::Dedent: return "DEDENT";
    case TokenType::EndMarker: return "ENDMARKER";
  }
  return "?";
}

LexResult tokenize(const SourceProgram& src) {
  Lexer lexer(src.text, 1, 1, /*fragment=*/false);
  return lexer.run();
}

LexResult tokenize_fragment(const std::string& text, int base_line, int base_col) {
  Lexer lexer(text, base_line, base_col, /*fragment=*/true);
  return lexer.run();
}

bool is_reserved_excluded_keyword(const std::string& word) {
  return kExcludedKeywords.count(word) > 0;
}

}  // namespace safexec
