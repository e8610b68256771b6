#include "safexec/parser.hpp"

#include <cstdlib>
#include <unordered_set>

namespace safexec {

namespace {

struct ParseError {
  SyntaxDiagnostic diagnostic;
};

[[noreturn]] void fail(std::string message, Span span, std::optional<std::string> expected = {},
                       bool outside = false, std::string offending = {}) {
  throw ParseError{{std::move(message), span, std::move(expected), outside, std::move(offending)}};
}

Span join(Span a, Span b) {
  return Span{a.start_line, a.start_col, b.end_line, b.end_col};
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  AstNode parseModule() {
    AstNode module;
    module.kind = NodeKind::Module;
    module.span = tokens_.empty() ? Span{1, 1, 1, 1}
                                  : join(tokens_.front().span, tokens_.back().span);
    while (!atEnd()) {
      parseStatementInto(module.children);
    }
    return module;
  }

 private:
  std::vector<Token> tokens_;
  size_t pos_{0};
  int function_depth_{0};
  int loop_context_{0};

  bool atEnd() const { return pos_ >= tokens_.size(); }
  const Token& peek(size_t ahead = 0) const {
    static const Token kEnd{TokenType::EndMarker, "", "", {}};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : kEnd;
  }
  const Token& prev() const { return tokens_[pos_ - 1]; }
  Span hereSpan() const {
    if (!atEnd()) return peek().span;
    return tokens_.empty() ? Span{1, 1, 1, 1} : tokens_.back().span;
  }
  const Token& advance() { return tokens_[pos_++]; }

  bool check(TokenType type) const { return !atEnd() && peek().type == type; }
  bool checkOp(const char* text) const {
    return check(TokenType::Op) && peek().text == text;
  }
  bool checkKw(const char* text) const {
    return check(TokenType::Keyword) && peek().text == text;
  }
  bool matchOp(const char* text) {
    if (checkOp(text)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool matchKw(const char* text) {
    if (checkKw(text)) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expectOp(const char* text) {
    if (!checkOp(text)) {
      fail(std::string("expected '") + text + "'", hereSpan(), std::string(text));
    }
    return advance();
  }
  void expectNewline() {
    if (!check(TokenType::Newline)) {
      fail("expected end of line", hereSpan(), std::string("NEWLINE"));
    }
    ++pos_;
  }
  const Token& expectName(const char* what) {
    if (!check(TokenType::Name)) {
      fail(std::string("expected ") + what, hereSpan(), std::string("NAME"));
    }
    return advance();
  }

  void rejectExcluded(const Token& tok) {
    if (tok.type == TokenType::Keyword && is_reserved_excluded_keyword(tok.text)) {
      fail("construct '" + tok.text + "' is outside the safe grammar subset", tok.span, {},
           /*outside=*/true, tok.text);
    }
  }

  // ---- statements ----

  void parseStatementInto(std::vector<AstNode>& out) {
    const Token& tok = peek();
    rejectExcluded(tok);
    if (tok.type == TokenType::Keyword) {
      const std::string& kw = tok.text;
      if (kw == "if") {
        out.push_back(parseIf());
        return;
      }
      if (kw == "while") {
        out.push_back(parseWhile());
        return;
      }
      if (kw == "for") {
        out.push_back(parseFor());
        return;
      }
      if (kw == "def") {
        out.push_back(parseFunctionDef());
        return;
      }
      if (kw == "elif" || kw == "else") {
        fail("'" + kw + "' without a matching 'if'", tok.span);
      }
    }
    parseSimpleLineInto(out);
  }

  // simple_stmt (';' simple_stmt)* [';'] NEWLINE
  void parseSimpleLineInto(std::vector<AstNode>& out) {
    out.push_back(parseSimpleStatement());
    while (matchOp(";")) {
      if (check(TokenType::Newline)) break;
      out.push_back(parseSimpleStatement());
    }
    expectNewline();
  }

  AstNode parseSimpleStatement() {
    const Token& tok = peek();
    if (tok.type == TokenType::Keyword) {
      const std::string& kw = tok.text;
      if (kw == "return") {
        if (function_depth_ == 0) fail("'return' outside function", tok.span);
        return parseReturn();
      }
      if (kw == "pass") return leafStatement(NodeKind::Pass);
      if (kw == "break") {
        if (loop_context_ == 0) fail("'break' outside loop", tok.span);
        return leafStatement(NodeKind::Break);
      }
      if (kw == "continue") {
        if (loop_context_ == 0) fail("'continue' not properly in loop", tok.span);
        return leafStatement(NodeKind::Continue);
      }
      if (kw == "import") return parseImport();
      if (kw == "from") return parseImportFrom();
      if (kw == "raise") return parseRaise();
    }
    return parseExprOrAssign();
  }

  AstNode leafStatement(NodeKind kind) {
    const Token& tok = advance();
    AstNode node;
    node.kind = kind;
    node.span = tok.span;
    return node;
  }

  AstNode parseReturn() {
    const Token& kw = advance();
    AstNode node;
    node.kind = NodeKind::Return;
    node.span = kw.span;
    if (!check(TokenType::Newline) && !checkOp(";")) {
      node.children.push_back(parseTestList());
      node.span = join(kw.span, node.children.back().span);
    }
    return node;
  }

  AstNode parseImport() {
    const Token& kw = advance();
    const Token& name = expectName("module name");
    if (checkKw("as")) rejectExcluded(peek());
    if (checkOp(".")) {
      fail("submodule imports are not part of the safe grammar subset", peek().span, {},
           /*outside=*/true, name.text);
    }
    if (checkOp(",")) {
      fail("multiple modules per import statement are not supported", peek().span,
           std::string("NEWLINE"));
    }
    AstNode node;
    node.kind = NodeKind::Import;
    node.text = name.text;
    node.span = join(kw.span, name.span);
    return node;
  }

  AstNode parseImportFrom() {
    const Token& kw = advance();
    const Token& module = expectName("module name");
    if (!matchKw("import")) {
      fail("expected 'import'", hereSpan(), std::string("import"));
    }
    AstNode node;
    node.kind = NodeKind::ImportFrom;
    node.text = module.text;
    Span last = module.span;
    while (true) {
      const Token& sym = expectName("imported name");
      node.names.push_back(sym.text);
      last = sym.span;
      if (checkKw("as")) rejectExcluded(peek());
      if (!matchOp(",")) break;
    }
    node.span = join(kw.span, last);
    return node;
  }

  AstNode parseRaise() {
    const Token& kw = advance();
    if (check(TokenType::Newline) || checkOp(";")) {
      fail("bare 'raise' is not part of the safe grammar subset", kw.span, {}, /*outside=*/true,
           "raise");
    }
    AstNode node;
    node.kind = NodeKind::Raise;
    node.children.push_back(parseExpression());
    node.span = join(kw.span, node.children.back().span);
    return node;
  }

  AstNode parseExprOrAssign() {
    AstNode first = parseTestList();
    if (checkOp("=")) {
      validateTarget(first, /*allow_tuple=*/true);
      advance();
      AstNode value = parseTestList();
      if (checkOp("=")) {
        fail("chained assignment is not supported", peek().span);
      }
      AstNode node;
      node.kind = NodeKind::Assign;
      node.span = join(first.span, value.span);
      node.children.push_back(std::move(first));
      node.children.push_back(std::move(value));
      return node;
    }
    static const char* kAugOps[] = {"+=", "-=", "*=", "//="};
    for (const char* op : kAugOps) {
      if (checkOp(op)) {
        validateTarget(first, /*allow_tuple=*/false);
        advance();
        AstNode value = parseTestList();
        AstNode node;
        node.kind = NodeKind::AugAssign;
        node.text = std::string(op, std::strlen(op) - 1);  // "+=" -> "+"
        node.span = join(first.span, value.span);
        node.children.push_back(std::move(first));
        node.children.push_back(std::move(value));
        return node;
      }
    }
    AstNode node;
    node.kind = NodeKind::ExprStmt;
    node.span = first.span;
    node.children.push_back(std::move(first));
    return node;
  }

  void validateTarget(const AstNode& target, bool allow_tuple) {
    switch (target.kind) {
      case NodeKind::Name:
      case NodeKind::Subscript:
      case NodeKind::Attribute:
        return;
      case NodeKind::Tuple:
      case NodeKind::List:
        if (allow_tuple) {
          for (const AstNode& child : target.children) {
            validateTarget(child, /*allow_tuple=*/false);
          }
          return;
        }
        break;
      default:
        break;
    }
    fail("invalid assignment target", target.span);
  }

  AstNode parseIf() {
    const Token& kw = advance();
    AstNode node;
    node.kind = NodeKind::If;
    node.children.push_back(parseExpression());
    expectOp(":");
    std::vector<AstNode> body = parseSuite();
    node.split = static_cast<int>(body.size());
    Span last = body.back().span;
    for (AstNode& stmt : body) node.children.push_back(std::move(stmt));

    if (checkKw("elif")) {
      AstNode nested = parseIf();  // consumes 'elif' as its 'if'
      last = nested.span;
      node.children.push_back(std::move(nested));
    } else if (matchKw("else")) {
      expectOp(":");
      std::vector<AstNode> orelse = parseSuite();
      last = orelse.back().span;
      for (AstNode& stmt : orelse) node.children.push_back(std::move(stmt));
    }
    node.span = join(kw.span, last);
    return node;
  }

  AstNode parseWhile() {
    const Token& kw = advance();
    AstNode node;
    node.kind = NodeKind::While;
    node.children.push_back(parseExpression());
    expectOp(":");
    ++loop_context_;
    std::vector<AstNode> body = parseSuite();
    --loop_context_;
    node.span = join(kw.span, body.back().span);
    for (AstNode& stmt : body) node.children.push_back(std::move(stmt));
    return node;
  }

  AstNode parseFor() {
    const Token& kw = advance();
    AstNode node;
    node.kind = NodeKind::For;
    AstNode target = parseTargetList();
    if (!matchKw("in")) {
      fail("expected 'in'", hereSpan(), std::string("in"));
    }
    AstNode iter = parseTestList();
    expectOp(":");
    node.children.push_back(std::move(target));
    node.children.push_back(std::move(iter));
    ++loop_context_;
    std::vector<AstNode> body = parseSuite();
    --loop_context_;
    node.span = join(kw.span, body.back().span);
    for (AstNode& stmt : body) node.children.push_back(std::move(stmt));
    return node;
  }

  // Name (',' Name)* with an optional Tuple wrapper, for 'for' targets.
  AstNode parseTargetList() {
    std::vector<AstNode> parts;
    parts.push_back(parseTargetAtom());
    Span first = parts.front().span;
    Span last = first;
    bool tuple = false;
    while (matchOp(",")) {
      tuple = true;
      parts.push_back(parseTargetAtom());
      last = parts.back().span;
    }
    if (!tuple) return std::move(parts.front());
    AstNode node;
    node.kind = NodeKind::Tuple;
    node.span = join(first, last);
    node.children = std::move(parts);
    return node;
  }

  AstNode parseTargetAtom() {
    AstNode atom = parsePostfix();
    validateTarget(atom, /*allow_tuple=*/false);
    return atom;
  }

  AstNode parseFunctionDef() {
    const Token& kw = advance();
    const Token& name = expectName("function name");
    AstNode node;
    node.kind = NodeKind::FunctionDef;
    node.text = name.text;
    expectOp("(");
    if (!checkOp(")")) {
      while (true) {
        const Token& param = expectName("parameter name");
        for (const std::string& existing : node.names) {
          if (existing == param.text) {
            fail("duplicate parameter '" + param.text + "'", param.span);
          }
        }
        node.names.push_back(param.text);
        if (matchOp(":")) {
          parseExpression();  // annotation tokens, ignored semantically
        }
        if (matchOp("=")) {
          fail("parameter defaults are not supported", prev().span);
        }
        if (!matchOp(",")) break;
        if (checkOp(")")) break;
      }
    }
    expectOp(")");
    if (matchOp("->")) {
      parseExpression();  // return annotation, ignored
    }
    expectOp(":");
    ++function_depth_;
    int saved_loop = loop_context_;
    loop_context_ = 0;
    std::vector<AstNode> body = parseSuite();
    loop_context_ = saved_loop;
    --function_depth_;
    node.span = join(kw.span, body.back().span);
    for (AstNode& stmt : body) node.children.push_back(std::move(stmt));
    return node;
  }

  std::vector<AstNode> parseSuite() {
    std::vector<AstNode> body;
    if (check(TokenType::Newline)) {
      advance();
      if (!check(TokenType::Indent)) {
        fail("expected an indented block", hereSpan(), std::string("INDENT"));
      }
      advance();
      while (!check(TokenType::Dedent)) {
        if (atEnd()) {
          fail("unexpected end of input inside block", hereSpan(), std::string("DEDENT"));
        }
        parseStatementInto(body);
      }
      advance();  // DEDENT
    } else {
      // Inline suite: simple statements on the same line.
      parseSimpleLineInto(body);
    }
    if (body.empty()) {
      fail("empty block", hereSpan());
    }
    return body;
  }

  // ---- expressions ----

  // expr (',' expr)* -> Tuple when more than one or trailing comma.
  AstNode parseTestList() {
    AstNode first = parseExpression();
    if (!checkOp(",")) return first;
    AstNode node;
    node.kind = NodeKind::Tuple;
    Span start = first.span;
    Span last = first.span;
    node.children.push_back(std::move(first));
    while (matchOp(",")) {
      if (check(TokenType::Newline) || checkOp("=") || checkOp(")") || checkOp("]") ||
          checkOp("}") || checkOp(":") || atEnd()) {
        break;  // trailing comma
      }
      node.children.push_back(parseExpression());
      last = node.children.back().span;
    }
    node.span = join(start, last);
    return node;
  }

  AstNode parseExpression() {
    if (checkKw("lambda")) return parseLambda();
    return parseOr();
  }

  AstNode parseLambda() {
    const Token& kw = advance();
    AstNode node;
    node.kind = NodeKind::Lambda;
    if (!checkOp(":")) {
      while (true) {
        const Token& param = expectName("parameter name");
        node.names.push_back(param.text);
        if (!matchOp(",")) break;
      }
    }
    expectOp(":");
    node.children.push_back(parseExpression());
    node.span = join(kw.span, node.children.back().span);
    return node;
  }

  AstNode parseOr() { return parseBoolChain("or", &Parser::parseAnd); }
  AstNode parseAnd() { return parseBoolChain("and", &Parser::parseNot); }

  AstNode parseBoolChain(const char* op, AstNode (Parser::*next)()) {
    AstNode first = (this->*next)();
    if (!checkKw(op)) return first;
    AstNode node;
    node.kind = NodeKind::BoolOp;
    node.text = op;
    Span start = first.span;
    node.children.push_back(std::move(first));
    while (matchKw(op)) {
      node.children.push_back((this->*next)());
    }
    node.span = join(start, node.children.back().span);
    return node;
  }

  AstNode parseNot() {
    if (checkKw("not")) {
      const Token& kw = advance();
      AstNode node;
      node.kind = NodeKind::UnaryOp;
      node.text = "not";
      node.children.push_back(parseNot());
      node.span = join(kw.span, node.children.back().span);
      return node;
    }
    return parseComparison();
  }

  AstNode parseComparison() {
    AstNode left = parseArith();
    std::vector<std::string> ops;
    std::vector<AstNode> comparators;
    while (true) {
      std::string op;
      if (checkOp("==") || checkOp("!=") || checkOp("<") || checkOp("<=") || checkOp(">") ||
          checkOp(">=")) {
        op = advance().text;
      } else if (checkKw("in")) {
        advance();
        op = "in";
      } else if (checkKw("not") && peek(1).type == TokenType::Keyword && peek(1).text == "in") {
        advance();
        advance();
        op = "not in";
      } else if (checkKw("is")) {
        rejectExcluded(peek());
      } else {
        break;
      }
      ops.push_back(op);
      comparators.push_back(parseArith());
    }
    if (ops.empty()) return left;
    AstNode node;
    node.kind = NodeKind::Compare;
    node.names = std::move(ops);
    Span start = left.span;
    node.children.push_back(std::move(left));
    for (AstNode& cmp : comparators) node.children.push_back(std::move(cmp));
    node.span = join(start, node.children.back().span);
    return node;
  }

  AstNode parseArith() {
    AstNode node = parseTerm();
    while (checkOp("+") || checkOp("-")) {
      std::string op = advance().text;
      AstNode rhs = parseTerm();
      node = makeBinOp(std::move(node), op, std::move(rhs));
    }
    return node;
  }

  AstNode parseTerm() {
    AstNode node = parseFactor();
    while (checkOp("*") || checkOp("/") || checkOp("//") || checkOp("%")) {
      std::string op = advance().text;
      AstNode rhs = parseFactor();
      node = makeBinOp(std::move(node), op, std::move(rhs));
    }
    return node;
  }

  static AstNode makeBinOp(AstNode lhs, std::string op, AstNode rhs) {
    AstNode node;
    node.kind = NodeKind::BinOp;
    node.text = std::move(op);
    node.span = join(lhs.span, rhs.span);
    node.children.push_back(std::move(lhs));
    node.children.push_back(std::move(rhs));
    return node;
  }

  AstNode parseFactor() {
    if (checkOp("-")) {
      const Token& op = advance();
      AstNode node;
      node.kind = NodeKind::UnaryOp;
      node.text = "-";
      node.children.push_back(parseFactor());
      node.span = join(op.span, node.children.back().span);
      return node;
    }
    return parsePower();
  }

  AstNode parsePower() {
    AstNode base = parsePostfix();
    if (checkOp("**")) {
      advance();
      AstNode exp = parseFactor();  // right-associative, allows 2**-1
      return makeBinOp(std::move(base), "**", std::move(exp));
    }
    return base;
  }

  AstNode parsePostfix() {
    AstNode node = parseAtom();
    while (true) {
      if (checkOp("(")) {
        advance();
        AstNode call;
        call.kind = NodeKind::Call;
        Span start = node.span;
        call.children.push_back(std::move(node));
        if (!checkOp(")")) {
          while (true) {
            AstNode arg = parseExpression();
            if (checkOp("=")) {
              fail("keyword arguments are not part of the safe grammar subset", peek().span, {},
                   /*outside=*/true, "keyword argument");
            }
            call.children.push_back(std::move(arg));
            if (!matchOp(",")) break;
            if (checkOp(")")) break;
          }
        }
        const Token& close = expectOp(")");
        call.span = join(start, close.span);
        node = std::move(call);
      } else if (checkOp(".")) {
        advance();
        const Token& attr = expectName("attribute name");
        AstNode access;
        access.kind = NodeKind::Attribute;
        access.text = attr.text;
        access.span = join(node.span, attr.span);
        access.children.push_back(std::move(node));
        node = std::move(access);
      } else if (checkOp("[")) {
        advance();
        AstNode sub;
        sub.kind = NodeKind::Subscript;
        Span start = node.span;
        sub.children.push_back(std::move(node));
        sub.children.push_back(parseSubscriptIndex());
        const Token& close = expectOp("]");
        sub.span = join(start, close.span);
        node = std::move(sub);
      } else {
        break;
      }
    }
    return node;
  }

  AstNode parseSubscriptIndex() {
    Span start = hereSpan();
    std::optional<AstNode> lower;
    if (!checkOp(":")) {
      AstNode expr = parseExpression();
      if (!checkOp(":")) return expr;  // plain index
      lower = std::move(expr);
    }
    expectOp(":");
    AstNode slice;
    slice.kind = NodeKind::Slice;
    Span last = prev().span;
    if (lower) {
      slice.split |= 1;
      slice.children.push_back(std::move(*lower));
    }
    if (!checkOp("]") && !checkOp(":")) {
      slice.split |= 2;
      slice.children.push_back(parseExpression());
      last = slice.children.back().span;
    }
    if (matchOp(":")) {
      last = prev().span;
      if (!checkOp("]")) {
        slice.split |= 4;
        slice.children.push_back(parseExpression());
        last = slice.children.back().span;
      }
    }
    slice.span = join(start, last);
    return slice;
  }

  AstNode parseAtom() {
    const Token& tok = peek();
    rejectExcluded(tok);
    switch (tok.type) {
      case TokenType::Name: {
        advance();
        AstNode node;
        node.kind = NodeKind::Name;
        node.text = tok.text;
        node.span = tok.span;
        return node;
      }
      case TokenType::IntLit: {
        advance();
        AstNode node;
        node.kind = NodeKind::Const;
        node.const_tag = ConstTag::Int;
        node.ival = mpz_class(tok.text, 10);
        node.span = tok.span;
        return node;
      }
      case TokenType::FloatLit: {
        advance();
        AstNode node;
        node.kind = NodeKind::Const;
        node.const_tag = ConstTag::Float;
        node.fval = std::strtod(tok.text.c_str(), nullptr);
        node.span = tok.span;
        return node;
      }
      case TokenType::StrLit: {
        advance();
        AstNode node;
        node.kind = NodeKind::Const;
        node.const_tag = ConstTag::Str;
        node.text = tok.value;
        node.span = tok.span;
        return node;
      }
      case TokenType::FStrLit: {
        advance();
        return parseFString(tok);
      }
      case TokenType::Keyword: {
        if (tok.text == "True" || tok.text == "False") {
          advance();
          AstNode node;
          node.kind = NodeKind::Const;
          node.const_tag = ConstTag::Bool;
          node.bval = (tok.text == "True");
          node.span = tok.span;
          return node;
        }
        if (tok.text == "None") {
          advance();
          AstNode node;
          node.kind = NodeKind::Const;
          node.const_tag = ConstTag::NoneLit;
          node.span = tok.span;
          return node;
        }
        if (tok.text == "lambda") return parseLambda();
        fail("unexpected keyword '" + tok.text + "'", tok.span);
      }
      case TokenType::Op: {
        if (tok.text == "(") return parseParenAtom();
        if (tok.text == "[") return parseListAtom();
        if (tok.text == "{") return parseBraceAtom();
        if (tok.text == ":=") {
          fail("the walrus operator is not part of the safe grammar subset", tok.span, {},
               /*outside=*/true, ":=");
        }
        fail("unexpected token '" + tok.text + "'", tok.span);
      }
      default:
        fail("unexpected end of expression", hereSpan());
    }
  }

  AstNode parseParenAtom() {
    const Token& open = advance();
    if (checkOp(")")) {
      const Token& close = advance();
      AstNode node;
      node.kind = NodeKind::Tuple;
      node.span = join(open.span, close.span);
      return node;
    }
    AstNode first = parseExpression();
    if (checkOp(",")) {
      AstNode node;
      node.kind = NodeKind::Tuple;
      node.children.push_back(std::move(first));
      while (matchOp(",")) {
        if (checkOp(")")) break;
        node.children.push_back(parseExpression());
      }
      const Token& close = expectOp(")");
      node.span = join(open.span, close.span);
      return node;
    }
    const Token& close = expectOp(")");
    first.span = join(open.span, close.span);
    return first;
  }

  AstNode parseListAtom() {
    const Token& open = advance();
    if (checkOp("]")) {
      const Token& close = advance();
      AstNode node;
      node.kind = NodeKind::List;
      node.span = join(open.span, close.span);
      return node;
    }
    AstNode first = parseExpression();
    if (checkKw("for")) {
      AstNode comp = parseComprehensionTail(NodeKind::ListComp, {std::move(first)});
      const Token& close = expectOp("]");
      comp.span = join(open.span, close.span);
      return comp;
    }
    AstNode node;
    node.kind = NodeKind::List;
    node.children.push_back(std::move(first));
    while (matchOp(",")) {
      if (checkOp("]")) break;
      node.children.push_back(parseExpression());
    }
    const Token& close = expectOp("]");
    node.span = join(open.span, close.span);
    return node;
  }

  AstNode parseBraceAtom() {
    const Token& open = advance();
    if (checkOp("}")) {
      const Token& close = advance();
      AstNode node;
      node.kind = NodeKind::Dict;
      node.span = join(open.span, close.span);
      return node;
    }
    AstNode first = parseExpression();
    if (matchOp(":")) {
      AstNode value = parseExpression();
      if (checkKw("for")) {
        AstNode comp =
            parseComprehensionTail(NodeKind::DictComp, {std::move(first), std::move(value)});
        const Token& close = expectOp("}");
        comp.span = join(open.span, close.span);
        return comp;
      }
      AstNode node;
      node.kind = NodeKind::Dict;
      node.children.push_back(std::move(first));
      node.children.push_back(std::move(value));
      while (matchOp(",")) {
        if (checkOp("}")) break;
        node.children.push_back(parseExpression());
        expectOp(":");
        node.children.push_back(parseExpression());
      }
      const Token& close = expectOp("}");
      node.span = join(open.span, close.span);
      return node;
    }
    if (checkKw("for")) {
      fail("set comprehensions are not part of the safe grammar subset", peek().span, {},
           /*outside=*/true, "set comprehension");
    }
    AstNode node;
    node.kind = NodeKind::Set;
    node.children.push_back(std::move(first));
    while (matchOp(",")) {
      if (checkOp("}")) break;
      node.children.push_back(parseExpression());
    }
    const Token& close = expectOp("}");
    node.span = join(open.span, close.span);
    return node;
  }

  // 'for' targets 'in' or_expr ['if' or_expr]; single generator only.
  AstNode parseComprehensionTail(NodeKind kind, std::vector<AstNode> head) {
    AstNode node;
    node.kind = kind;
    node.children = std::move(head);
    advance();  // 'for'
    node.children.push_back(parseTargetList());
    if (!matchKw("in")) {
      fail("expected 'in'", hereSpan(), std::string("in"));
    }
    node.children.push_back(parseOr());
    if (matchKw("if")) {
      node.split = 1;
      node.children.push_back(parseOr());
    }
    if (checkKw("for")) {
      fail("multiple generators in a comprehension are not part of the safe grammar subset",
           peek().span, {}, /*outside=*/true, "nested comprehension");
    }
    return node;
  }

  // Splits an f-string body into literal and {expression} parts.
  AstNode parseFString(const Token& tok) {
    AstNode node;
    node.kind = NodeKind::JoinedStr;
    node.span = tok.span;
    const std::string& raw = tok.value;
    // Content starts two columns after the token start: the prefix and quote.
    int line = tok.span.start_line;
    int col = tok.span.start_col + 2;

    std::string literal;
    Span literal_start{line, col, line, col};
    auto flushLiteral = [&](int end_col) {
      if (literal.empty()) return;
      AstNode part;
      part.kind = NodeKind::Const;
      part.const_tag = ConstTag::Str;
      part.text = cookEscapes(literal, literal_start);
      part.span = Span{literal_start.start_line, literal_start.start_col, line, end_col};
      node.children.push_back(std::move(part));
      literal.clear();
    };

    size_t i = 0;
    while (i < raw.size()) {
      char c = raw[i];
      if (c == '{' && i + 1 < raw.size() && raw[i + 1] == '{') {
        literal += '{';
        i += 2;
        col += 2;
        continue;
      }
      if (c == '}' && i + 1 < raw.size() && raw[i + 1] == '}') {
        literal += '}';
        i += 2;
        col += 2;
        continue;
      }
      if (c == '}') {
        fail("single '}' is not allowed in an f-string", Span{line, col, line, col});
      }
      if (c == '{') {
        flushLiteral(col - 1);
        size_t depth = 1;
        size_t start = i + 1;
        int expr_col = col + 1;
        size_t j = start;
        while (j < raw.size() && depth > 0) {
          if (raw[j] == '{') ++depth;
          if (raw[j] == '}') --depth;
          if (depth == 0) break;
          ++j;
        }
        if (depth != 0) {
          fail("unterminated expression in f-string", Span{line, col, line, col}, std::string("}"));
        }
        std::string inner = raw.substr(start, j - start);
        if (inner.empty()) {
          fail("empty expression in f-string", Span{line, col, line, col});
        }
        if (inner.find('!') != std::string::npos || inner.find(':') != std::string::npos) {
          fail("f-string conversions and format specs are not part of the safe grammar subset",
               Span{line, col, line, col}, {}, /*outside=*/true, "format spec");
        }
        AstNode formatted;
        formatted.kind = NodeKind::FormattedValue;
        formatted.span = Span{line, expr_col, line, expr_col + static_cast<int>(inner.size())};
        formatted.children.push_back(parseEmbeddedExpression(inner, line, expr_col));
        node.children.push_back(std::move(formatted));
        col += static_cast<int>(j - i) + 1;
        i = j + 1;
        literal_start = Span{line, col, line, col};
        continue;
      }
      literal += c;
      ++i;
      ++col;
    }
    flushLiteral(col - 1);
    return node;
  }

  static std::string cookEscapes(const std::string& raw, Span at) {
    std::string out;
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '\\') {
        out += raw[i];
        continue;
      }
      if (i + 1 >= raw.size()) {
        fail("unterminated escape in f-string", at);
      }
      char esc = raw[++i];
      switch (esc) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        default:
          fail(std::string("unsupported escape sequence '\\") + esc + "' in f-string", at);
      }
    }
    return out;
  }

  static AstNode parseEmbeddedExpression(const std::string& text, int line, int col) {
    LexResult lexed = tokenize_fragment(text, line, col);
    if (!lexed.ok()) {
      throw ParseError{lexed.diagnostics.front()};
    }
    Parser inner(std::move(lexed.tokens));
    AstNode expr = inner.parseExpression();
    if (!inner.atEnd()) {
      fail("unexpected token after expression in f-string", inner.hereSpan());
    }
    return expr;
  }
};

}  // namespace

ParseResult parse(const SourceProgram& src) {
  LexResult lexed = tokenize(src);
  if (!lexed.ok()) {
    return {std::nullopt, std::move(lexed.diagnostics)};
  }
  Parser parser(std::move(lexed.tokens));
  try {
    SyntaxTree tree;
    tree.root = parser.parseModule();
    tree.node_count = count_nodes(tree.root);
    tree.kinds_present = collect_kinds(SyntaxTree{tree.root, 0, {}});
    return {std::move(tree), {}};
  } catch (const ParseError& err) {
    return {std::nullopt, {err.diagnostic}};
  }
}

}  // namespace safexec
