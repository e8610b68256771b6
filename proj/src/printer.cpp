#include "safexec/printer.hpp"

#include <cstdio>
#include <sstream>

#include "safexec/numfmt.hpp"

namespace safexec {

namespace {

// Expression precedence, loosest first.
enum Prec {
  kPrecLambda = 1,
  kPrecOr = 2,
  kPrecAnd = 3,
  kPrecNot = 4,
  kPrecCompare = 5,
  kPrecAdd = 6,
  kPrecMul = 7,
  kPrecUnary = 8,
  kPrecPower = 9,
  kPrecPostfix = 10,
  kPrecAtom = 11,
};

int binop_prec(const std::string& op) {
  if (op == "+" || op == "-") return kPrecAdd;
  if (op == "**") return kPrecPower;
  return kPrecMul;
}

int node_prec(const AstNode& node) {
  switch (node.kind) {
    case NodeKind::Lambda: return kPrecLambda;
    case NodeKind::BoolOp: return node.text == "or" ? kPrecOr : kPrecAnd;
    case NodeKind::UnaryOp: return node.text == "not" ? kPrecNot : kPrecUnary;
    case NodeKind::Compare: return kPrecCompare;
    case NodeKind::BinOp: return binop_prec(node.text);
    case NodeKind::Call:
    case NodeKind::Attribute:
    case NodeKind::Subscript:
      return kPrecPostfix;
    default:
      return kPrecAtom;
  }
}

class Printer {
 public:
  std::string printModule(const AstNode& module) {
    for (const AstNode& stmt : module.children) printStatement(stmt, 0);
    return out_.str();
  }

  std::string printExpr(const AstNode& expr) {
    expression(expr, 0);
    return out_.str();
  }

 private:
  std::ostringstream out_;

  void indent(int level) {
    for (int i = 0; i < level; ++i) out_ << "    ";
  }

  void printBody(const AstNode* begin, const AstNode* end, int level) {
    for (const AstNode* it = begin; it != end; ++it) printStatement(*it, level);
  }

  void printStatement(const AstNode& stmt, int level) {
    switch (stmt.kind) {
      case NodeKind::Assign: {
        indent(level);
        expression(stmt.children[0], 0);
        out_ << " = ";
        expression(stmt.children[1], 0);
        out_ << "\n";
        return;
      }
      case NodeKind::AugAssign: {
        indent(level);
        expression(stmt.children[0], 0);
        out_ << " " << stmt.text << "= ";
        expression(stmt.children[1], 0);
        out_ << "\n";
        return;
      }
      case NodeKind::ExprStmt: {
        indent(level);
        expression(stmt.children[0], 0);
        out_ << "\n";
        return;
      }
      case NodeKind::Return: {
        indent(level);
        out_ << "return";
        if (!stmt.children.empty()) {
          out_ << " ";
          expression(stmt.children[0], 0);
        }
        out_ << "\n";
        return;
      }
      case NodeKind::Pass:
      case NodeKind::Break:
      case NodeKind::Continue: {
        indent(level);
        out_ << (stmt.kind == NodeKind::Pass ? "pass"
                 : stmt.kind == NodeKind::Break ? "break"
                                                : "continue")
             << "\n";
        return;
      }
      case NodeKind::Import: {
        indent(level);
        out_ << "import " << stmt.text << "\n";
        return;
      }
      case NodeKind::ImportFrom: {
        indent(level);
        out_ << "from " << stmt.text << " import ";
        for (size_t i = 0; i < stmt.names.size(); ++i) {
          if (i) out_ << ", ";
          out_ << stmt.names[i];
        }
        out_ << "\n";
        return;
      }
      case NodeKind::Raise: {
        indent(level);
        out_ << "raise ";
        expression(stmt.children[0], 0);
        out_ << "\n";
        return;
      }
      case NodeKind::If:
        printIf(stmt, level, /*as_elif=*/false);
        return;
      case NodeKind::While: {
        indent(level);
        out_ << "while ";
        expression(stmt.children[0], 0);
        out_ << ":\n";
        printBody(stmt.children.data() + 1, stmt.children.data() + stmt.children.size(),
                  level + 1);
        return;
      }
      case NodeKind::For: {
        indent(level);
        out_ << "for ";
        printForTarget(stmt.children[0]);
        out_ << " in ";
        expression(stmt.children[1], 0);
        out_ << ":\n";
        printBody(stmt.children.data() + 2, stmt.children.data() + stmt.children.size(),
                  level + 1);
        return;
      }
      case NodeKind::FunctionDef: {
        indent(level);
        out_ << "def " << stmt.text << "(";
        for (size_t i = 0; i < stmt.names.size(); ++i) {
          if (i) out_ << ", ";
          out_ << stmt.names[i];
        }
        out_ << "):\n";
        printBody(stmt.children.data(), stmt.children.data() + stmt.children.size(), level + 1);
        return;
      }
      default: {
        // Expression used in statement position; should not happen.
        indent(level);
        expression(stmt, 0);
        out_ << "\n";
        return;
      }
    }
  }

  void printIf(const AstNode& stmt, int level, bool as_elif) {
    indent(level);
    out_ << (as_elif ? "elif " : "if ");
    expression(stmt.children[0], 0);
    out_ << ":\n";
    const AstNode* then_begin = stmt.children.data() + 1;
    const AstNode* then_end = then_begin + stmt.split;
    const AstNode* else_end = stmt.children.data() + stmt.children.size();
    printBody(then_begin, then_end, level + 1);
    if (then_end == else_end) return;
    if (else_end - then_end == 1 && then_end->kind == NodeKind::If) {
      printIf(*then_end, level, /*as_elif=*/true);
      return;
    }
    indent(level);
    out_ << "else:\n";
    printBody(then_end, else_end, level + 1);
  }

  // for-targets print without an outer tuple wrapper: "for i, j in ..."
  void printForTarget(const AstNode& target) {
    if (target.kind == NodeKind::Tuple && !target.children.empty()) {
      for (size_t i = 0; i < target.children.size(); ++i) {
        if (i) out_ << ", ";
        expression(target.children[i], kPrecAtom);
      }
      return;
    }
    expression(target, 0);
  }

  void expression(const AstNode& node, int ctx_prec) {
    int prec = node_prec(node);
    bool parens = prec < ctx_prec;
    if (parens) out_ << "(";
    expressionBare(node);
    if (parens) out_ << ")";
  }

  void expressionBare(const AstNode& node) {
    switch (node.kind) {
      case NodeKind::Name:
        out_ << node.text;
        return;
      case NodeKind::Const:
        printConst(node);
        return;
      case NodeKind::BinOp: {
        int prec = binop_prec(node.text);
        if (node.text == "**") {
          // Right-associative; a unary operand on the right needs no parens.
          expression(node.children[0], prec + 1);
          out_ << " ** ";
          const AstNode& rhs = node.children[1];
          expression(rhs, node_prec(rhs) == kPrecUnary ? kPrecUnary : prec);
        } else {
          expression(node.children[0], prec);
          out_ << " " << node.text << " ";
          expression(node.children[1], prec + 1);
        }
        return;
      }
      case NodeKind::UnaryOp: {
        if (node.text == "not") {
          out_ << "not ";
          expression(node.children[0], kPrecNot);
        } else {
          out_ << "-";
          expression(node.children[0], kPrecUnary);
        }
        return;
      }
      case NodeKind::BoolOp: {
        int prec = node_prec(node);
        for (size_t i = 0; i < node.children.size(); ++i) {
          if (i) out_ << " " << node.text << " ";
          // Same-precedence children keep explicit parens so the chain
          // structure survives reparsing.
          expression(node.children[i], prec + 1);
        }
        return;
      }
      case NodeKind::Compare: {
        expression(node.children[0], kPrecCompare + 1);
        for (size_t i = 0; i < node.names.size(); ++i) {
          out_ << " " << node.names[i] << " ";
          expression(node.children[i + 1], kPrecCompare + 1);
        }
        return;
      }
      case NodeKind::Call: {
        expression(node.children[0], kPrecPostfix);
        out_ << "(";
        for (size_t i = 1; i < node.children.size(); ++i) {
          if (i > 1) out_ << ", ";
          expression(node.children[i], 0);
        }
        out_ << ")";
        return;
      }
      case NodeKind::Attribute: {
        expression(node.children[0], kPrecPostfix);
        out_ << "." << node.text;
        return;
      }
      case NodeKind::Subscript: {
        expression(node.children[0], kPrecPostfix);
        out_ << "[";
        printSubscriptIndex(node.children[1]);
        out_ << "]";
        return;
      }
      case NodeKind::Tuple: {
        out_ << "(";
        for (size_t i = 0; i < node.children.size(); ++i) {
          if (i) out_ << ", ";
          expression(node.children[i], 0);
        }
        if (node.children.size() == 1) out_ << ",";
        out_ << ")";
        return;
      }
      case NodeKind::List: {
        out_ << "[";
        for (size_t i = 0; i < node.children.size(); ++i) {
          if (i) out_ << ", ";
          expression(node.children[i], 0);
        }
        out_ << "]";
        return;
      }
      case NodeKind::Set: {
        out_ << "{";
        for (size_t i = 0; i < node.children.size(); ++i) {
          if (i) out_ << ", ";
          expression(node.children[i], 0);
        }
        out_ << "}";
        return;
      }
      case NodeKind::Dict: {
        out_ << "{";
        for (size_t i = 0; i + 1 < node.children.size(); i += 2) {
          if (i) out_ << ", ";
          expression(node.children[i], 0);
          out_ << ": ";
          expression(node.children[i + 1], 0);
        }
        out_ << "}";
        return;
      }
      case NodeKind::ListComp: {
        out_ << "[";
        expression(node.children[0], 0);
        printCompTail(node, 1);
        out_ << "]";
        return;
      }
      case NodeKind::DictComp: {
        out_ << "{";
        expression(node.children[0], 0);
        out_ << ": ";
        expression(node.children[1], 0);
        printCompTail(node, 2);
        out_ << "}";
        return;
      }
      case NodeKind::Lambda: {
        out_ << "lambda";
        for (size_t i = 0; i < node.names.size(); ++i) {
          out_ << (i ? ", " : " ") << node.names[i];
        }
        out_ << ": ";
        expression(node.children[0], kPrecLambda);
        return;
      }
      case NodeKind::JoinedStr:
        printFString(node);
        return;
      default:
        out_ << "<?" << kind_name(node.kind) << ">";
        return;
    }
  }

  void printCompTail(const AstNode& node, size_t target_index) {
    out_ << " for ";
    printForTarget(node.children[target_index]);
    out_ << " in ";
    expression(node.children[target_index + 1], kPrecOr);
    if (node.split) {
      out_ << " if ";
      expression(node.children[target_index + 2], kPrecOr);
    }
  }

  void printSubscriptIndex(const AstNode& index) {
    if (index.kind != NodeKind::Slice) {
      expression(index, 0);
      return;
    }
    size_t child = 0;
    if (index.split & 1) expression(index.children[child++], 0);
    out_ << ":";
    if (index.split & 2) expression(index.children[child++], 0);
    if (index.split & 4) {
      out_ << ":";
      expression(index.children[child], 0);
    }
  }

  void printConst(const AstNode& node) {
    switch (node.const_tag) {
      case ConstTag::NoneLit: out_ << "None"; return;
      case ConstTag::Bool: out_ << (node.bval ? "True" : "False"); return;
      case ConstTag::Int: out_ << node.ival.get_str(); return;
      case ConstTag::Float: out_ << python_float_repr(node.fval); return;
      case ConstTag::Str: out_ << quote_string(node.text); return;
    }
  }

  void printFString(const AstNode& node) {
    // Render parts first so we can pick a quote that stays unambiguous.
    std::vector<std::string> rendered;
    bool expr_has_double = false;
    bool expr_has_single = false;
    for (const AstNode& part : node.children) {
      if (part.kind == NodeKind::FormattedValue) {
        Printer inner;
        std::string text = inner.printExpr(part.children[0]);
        if (text.find('"') != std::string::npos) expr_has_double = true;
        if (text.find('\'') != std::string::npos) expr_has_single = true;
        rendered.push_back("{" + text + "}");
      } else {
        rendered.push_back(std::string());  // placeholder, escaped below
      }
    }
    char quote = expr_has_double && !expr_has_single ? '\'' : '"';
    out_ << "f" << quote;
    size_t i = 0;
    for (const AstNode& part : node.children) {
      if (part.kind == NodeKind::FormattedValue) {
        out_ << rendered[i];
      } else {
        for (char c : part.text) {
          switch (c) {
            case '\n': out_ << "\\n"; break;
            case '\t': out_ << "\\t"; break;
            case '\r': out_ << "\\r"; break;
            case '\\': out_ << "\\\\"; break;
            case '{': out_ << "{{"; break;
            case '}': out_ << "}}"; break;
            default:
              if (c == quote) out_ << "\\" << c;
              else out_ << c;
          }
        }
      }
      ++i;
    }
    out_ << quote;
  }
};

}  // namespace

std::string quote_string(const std::string& s) {
  bool has_single = s.find('\'') != std::string::npos;
  bool has_double = s.find('"') != std::string::npos;
  char quote = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, quote);
  for (unsigned char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == static_cast<unsigned char>(quote)) {
          out += '\\';
          out += quote;
        } else if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += quote;
  return out;
}

std::string pretty_print(const SyntaxTree& tree) {
  Printer printer;
  return printer.printModule(tree.root);
}

std::string pretty_print_expr(const AstNode& expr) {
  Printer printer;
  return printer.printExpr(expr);
}

}  // namespace safexec
