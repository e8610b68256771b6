#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace safexec {

// 1-based source positions; end is inclusive of the last token's extent.
struct Span {
  int start_line{1};
  int start_col{1};
  int end_line{1};
  int end_col{1};

  bool encloses(const Span& other) const {
    const bool starts_before = start_line < other.start_line ||
                               (start_line == other.start_line && start_col <= other.start_col);
    const bool ends_after = end_line > other.end_line ||
                            (end_line == other.end_line && end_col >= other.end_col);
    return starts_before && ends_after;
  }
};

#define SAFEXEC_NODE_KINDS(X)                                                                 \
  X(Module)                                                                                   \
  X(FunctionDef)                                                                              \
  X(Return)                                                                                   \
  X(Assign)                                                                                   \
  X(AugAssign)                                                                                \
  X(ExprStmt)                                                                                 \
  X(If)                                                                                       \
  X(For)                                                                                      \
  X(While)                                                                                    \
  X(Break)                                                                                    \
  X(Continue)                                                                                 \
  X(Pass)                                                                                     \
  X(Import)                                                                                   \
  X(ImportFrom)                                                                               \
  X(Raise)                                                                                    \
  X(Call)                                                                                     \
  X(Attribute)                                                                                \
  X(Subscript)                                                                                \
  X(Slice)                                                                                    \
  X(BinOp)                                                                                    \
  X(UnaryOp)                                                                                  \
  X(BoolOp)                                                                                   \
  X(Compare)                                                                                  \
  X(Name)                                                                                     \
  X(Const)                                                                                    \
  X(List)                                                                                     \
  X(Tuple)                                                                                    \
  X(Dict)                                                                                     \
  X(Set)                                                                                      \
  X(ListComp)                                                                                 \
  X(DictComp)                                                                                 \
  X(Lambda)                                                                                   \
  X(JoinedStr)                                                                                \
  X(FormattedValue)

enum class NodeKind : uint8_t {
#define X(name) name,
  SAFEXEC_NODE_KINDS(X)
#undef X
};

constexpr int kNodeKindCount = 0
#define X(name) +1
    SAFEXEC_NODE_KINDS(X)
#undef X
    ;

const char* kind_name(NodeKind kind);

// Returns false and leaves `out` untouched when the name is unknown.
bool kind_from_name(const std::string& name, NodeKind& out);

// Literal payload discriminator for Const nodes.
enum class ConstTag : uint8_t { NoneLit, Bool, Int, Float, Str };

// Generic syntax node. Which payload fields are meaningful depends on `kind`:
//   Name/Attribute            text = identifier / attribute name
//   Import                    text = module name
//   ImportFrom                text = module name, names = imported symbols
//   BinOp/UnaryOp/BoolOp      text = operator spelling
//   AugAssign                 text = operator spelling ("+=", ...)
//   Compare                   names = operator spellings, children = [left, comparators...]
//   Const                     const_tag + ival/fval/bval/text
//   FunctionDef               text = function name, names = parameters, children = body
//   Lambda                    names = parameters, children = [expr]
//   If                        split = number of then-branch statements, children = [test, then..., else...]
//   Slice                     split = presence mask (1 lower, 2 upper, 4 step)
//   ListComp                  split = 1 when a condition is present, children = [elt, target, iter, cond?]
//   DictComp                  split = 1 when a condition is present, children = [key, value, target, iter, cond?]
//   Dict                      children = [k1, v1, k2, v2, ...]
struct AstNode {
  NodeKind kind{NodeKind::Module};
  Span span{};

  ConstTag const_tag{ConstTag::NoneLit};
  bool bval{false};
  double fval{0.0};
  mpz_class ival;
  std::string text;
  std::vector<std::string> names;
  int split{0};

  std::vector<AstNode> children;
};

struct SyntaxTree {
  AstNode root;
  size_t node_count{0};
  std::set<NodeKind> kinds_present;
};

std::set<NodeKind> collect_kinds(const SyntaxTree& tree);
size_t count_nodes(const AstNode& node);

// Structural equality over kind, payload, and children; spans are ignored so
// a pretty-printed round trip compares equal.
bool tree_equal(const AstNode& a, const AstNode& b);

// Deterministic JSON form {kind, payload?, span, children[]}; spans as
// [startLine, startCol, endLine, endCol].
std::string serialize_tree(const SyntaxTree& tree, bool pretty = false);

}  // namespace safexec
