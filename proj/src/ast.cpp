#include "safexec/ast.hpp"

#include <nlohmann/json.hpp>

#include "safexec/numfmt.hpp"

namespace safexec {

namespace {

const char* const kKindNames[] = {
#define X(name) #name,
    SAFEXEC_NODE_KINDS(X)
#undef X
};

using ordered_json = nlohmann::ordered_json;

void collect(const AstNode& node, std::set<NodeKind>& kinds) {
  kinds.insert(node.kind);
  for (const AstNode& child : node.children) collect(child, kinds);
}

ordered_json payload_json(const AstNode& node) {
  switch (node.kind) {
    case NodeKind::Name:
    case NodeKind::Attribute:
    case NodeKind::Import:
    case NodeKind::BinOp:
    case NodeKind::UnaryOp:
    case NodeKind::BoolOp:
    case NodeKind::AugAssign:
      return node.text;
    case NodeKind::Const:
      switch (node.const_tag) {
        case ConstTag::NoneLit: return ordered_json::array({"none", nullptr});
        case ConstTag::Bool: return ordered_json::array({"bool", node.bval});
        case ConstTag::Int: return ordered_json::array({"int", node.ival.get_str()});
        case ConstTag::Float:
          return ordered_json::array({"float", python_float_repr(node.fval)});
        case ConstTag::Str: return ordered_json::array({"str", node.text});
      }
      return nullptr;
    case NodeKind::ImportFrom: {
      ordered_json payload;
      payload["module"] = node.text;
      payload["names"] = node.names;
      return payload;
    }
    case NodeKind::FunctionDef: {
      ordered_json payload;
      payload["name"] = node.text;
      payload["params"] = node.names;
      return payload;
    }
    case NodeKind::Lambda: {
      ordered_json payload;
      payload["params"] = node.names;
      return payload;
    }
    case NodeKind::Compare:
      return node.names;
    case NodeKind::If:
    case NodeKind::Slice:
    case NodeKind::ListComp:
    case NodeKind::DictComp:
      return node.split;
    default:
      return nullptr;
  }
}

ordered_json node_json(const AstNode& node) {
  ordered_json out;
  out["kind"] = kind_name(node.kind);
  ordered_json payload = payload_json(node);
  if (!payload.is_null()) {
    out["payload"] = payload;
  }
  out["span"] = ordered_json::array(
      {node.span.start_line, node.span.start_col, node.span.end_line, node.span.end_col});
  ordered_json children = ordered_json::array();
  for (const AstNode& child : node.children) children.push_back(node_json(child));
  out["children"] = children;
  return out;
}

}  // namespace

const char* kind_name(NodeKind kind) { return kKindNames[static_cast<size_t>(kind)]; }

bool kind_from_name(const std::string& name, NodeKind& out) {
  for (int i = 0; i < kNodeKindCount; ++i) {
    if (name == kKindNames[i]) {
      out = static_cast<NodeKind>(i);
      return true;
    }
  }
  return false;
}

std::set<NodeKind> collect_kinds(const SyntaxTree& tree) {
  std::set<NodeKind> kinds;
  collect(tree.root, kinds);
  return kinds;
}

size_t count_nodes(const AstNode& node) {
  size_t count = 1;
  for (const AstNode& child : node.children) count += count_nodes(child);
  return count;
}

bool tree_equal(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind) return false;
  if (a.const_tag != b.const_tag || a.bval != b.bval || a.text != b.text ||
      a.names != b.names || a.split != b.split) {
    return false;
  }
  if (a.const_tag == ConstTag::Int && mpz_cmp(a.ival.get_mpz_t(), b.ival.get_mpz_t()) != 0) {
    return false;
  }
  if (a.const_tag == ConstTag::Float &&
      python_float_repr(a.fval) != python_float_repr(b.fval)) {
    return false;
  }
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!tree_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::string serialize_tree(const SyntaxTree& tree, bool pretty) {
  ordered_json out = node_json(tree.root);
  return pretty ? out.dump(2) : out.dump();
}

}  // namespace safexec
