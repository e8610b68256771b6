#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "safexec/parser.hpp"
#include "safexec/printer.hpp"
#include "support.hpp"
#include "support_gen.hpp"

using namespace safexec;

namespace {

std::vector<std::pair<TokenType, std::string>> token_shapes(const std::string& source) {
  LexResult lexed = tokenize({source, "test"});
  REQUIRE(lexed.ok());
  std::vector<std::pair<TokenType, std::string>> out;
  for (const Token& token : lexed.tokens) out.emplace_back(token.type, token.text);
  return out;
}

void check_spans_enclose(const AstNode& node) {
  for (const AstNode& child : node.children) {
    CAPTURE(kind_name(node.kind));
    CAPTURE(kind_name(child.kind));
    CHECK(node.span.encloses(child.span));
    check_spans_enclose(child);
  }
}

std::vector<std::string> corpus_sources(const std::string& subdir) {
  std::vector<std::string> paths;
  std::string dir = testutil::repo_path("corpus/" + subdir);
  if (!std::filesystem::exists(dir)) return paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".py") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("tokenize basic assignment") {
  auto tokens = token_shapes("x = 1 + 3");
  REQUIRE(tokens.size() == 6);
  CHECK(tokens[0] == std::pair{TokenType::Name, std::string("x")});
  CHECK(tokens[1] == std::pair{TokenType::Op, std::string("=")});
  CHECK(tokens[2] == std::pair{TokenType::IntLit, std::string("1")});
  CHECK(tokens[3] == std::pair{TokenType::Op, std::string("+")});
  CHECK(tokens[4] == std::pair{TokenType::IntLit, std::string("3")});
  CHECK(tokens[5].first == TokenType::Newline);
}

TEST_CASE("tokenize empty input") {
  LexResult lexed = tokenize({"", "test"});
  CHECK(lexed.ok());
  CHECK(lexed.tokens.empty());
}

TEST_CASE("tokenize unterminated parenthesis") {
  LexResult lexed = tokenize({"def f(\n", "test"});
  REQUIRE_FALSE(lexed.ok());
  CHECK(lexed.diagnostics.front().message == "unterminated parenthesis");
  REQUIRE(lexed.diagnostics.front().expected.has_value());
  CHECK(*lexed.diagnostics.front().expected == ")");
}

TEST_CASE("tokenize rejects tabs and inconsistent dedents") {
  CHECK_FALSE(tokenize({"if a:\n\tb = 1\n", "t"}).ok());
  CHECK_FALSE(tokenize({"if a:\n    b = 1\n  c = 2\n", "t"}).ok());
  CHECK_FALSE(tokenize({"x = 'abc\n", "t"}).ok());
  CHECK_FALSE(tokenize({"x = 1 @ 2\n", "t"}).ok());
}

TEST_CASE("parse basic assignment shape") {
  SyntaxTree tree = testutil::parse_ok("x = 1 + 3");
  REQUIRE(tree.root.kind == NodeKind::Module);
  REQUIRE(tree.root.children.size() == 1);
  const AstNode& assign = tree.root.children[0];
  CHECK(assign.kind == NodeKind::Assign);
  CHECK(assign.children[0].kind == NodeKind::Name);
  CHECK(assign.children[0].text == "x");
  const AstNode& binop = assign.children[1];
  CHECK(binop.kind == NodeKind::BinOp);
  CHECK(binop.text == "+");
  CHECK(binop.children[0].const_tag == ConstTag::Int);
  CHECK(binop.children[0].ival == 1);
  CHECK(binop.children[1].ival == 3);
}

TEST_CASE("parse empty module") {
  SyntaxTree tree = testutil::parse_ok("");
  CHECK(tree.root.kind == NodeKind::Module);
  CHECK(tree.root.children.empty());
  CHECK(tree.node_count == 1);
  CHECK(tree.kinds_present == std::set<NodeKind>{NodeKind::Module});
}

TEST_CASE("parse while-true print") {
  SyntaxTree tree = testutil::parse_ok("while True: print(\"Running forever\")");
  REQUIRE(tree.root.children.size() == 1);
  const AstNode& loop = tree.root.children[0];
  REQUIRE(loop.kind == NodeKind::While);
  CHECK(loop.children[0].const_tag == ConstTag::Bool);
  CHECK(loop.children[0].bval == true);
  REQUIRE(loop.children.size() == 2);
  const AstNode& stmt = loop.children[1];
  REQUIRE(stmt.kind == NodeKind::ExprStmt);
  const AstNode& call = stmt.children[0];
  REQUIRE(call.kind == NodeKind::Call);
  CHECK(call.children[0].text == "print");
  CHECK(call.children[1].text == "Running forever");
}

TEST_CASE("collect_kinds examples") {
  SyntaxTree t1 = testutil::parse_ok("x = 1");
  CHECK(collect_kinds(t1) ==
        std::set<NodeKind>{NodeKind::Module, NodeKind::Assign, NodeKind::Name, NodeKind::Const});

  SyntaxTree t2 = testutil::parse_ok("for i in range(3): pass");
  CHECK(collect_kinds(t2) == std::set<NodeKind>{NodeKind::Module, NodeKind::For, NodeKind::Name,
                                                NodeKind::Call, NodeKind::Const, NodeKind::Pass});

  SyntaxTree t3 = testutil::parse_ok("");
  CHECK(collect_kinds(t3) == std::set<NodeKind>{NodeKind::Module});

  // kinds_present and node_count match a traversal
  SyntaxTree t4 = testutil::parse_ok("def f(x):\n    return x + 1\nprint(f(2))\n");
  CHECK(t4.kinds_present == collect_kinds(t4));
  CHECK(t4.node_count == count_nodes(t4.root));
}

TEST_CASE("excluded constructs are grammar violations") {
  const char* cases[] = {
      "class A: pass",
      "try:\n    x = 1\nexcept:\n    pass",
      "with open('f') as f:\n    pass",
      "x = yield 3",
      "async def f(): pass",
      "del x",
      "assert x",
      "global x",
      "x = 1 if True else 2\nimport os as o",
      "def f(*args): pass",
  };
  for (const char* source : cases) {
    CAPTURE(source);
    ParseResult result = parse({source, "test"});
    REQUIRE_FALSE(result.ok());
  }
  // Specifically flagged as outside the safe grammar:
  ParseResult cls = parse({"class A: pass", "test"});
  CHECK(cls.diagnostics.front().outside_safe_grammar);
  ParseResult walrus = parse({"if (n := 3) > 2: pass", "test"});
  REQUIRE_FALSE(walrus.ok());
}

TEST_CASE("plain syntax errors are not grammar violations") {
  ParseResult result = parse({"x = = 2", "test"});
  REQUIRE_FALSE(result.ok());
  CHECK_FALSE(result.diagnostics.front().outside_safe_grammar);
  CHECK_FALSE(parse({"return 1", "test"}).ok());
  CHECK_FALSE(parse({"break", "test"}).ok());
  CHECK_FALSE(parse({"def f():\n    break\n", "test"}).ok());
  CHECK_FALSE(parse({"x = 012", "test"}).ok());
}

TEST_CASE("parser handles the full statement surface") {
  const char* source =
      "import math\n"
      "from math import sqrt, floor\n"
      "def poly(x, y):\n"
      "    if x > y:\n"
      "        return x ** 2 - y\n"
      "    elif x == y:\n"
      "        return 0\n"
      "    else:\n"
      "        return -(y - x)\n"
      "acc = 0\n"
      "for i, w in enumerate([3, 5, 7]):\n"
      "    acc += poly(i, w)\n"
      "    if acc > 100:\n"
      "        break\n"
      "    continue\n"
      "while acc < 0:\n"
      "    acc = acc + 1\n"
      "vals = [i * 2 for i in range(4) if i != 2]\n"
      "table = {k: k ** 2 for k in vals}\n"
      "pairs = {'a': 1, 'b': 2}\n"
      "uniq = {1, 2, 3}\n"
      "first = vals[0]\n"
      "mid = vals[1:3]\n"
      "rev = vals[::-1]\n"
      "sq = lambda v: v * v\n"
      "msg = f\"acc={acc} sq={sq(3)}\"\n"
      "t = (1, 2.5, 'x', None, True)\n"
      "flag = not (acc in vals) and (1 < 2 <= 3)\n"
      "s = 'a' + \"b\"\n"
      "raise ValueError(msg)\n";
  SyntaxTree tree = testutil::parse_ok(source);
  CHECK(tree.node_count > 50);
  check_spans_enclose(tree.root);
}

TEST_CASE("round-trip: pretty-print then reparse equals original tree") {
  auto roundtrip = [](const std::string& source) {
    SyntaxTree tree = testutil::parse_ok(source);
    std::string printed = pretty_print(tree);
    CAPTURE(source);
    CAPTURE(printed);
    ParseResult again = parse({printed, "printed"});
    REQUIRE(again.ok());
    CHECK(tree_equal(tree.root, again.tree->root));
    // Printing must be a fixed point from the second generation on.
    CHECK(pretty_print(*again.tree) == printed);
  };

  roundtrip("x = 1 + 3");
  roundtrip("x = (1 + 2) * 3 - 4 ** 2 ** 2\n");
  roundtrip("y = -2 ** 2\nz = (-2) ** 2\nw = 2 ** -1\n");
  roundtrip("a = 1 - (2 - 3)\nb = (1 and 2) and 3\nc = 1 and (2 or 3)\n");
  roundtrip("t = (1,)\ne = ()\nl = [1, 2]\nd = {'a': [1, {2}]}\n");
  roundtrip("s = 'it\\'s'\nu = \"mixed 'q' here\"\nf = f\"v={1 + 2} {{literal}}\"\n");
  roundtrip("for i, j in zip([1], [2]):\n    print(i)\n");
  roundtrip(
      "def f(a, b):\n    if a:\n        return b\n    elif b:\n        return a\n    else:\n"
      "        pass\n");
  roundtrip("xs = [i for i in range(3) if i]\nm = {i: -i for i in range(2)}\n");
  roundtrip("v = x[1:]\nw = x[:2]\nu = x[::2]\nq = x[1:2:3]\nr = x[:]\n");
  roundtrip("flag = 1 < 2 <= 3 != 4\nneg = not not True\n");

  SUBCASE("over the bundled corpus") {
    for (const std::string& path : corpus_sources("safe")) {
      roundtrip(slurp(path));
    }
    for (const std::string& path : corpus_sources("micro")) {
      roundtrip(slurp(path));
    }
  }

  SUBCASE("over random programs") {
    for (uint64_t seed = 1; seed <= 150; ++seed) {
      testutil::ProgramGen gen(seed);
      roundtrip(gen.program());
    }
  }
}

TEST_CASE("serialization is deterministic and schema-stable") {
  SyntaxTree tree = testutil::parse_ok("x = 1 + 3\n");
  std::string a = serialize_tree(tree);
  std::string b = serialize_tree(testutil::parse_ok("x = 1 + 3\n"));
  CHECK(a == b);
  auto doc = nlohmann::ordered_json::parse(a);
  CHECK(doc["kind"] == "Module");
  CHECK(doc["span"].is_array());
  CHECK(doc["children"][0]["kind"] == "Assign");
  CHECK(doc["children"][0]["children"][1]["children"][0]["payload"][0] == "int");
  CHECK(doc["children"][0]["children"][1]["children"][0]["payload"][1] == "1");

  // Field order fixed as {kind, payload?, span, children}.
  std::string dumped = doc["children"][0]["children"][0].dump();
  CHECK(dumped.find("\"kind\"") < dumped.find("\"payload\""));
  CHECK(dumped.find("\"payload\"") < dumped.find("\"span\""));
  CHECK(dumped.find("\"span\"") < dumped.find("\"children\""));
}

TEST_CASE("spans enclose children everywhere") {
  for (uint64_t seed = 200; seed < 240; ++seed) {
    testutil::ProgramGen gen(seed);
    SyntaxTree tree = testutil::parse_ok(gen.program());
    check_spans_enclose(tree.root);
  }
}

TEST_CASE("parser shape matches the reference parser on the corpus") {
  if (!testutil::python_available()) {
    MESSAGE("python3 not available; skipping oracle shape test");
    return;
  }
  // Our kind -> reference AST class. Kinds absent here have no counterpart.
  const std::map<std::string, std::string> kind_map = {
      {"Module", "Module"},       {"FunctionDef", "FunctionDef"},
      {"Return", "Return"},       {"Assign", "Assign"},
      {"AugAssign", "AugAssign"}, {"ExprStmt", "Expr"},
      {"If", "If"},               {"For", "For"},
      {"While", "While"},         {"Break", "Break"},
      {"Continue", "Continue"},   {"Pass", "Pass"},
      {"Import", "Import"},       {"ImportFrom", "ImportFrom"},
      {"Raise", "Raise"},         {"Call", "Call"},
      {"Attribute", "Attribute"}, {"Subscript", "Subscript"},
      {"Slice", "Slice"},         {"BinOp", "BinOp"},
      {"UnaryOp", "UnaryOp"},     {"BoolOp", "BoolOp"},
      {"Compare", "Compare"},     {"Name", "Name"},
      {"Const", "Constant"},      {"List", "List"},
      {"Tuple", "Tuple"},         {"Dict", "Dict"},
      {"Set", "Set"},             {"ListComp", "ListComp"},
      {"DictComp", "DictComp"},   {"Lambda", "Lambda"},
      {"JoinedStr", "JoinedStr"}, {"FormattedValue", "FormattedValue"},
  };

  std::vector<std::string> paths = corpus_sources("safe");
  REQUIRE_FALSE(paths.empty());
  for (const std::string& path : paths) {
    CAPTURE(path);
    SyntaxTree tree = testutil::parse_ok(slurp(path));
    std::map<std::string, int> ours;
    std::function<void(const AstNode&)> walk = [&](const AstNode& node) {
      ++ours[kind_name(node.kind)];
      for (const AstNode& child : node.children) walk(child);
    };
    walk(tree.root);

    auto result = testutil::run_command("python3 \"" + testutil::repo_path(
                                            "tests/data/ast_counts.py") + "\" \"" + path + "\"");
    REQUIRE(result.exit_code == 0);
    auto theirs = nlohmann::json::parse(result.output);
    for (const auto& [our_kind, py_class] : kind_map) {
      int ours_count = ours.count(our_kind) ? ours[our_kind] : 0;
      int py_count = theirs.contains(py_class) ? theirs[py_class].get<int>() : 0;
      CAPTURE(our_kind);
      CHECK(ours_count == py_count);
    }
  }
}
