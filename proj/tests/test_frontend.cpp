#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "linetrust/error.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/serialize.hpp"
#include "linetrust/tokenizer.hpp"

using namespace linetrust;
using fixture::L;

namespace {

using EdgeKey = std::tuple<std::uint32_t, std::uint32_t, DepKind, std::string>;

std::set<EdgeKey> edge_keys(const Pdg& g) {
  std::set<EdgeKey> out;
  for (const auto& e : g.edges) {
    out.insert({e.src.value(), e.dst.value(), e.kind, e.variable.value_or("")});
  }
  return out;
}

std::vector<std::string> texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

ErrorKind kind_of(auto&& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

const char* kChain = "void f() { int a = 1;\n int b = a;\n int c = b; }\n";

}  // namespace

TEST_CASE("tokenize_line examples") {
  auto t = tokenize_line("if (!data)");
  REQUIRE(t.size() == 5);
  CHECK(t[0] == Token{TokenKind::Keyword, "if"});
  CHECK(t[1] == Token{TokenKind::Punct, "("});
  CHECK(t[2] == Token{TokenKind::Operator, "!"});
  CHECK(t[3] == Token{TokenKind::Identifier, "data"});
  CHECK(t[4] == Token{TokenKind::Punct, ")"});

  t = tokenize_line("x = \"abc\";");
  REQUIRE(t.size() == 4);
  CHECK(t[2] == Token{TokenKind::Literal, "STR"});
  CHECK(t[3] == Token{TokenKind::Punct, ";"});

  t = tokenize_line("a+=b /*c*/");
  CHECK(texts(t) == std::vector<std::string>{"a", "+=", "b"});
  CHECK(t[1].kind == TokenKind::Operator);
}

TEST_CASE("maximal munch and literals") {
  CHECK(texts(tokenize_line("a<<=b->c++")) == std::vector<std::string>{"a", "<<=", "b", "->", "c", "++"});
  CHECK(texts(tokenize_line("x = 0x1p-3 + 1e+5;")) ==
        std::vector<std::string>{"x", "=", "0x1p-3", "+", "1e+5", ";"});
  CHECK(texts(tokenize_line("c = 'q'; // tail")) == std::vector<std::string>{"c", "=", "CHR", ";"});
  CHECK(render_tokens(tokenize_line("s = \"a b\";")) == "s = \"STR\" ;");
  CHECK(tokenize_line("@").front() == Token{TokenKind::Punct, "@"});
  CHECK(is_keyword("while"));
  CHECK_FALSE(is_keyword("whilst"));
}

TEST_CASE("normalize_line examples") {
  CHECK(normalize_line("  x=y+1 ; // hm") == "x = y + 1 ;");
  CHECK(normalize_line("\tfoo(a,\tb);") == "foo ( a , b ) ;");
  CHECK(normalize_line("data->foo(data)", true) == "VAR1 -> VAR2 ( VAR1 )");
  CHECK(normalize_line("// only a comment").empty());
}

TEST_CASE("extract_variables examples") {
  CHECK(extract_variables("fprintf(file, \"%s\", data)") == std::set<std::string>{"file", "data"});
  CHECK(extract_variables("int x;") == std::set<std::string>{"x"});
  CHECK(extract_variables("return 0;").empty());
  CHECK(extract_variables("p->len = q.size;") == std::set<std::string>{"p", "q"});
}

TEST_CASE("code lines exclude comments, blanks and delimiters") {
  auto mask = code_line_mask("int f() {\n  /* a\n  b */\n\n  x = 1;\n  }\n;\n");
  CHECK(mask == std::vector<bool>{true, false, false, false, true, false, false});
}

TEST_CASE("property: tokenizer totality on fuzzed lines") {
  const std::string alphabet =
      "abcxyzAB_019 +-*/%<>=!&|^~?:.,;(){}[]@$#`\\\t";
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string line;
    std::size_t len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) line += alphabet[rng() % alphabet.size()];
    if (line.find("//") != std::string::npos || line.find("/*") != std::string::npos) continue;
    std::string squeezed;
    for (char c : line) {
      if (c != ' ' && c != '\t') squeezed += c;
    }
    std::string joined;
    for (const auto& t : tokenize_line(line)) {
      CHECK_FALSE(t.text.empty());
      joined += t.text;
    }
    CHECK(joined == squeezed);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("property: normalization is idempotent") {
  const std::string alphabet = "abxy_09 +-*/<>=!&|;(){}\"'.,\t#@";
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    std::string line;
    std::size_t len = rng() % 50;
    for (std::size_t k = 0; k < len; ++k) line += alphabet[rng() % alphabet.size()];
    std::string once = normalize_line(line);
    CHECK(normalize_line(once) == once);
    std::string alpha = normalize_line(line, true);
    CHECK(normalize_line(alpha, true) == alpha);
  }
}

TEST_CASE("native parse of the worked example") {
  Pdg g = build_pdg(read_text_file(fixture::path("vrrp_print_data.c")), "vrrp_print_data");
  CHECK(validate_pdg(g).empty());
  CHECK(g.nodes == std::vector<LineId>{L(1), L(3), L(4), L(5), L(7), L(8), L(9)});
  std::set<EdgeKey> expected = {
      {1, 3, DepKind::Data, "file"},    {3, 4, DepKind::Control, ""},
      {3, 5, DepKind::Control, ""},     {3, 7, DepKind::Control, ""},
      {5, 8, DepKind::Data, "file"},    {7, 8, DepKind::Data, "file"},
      {8, 9, DepKind::Data, "count"},
  };
  CHECK(edge_keys(g) == expected);
  CHECK(g.text_at(L(7)) == "file = fopen ( dump_file , \"STR\" ) ;");
  CHECK(g.vars_at(L(7)) == std::set<std::string>{"file", "dump_file"});
}

TEST_CASE("single-line function has one node and no data edges") {
  Pdg g = build_pdg("int f(){ return 0; }", "f");
  CHECK(g.nodes == std::vector<LineId>{L(1)});
  CHECK(g.edges.empty());
}

TEST_CASE("three-line def-use chain") {
  Pdg g = build_pdg(kChain, "f");
  std::set<EdgeKey> expected = {{1, 2, DepKind::Data, "a"}, {2, 3, DepKind::Data, "b"}};
  CHECK(edge_keys(g) == expected);
}

TEST_CASE("control dependence and loops") {
  const char* src =
      "int g(int n)\n"
      "{\n"
      "  int i = 0;\n"
      "  while (i < n) {\n"
      "    i = i + 1;\n"
      "  }\n"
      "  return i;\n"
      "}\n";
  Pdg g = build_pdg(src, "g");
  CHECK(validate_pdg(g).empty());
  auto keys = edge_keys(g);
  CHECK(keys.count({4, 5, DepKind::Control, ""}));
  CHECK(keys.count({4, 4, DepKind::Control, ""}));
  CHECK(keys.count({5, 5, DepKind::Data, "i"}));   // loop-carried self-loop is kept
  CHECK(keys.count({3, 4, DepKind::Data, "i"}));
  CHECK(keys.count({5, 7, DepKind::Data, "i"}));
  CHECK(keys.count({1, 4, DepKind::Data, "n"}));
  CHECK_FALSE(keys.count({4, 7, DepKind::Control, ""}));
  bool self_loop = std::any_of(g.edges.begin(), g.edges.end(),
                               [](const PdgEdge& e) { return e.is_self_loop(); });
  CHECK(self_loop);
}

TEST_CASE("if/else with for loop and weak definitions") {
  const char* src =
      "void h(struct s *p, int n)\n"
      "{\n"
      "  int k;\n"
      "  for (k = 0; k < n; k++)\n"
      "    p->v[k] = k;\n"
      "  if (n > 2)\n"
      "    use(p);\n"
      "  else\n"
      "    n = 0;\n"
      "  done(n);\n"
      "}\n";
  Pdg g = build_pdg(src, "h");
  CHECK(validate_pdg(g).empty());
  auto keys = edge_keys(g);
  CHECK(keys.count({4, 5, DepKind::Control, ""}));
  CHECK(keys.count({6, 7, DepKind::Control, ""}));
  CHECK(keys.count({6, 9, DepKind::Control, ""}));
  // p->v[k] = k only weakly defines p: the parameter's definition still reaches line 7.
  CHECK(keys.count({1, 7, DepKind::Data, "p"}));
  CHECK(keys.count({5, 7, DepKind::Data, "p"}));
  CHECK(keys.count({9, 10, DepKind::Data, "n"}));
  CHECK(keys.count({1, 10, DepKind::Data, "n"}));
}

TEST_CASE("unsupported constructs and parse errors") {
  std::string msg;
  CHECK(kind_of([] { parse_function("int f(int x)\n{\n  switch (x) { }\n}\n"); }, &msg) ==
        ErrorKind::UnsupportedConstruct);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(kind_of([] { parse_function("void f()\n{\n  goto out;\n}\n"); }) ==
        ErrorKind::UnsupportedConstruct);
  CHECK(kind_of([] { parse_function("#define X 1\nvoid f() { }\n"); }) ==
        ErrorKind::UnsupportedConstruct);
  CHECK(kind_of([] { parse_function("void f() { do { } while (1); }"); }) ==
        ErrorKind::UnsupportedConstruct);
  CHECK(kind_of([] { parse_function("void f() { if (x) { y = 1; }"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_function("void f() { } }"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_function("void f();"); }) == ErrorKind::Parse);
}

TEST_CASE("import maps CDG and DDG edges") {
  Json doc = Json::parse(R"J({
    "function": "f",
    "nodes": [{"id": "id7", "lineNumber": 3, "code": "if (x)"},
              {"id": "id9", "lineNumber": 7, "code": "y = x;"},
              {"id": 11, "lineNumber": 7, "code": "x"}],
    "edges": [{"src": "id7", "dst": "id9", "label": "CDG"},
              {"src": "id7", "dst": "id9", "label": "REACHING_DEF", "variable": "x"},
              {"src": "id9", "dst": 11, "label": "AST"}]
  })J");
  ImportResult r = import_raw_graph(doc);
  CHECK(r.dropped_edges == 1);
  REQUIRE(r.graph.edges.size() == 2);
  CHECK(r.graph.edges[0].kind == DepKind::Control);
  CHECK(r.graph.edges[1].kind == DepKind::Data);
  CHECK(r.graph.nodes[2].id == "11");
  Pdg g = merge_line_nodes(r.graph, "", "f");
  CHECK(g.nodes == std::vector<LineId>{L(3), L(7)});
  CHECK(edge_keys(g) ==
        std::set<EdgeKey>{{3, 7, DepKind::Control, ""}, {3, 7, DepKind::Data, "x"}});
}

TEST_CASE("import of AST-only export and malformed exports") {
  Json ast = Json::parse(R"J({"nodes": [{"id": 1, "lineNumber": 1, "code": "f()"},
                                        {"id": 2, "lineNumber": 2, "code": "g()"}],
                              "edges": [{"src": 1, "dst": 2, "label": "AST"}]})J");
  ImportResult r = import_raw_graph(ast);
  CHECK(r.graph.edges.empty());
  CHECK(r.dropped_edges > 0);

  std::string msg;
  Json no_line = Json::parse(R"J({"nodes": [{"id": "n5", "code": "x"}], "edges": []})J");
  CHECK(kind_of([&] { import_raw_graph(no_line); }, &msg) == ErrorKind::Import);
  CHECK(msg.find("n5") != std::string::npos);

  Json no_var = Json::parse(R"J({"nodes": [{"id": 1, "lineNumber": 1}, {"id": 2, "lineNumber": 2}],
                                "edges": [{"src": 1, "dst": 2, "label": "DDG"}]})J");
  CHECK(kind_of([&] { import_raw_graph(no_var); }) == ErrorKind::Import);

  Json dangling = Json::parse(R"J({"nodes": [{"id": 1, "lineNumber": 1}],
                                  "edges": [{"src": 1, "dst": 9, "label": "CDG"}]})J");
  CHECK(kind_of([&] { import_raw_graph(dangling); }) == ErrorKind::Import);
}

TEST_CASE("export and re-import reproduce the merged graph") {
  RawDepGraph raw = parse_function(kChain);
  Pdg direct = merge_line_nodes(raw, kChain, "f");
  Pdg again = merge_line_nodes(import_raw_graph(export_raw_graph(raw)).graph, kChain, "f");
  CHECK(pdg_to_json(direct).dump() == pdg_to_json(again).dump());
}

TEST_CASE("merging collapses nodes sharing a line") {
  RawDepGraph raw;
  raw.nodes = {{"a", L(7), "x = f()"}, {"b", L(7), "y = g()"}, {"c", L(8), "use(x)"},
               {"d", L(9), "use(y)"}};
  raw.edges = {{"a", "c", DepKind::Data, "x"}, {"b", "d", DepKind::Data, "y"},
               {"a", "c", DepKind::Data, "x"}};
  Pdg g = merge_line_nodes(raw, "", "m");
  CHECK(g.nodes == std::vector<LineId>{L(7), L(8), L(9)});
  CHECK(g.edges.size() == 2);

  // already one node per line: merging changes nothing
  RawDepGraph single = parse_function(kChain);
  Pdg once = merge_line_nodes(single, kChain, "f");
  RawDepGraph rebuilt;
  for (LineId l : once.nodes) rebuilt.nodes.push_back({std::to_string(l.value()), l, once.text_at(l)});
  for (const auto& e : once.edges) {
    rebuilt.edges.push_back({std::to_string(e.src.value()), std::to_string(e.dst.value()), e.kind, e.variable});
  }
  CHECK(pdg_to_json(merge_line_nodes(rebuilt, kChain, "f")).dump() == pdg_to_json(once).dump());
}

TEST_CASE("property: line merge soundness") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 300; ++round) {
    RawDepGraph raw;
    std::size_t n = 1 + rng() % 15;
    for (std::size_t i = 0; i < n; ++i) {
      raw.nodes.push_back({"n" + std::to_string(i), L(static_cast<std::uint32_t>(1 + rng() % 6)), "x"});
    }
    std::size_t m = rng() % 25;
    for (std::size_t i = 0; i < m; ++i) {
      bool data = rng() % 2;
      raw.edges.push_back({"n" + std::to_string(rng() % n), "n" + std::to_string(rng() % n),
                           data ? DepKind::Data : DepKind::Control,
                           data ? std::optional<std::string>(rng() % 2 ? "x" : "y") : std::nullopt});
    }
    Pdg g = merge_line_nodes(raw, "", "r");
    CHECK(validate_pdg(g).empty());
    std::map<std::string, LineId> line_of;
    for (const auto& node : raw.nodes) line_of.emplace(node.id, node.line);
    std::set<EdgeKey> witnessed;
    for (const auto& e : raw.edges) {
      witnessed.insert({line_of.at(e.src).value(), line_of.at(e.dst).value(), e.kind,
                        e.variable.value_or("")});
    }
    CHECK(edge_keys(g) == witnessed);
    CHECK(edge_keys(g).size() == g.edges.size());
  }
}

TEST_CASE("every C fixture parses into a valid graph") {
  for (const char* name : {"vrrp_print_data.c", "long_function.c"}) {
    CAPTURE(name);
    Pdg g = build_pdg(read_text_file(fixture::path(name)), name);
    CHECK(validate_pdg(g).empty());
    CHECK_FALSE(g.nodes.empty());
  }
}
