// Statement-level dependence graph for a single C function.
//
// The parser builds the CFG directly while descending. Every simple
// statement, predicate and for-loop clause becomes one CFG node carrying
// its defined and used variables.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "linetrust/error.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/tokenizer.hpp"

namespace linetrust {

namespace {

constexpr int kEntry = 0;
constexpr int kExit = 1;

const std::set<std::string_view> kTypeWords = {
    "int",    "char",   "short",    "long",     "float",  "double",
    "void",   "signed", "unsigned", "const",    "volatile", "static",
    "extern", "register", "struct", "union",    "enum",   "_Bool",
    "auto",   "inline", "restrict", "_Atomic",  "_Thread_local"};

const std::set<std::string_view> kAssignOps = {
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="};

const std::set<std::string_view> kRejected = {"switch", "case", "default", "goto",
                                              "do", "typedef"};

struct CfgNode {
  std::uint32_t line = 0;
  std::string code;
  std::set<std::string> strong_defs;
  std::set<std::string> weak_defs;
  std::set<std::string> uses;
  bool predicate = false;
  std::vector<int> succ;
};

struct DefUse {
  std::set<std::string> strong_defs;
  std::set<std::string> weak_defs;
  std::set<std::string> uses;
};

using Tokens = std::vector<SourceToken>;

bool is_text(const SourceToken& t, std::string_view s) {
  return t.token.kind != TokenKind::Literal && t.token.text == s;
}

bool is_ident(const SourceToken& t) { return t.token.kind == TokenKind::Identifier; }

// Index of the bracket matching the opener at `open`, scanning forward.
std::size_t match_forward(const Tokens& toks, std::size_t open, std::size_t end) {
  const std::string& o = toks[open].token.text;
  std::string c = o == "(" ? ")" : o == "[" ? "]" : "}";
  int depth = 0;
  for (std::size_t i = open; i < end; ++i) {
    if (is_text(toks[i], o)) ++depth;
    if (is_text(toks[i], c) && --depth == 0) return i;
  }
  return end;
}

std::size_t match_backward(const Tokens& toks, std::size_t close, std::size_t begin) {
  const std::string& c = toks[close].token.text;
  std::string o = c == ")" ? "(" : "[";
  int depth = 0;
  for (std::size_t i = close + 1; i-- > begin;) {
    if (is_text(toks[i], c)) ++depth;
    if (is_text(toks[i], o) && --depth == 0) return i;
  }
  return begin;
}

// Variables read in toks[b, e), skipping positions listed in `skip`.
void collect_uses(const Tokens& toks, std::size_t b, std::size_t e,
                  const std::set<std::size_t>& skip, std::set<std::string>& uses) {
  for (std::size_t i = b; i < e; ++i) {
    if (!is_ident(toks[i]) || skip.contains(i)) continue;
    if (i + 1 < e && is_text(toks[i + 1], "(")) continue;
    if (i > b && (is_text(toks[i - 1], ".") || is_text(toks[i - 1], "->"))) continue;
    uses.insert(toks[i].token.text);
  }
}

// Walks left from just before an assignment or postfix operator and returns
// the base variable of the lvalue; `simple` is false for p->f, a[i], *p.
std::optional<std::size_t> lvalue_base(const Tokens& toks, std::size_t b,
                                       std::size_t op, bool& simple) {
  simple = true;
  std::optional<std::size_t> base;
  std::size_t j = op;
  while (j > b) {
    --j;
    if (is_text(toks[j], "]")) {
      simple = false;
      j = match_backward(toks, j, b);
      continue;
    }
    if (is_text(toks[j], ")")) {
      simple = false;
      std::size_t open = match_backward(toks, j, b);
      for (std::size_t k = open; k < j; ++k) {
        if (is_ident(toks[k])) {
          base = k;
          break;
        }
      }
      j = open;
      break;
    }
    if (is_ident(toks[j])) {
      base = j;
      if (j > b + 1 && (is_text(toks[j - 1], ".") || is_text(toks[j - 1], "->"))) {
        simple = false;
        --j;
        continue;
      }
      break;
    }
    break;
  }
  if (base && j > b && is_text(toks[j - 1], "*")) {
    // Only a dereference when the '*' is not a binary operator.
    bool unary = j - 1 == b || toks[j - 2].token.kind == TokenKind::Operator ||
                 toks[j - 2].token.kind == TokenKind::Punct;
    if (unary) simple = false;
  }
  return base;
}

// Forward walk for prefix ++x / --x.
std::optional<std::size_t> prefix_operand(const Tokens& toks, std::size_t op,
                                          std::size_t e, bool& simple) {
  simple = true;
  std::size_t j = op + 1;
  while (j < e && (is_text(toks[j], "*") || is_text(toks[j], "("))) {
    simple = false;
    ++j;
  }
  if (j >= e || !is_ident(toks[j])) return std::nullopt;
  if (j + 1 < e && (is_text(toks[j + 1], ".") || is_text(toks[j + 1], "->") ||
                    is_text(toks[j + 1], "["))) {
    simple = false;
  }
  return j;
}

void record_def(DefUse& du, const std::string& var, bool strong) {
  if (strong) {
    du.strong_defs.insert(var);
  } else {
    du.weak_defs.insert(var);
  }
}

// Defs and uses of an expression in toks[b, e).
DefUse analyze_expression(const Tokens& toks, std::size_t b, std::size_t e) {
  DefUse du;
  std::set<std::size_t> skip;
  for (std::size_t i = b; i < e; ++i) {
    const auto& t = toks[i];
    if (t.token.kind != TokenKind::Operator) continue;
    if (kAssignOps.contains(t.token.text)) {
      bool simple = true;
      auto base = lvalue_base(toks, b, i, simple);
      if (!base) continue;
      const std::string& var = toks[*base].token.text;
      bool plain = t.token.text == "=";
      record_def(du, var, simple);
      if (plain && simple) skip.insert(*base);
    } else if (t.token.text == "++" || t.token.text == "--") {
      bool simple = true;
      std::optional<std::size_t> base;
      bool postfix = i > b && (is_ident(toks[i - 1]) || is_text(toks[i - 1], "]") ||
                               is_text(toks[i - 1], ")"));
      base = postfix ? lvalue_base(toks, b, i, simple) : prefix_operand(toks, i, e, simple);
      if (base) record_def(du, toks[*base].token.text, simple);
    } else if (t.token.text == "&" && i + 1 < e && is_ident(toks[i + 1]) &&
               (i == b || is_text(toks[i - 1], "(") || is_text(toks[i - 1], ","))) {
      // &x handed to a call may be written through.
      du.weak_defs.insert(toks[i + 1].token.text);
    }
  }
  collect_uses(toks, b, e, skip, du.uses);
  return du;
}

bool looks_like_declaration(const Tokens& toks, std::size_t b, std::size_t e) {
  if (b >= e) return false;
  const auto& first = toks[b];
  if (first.token.kind == TokenKind::Keyword && kTypeWords.contains(first.token.text)) {
    return true;
  }
  if (!is_ident(first) || b + 1 >= e) return false;
  std::size_t j = b + 1;
  while (j < e && is_text(toks[j], "*")) ++j;
  if (j >= e || !is_ident(toks[j])) return false;
  if (j == b + 1) return true;  // T x
  // T *x followed by a declarator terminator
  return j + 1 == e || is_text(toks[j + 1], "=") || is_text(toks[j + 1], ",") ||
         is_text(toks[j + 1], "[") || is_text(toks[j + 1], ";");
}

DefUse analyze_declaration(const Tokens& toks, std::size_t b, std::size_t e) {
  DefUse du;
  std::size_t i = b;
  bool saw_type = false;
  while (i < e) {
    const auto& t = toks[i];
    if (t.token.kind == TokenKind::Keyword && kTypeWords.contains(t.token.text)) {
      saw_type = true;
      bool tagged = t.token.text == "struct" || t.token.text == "union" ||
                    t.token.text == "enum";
      ++i;
      if (tagged && i < e && is_ident(toks[i])) ++i;
      if (tagged && i < e && is_text(toks[i], "{")) i = match_forward(toks, i, e) + 1;
      continue;
    }
    if (!saw_type && is_ident(t)) {
      saw_type = true;  // typedef name
      ++i;
      continue;
    }
    break;
  }
  // Split declarators on top-level commas.
  std::size_t start = i;
  int depth = 0;
  for (std::size_t k = i; k <= e; ++k) {
    if (k < e) {
      const auto& t = toks[k];
      if (is_text(t, "(") || is_text(t, "[") || is_text(t, "{")) ++depth;
      if (is_text(t, ")") || is_text(t, "]") || is_text(t, "}")) --depth;
      if (!(depth == 0 && is_text(t, ","))) continue;
    }
    std::size_t eq = k;
    for (std::size_t m = start; m < k; ++m) {
      if (is_text(toks[m], "=")) {
        eq = m;
        break;
      }
    }
    std::optional<std::size_t> name;
    for (std::size_t m = start; m < eq; ++m) {
      if (is_ident(toks[m])) {
        name = m;
        break;
      }
    }
    // Array bounds and initializers are read.
    std::set<std::size_t> skip;
    if (name) skip.insert(*name);
    collect_uses(toks, start, eq, skip, du.uses);
    if (eq < k) {
      DefUse init = analyze_expression(toks, eq + 1, k);
      du.uses.insert(init.uses.begin(), init.uses.end());
      du.strong_defs.insert(init.strong_defs.begin(), init.strong_defs.end());
      du.weak_defs.insert(init.weak_defs.begin(), init.weak_defs.end());
      if (name) du.strong_defs.insert(toks[*name].token.text);
    }
    start = k + 1;
  }
  return du;
}

DefUse analyze_statement(const Tokens& toks, std::size_t b, std::size_t e) {
  if (looks_like_declaration(toks, b, e)) return analyze_declaration(toks, b, e);
  return analyze_expression(toks, b, e);
}

std::string render(const Tokens& toks, std::size_t b, std::size_t e) {
  std::vector<Token> plain;
  for (std::size_t i = b; i < e; ++i) plain.push_back(toks[i].token);
  return render_tokens(plain);
}

class FunctionParser {
public:
  explicit FunctionParser(Tokens toks) : toks_(std::move(toks)) {
    nodes_.resize(2);  // entry, exit
  }

  RawDepGraph run() {
    reject_preprocessor();
    std::size_t body = parse_signature();
    std::vector<int> exits = parse_block(body, {entry_tail_});
    if (pos_ != toks_.size()) {
      throw Error(ErrorKind::Parse, "unexpected '" + toks_[pos_].token.text +
                                        "' after function body at line " +
                                        std::to_string(toks_[pos_].line));
    }
    link(exits, kExit);
    close_infinite_loops();
    return build_graph();
  }

private:
  void reject_preprocessor() {
    for (const auto& t : toks_) {
      if (is_text(t, "#")) {
        throw Error(ErrorKind::UnsupportedConstruct,
                    "preprocessor directive at line " + std::to_string(t.line));
      }
    }
  }

  int add_node(std::uint32_t line, std::string code, DefUse du, bool predicate = false) {
    CfgNode n;
    n.line = line;
    n.code = std::move(code);
    n.strong_defs = std::move(du.strong_defs);
    n.weak_defs = std::move(du.weak_defs);
    n.uses = std::move(du.uses);
    n.predicate = predicate;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void link(const std::vector<int>& preds, int to) {
    for (int p : preds) {
      auto& s = nodes_[p].succ;
      if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
    }
  }

  // Returns the index of the body's opening brace.
  std::size_t parse_signature() {
    std::size_t brace = 0;
    while (brace < toks_.size() && !is_text(toks_[brace], "{")) ++brace;
    if (brace == toks_.size()) {
      throw Error(ErrorKind::Parse, "no function body found");
    }
    std::size_t open = 0;
    while (open < brace && !is_text(toks_[open], "(")) ++open;
    if (open == brace || open == 0 || !is_ident(toks_[open - 1])) {
      throw Error(ErrorKind::Parse, "no function signature before the body");
    }
    name_ = toks_[open - 1].token.text;
    std::uint32_t name_line = toks_[open - 1].line;
    std::size_t close = match_forward(toks_, open, brace);
    if (close == brace) {
      throw Error(ErrorKind::Parse, "unbalanced parentheses in signature");
    }

    // Parameters grouped by the line their name sits on.
    std::map<std::uint32_t, std::set<std::string>> params;
    std::size_t start = open + 1;
    int depth = 0;
    for (std::size_t k = open + 1; k <= close; ++k) {
      if (k < close) {
        if (is_text(toks_[k], "(") || is_text(toks_[k], "[")) ++depth;
        if (is_text(toks_[k], ")") || is_text(toks_[k], "]")) --depth;
        if (!(depth == 0 && is_text(toks_[k], ","))) continue;
      }
      std::optional<std::size_t> last;
      int d = 0;
      for (std::size_t m = start; m < k; ++m) {
        if (is_text(toks_[m], "[")) ++d;
        if (is_text(toks_[m], "]")) --d;
        if (d == 0 && is_ident(toks_[m])) last = m;
      }
      if (last) params[toks_[*last].line].insert(toks_[*last].token.text);
      start = k + 1;
    }

    DefUse sig;
    sig.strong_defs = params[name_line];
    params.erase(name_line);
    int method = add_node(name_line, render(toks_, 0, close + 1), std::move(sig));
    link({kEntry}, method);
    int tail = method;
    for (auto& [line, names] : params) {
      DefUse du;
      du.strong_defs = names;
      int n = add_node(line, "param " + *names.begin(), std::move(du));
      link({tail}, n);
      tail = n;
    }
    entry_tail_ = tail;
    pos_ = brace;
    return brace;
  }

  [[noreturn]] void unsupported(const SourceToken& t) {
    throw Error(ErrorKind::UnsupportedConstruct,
                "unsupported construct '" + t.token.text + "' at line " +
                    std::to_string(t.line));
  }

  const SourceToken& peek() const {
    if (pos_ >= toks_.size()) {
      throw Error(ErrorKind::Parse, "unbalanced braces: unexpected end of function");
    }
    return toks_[pos_];
  }

  void expect(std::string_view text) {
    const auto& t = peek();
    if (!is_text(t, text)) {
      throw Error(ErrorKind::Parse, "expected '" + std::string(text) + "' but found '" +
                                        t.token.text + "' at line " +
                                        std::to_string(t.line));
    }
    ++pos_;
  }

  // Index one past the ')' matching the '(' at pos_.
  std::size_t paren_group() {
    std::size_t close = match_forward(toks_, pos_, toks_.size());
    if (close == toks_.size()) {
      throw Error(ErrorKind::Parse, "unbalanced parentheses at line " +
                                        std::to_string(toks_[pos_].line));
    }
    return close;
  }

  // Next ';' at bracket depth zero, starting at pos_.
  std::size_t statement_end() {
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (is_text(t, "(") || is_text(t, "[") || is_text(t, "{")) ++depth;
      if (is_text(t, ")") || is_text(t, "]") || is_text(t, "}")) {
        if (--depth < 0) break;
      }
      if (depth == 0 && is_text(t, ";")) return i;
    }
    throw Error(ErrorKind::Parse,
                "missing ';' after statement at line " + std::to_string(toks_[pos_].line));
  }

  std::vector<int> parse_block(std::size_t open, std::vector<int> preds) {
    pos_ = open;
    expect("{");
    while (!is_text(peek(), "}")) preds = parse_statement(std::move(preds));
    ++pos_;
    return preds;
  }

  std::vector<int> parse_statement(std::vector<int> preds) {
    const SourceToken& t = peek();
    const std::string& w = t.token.text;
    if (t.token.kind == TokenKind::Keyword && kRejected.contains(w)) unsupported(t);
    if (is_ident(t) && pos_ + 1 < toks_.size() && is_text(toks_[pos_ + 1], ":")) {
      unsupported(t);  // label
    }
    if (is_ident(t) && (w == "asm" || w == "__asm__")) unsupported(t);
    if (is_text(t, "{")) return parse_block(pos_, std::move(preds));
    if (is_text(t, "}")) {
      throw Error(ErrorKind::Parse, "unbalanced braces at line " + std::to_string(t.line));
    }
    if (is_text(t, ";")) {
      ++pos_;
      return preds;
    }
    if (t.token.kind == TokenKind::Keyword) {
      if (w == "if") return parse_if(std::move(preds));
      if (w == "while") return parse_while(std::move(preds));
      if (w == "for") return parse_for(std::move(preds));
      if (w == "return") return parse_return(std::move(preds));
      if (w == "break" || w == "continue") return parse_jump(std::move(preds));
      if (w == "else") {
        throw Error(ErrorKind::Parse, "'else' without 'if' at line " + std::to_string(t.line));
      }
    }
    std::size_t end = statement_end();
    int n = add_node(t.line, render(toks_, pos_, end + 1),
                     analyze_statement(toks_, pos_, end));
    link(preds, n);
    pos_ = end + 1;
    return {n};
  }

  int predicate_node(const SourceToken& kw, std::size_t open, std::size_t close) {
    return add_node(kw.line, render(toks_, open - 1, close + 1),
                    analyze_expression(toks_, open + 1, close), true);
  }

  std::vector<int> parse_if(std::vector<int> preds) {
    const SourceToken& kw = toks_[pos_++];
    if (!is_text(peek(), "(")) expect("(");
    std::size_t open = pos_;
    std::size_t close = paren_group();
    int p = predicate_node(kw, open, close);
    link(preds, p);
    pos_ = close + 1;
    std::vector<int> exits = parse_statement({p});
    if (pos_ < toks_.size() && is_text(toks_[pos_], "else")) {
      ++pos_;
      std::vector<int> other = parse_statement({p});
      exits.insert(exits.end(), other.begin(), other.end());
    } else {
      exits.push_back(p);
    }
    return exits;
  }

  std::vector<int> parse_while(std::vector<int> preds) {
    const SourceToken& kw = toks_[pos_++];
    if (!is_text(peek(), "(")) expect("(");
    std::size_t open = pos_;
    std::size_t close = paren_group();
    int p = predicate_node(kw, open, close);
    link(preds, p);
    pos_ = close + 1;
    loops_.push_back({p, {}});
    std::vector<int> body = parse_statement({p});
    link(body, p);
    std::vector<int> exits = std::move(loops_.back().breaks);
    loops_.pop_back();
    exits.push_back(p);
    return exits;
  }

  std::vector<int> parse_for(std::vector<int> preds) {
    const SourceToken& kw = toks_[pos_++];
    if (!is_text(peek(), "(")) expect("(");
    std::size_t open = pos_;
    std::size_t close = paren_group();
    std::size_t semi1 = open + 1, semi2 = 0;
    {
      int depth = 0;
      std::vector<std::size_t> semis;
      for (std::size_t i = open + 1; i < close; ++i) {
        if (is_text(toks_[i], "(") || is_text(toks_[i], "[")) ++depth;
        if (is_text(toks_[i], ")") || is_text(toks_[i], "]")) --depth;
        if (depth == 0 && is_text(toks_[i], ";")) semis.push_back(i);
      }
      if (semis.size() != 2) {
        throw Error(ErrorKind::Parse, "malformed for header at line " + std::to_string(kw.line));
      }
      semi1 = semis[0];
      semi2 = semis[1];
    }
    std::vector<int> tail = std::move(preds);
    if (semi1 > open + 1) {
      int init = add_node(toks_[open + 1].line, render(toks_, open + 1, semi1 + 1),
                          analyze_statement(toks_, open + 1, semi1));
      link(tail, init);
      tail = {init};
    }
    std::uint32_t cond_line = semi2 > semi1 + 1 ? toks_[semi1 + 1].line : kw.line;
    int cond = add_node(cond_line, "for ( " + render(toks_, semi1 + 1, semi2) + " )",
                        analyze_expression(toks_, semi1 + 1, semi2), true);
    link(tail, cond);
    int cont = cond;
    std::optional<int> step;
    if (close > semi2 + 1) {
      step = add_node(toks_[semi2 + 1].line, render(toks_, semi2 + 1, close),
                      analyze_expression(toks_, semi2 + 1, close));
      link({*step}, cond);
      cont = *step;
    }
    pos_ = close + 1;
    loops_.push_back({cont, {}});
    std::vector<int> body = parse_statement({cond});
    link(body, cont);
    std::vector<int> exits = std::move(loops_.back().breaks);
    loops_.pop_back();
    exits.push_back(cond);
    return exits;
  }

  std::vector<int> parse_return(std::vector<int> preds) {
    const SourceToken& kw = toks_[pos_];
    std::size_t end = statement_end();
    int n = add_node(kw.line, render(toks_, pos_, end + 1),
                     analyze_expression(toks_, pos_ + 1, end));
    link(preds, n);
    link({n}, kExit);
    pos_ = end + 1;
    return {};
  }

  std::vector<int> parse_jump(std::vector<int> preds) {
    const SourceToken& kw = toks_[pos_];
    if (loops_.empty()) {
      throw Error(ErrorKind::Parse, "'" + kw.token.text + "' outside a loop at line " +
                                        std::to_string(kw.line));
    }
    std::size_t end = statement_end();
    int n = add_node(kw.line, render(toks_, pos_, end + 1), {});
    link(preds, n);
    if (kw.token.text == "break") {
      loops_.back().breaks.push_back(n);
    } else {
      link({n}, loops_.back().continue_target);
    }
    pos_ = end + 1;
    return {};
  }

  // Nodes trapped in a loop with no way out still need a post-dominator.
  void close_infinite_loops() {
    std::size_t n = nodes_.size();
    std::vector<std::vector<int>> pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int s : nodes_[i].succ) pred[s].push_back(static_cast<int>(i));
    }
    std::vector<bool> reaches(n, false);
    std::vector<int> stack{kExit};
    reaches[kExit] = true;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int p : pred[x]) {
        if (!reaches[p]) {
          reaches[p] = true;
          stack.push_back(p);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!reaches[i] && nodes_[i].predicate) nodes_[i].succ.push_back(kExit);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!reaches[i] && !nodes_[i].predicate && nodes_[i].succ.empty()) {
        nodes_[i].succ.push_back(kExit);
      }
    }
  }

  using Bits = std::vector<std::uint64_t>;

  static bool test(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
  static void set(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

  // Control dependence via the post-dominator tree.
  std::vector<std::pair<int, int>> control_dependences() const {
    std::size_t n = nodes_.size();
    std::size_t words = (n + 63) / 64;
    Bits all(words, ~std::uint64_t{0});
    std::vector<Bits> pdom(n, all);
    pdom[kExit] = Bits(words, 0);
    set(pdom[kExit], kExit);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n; i-- > 0;) {
        if (static_cast<int>(i) == kExit) continue;
        Bits next = all;
        if (nodes_[i].succ.empty()) next.assign(words, 0);
        for (int s : nodes_[i].succ) {
          for (std::size_t w = 0; w < words; ++w) next[w] &= pdom[s][w];
        }
        set(next, i);
        if (next != pdom[i]) {
          pdom[i] = std::move(next);
          changed = true;
        }
      }
    }
    auto count = [&](const Bits& b) {
      std::size_t c = 0;
      for (auto w : b) c += static_cast<std::size_t>(__builtin_popcountll(w));
      return c;
    };
    std::vector<int> ipdom(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t want = count(pdom[i]) - 1;
      for (std::size_t d = 0; d < n; ++d) {
        if (d != i && test(pdom[i], d) && count(pdom[d]) == want) {
          ipdom[i] = static_cast<int>(d);
          break;
        }
      }
    }
    std::set<std::pair<int, int>> deps;
    for (std::size_t a = 0; a < n; ++a) {
      if (!nodes_[a].predicate) continue;
      for (int b : nodes_[a].succ) {
        if (test(pdom[a], static_cast<std::size_t>(b)) && b != static_cast<int>(a)) continue;
        int runner = b;
        while (runner != -1 && runner != ipdom[a]) {
          deps.insert({static_cast<int>(a), runner});
          runner = ipdom[runner];
        }
      }
    }
    return {deps.begin(), deps.end()};
  }

  struct Def {
    int node;
    std::string var;
    bool strong;
  };

  // Reaching definitions; returns (def node, use node, variable).
  std::vector<std::tuple<int, int, std::string>> data_dependences() const {
    std::vector<Def> defs;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (const auto& v : nodes_[i].strong_defs) defs.push_back({int(i), v, true});
      for (const auto& v : nodes_[i].weak_defs) {
        if (!nodes_[i].strong_defs.contains(v)) defs.push_back({int(i), v, false});
      }
    }
    std::size_t n = nodes_.size();
    std::size_t words = (defs.size() + 63) / 64 + 1;
    std::vector<Bits> gen(n, Bits(words, 0)), kill(n, Bits(words, 0));
    for (std::size_t d = 0; d < defs.size(); ++d) {
      set(gen[defs[d].node], d);
      if (!defs[d].strong) continue;
      for (std::size_t o = 0; o < defs.size(); ++o) {
        if (o != d && defs[o].var == defs[d].var) set(kill[defs[d].node], o);
      }
    }
    std::vector<std::vector<int>> pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int s : nodes_[i].succ) pred[s].push_back(int(i));
    }
    std::vector<Bits> in(n, Bits(words, 0)), out(n, Bits(words, 0));
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        Bits next_in(words, 0);
        for (int p : pred[i]) {
          for (std::size_t w = 0; w < words; ++w) next_in[w] |= out[p][w];
        }
        Bits next_out(words, 0);
        for (std::size_t w = 0; w < words; ++w) {
          next_out[w] = gen[i][w] | (next_in[w] & ~kill[i][w]);
        }
        if (next_out != out[i] || next_in != in[i]) {
          in[i] = std::move(next_in);
          out[i] = std::move(next_out);
          changed = true;
        }
      }
    }
    std::vector<std::tuple<int, int, std::string>> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& v : nodes_[i].uses) {
        for (std::size_t d = 0; d < defs.size(); ++d) {
          if (defs[d].var == v && test(in[i], d)) edges.emplace_back(defs[d].node, int(i), v);
        }
      }
    }
    return edges;
  }

  RawDepGraph build_graph() const {
    RawDepGraph g;
    g.function_name = name_;
    auto id = [](int i) { return "n" + std::to_string(i); };
    for (std::size_t i = 2; i < nodes_.size(); ++i) {
      g.nodes.push_back({id(int(i)), LineId(nodes_[i].line), nodes_[i].code});
    }
    for (auto [a, b] : control_dependences()) {
      if (a < 2 || b < 2) continue;
      g.edges.push_back({id(a), id(b), DepKind::Control, std::nullopt});
    }
    for (auto& [a, b, v] : data_dependences()) {
      g.edges.push_back({id(a), id(b), DepKind::Data, v});
    }
    return g;
  }

  struct Loop {
    int continue_target;
    std::vector<int> breaks;
  };

  Tokens toks_;
  std::size_t pos_ = 0;
  std::vector<CfgNode> nodes_;
  std::vector<Loop> loops_;
  std::string name_;
  int entry_tail_ = kEntry;
};

}  // namespace

RawDepGraph parse_function(std::string_view source) {
  return FunctionParser(tokenize_source(source)).run();
}

}  // namespace linetrust
