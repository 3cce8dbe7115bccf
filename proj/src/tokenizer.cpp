#include "linetrust/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace linetrust {

namespace {

#include "keywords.inc"

// Longest operators first so maximal munch is a linear scan.
constexpr std::array<std::string_view, 40> kOperators = {
    "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=",  "&&",  "||", "+=", "-=", "*=", "/=", "%=", "&=", "^=",
    "|=",  "::",  "+",  "-",  "*",  "/",  "%",  "<",  ">",  "=",
    "!",   "~",   "&",  "|",  "^",  "?",  ":",  ".",  "",   ""};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<SourceToken> run() {
    std::vector<SourceToken> out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (starts_with("/*")) {
        pos_ += 2;
        while (pos_ < src_.size() && !starts_with("*/")) {
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
        pos_ = std::min(pos_ + 2, src_.size());
      } else if (c == '"' || c == '\'') {
        skip_quoted(c);
        out.push_back({{TokenKind::Literal, c == '"' ? "STR" : "CHR"}, line_});
      } else if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        std::string_view word = src_.substr(start, pos_ - start);
        // L"..", u8"..", etc.
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') &&
            (word == "L" || word == "u" || word == "U" || word == "u8")) {
          char q = src_[pos_];
          skip_quoted(q);
          out.push_back({{TokenKind::Literal, q == '"' ? "STR" : "CHR"}, line_});
          continue;
        }
        out.push_back({{is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier,
                        std::string(word)},
                       line_});
      } else if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                                 is_digit(src_[pos_ + 1]))) {
        std::size_t start = pos_;
        bool hex = start + 1 < src_.size() && src_[start] == '0' &&
                   (src_[start + 1] == 'x' || src_[start + 1] == 'X');
        while (pos_ < src_.size()) {
          char d = src_[pos_];
          char prev = src_[pos_ - (pos_ > start ? 1 : 0)];
          bool exponent_sign =
              (d == '+' || d == '-') && pos_ > start &&
              (hex ? (prev == 'p' || prev == 'P') : (prev == 'e' || prev == 'E'));
          if (is_ident_char(d) || d == '.' || exponent_sign) {
            ++pos_;
          } else {
            break;
          }
        }
        out.push_back({{TokenKind::Literal, std::string(src_.substr(start, pos_ - start))},
                       line_});
      } else if (starts_with("...")) {
        pos_ += 3;
        out.push_back({{TokenKind::Punct, "..."}, line_});
      } else if (auto op = match_operator(); !op.empty()) {
        pos_ += op.size();
        out.push_back({{TokenKind::Operator, std::string(op)}, line_});
      } else {
        ++pos_;
        out.push_back({{TokenKind::Punct, std::string(1, c)}, line_});
      }
    }
    return out;
  }

private:
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  std::string_view match_operator() const {
    for (auto op : kOperators) {
      if (!op.empty() && starts_with(op)) return op;
    }
    return {};
  }

  // Literals end at the closing quote or the end of the line.
  void skip_quoted(char quote) {
    ++pos_;
    while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
        ++pos_;
      }
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == quote) ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
};

}  // namespace

std::string to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Literal: return "Literal";
    case TokenKind::Operator: return "Operator";
    case TokenKind::Punct: return "Punct";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  return std::find(std::begin(kKeywordTable), std::end(kKeywordTable), word) !=
         std::end(kKeywordTable);
}

std::vector<SourceToken> tokenize_source(std::string_view source) {
  return Lexer(source).run();
}

std::vector<Token> tokenize_line(std::string_view text) {
  std::vector<Token> out;
  for (auto& st : Lexer(text).run()) out.push_back(std::move(st.token));
  return out;
}

std::string strip_comments(std::string_view source) {
  std::string out(source);
  std::size_t i = 0;
  while (i < out.size()) {
    char c = out[i];
    if (c == '"' || c == '\'') {
      ++i;
      while (i < out.size() && out[i] != c && out[i] != '\n') {
        if (out[i] == '\\' && i + 1 < out.size() && out[i + 1] != '\n') ++i;
        ++i;
      }
      if (i < out.size() && out[i] == c) ++i;
    } else if (out.compare(i, 2, "//") == 0) {
      while (i < out.size() && out[i] != '\n') out[i++] = ' ';
    } else if (out.compare(i, 2, "/*") == 0) {
      out[i] = out[i + 1] = ' ';
      i += 2;
      while (i < out.size() && out.compare(i, 2, "*/") != 0) {
        if (out[i] != '\n') out[i] = ' ';
        ++i;
      }
      if (i < out.size()) {
        out[i] = out[i + 1] = ' ';
        i += 2;
      }
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view source) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < source.size()) lines.emplace_back(source.substr(start));
      break;
    }
    std::string_view line = source.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

std::string render_tokens(std::span<const Token> tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    if (t.kind == TokenKind::Literal && t.text == "STR") {
      out += "\"STR\"";
    } else if (t.kind == TokenKind::Literal && t.text == "CHR") {
      out += "'CHR'";
    } else {
      out += t.text;
    }
  }
  return out;
}

std::string normalize_line(std::string_view text, bool alpha_rename) {
  std::vector<Token> tokens = tokenize_line(text);
  if (alpha_rename) {
    std::map<std::string, std::string> names;
    for (Token& t : tokens) {
      if (t.kind != TokenKind::Identifier) continue;
      auto [it, fresh] = names.try_emplace(t.text, "");
      if (fresh) it->second = "VAR" + std::to_string(names.size());
      t.text = it->second;
    }
  }
  return render_tokens(tokens);
}

std::set<std::string> extract_variables(std::span<const Token> tokens) {
  std::set<std::string> vars;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind != TokenKind::Identifier) continue;
    if (i + 1 < tokens.size() && tokens[i + 1].text == "(") continue;
    if (i > 0 && (tokens[i - 1].text == "." || tokens[i - 1].text == "->")) continue;
    vars.insert(tokens[i].text);
  }
  return vars;
}

std::set<std::string> extract_variables(std::string_view text) {
  auto tokens = tokenize_line(text);
  return extract_variables(std::span<const Token>(tokens));
}

bool is_code_line(std::string_view text) {
  for (const Token& t : tokenize_line(text)) {
    if (t.kind != TokenKind::Punct ||
        (t.text != "{" && t.text != "}" && t.text != ";")) {
      return true;
    }
  }
  return false;
}

std::vector<bool> code_line_mask(std::string_view source) {
  std::vector<bool> mask;
  for (const auto& line : split_lines(strip_comments(source))) {
    mask.push_back(is_code_line(line));
  }
  return mask;
}

}  // namespace linetrust
