#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linetrust {

enum class TokenKind { Identifier, Keyword, Literal, Operator, Punct };

std::string to_string(TokenKind kind);

// String and character literals are collapsed: their text is "STR" or "CHR".
struct Token {
  TokenKind kind;
  std::string text;

  bool operator==(const Token&) const = default;
};

struct SourceToken {
  Token token;
  std::uint32_t line;  // 1-based
};

bool is_keyword(std::string_view word);

// Maximal-munch tokenization of a single line. Never fails: unknown bytes
// become one-character Punct tokens.
std::vector<Token> tokenize_line(std::string_view text);

// Same lexer over a whole function, tracking lines; block comments may span
// lines.
std::vector<SourceToken> tokenize_source(std::string_view source);

// Blanks out comments while keeping every newline, so line numbers survive.
std::string strip_comments(std::string_view source);

std::vector<std::string> split_lines(std::string_view source);

// Tokens joined by single spaces; literals render as "STR" / 'CHR'.
std::string render_tokens(std::span<const Token> tokens);

std::string normalize_line(std::string_view text, bool alpha_rename = false);

// Identifiers on the line, minus called-function names and member names
// after '.' / '->'.
std::set<std::string> extract_variables(std::string_view text);
std::set<std::string> extract_variables(std::span<const Token> tokens);

// False for blank, comment-only and delimiter-only ({ } ;) lines. Expects
// comments already stripped when block comments may be involved.
bool is_code_line(std::string_view text);

// Per-line eligibility for a whole source text, block comments included.
std::vector<bool> code_line_mask(std::string_view source);

}  // namespace linetrust
