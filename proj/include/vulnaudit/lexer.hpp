#pragma once

// Pragmatic C/C++ lexer and function-completeness classifier.
//
// The lexer is total: every input produces a token stream. Comments and
// whitespace are dropped, string/char literals are single tokens with their
// escapes intact, and each preprocessor line (a '#' that is the first
// non-blank character on a line) is one token. Bytes that fit no rule become
// single-character Operator tokens.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vulnaudit {

enum class TokenKind : std::uint8_t {
  Identifier,
  Keyword,
  NumberLiteral,
  StringLiteral,
  CharLiteral,
  Operator,
  Punctuation,
  Preprocessor,
};

std::string_view token_kind_name(TokenKind kind) noexcept;

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;  // 1-based

  bool is(TokenKind k, std::string_view t) const noexcept { return kind == k && text == t; }
  friend bool operator==(const Token&, const Token&) = default;
};

/// Construct the raw text was still inside when it ended.
enum class EndedInside : std::uint8_t { No, BlockComment, StringLiteral, CharLiteral };

struct TokenStream {
  std::vector<Token> tokens;
  EndedInside ended_inside = EndedInside::No;
};

TokenStream tokenize(std::string_view code);

bool is_keyword(std::string_view word) noexcept;

enum class CompletenessClass : std::uint8_t {
  Complete,
  TruncatedStart,
  TruncatedEnd,
  TruncatedBoth,
  Empty,
  DeclarationOnly,
};

inline constexpr std::array<CompletenessClass, 6> kCompletenessClasses = {
    CompletenessClass::Complete,      CompletenessClass::TruncatedStart,
    CompletenessClass::TruncatedEnd,  CompletenessClass::TruncatedBoth,
    CompletenessClass::Empty,         CompletenessClass::DeclarationOnly,
};

std::string_view completeness_name(CompletenessClass c) noexcept;

/// Rules, first match wins:
///  1. Empty            no tokens.
///  2. DeclarationOnly  no '{' and the last token is ';'.
///  Otherwise start/end damage is assessed independently:
///  - start is damaged when a '}' closes nothing, when there is no '(' outside
///    braces/brackets, when a closer appears unmatched before it, when nothing precedes it, or when
///    a lone name precedes it with no type-forming token (type keyword,
///    qualifier, identifier, '*', '&'). Names next to '~', "operator" or a
///    preceding "::" are exempt so special members are not flagged.
///  - end is damaged when '{'/'}' balance is positive, when the text ended
///    inside a comment or literal, or when a body exists but the last token is
///    neither '}' nor ';'.
/// Trailing preprocessor lines are ignored when looking at the last token.
CompletenessClass classify_completeness(const TokenStream& stream);

inline CompletenessClass classify_completeness(std::string_view code) {
  return classify_completeness(tokenize(code));
}

}  // namespace vulnaudit
