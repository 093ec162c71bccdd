#include "vulnaudit/lexer.hpp"

#include <algorithm>
#include <optional>
#include <unordered_set>

namespace vulnaudit {

std::string_view token_kind_name(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::NumberLiteral: return "number";
    case TokenKind::StringLiteral: return "string";
    case TokenKind::CharLiteral: return "char";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Preprocessor: return "preprocessor";
  }
  return "unknown";
}

std::string_view completeness_name(CompletenessClass c) noexcept {
  switch (c) {
    case CompletenessClass::Complete: return "complete";
    case CompletenessClass::TruncatedStart: return "truncated_start";
    case CompletenessClass::TruncatedEnd: return "truncated_end";
    case CompletenessClass::TruncatedBoth: return "truncated_both";
    case CompletenessClass::Empty: return "empty";
    case CompletenessClass::DeclarationOnly: return "declaration_only";
  }
  return "unknown";
}

namespace {

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> set = {
      "alignas",      "alignof",     "and",           "and_eq",     "asm",
      "auto",         "bitand",      "bitor",         "bool",       "break",
      "case",         "catch",       "char",          "char8_t",    "char16_t",
      "char32_t",     "class",       "compl",         "concept",    "const",
      "consteval",    "constexpr",   "constinit",     "const_cast", "continue",
      "co_await",     "co_return",   "co_yield",      "decltype",   "default",
      "delete",       "do",          "double",        "dynamic_cast", "else",
      "enum",         "explicit",    "export",        "extern",     "false",
      "float",        "for",         "friend",        "goto",       "if",
      "inline",       "int",         "long",          "mutable",    "namespace",
      "new",          "noexcept",    "not",           "not_eq",     "nullptr",
      "operator",     "or",          "or_eq",         "private",    "protected",
      "public",       "register",    "reinterpret_cast", "requires", "restrict",
      "return",       "short",       "signed",        "sizeof",     "static",
      "static_assert", "static_cast", "struct",       "switch",     "template",
      "this",         "thread_local", "throw",        "true",       "try",
      "typedef",      "typeid",      "typename",      "union",      "unsigned",
      "using",        "virtual",     "void",          "volatile",   "wchar_t",
      "while",        "xor",         "xor_eq",        "_Alignas",   "_Alignof",
      "_Atomic",      "_Bool",       "_Complex",      "_Generic",   "_Imaginary",
      "_Noreturn",    "_Static_assert", "_Thread_local",
  };
  return set;
}

// Longest first within each leading character is not required: matching
// tries lengths 3, 2, 1 in turn.
const std::unordered_set<std::string_view>& multi_char_operators() {
  static const std::unordered_set<std::string_view> set = {
      ">>=", "<<=", "...", "->*", "<=>", "->", "++", "--", "<<", ">>", "<=", ">=",
      "==",  "!=",  "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=",
      "::",  ".*",  "##",
  };
  return set;
}

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool is_punctuation(char c) {
  return c == '{' || c == '}' || c == '(' || c == ')' || c == '[' || c == ']' || c == ';' ||
         c == ',';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        line_start_ = true;
      } else if (is_blank(c)) {
        ++pos_;
      } else if (splice_at(pos_)) {
        skip_splice();
      } else if (c == '/' && peek(1) == '/') {
        skip_line_comment();
      } else if (c == '/' && peek(1) == '*') {
        skip_block_comment();
      } else if (c == '#' && line_start_) {
        lex_directive();
      } else {
        line_start_ = false;
        lex_token();
      }
    }
    return std::move(out_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  // Backslash-newline (optionally backslash-CR-LF).
  bool splice_at(std::size_t p) const {
    if (src_[p] != '\\') return false;
    if (p + 1 < src_.size() && src_[p + 1] == '\n') return true;
    return p + 2 < src_.size() && src_[p + 1] == '\r' && src_[p + 2] == '\n';
  }

  void skip_splice() {
    pos_ += src_[pos_ + 1] == '\r' ? 3 : 2;
    ++line_;
  }

  void emit(TokenKind kind, std::string text, std::size_t line) {
    out_.tokens.push_back(Token{kind, std::move(text), line});
  }

  void skip_line_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      if (splice_at(pos_)) {
        skip_splice();
      } else {
        ++pos_;
      }
    }
  }

  void skip_block_comment() {
    const auto end = src_.find("*/", pos_ + 2);
    const auto stop = end == std::string_view::npos ? src_.size() : end + 2;
    line_ += static_cast<std::size_t>(std::count(src_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                                 src_.begin() + static_cast<std::ptrdiff_t>(stop),
                                                 '\n'));
    pos_ = stop;
    if (end == std::string_view::npos) out_.ended_inside = EndedInside::BlockComment;
  }

  // Quoted run inside a directive, copied verbatim; stops at newline.
  void copy_quoted(std::string& text) {
    const char quote = src_[pos_];
    text += quote;
    ++pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      const char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
        text += c;
        text += src_[pos_ + 1];
        pos_ += 2;
        continue;
      }
      text += c;
      ++pos_;
      if (c == quote) return;
    }
  }

  void lex_directive() {
    const std::size_t start_line = line_;
    std::string text;
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      const char c = src_[pos_];
      if (splice_at(pos_)) {
        skip_splice();
        text += ' ';
      } else if (c == '/' && peek(1) == '/') {
        skip_line_comment();
      } else if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        text += ' ';
      } else if ((c == '"' || c == '\'') && !text.empty()) {
        copy_quoted(text);
      } else {
        text += c;
        ++pos_;
      }
    }
    // Collapse runs of blanks introduced by splices and comments.
    std::string compact;
    compact.reserve(text.size());
    for (char c : text) {
      if (is_blank(c)) {
        if (!compact.empty() && compact.back() != ' ') compact += ' ';
      } else {
        compact += c;
      }
    }
    while (!compact.empty() && compact.back() == ' ') compact.pop_back();
    emit(TokenKind::Preprocessor, std::move(compact), start_line);
  }

  void lex_token() {
    const unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (is_ident_start(c)) {
      lex_word();
    } else if (is_digit(c) || (c == '.' && is_digit(static_cast<unsigned char>(peek(1))))) {
      lex_number();
    } else if (c == '"') {
      lex_quoted(pos_, TokenKind::StringLiteral);
    } else if (c == '\'') {
      lex_quoted(pos_, TokenKind::CharLiteral);
    } else if (is_punctuation(static_cast<char>(c))) {
      emit(TokenKind::Punctuation, std::string(1, static_cast<char>(c)), line_);
      ++pos_;
    } else {
      lex_operator();
    }
  }

  void lex_word() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view word = src_.substr(start, pos_ - start);
    const char next = pos_ < src_.size() ? src_[pos_] : '\0';

    const bool char_prefix = word == "L" || word == "u" || word == "U" || word == "u8";
    const bool raw_prefix =
        word == "R" || word == "LR" || word == "uR" || word == "UR" || word == "u8R";
    if (next == '"' && raw_prefix && lex_raw_string(start)) return;
    if (next == '"' && char_prefix) {
      lex_quoted(start, TokenKind::StringLiteral);
      return;
    }
    if (next == '\'' && char_prefix) {
      lex_quoted(start, TokenKind::CharLiteral);
      return;
    }
    emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, std::string(word), line_);
  }

  // pp-number: digits, identifier characters, '.', digit separators and
  // exponent signs.
  void lex_number() {
    const std::size_t start = pos_;
    ++pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      const char prev = src_[pos_ - 1];
      if ((c == '+' || c == '-') &&
          (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P')) {
        ++pos_;
      } else if (c == '\'' && pos_ + 1 < src_.size() &&
                 is_ident_char(static_cast<unsigned char>(src_[pos_ + 1]))) {
        pos_ += 2;
      } else if (is_ident_char(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::NumberLiteral, std::string(src_.substr(start, pos_ - start)), line_);
  }

  // `start` points at the prefix (if any); pos_ may sit on the prefix or the
  // opening quote. An unescaped newline closes the token without consuming it.
  void lex_quoted(std::size_t start, TokenKind kind) {
    const std::size_t start_line = line_;
    pos_ = src_.find(kind == TokenKind::StringLiteral ? '"' : '\'', start);
    const char quote = src_[pos_];
    ++pos_;
    bool closed = false;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        if (src_[pos_ + 1] == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        closed = true;  // unterminated on this line; recover at the newline
        break;
      }
      ++pos_;
      if (c == quote) {
        closed = true;
        break;
      }
    }
    if (!closed) {
      pos_ = src_.size();
      out_.ended_inside =
          kind == TokenKind::StringLiteral ? EndedInside::StringLiteral : EndedInside::CharLiteral;
    }
    emit(kind, std::string(src_.substr(start, pos_ - start)), start_line);
  }

  bool lex_raw_string(std::size_t start) {
    const std::size_t quote = pos_;
    std::size_t p = quote + 1;
    std::string delim;
    while (p < src_.size() && src_[p] != '(') {
      const char c = src_[p];
      if (delim.size() >= 16 || c == ' ' || c == ')' || c == '\\' || c == '\n' || c == '\t') {
        return false;
      }
      delim += c;
      ++p;
    }
    if (p >= src_.size()) return false;
    const std::string closing = ")" + delim + "\"";
    const auto end = src_.find(closing, p + 1);
    const std::size_t stop = end == std::string_view::npos ? src_.size() : end + closing.size();
    const std::size_t start_line = line_;
    line_ += static_cast<std::size_t>(std::count(src_.begin() + static_cast<std::ptrdiff_t>(quote),
                                                 src_.begin() + static_cast<std::ptrdiff_t>(stop),
                                                 '\n'));
    pos_ = stop;
    if (end == std::string_view::npos) out_.ended_inside = EndedInside::StringLiteral;
    emit(TokenKind::StringLiteral, std::string(src_.substr(start, stop - start)), start_line);
    return true;
  }

  void lex_operator() {
    const auto& ops = multi_char_operators();
    for (std::size_t len : {3u, 2u}) {
      if (pos_ + len <= src_.size()) {
        const auto candidate = src_.substr(pos_, len);
        if (ops.contains(candidate)) {
          emit(TokenKind::Operator, std::string(candidate), line_);
          pos_ += len;
          return;
        }
      }
    }
    emit(TokenKind::Operator, std::string(1, src_[pos_]), line_);
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  bool line_start_ = true;
  TokenStream out_;
};

bool is_type_forming_keyword(std::string_view word) {
  static const std::unordered_set<std::string_view> set = {
      "void",     "char",     "char8_t",  "char16_t", "char32_t", "wchar_t", "short",
      "int",      "long",     "float",    "double",   "signed",   "unsigned", "bool",
      "_Bool",    "_Complex", "auto",     "const",    "volatile", "restrict", "_Atomic",
      "struct",   "union",    "enum",     "class",    "typename", "decltype",
  };
  return set.contains(word);
}

bool is_punct(const Token& t, char c) {
  return t.kind == TokenKind::Punctuation && t.text.size() == 1 && t.text[0] == c;
}

// A '}' that closes nothing means the matching opener was cut off.
bool has_unmatched_closing_brace(const std::vector<Token>& tokens) {
  long depth = 0;
  for (const auto& t : tokens) {
    if (is_punct(t, '{')) {
      ++depth;
    } else if (is_punct(t, '}') && --depth < 0) {
      return true;
    }
  }
  return false;
}

bool start_damaged(const std::vector<Token>& tokens) {
  if (has_unmatched_closing_brace(tokens)) return true;
  int paren = 0;
  int bracket = 0;
  int brace = 0;
  std::vector<const Token*> prefix;
  bool found_open = false;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Punctuation) {
      const char c = t.text[0];
      if (c == '(' && brace == 0 && bracket == 0) {
        found_open = true;
        break;
      }
      switch (c) {
        case '(': ++paren; break;
        case '[': ++bracket; break;
        case '{': ++brace; break;
        case ')': if (--paren < 0) return true; break;
        case ']': if (--bracket < 0) return true; break;
        case '}': if (--brace < 0) return true; break;
        default: break;
      }
    }
    if (t.kind != TokenKind::Preprocessor) prefix.push_back(&t);
  }
  if (!found_open || prefix.empty()) return true;

  const bool special_member =
      std::any_of(prefix.begin(), prefix.end(), [](const Token* t) {
        return t->is(TokenKind::Operator, "~") || t->is(TokenKind::Keyword, "operator");
      }) ||
      (prefix.size() >= 2 && prefix[prefix.size() - 2]->is(TokenKind::Operator, "::"));
  if (special_member) return false;

  const Token& name = *prefix.back();
  if (name.kind != TokenKind::Identifier) return false;
  const bool has_type = std::any_of(prefix.begin(), prefix.end() - 1, [](const Token* t) {
    return t->kind == TokenKind::Identifier ||
           (t->kind == TokenKind::Keyword && is_type_forming_keyword(t->text)) ||
           t->is(TokenKind::Operator, "*") || t->is(TokenKind::Operator, "&") ||
           t->is(TokenKind::Operator, "&&");
  });
  return !has_type;
}

}  // namespace

bool is_keyword(std::string_view word) noexcept { return keywords().contains(word); }

TokenStream tokenize(std::string_view code) { return Lexer(code).run(); }

CompletenessClass classify_completeness(const TokenStream& stream) {
  const auto& tokens = stream.tokens;
  if (tokens.empty()) return CompletenessClass::Empty;

  const Token* last = nullptr;
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (it->kind != TokenKind::Preprocessor) {
      last = &*it;
      break;
    }
  }
  long balance = 0;
  bool has_open_brace = false;
  for (const auto& t : tokens) {
    if (is_punct(t, '{')) {
      ++balance;
      has_open_brace = true;
    } else if (is_punct(t, '}')) {
      --balance;
    }
  }
  if (!has_open_brace && last != nullptr && is_punct(*last, ';')) {
    return CompletenessClass::DeclarationOnly;
  }

  const bool end_bad =
      balance > 0 || stream.ended_inside != EndedInside::No ||
      (has_open_brace && (last == nullptr || (!is_punct(*last, '}') && !is_punct(*last, ';'))));
  const bool start_bad = start_damaged(tokens);

  if (start_bad && end_bad) return CompletenessClass::TruncatedBoth;
  if (start_bad) return CompletenessClass::TruncatedStart;
  if (end_bad) return CompletenessClass::TruncatedEnd;
  return CompletenessClass::Complete;
}

}  // namespace vulnaudit
