#include "tqa/sql_where.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace tqa {
namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

enum class Tok { ident, number, str, lparen, rparen, op, end };

struct Token {
  Tok kind = Tok::end;
  std::size_t pos = 0;
  std::string text;   // ident spelling / operator
  std::string str;    // string literal ('' doubling decoded)
  double number = 0;
};

struct LexResult {
  std::vector<Token> tokens;
  std::optional<TranslateError> error;
};

LexResult lex_sql(std::string_view src) {
  LexResult out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '\'') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '\'') {
          if (i + 1 < src.size() && src[i + 1] == '\'') {  // '' escapes a quote
            value.push_back('\'');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        value.push_back(src[i]);
        ++i;
      }
      if (!closed) {
        out.error = TranslateError{"unterminated string literal"};
        return out;
      }
      Token t;
      t.kind = Tok::str;
      t.pos = start;
      t.str = std::move(value);
      out.tokens.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      double value = 0;
      auto res = std::from_chars(src.data() + i, src.data() + src.size(), value,
                                 std::chars_format::general);
      if (res.ec != std::errc() || !std::isfinite(value)) {
        out.error = TranslateError{"malformed number literal"};
        return out;
      }
      i = static_cast<std::size_t>(res.ptr - src.data());
      Token t;
      t.kind = Tok::number;
      t.pos = start;
      t.number = value;
      out.tokens.push_back(t);
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      Token t;
      t.kind = Tok::ident;
      t.pos = start;
      t.text = std::string(src.substr(i, j - i));
      out.tokens.push_back(std::move(t));
      i = j;
      continue;
    }
    auto push_op = [&](std::string text, std::size_t len) {
      Token t;
      t.kind = Tok::op;
      t.pos = start;
      t.text = std::move(text);
      out.tokens.push_back(std::move(t));
      i += len;
    };
    if (c == '<' && i + 1 < src.size() && src[i + 1] == '>') {
      push_op("!=", 2);
      continue;
    }
    if (c == '!' && i + 1 < src.size() && src[i + 1] == '=') {
      push_op("!=", 2);
      continue;
    }
    if ((c == '<' || c == '>') && i + 1 < src.size() && src[i + 1] == '=') {
      push_op(std::string(1, c) + "=", 2);
      continue;
    }
    switch (c) {
      case '=': push_op("=", 1); continue;
      case '<': push_op("<", 1); continue;
      case '>': push_op(">", 1); continue;
      case '(': out.tokens.push_back({Tok::lparen, start, {}, {}, 0}); ++i; continue;
      case ')': out.tokens.push_back({Tok::rparen, start, {}, {}, 0}); ++i; continue;
      default:
        out.error = TranslateError{std::string("unsupported character '") + c + "'"};
        return out;
    }
  }
  out.tokens.push_back({Tok::end, src.size(), {}, {}, 0});
  return out;
}

// or := and (OR and)* ; and := primary (AND primary)* ;
// primary := '(' or ')' | ident op literal
class SqlParser {
 public:
  SqlParser(std::vector<Token> tokens, const ColumnMap& columns)
      : tokens_(std::move(tokens)), columns_(columns) {}

  Result<PredicateExpr, TranslateError> parse() {
    ExprPtr expr = parse_or();
    if (error_) return *error_;
    if (peek().kind != Tok::end) {
      return set_error("unsupported construct after clause");
    }
    return expr;
  }

 private:
  const Token& peek() const { return tokens_[index_]; }
  const Token& advance() { return tokens_[index_++]; }

  bool at_keyword(const char* word) const {
    return peek().kind == Tok::ident && lowercase(peek().text) == word;
  }

  TranslateError set_error(std::string message) {
    if (!error_) error_ = TranslateError{std::move(message)};
    return *error_;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (!error_ && at_keyword("or")) {
      advance();
      ExprPtr rhs = parse_and();
      if (error_) return nullptr;
      lhs = make_bool_op(BoolKind::disjunction, std::move(lhs), std::move(rhs));
    }
    return error_ ? nullptr : lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_primary();
    while (!error_ && at_keyword("and")) {
      advance();
      ExprPtr rhs = parse_primary();
      if (error_) return nullptr;
      lhs = make_bool_op(BoolKind::conjunction, std::move(lhs), std::move(rhs));
    }
    return error_ ? nullptr : lhs;
  }

  ExprPtr parse_primary() {
    if (depth_ > 64) {
      set_error("clause nested too deeply");
      return nullptr;
    }
    if (peek().kind == Tok::lparen) {
      advance();
      ++depth_;
      ExprPtr inner = parse_or();
      --depth_;
      if (error_) return nullptr;
      if (peek().kind != Tok::rparen) {
        set_error("expected ')'");
        return nullptr;
      }
      advance();
      return inner;
    }
    if (peek().kind != Tok::ident) {
      set_error("expected a column identifier");
      return nullptr;
    }
    std::string word = lowercase(peek().text);
    if (word == "select") {
      set_error("subqueries are not supported");
      return nullptr;
    }
    if (word == "in" || word == "between" || word == "like" || word == "not" ||
        word == "exists" || word == "is" || word == "null") {
      set_error("unsupported construct '" + peek().text + "'");
      return nullptr;
    }
    const Token& col = advance();
    if (peek().kind == Tok::lparen) {
      set_error("function calls are not supported");
      return nullptr;
    }
    if (peek().kind != Tok::op) {
      if (peek().kind == Tok::ident) {
        std::string next = lowercase(peek().text);
        if (next == "in" || next == "between" || next == "like" || next == "is" ||
            next == "not") {
          set_error("unsupported construct '" + peek().text + "'");
          return nullptr;
        }
      }
      set_error("expected a comparison operator");
      return nullptr;
    }
    const Token& op = advance();

    std::string column = col.text;
    if (auto it = columns_.find(column); it != columns_.end()) column = it->second;

    if (peek().kind == Tok::number) {
      double literal = advance().number;
      CmpKind kind;
      if (op.text == "=") kind = CmpKind::eq;
      else if (op.text == "!=") kind = CmpKind::ne;
      else if (op.text == "<") kind = CmpKind::lt;
      else if (op.text == "<=") kind = CmpKind::le;
      else if (op.text == ">") kind = CmpKind::gt;
      else if (op.text == ">=") kind = CmpKind::ge;
      else {
        set_error("unsupported operator '" + op.text + "'");
        return nullptr;
      }
      return make_cmp(kind, make_call(Builtin::cast_float, make_col(std::move(column))),
                      make_num(literal));
    }
    if (peek().kind == Tok::str) {
      std::string literal = advance().str;
      CmpKind kind;
      if (op.text == "=") kind = CmpKind::eq;
      else if (op.text == "!=") kind = CmpKind::ne;
      else {
        set_error("ordering comparison against a string literal is not supported");
        return nullptr;
      }
      // case-insensitive equality: both sides lowered, the literal statically
      return make_cmp(kind, make_call(Builtin::lower, make_col(std::move(column))),
                      make_str(lowercase(literal)));
    }
    set_error("expected a string or number literal");
    return nullptr;
  }

  std::vector<Token> tokens_;
  const ColumnMap& columns_;
  std::size_t index_ = 0;
  int depth_ = 0;
  std::optional<TranslateError> error_;
};

}  // namespace

Result<PredicateExpr, TranslateError> translate_sql_where(std::string_view where_text,
                                                          const ColumnMap& columns) {
  LexResult lexed = lex_sql(where_text);
  if (lexed.error) return *lexed.error;
  if (lexed.tokens.size() <= 1) {
    return TranslateError{"empty WHERE clause"};
  }
  return SqlParser(std::move(lexed.tokens), columns).parse();
}

}  // namespace tqa
