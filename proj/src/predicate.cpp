#include "tqa/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace tqa {
namespace {

std::string num_to_string(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string quote_single(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('\'');
  for (char c : text) {
    if (c == '\\' || c == '\'') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  ident,
  number,
  str,
  lparen,
  rparen,
  lbracket,
  rbracket,
  dot,
  hash,
  minus,
  op_eq,
  op_ne,
  op_lt,
  op_le,
  op_gt,
  op_ge,
  end,
};

struct Token {
  Tok kind = Tok::end;
  std::size_t pos = 0;
  std::string text;   // ident spelling
  std::string str;    // decoded string literal
  double number = 0;  // numeric literal
};

struct LexOutput {
  std::vector<Token> tokens;
  std::optional<ParseError> error;
};

LexOutput lex(std::string_view src) {
  LexOutput out;
  std::size_t i = 0;
  auto fail = [&](std::size_t pos, std::string message) {
    out.error = ParseError{pos, std::move(message), {}};
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '\'' || c == '"') {
      char quote = c;
      std::string value;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          switch (e) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            default: value.push_back(e); break;
          }
          i += 2;
          continue;
        }
        if (d == quote) {
          closed = true;
          ++i;
          break;
        }
        value.push_back(d);
        ++i;
      }
      if (!closed) {
        fail(start, "unterminated string literal");
        return out;
      }
      Token t;
      t.kind = Tok::str;
      t.pos = start;
      t.str = std::move(value);
      out.tokens.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      double value = 0;
      auto res = std::from_chars(src.data() + i, src.data() + src.size(), value,
                                 std::chars_format::general);
      if (res.ec != std::errc() || !std::isfinite(value)) {
        fail(start, "malformed number literal");
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
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two('=', '=')) {
      out.tokens.push_back({Tok::op_eq, start, {}, {}, 0});
      i += 2;
      continue;
    }
    if (two('!', '=')) {
      out.tokens.push_back({Tok::op_ne, start, {}, {}, 0});
      i += 2;
      continue;
    }
    if (two('<', '=')) {
      out.tokens.push_back({Tok::op_le, start, {}, {}, 0});
      i += 2;
      continue;
    }
    if (two('>', '=')) {
      out.tokens.push_back({Tok::op_ge, start, {}, {}, 0});
      i += 2;
      continue;
    }
    switch (c) {
      case '<': out.tokens.push_back({Tok::op_lt, start, {}, {}, 0}); ++i; continue;
      case '>': out.tokens.push_back({Tok::op_gt, start, {}, {}, 0}); ++i; continue;
      case '(': out.tokens.push_back({Tok::lparen, start, {}, {}, 0}); ++i; continue;
      case ')': out.tokens.push_back({Tok::rparen, start, {}, {}, 0}); ++i; continue;
      case '[': out.tokens.push_back({Tok::lbracket, start, {}, {}, 0}); ++i; continue;
      case ']': out.tokens.push_back({Tok::rbracket, start, {}, {}, 0}); ++i; continue;
      case '.': out.tokens.push_back({Tok::dot, start, {}, {}, 0}); ++i; continue;
      case '#': out.tokens.push_back({Tok::hash, start, {}, {}, 0}); ++i; continue;
      case '-': out.tokens.push_back({Tok::minus, start, {}, {}, 0}); ++i; continue;
      case '=': fail(start, "'=' is not an operator here; use '=='"); return out;
      case '!': fail(start, "'!' is not an operator here; use '!=' or 'not'"); return out;
      default: fail(start, std::string("unexpected character '") + c + "'"); return out;
    }
  }
  out.tokens.push_back({Tok::end, src.size(), {}, {}, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

constexpr int kMaxNesting = 256;

std::optional<Builtin> builtin_from_name(std::string_view name) {
  if (name == "lower") return Builtin::lower;
  if (name == "float") return Builtin::cast_float;
  if (name == "len") return Builtin::length;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Result<PredicateExpr, ParseError> parse() {
    auto expr = parse_or();
    if (error_) return *error_;
    if (peek().kind != Tok::end) {
      return fail(peek().pos, "unexpected trailing input", {"end of input"});
    }
    return expr;
  }

 private:
  const Token& peek() const { return tokens_[index_]; }
  const Token& advance() { return tokens_[index_++]; }
  bool at_ident(std::string_view word) const {
    return peek().kind == Tok::ident && peek().text == word;
  }

  ParseError fail(std::size_t pos, std::string message, std::vector<std::string> expected) {
    if (!error_) error_ = ParseError{pos, std::move(message), std::move(expected)};
    return *error_;
  }

  struct DepthGuard {
    Parser& parser;
    bool ok;
    explicit DepthGuard(Parser& p) : parser(p), ok(++p.depth_ <= kMaxNesting) {}
    ~DepthGuard() { --parser.depth_; }
  };

  ExprPtr parse_or() {
    DepthGuard guard(*this);
    if (!guard.ok) {
      fail(peek().pos, "expression nested too deeply", {});
      return nullptr;
    }
    ExprPtr lhs = parse_and();
    while (!error_ && at_ident("or")) {
      advance();
      ExprPtr rhs = parse_and();
      if (error_) return nullptr;
      lhs = make_bool_op(BoolKind::disjunction, std::move(lhs), std::move(rhs));
    }
    return error_ ? nullptr : lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (!error_ && at_ident("and")) {
      advance();
      ExprPtr rhs = parse_not();
      if (error_) return nullptr;
      lhs = make_bool_op(BoolKind::conjunction, std::move(lhs), std::move(rhs));
    }
    return error_ ? nullptr : lhs;
  }

  ExprPtr parse_not() {
    DepthGuard guard(*this);
    if (!guard.ok) {
      fail(peek().pos, "expression nested too deeply", {});
      return nullptr;
    }
    if (at_ident("not")) {
      advance();
      ExprPtr operand = parse_not();
      if (error_) return nullptr;
      return make_not(std::move(operand));
    }
    return parse_cmp();
  }

  std::optional<CmpKind> peek_cmp() const {
    switch (peek().kind) {
      case Tok::op_eq: return CmpKind::eq;
      case Tok::op_ne: return CmpKind::ne;
      case Tok::op_lt: return CmpKind::lt;
      case Tok::op_le: return CmpKind::le;
      case Tok::op_gt: return CmpKind::gt;
      case Tok::op_ge: return CmpKind::ge;
      case Tok::ident: return peek().text == "in" ? std::optional<CmpKind>(CmpKind::contains)
                                                  : std::nullopt;
      default: return std::nullopt;
    }
  }

  // cmp := term (op term)? -- comparisons do not chain
  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_term();
    if (error_) return nullptr;
    if (auto op = peek_cmp()) {
      advance();
      ExprPtr rhs = parse_term();
      if (error_) return nullptr;
      return make_cmp(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_row_access() {
    const Token& open = peek();
    if (open.kind != Tok::lbracket) {
      fail(open.pos, "expected '[' after row", {"["});
      return nullptr;
    }
    advance();
    ExprPtr result;
    if (peek().kind == Tok::str) {
      result = make_col(advance().str);
    } else if (peek().kind == Tok::hash) {
      advance();
      if (peek().kind != Tok::number) {
        fail(peek().pos, "expected column position after '#'", {"number"});
        return nullptr;
      }
      const Token& num = advance();
      double v = num.number;
      if (v < 0 || v != std::floor(v) || v > 1e9) {
        fail(num.pos, "column position must be a small non-negative integer", {});
        return nullptr;
      }
      result = make_pos(static_cast<std::size_t>(v));
    } else {
      fail(peek().pos, "expected a column name or #position inside row[...]", {"string", "#"});
      return nullptr;
    }
    if (peek().kind != Tok::rbracket) {
      fail(peek().pos, "expected ']'", {"]"});
      return nullptr;
    }
    advance();
    return result;
  }

  // postfix method dialect: e.lower() normalizes to lower(e)
  ExprPtr parse_postfix(ExprPtr base) {
    while (!error_ && peek().kind == Tok::dot) {
      advance();
      if (peek().kind != Tok::ident) {
        fail(peek().pos, "expected method name after '.'", {"lower", "float", "len"});
        return nullptr;
      }
      const Token& name = advance();
      auto fn = builtin_from_name(name.text);
      if (!fn) {
        fail(name.pos, "unknown method '" + name.text + "'", {"lower", "float", "len"});
        return nullptr;
      }
      if (peek().kind != Tok::lparen) {
        fail(peek().pos, "expected '(' after method name", {"("});
        return nullptr;
      }
      advance();
      if (peek().kind != Tok::rparen) {
        fail(peek().pos, "methods take no arguments", {")"});
        return nullptr;
      }
      advance();
      base = make_call(*fn, std::move(base));
    }
    return error_ ? nullptr : base;
  }

  ExprPtr parse_term() {
    DepthGuard guard(*this);
    if (!guard.ok) {
      fail(peek().pos, "expression nested too deeply", {});
      return nullptr;
    }
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::str: {
        advance();
        return parse_postfix(make_str(tok.str));
      }
      case Tok::number: {
        advance();
        return parse_postfix(make_num(tok.number));
      }
      case Tok::minus: {
        advance();
        if (peek().kind != Tok::number) {
          fail(peek().pos, "expected a number after '-'", {"number"});
          return nullptr;
        }
        const Token& num = advance();
        return parse_postfix(make_num(-num.number));
      }
      case Tok::lparen: {
        advance();
        ExprPtr inner = parse_or();
        if (error_) return nullptr;
        if (peek().kind != Tok::rparen) {
          fail(peek().pos, "expected ')'", {")"});
          return nullptr;
        }
        advance();
        return parse_postfix(std::move(inner));
      }
      case Tok::ident: {
        const std::string& word = tok.text;
        if (word == "true" || word == "True") {
          advance();
          return parse_postfix(make_bool(true));
        }
        if (word == "false" || word == "False") {
          advance();
          return parse_postfix(make_bool(false));
        }
        if (word == "row" || word == "row_dict") {
          advance();
          ExprPtr access = parse_row_access();
          if (error_) return nullptr;
          return parse_postfix(std::move(access));
        }
        if (auto fn = builtin_from_name(word)) {
          advance();
          if (peek().kind != Tok::lparen) {
            fail(peek().pos, "expected '(' after '" + word + "'", {"("});
            return nullptr;
          }
          advance();
          ExprPtr arg = parse_or();
          if (error_) return nullptr;
          if (peek().kind != Tok::rparen) {
            fail(peek().pos, "expected ')'", {")"});
            return nullptr;
          }
          advance();
          return parse_postfix(make_call(*fn, std::move(arg)));
        }
        // closed function set: any other callee is rejected outright
        if (index_ + 1 < tokens_.size() && tokens_[index_ + 1].kind == Tok::lparen) {
          fail(tok.pos, "unknown function '" + word + "'", {"lower", "float", "len"});
          return nullptr;
        }
        fail(tok.pos, "unexpected identifier '" + word + "'",
             {"literal", "row[...]", "lower", "float", "len", "(", "not"});
        return nullptr;
      }
      default:
        fail(tok.pos, "expected a term",
             {"literal", "row[...]", "lower", "float", "len", "(", "not"});
        return nullptr;
    }
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  int depth_ = 0;
  std::optional<ParseError> error_;
};

// ---------------------------------------------------------------------------
// Renderer

// Precedence levels mirror the grammar: or(0) < and(1) < not(2) < cmp(3) < term(4).
int natural_level(const Expr& e) {
  if (const auto* b = std::get_if<BoolExpr>(&e.node)) {
    return b->op == BoolKind::disjunction ? 0 : 1;
  }
  if (std::holds_alternative<NotExpr>(e.node)) return 2;
  if (std::holds_alternative<CmpExpr>(e.node)) return 3;
  return 4;
}

const char* cmp_text(CmpKind op) {
  switch (op) {
    case CmpKind::eq: return "==";
    case CmpKind::ne: return "!=";
    case CmpKind::lt: return "<";
    case CmpKind::le: return "<=";
    case CmpKind::gt: return ">";
    case CmpKind::ge: return ">=";
    case CmpKind::contains: return "in";
  }
  return "==";
}

const char* builtin_name(Builtin fn) {
  switch (fn) {
    case Builtin::lower: return "lower";
    case Builtin::cast_float: return "float";
    case Builtin::length: return "len";
  }
  return "lower";
}

void render_into(std::string& out, const Expr& e, int required) {
  if (natural_level(e) < required) {
    out.push_back('(');
    render_into(out, e, 0);
    out.push_back(')');
    return;
  }
  struct Visitor {
    std::string& out;
    void operator()(const BoolLit& b) const { out += b.value ? "true" : "false"; }
    void operator()(const NumLit& n) const { out += num_to_string(n.value); }
    void operator()(const StrLit& s) const { out += quote_single(s.value); }
    void operator()(const ColRef& c) const {
      out += "row[";
      out += quote_single(c.name);
      out += ']';
    }
    void operator()(const PosRef& p) const {
      out += "row[#";
      out += std::to_string(p.index);
      out += ']';
    }
    void operator()(const NotExpr& n) const {
      out += "not ";
      render_into(out, *n.operand, 2);
    }
    void operator()(const BoolExpr& b) const {
      if (b.op == BoolKind::disjunction) {
        render_into(out, *b.lhs, 0);
        out += " or ";
        render_into(out, *b.rhs, 1);
      } else {
        render_into(out, *b.lhs, 1);
        out += " and ";
        render_into(out, *b.rhs, 2);
      }
    }
    void operator()(const CmpExpr& c) const {
      render_into(out, *c.lhs, 4);
      out.push_back(' ');
      out += cmp_text(c.op);
      out.push_back(' ');
      render_into(out, *c.rhs, 4);
    }
    void operator()(const CallExpr& c) const {
      out += builtin_name(c.fn);
      out.push_back('(');
      render_into(out, *c.arg, 0);
      out.push_back(')');
    }
  };
  std::visit(Visitor{out}, e.node);
}

// ---------------------------------------------------------------------------
// Evaluator

using Value = std::variant<bool, double, std::string>;

struct EvalAbort {
  EvalError error;
};

struct EvalCtx {
  const RowBinding& row;
  const EvalLimits& limits;
  std::size_t steps = 0;
};

[[noreturn]] void abort_eval(EvalError::Kind kind, std::string message) {
  throw EvalAbort{EvalError{kind, std::move(message)}};
}

void tick(EvalCtx& ctx) {
  if (++ctx.steps > ctx.limits.max_steps_per_row) {
    abort_eval(EvalError::Kind::budget, "per-row step budget exceeded");
  }
}

void check_length(const EvalCtx& ctx, const std::string& s) {
  if (s.size() > ctx.limits.max_string_length) {
    abort_eval(EvalError::Kind::budget, "string length limit exceeded");
  }
}

std::string to_text(const EvalCtx& ctx, const Value& v) {
  std::string out;
  if (std::holds_alternative<bool>(v)) {
    out = std::get<bool>(v) ? "true" : "false";
  } else if (std::holds_alternative<double>(v)) {
    out = num_to_string(std::get<double>(v));
  } else {
    out = std::get<std::string>(v);
  }
  check_length(ctx, out);
  return out;
}

double strict_float(const std::string& raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
  if (begin == end) {
    abort_eval(EvalError::Kind::bad_cast, "float() of empty text");
  }
  if (raw[begin] == '+') ++begin;  // from_chars rejects an explicit plus
  double value = 0;
  auto res = std::from_chars(raw.data() + begin, raw.data() + end, value,
                             std::chars_format::general);
  if (res.ec != std::errc() || res.ptr != raw.data() + end || !std::isfinite(value)) {
    abort_eval(EvalError::Kind::bad_cast, "float() could not parse '" + raw + "'");
  }
  return value;
}

bool require_bool(const Value& v, const char* what) {
  if (!std::holds_alternative<bool>(v)) {
    abort_eval(EvalError::Kind::type_error, std::string(what) + " needs a boolean operand");
  }
  return std::get<bool>(v);
}

Value eval(EvalCtx& ctx, const Expr& e);

bool eval_compare(EvalCtx& ctx, const CmpExpr& c) {
  Value lhs = eval(ctx, *c.lhs);
  Value rhs = eval(ctx, *c.rhs);
  if (c.op == CmpKind::contains) {
    std::string needle = to_text(ctx, lhs);
    std::string haystack = to_text(ctx, rhs);
    return haystack.find(needle) != std::string::npos;
  }
  if (c.op == CmpKind::eq || c.op == CmpKind::ne) {
    bool equal = false;
    if (lhs.index() == rhs.index()) {
      equal = lhs == rhs;
    }
    return c.op == CmpKind::eq ? equal : !equal;
  }
  int rel;  // -1, 0, 1
  if (std::holds_alternative<double>(lhs) && std::holds_alternative<double>(rhs)) {
    double a = std::get<double>(lhs);
    double b = std::get<double>(rhs);
    rel = a < b ? -1 : (a > b ? 1 : 0);
  } else if (std::holds_alternative<std::string>(lhs) &&
             std::holds_alternative<std::string>(rhs)) {
    const auto& a = std::get<std::string>(lhs);
    const auto& b = std::get<std::string>(rhs);
    rel = a < b ? -1 : (a > b ? 1 : 0);
  } else {
    abort_eval(EvalError::Kind::type_error,
               "ordering comparison needs two numbers or two strings");
  }
  switch (c.op) {
    case CmpKind::lt: return rel < 0;
    case CmpKind::le: return rel <= 0;
    case CmpKind::gt: return rel > 0;
    case CmpKind::ge: return rel >= 0;
    default: return false;
  }
}

Value eval(EvalCtx& ctx, const Expr& e) {
  tick(ctx);
  struct Visitor {
    EvalCtx& ctx;
    Value operator()(const BoolLit& b) const { return b.value; }
    Value operator()(const NumLit& n) const { return n.value; }
    Value operator()(const StrLit& s) const {
      check_length(ctx, s.value);
      return s.value;
    }
    Value operator()(const ColRef& c) const {
      auto it = ctx.row.by_name.find(c.name);
      if (it == ctx.row.by_name.end()) {
        abort_eval(EvalError::Kind::missing_column, "unknown column '" + c.name + "'");
      }
      check_length(ctx, it->second);
      return it->second;
    }
    Value operator()(const PosRef& p) const {
      if (p.index >= ctx.row.cells.size()) {
        abort_eval(EvalError::Kind::missing_column,
                   "column position " + std::to_string(p.index) + " out of range");
      }
      check_length(ctx, ctx.row.cells[p.index]);
      return ctx.row.cells[p.index];
    }
    Value operator()(const NotExpr& n) const {
      return !require_bool(eval(ctx, *n.operand), "'not'");
    }
    Value operator()(const BoolExpr& b) const {
      bool lhs = require_bool(eval(ctx, *b.lhs), b.op == BoolKind::conjunction ? "'and'" : "'or'");
      if (b.op == BoolKind::conjunction) {
        if (!lhs) return false;  // short-circuit
        return require_bool(eval(ctx, *b.rhs), "'and'");
      }
      if (lhs) return true;  // short-circuit
      return require_bool(eval(ctx, *b.rhs), "'or'");
    }
    Value operator()(const CmpExpr& c) const { return eval_compare(ctx, c); }
    Value operator()(const CallExpr& c) const {
      Value arg = eval(ctx, *c.arg);
      switch (c.fn) {
        case Builtin::lower: {
          std::string s = to_text(ctx, arg);
          std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) {
            return static_cast<char>(std::tolower(ch));
          });
          return s;
        }
        case Builtin::cast_float: {
          if (std::holds_alternative<double>(arg)) return arg;
          if (std::holds_alternative<bool>(arg)) {
            abort_eval(EvalError::Kind::bad_cast, "float() of a boolean");
          }
          return strict_float(std::get<std::string>(arg));
        }
        case Builtin::length: {
          return static_cast<double>(to_text(ctx, arg).size());
        }
      }
      abort_eval(EvalError::Kind::type_error, "unknown builtin");
    }
  };
  return std::visit(Visitor{ctx}, e.node);
}

}  // namespace

ExprPtr make_bool(bool v) { return std::make_shared<Expr>(Expr{BoolLit{v}}); }
ExprPtr make_num(double v) { return std::make_shared<Expr>(Expr{NumLit{v}}); }
ExprPtr make_str(std::string v) { return std::make_shared<Expr>(Expr{StrLit{std::move(v)}}); }
ExprPtr make_col(std::string name) { return std::make_shared<Expr>(Expr{ColRef{std::move(name)}}); }
ExprPtr make_pos(std::size_t index) { return std::make_shared<Expr>(Expr{PosRef{index}}); }
ExprPtr make_not(ExprPtr operand) {
  return std::make_shared<Expr>(Expr{NotExpr{std::move(operand)}});
}
ExprPtr make_bool_op(BoolKind op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{BoolExpr{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_cmp(CmpKind op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{CmpExpr{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_call(Builtin fn, ExprPtr arg) {
  return std::make_shared<Expr>(Expr{CallExpr{fn, std::move(arg)}});
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  struct Visitor {
    const Expr& other;
    bool operator()(const BoolLit& x) const { return x.value == std::get<BoolLit>(other.node).value; }
    bool operator()(const NumLit& x) const { return x.value == std::get<NumLit>(other.node).value; }
    bool operator()(const StrLit& x) const { return x.value == std::get<StrLit>(other.node).value; }
    bool operator()(const ColRef& x) const { return x.name == std::get<ColRef>(other.node).name; }
    bool operator()(const PosRef& x) const { return x.index == std::get<PosRef>(other.node).index; }
    bool operator()(const NotExpr& x) const {
      return expr_equal(x.operand, std::get<NotExpr>(other.node).operand);
    }
    bool operator()(const BoolExpr& x) const {
      const auto& y = std::get<BoolExpr>(other.node);
      return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
    }
    bool operator()(const CmpExpr& x) const {
      const auto& y = std::get<CmpExpr>(other.node);
      return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
    }
    bool operator()(const CallExpr& x) const {
      const auto& y = std::get<CallExpr>(other.node);
      return x.fn == y.fn && expr_equal(x.arg, y.arg);
    }
  };
  return std::visit(Visitor{*b}, a->node);
}

Result<PredicateExpr, ParseError> parse_predicate(std::string_view source) {
  LexOutput lexed = lex(source);
  if (lexed.error) return *lexed.error;
  return Parser(std::move(lexed.tokens)).parse();
}

std::string render_predicate(const ExprPtr& expr) {
  std::string out;
  if (expr) render_into(out, *expr, 0);
  return out;
}

const char* to_string(EvalError::Kind kind) {
  switch (kind) {
    case EvalError::Kind::missing_column: return "missing_column";
    case EvalError::Kind::bad_cast: return "bad_cast";
    case EvalError::Kind::type_error: return "type_error";
    case EvalError::Kind::budget: return "budget";
  }
  return "type_error";
}

EvalOutcome eval_predicate(const ExprPtr& expr, const RowBinding& row, const EvalLimits& limits) {
  EvalOutcome outcome;
  if (!expr) {
    outcome.error = EvalError{EvalError::Kind::type_error, "empty predicate"};
    return outcome;
  }
  EvalCtx ctx{row, limits, 0};
  try {
    Value v = eval(ctx, *expr);
    if (!std::holds_alternative<bool>(v)) {
      outcome.error = EvalError{EvalError::Kind::type_error,
                                "predicate must evaluate to a boolean"};
    } else {
      outcome.value = std::get<bool>(v);
    }
  } catch (const EvalAbort& abort) {
    outcome.error = abort.error;
  }
  outcome.steps_used = ctx.steps;
  return outcome;
}

}  // namespace tqa
