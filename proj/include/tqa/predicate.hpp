#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tqa/result.hpp"

namespace tqa {

// Row-filter predicate language: column access, literals, comparisons,
// substring `in`, boolean connectives and the builtins lower/float/len.
// The function set is closed on purpose -- it is the sandbox boundary for
// generated programs, replacing the usual exception-and-revert contract with
// an explicit safe subset.

enum class CmpKind { eq, ne, lt, le, gt, ge, contains };
enum class BoolKind { conjunction, disjunction };
enum class Builtin { lower, cast_float, length };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
using PredicateExpr = ExprPtr;

struct BoolLit {
  bool value = false;
};
struct NumLit {
  double value = 0.0;
};
struct StrLit {
  std::string value;
};
// row['name']; with duplicate headers the binding resolves to the last occurrence
struct ColRef {
  std::string name;
};
// row[#k], zero-based column position; escape hatch for duplicate headers
struct PosRef {
  std::size_t index = 0;
};
struct NotExpr {
  ExprPtr operand;
};
struct BoolExpr {
  BoolKind op = BoolKind::conjunction;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct CmpExpr {
  CmpKind op = CmpKind::eq;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct CallExpr {
  Builtin fn = Builtin::lower;
  ExprPtr arg;
};

struct Expr {
  std::variant<BoolLit, NumLit, StrLit, ColRef, PosRef, NotExpr, BoolExpr, CmpExpr, CallExpr> node;
};

ExprPtr make_bool(bool v);
ExprPtr make_num(double v);
ExprPtr make_str(std::string v);
ExprPtr make_col(std::string name);
ExprPtr make_pos(std::size_t index);
ExprPtr make_not(ExprPtr operand);
ExprPtr make_bool_op(BoolKind op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_cmp(CmpKind op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Builtin fn, ExprPtr arg);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

struct ParseError {
  std::size_t position = 0;
  std::string message;
  std::vector<std::string> expected;
};

// Accepts the canonical surface syntax plus the generated-code dialect:
// `row_dict` as an alias for `row`, method form `e.lower()` for `lower(e)`,
// double-quoted strings, and Python's True/False capitalization.
Result<PredicateExpr, ParseError> parse_predicate(std::string_view source);

// Deterministic canonical text. parse_predicate(render_predicate(e)) yields a
// structurally equal tree.
std::string render_predicate(const ExprPtr& expr);

struct RowBinding {
  std::unordered_map<std::string, std::string> by_name;
  std::vector<std::string> cells;
};

struct EvalLimits {
  std::size_t max_steps_per_row = 10'000;
  std::size_t max_string_length = 1'000'000;
};

struct EvalError {
  enum class Kind { missing_column, bad_cast, type_error, budget };
  Kind kind = Kind::type_error;
  std::string message;
};

const char* to_string(EvalError::Kind kind);

struct EvalOutcome {
  std::optional<bool> value;
  std::optional<EvalError> error;
  std::size_t steps_used = 0;

  bool ok() const { return value.has_value(); }
};

// Pure, step-bounded evaluation against one row binding. `and`/`or`
// short-circuit (observable through steps_used); `in` is case-sensitive
// substring containment on the string forms of both operands; `float` parses
// the trimmed full cell or fails; ordering across value types is an error,
// never a coercion.
EvalOutcome eval_predicate(const ExprPtr& expr, const RowBinding& row, const EvalLimits& limits = {});

}  // namespace tqa
