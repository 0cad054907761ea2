#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tqa/predicate.hpp"
#include "tqa/result.hpp"

namespace tqa {

// Rectangular grid of raw text cells. Cells are never parsed eagerly: numbers,
// dates and prose stay text until a predicate casts them. Tables are treated
// as immutable after construction; every operation below is a pure function
// returning a fresh value, so tables are safe to share across workers.
struct Table {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;
  std::string id;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return column_names.size(); }
};

bool tables_identical(const Table& a, const Table& b);

struct ValidationError {
  std::string message;
};

struct ValidatedTable {
  Table table;
  std::vector<std::string> warnings;  // ragged-row padding notes
};

// Rows narrower than the header are padded with empty cells (dataset tables
// are imperfect); rows wider than the header and empty headers are rejected.
Result<ValidatedTable, ValidationError> validate_table(std::vector<std::string> column_names,
                                                       std::vector<std::vector<std::string>> rows,
                                                       std::string id = "");

struct LinearizedInput {
  std::string text;
  std::size_t token_count = 0;
  bool truncated = false;
  std::size_t rows_included = 0;  // prefix of table.rows serialized into text
};

// Whitespace-separated token count; the harness length proxy.
std::size_t count_tokens(std::string_view text);

// "<question> [HEAD] c1, ..., cN [ROW] 1 <cells> [ROW] 2 ..." with whole
// trailing rows dropped until the token count fits the budget. The
// question/header prefix is always kept, even when it alone exceeds the
// budget; nothing smaller than a row is ever dropped.
LinearizedInput linearize(const std::string& question, const Table& table, std::size_t budget_tokens);

// Full "[HEAD] ... [ROW] ..." serialization without question or budget; used
// for content-addressed cache keys.
std::string table_text(const Table& table);

enum class RevertReason { none, parse_error, eval_error, empty_result, budget_exceeded };
const char* to_string(RevertReason reason);

struct FilterOutcome {
  Table table;
  bool applied = false;
  RevertReason revert_reason = RevertReason::none;
};

FilterOutcome reverted_outcome(const Table& original, RevertReason reason);

struct FilterLimits {
  EvalLimits eval;
  std::uint64_t max_total_steps = 10'000'000;
};

// Name->cell map with last occurrence winning on duplicate headers, plus the
// positional cell list for row[#k].
RowBinding make_row_binding(const Table& table, std::size_t row_index);

// Evaluates the predicate on every row. An error on ANY row abandons the whole
// application (whole-program exception semantics) and reverts; an all-false
// result reverts with empty_result. Never throws; kept rows preserve order.
FilterOutcome apply_row_filter(const Table& table, const PredicateExpr& predicate,
                               const FilterLimits& limits = {});

// Removes floor(n * fraction) rows chosen uniformly without replacement by a
// seeded generator; survivors keep their order. Pure in (table, fraction, seed).
Table random_row_filter(const Table& table, double fraction, std::uint64_t seed);

}  // namespace tqa
