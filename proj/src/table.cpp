#include "tqa/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace tqa {
namespace {

void append_joined_cells(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ", ";
    out += cells[i];
  }
}

// " [ROW] <1-based index> <cells comma-joined>"
std::string row_segment(const std::vector<std::string>& cells, std::size_t index) {
  std::string seg = " [ROW] ";
  seg += std::to_string(index + 1);
  seg.push_back(' ');
  append_joined_cells(seg, cells);
  return seg;
}

std::string header_segment(const Table& table) {
  std::string head = "[HEAD] ";
  append_joined_cells(head, table.column_names);
  return head;
}

}  // namespace

bool tables_identical(const Table& a, const Table& b) {
  return a.id == b.id && a.column_names == b.column_names && a.rows == b.rows;
}

Result<ValidatedTable, ValidationError> validate_table(std::vector<std::string> column_names,
                                                       std::vector<std::vector<std::string>> rows,
                                                       std::string id) {
  if (column_names.empty()) {
    return ValidationError{"table has no columns"};
  }
  ValidatedTable out;
  const std::size_t width = column_names.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() > width) {
      return ValidationError{"row " + std::to_string(r + 1) + " has " +
                             std::to_string(rows[r].size()) + " cells but the header has " +
                             std::to_string(width)};
    }
    if (rows[r].size() < width) {
      out.warnings.push_back("row " + std::to_string(r + 1) + " padded from " +
                             std::to_string(rows[r].size()) + " to " + std::to_string(width) +
                             " cells");
      rows[r].resize(width);
    }
  }
  out.table = Table{std::move(column_names), std::move(rows), std::move(id)};
  return out;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::string table_text(const Table& table) {
  std::string out = header_segment(table);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += row_segment(table.rows[r], r);
  }
  return out;
}

LinearizedInput linearize(const std::string& question, const Table& table,
                          std::size_t budget_tokens) {
  std::string prefix = question;
  if (!prefix.empty()) prefix.push_back(' ');
  prefix += header_segment(table);

  // Every row segment starts with a space, so token counts are additive across
  // segment boundaries.
  std::vector<std::string> segments;
  segments.reserve(table.rows.size());
  std::vector<std::size_t> cumulative(table.rows.size() + 1, 0);
  cumulative[0] = count_tokens(prefix);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    segments.push_back(row_segment(table.rows[r], r));
    cumulative[r + 1] = cumulative[r] + count_tokens(segments.back());
  }

  LinearizedInput lin;
  lin.truncated = cumulative[table.rows.size()] > budget_tokens;
  std::size_t keep = table.rows.size();
  if (lin.truncated) {
    keep = 0;
    while (keep < table.rows.size() && cumulative[keep + 1] <= budget_tokens) ++keep;
  }
  lin.rows_included = keep;
  lin.text = std::move(prefix);
  for (std::size_t r = 0; r < keep; ++r) lin.text += segments[r];
  lin.token_count = cumulative[keep];
  return lin;
}

const char* to_string(RevertReason reason) {
  switch (reason) {
    case RevertReason::none: return "none";
    case RevertReason::parse_error: return "parse_error";
    case RevertReason::eval_error: return "eval_error";
    case RevertReason::empty_result: return "empty_result";
    case RevertReason::budget_exceeded: return "budget_exceeded";
  }
  return "none";
}

FilterOutcome reverted_outcome(const Table& original, RevertReason reason) {
  FilterOutcome outcome;
  outcome.table = original;
  outcome.applied = false;
  outcome.revert_reason = reason;
  return outcome;
}

RowBinding make_row_binding(const Table& table, std::size_t row_index) {
  RowBinding binding;
  const auto& row = table.rows[row_index];
  binding.cells = row;
  binding.by_name.reserve(table.column_names.size());
  for (std::size_t c = 0; c < table.column_names.size() && c < row.size(); ++c) {
    binding.by_name[table.column_names[c]] = row[c];  // last occurrence wins
  }
  return binding;
}

FilterOutcome apply_row_filter(const Table& table, const PredicateExpr& predicate,
                               const FilterLimits& limits) {
  if (!predicate) {
    return reverted_outcome(table, RevertReason::parse_error);
  }
  std::vector<std::size_t> kept;
  std::uint64_t total_steps = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RowBinding binding = make_row_binding(table, r);
    EvalOutcome result = eval_predicate(predicate, binding, limits.eval);
    total_steps += result.steps_used;
    if (!result.ok()) {
      RevertReason reason = result.error->kind == EvalError::Kind::budget
                                ? RevertReason::budget_exceeded
                                : RevertReason::eval_error;
      return reverted_outcome(table, reason);
    }
    if (total_steps > limits.max_total_steps) {
      return reverted_outcome(table, RevertReason::budget_exceeded);
    }
    if (*result.value) kept.push_back(r);
  }
  if (kept.empty()) {
    return reverted_outcome(table, RevertReason::empty_result);
  }
  FilterOutcome outcome;
  outcome.table.column_names = table.column_names;
  outcome.table.id = table.id;
  outcome.table.rows.reserve(kept.size());
  for (std::size_t r : kept) outcome.table.rows.push_back(table.rows[r]);
  outcome.applied = true;
  outcome.revert_reason = RevertReason::none;
  return outcome;
}

Table random_row_filter(const Table& table, double fraction, std::uint64_t seed) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  const std::size_t n = table.rows.size();
  // Small epsilon absorbs binary representation error in n * fraction.
  const auto remove_count = static_cast<std::size_t>(std::floor(
      static_cast<double>(n) * fraction + 1e-9));

  Table out;
  out.column_names = table.column_names;
  out.id = table.id;
  if (remove_count == 0) {
    out.rows = table.rows;
    return out;
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  // Partial Fisher-Yates; modulo draws keep results identical across standard
  // library implementations.
  for (std::size_t i = 0; i < remove_count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < remove_count; ++i) removed[indices[i]] = true;
  out.rows.reserve(n - remove_count);
  for (std::size_t r = 0; r < n; ++r) {
    if (!removed[r]) out.rows.push_back(table.rows[r]);
  }
  return out;
}

}  // namespace tqa
