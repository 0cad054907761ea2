#pragma once

#include <map>
#include <string>
#include <string_view>

#include "tqa/predicate.hpp"
#include "tqa/result.hpp"

namespace tqa {

struct TranslateError {
  std::string message;
};

// Annotation column code (e.g. "c3") -> header name; unmapped identifiers are
// used verbatim.
using ColumnMap = std::map<std::string, std::string>;

// WHERE-clause subset: `col <op> literal` with AND/OR and parentheses.
// Numeric literals become float(row[col]) comparisons; string literals become
// case-insensitive equality via lower(). Anything else (IN lists, subqueries,
// functions, string ordering) is a TranslateError -- such clauses are skipped
// and counted by callers, since the manual tool is headroom analysis.
Result<PredicateExpr, TranslateError> translate_sql_where(std::string_view where_text,
                                                          const ColumnMap& columns = {});

}  // namespace tqa
