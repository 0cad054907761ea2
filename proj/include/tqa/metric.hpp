#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tqa {

inline constexpr char kAnswerListSeparator = '|';
// Stamped into reports so numbers stay comparable across harness versions.
inline constexpr const char* kEmNormalizationVersion = "norm-1";

// trim, lowercase, collapse internal whitespace, strip one layer of matching
// surrounding quotes
std::string normalize_answer(std::string_view raw);

// Numeric reading of a normalized answer: digit-grouped thousands separators
// removed, and the full string must parse.
std::optional<double> numeric_answer_value(std::string_view normalized);

// Two normalized values match numerically (1e-6 absolute) when both parse as
// numbers, otherwise by string equality.
bool answer_values_match(std::string_view normalized_a, std::string_view normalized_b);

// 1 iff predicted (split on '|') equals gold as a multiset under
// answer_values_match.
int exact_match(const std::string& predicted_text, const std::vector<std::string>& gold_answers);

}  // namespace tqa
