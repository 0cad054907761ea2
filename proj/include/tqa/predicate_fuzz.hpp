#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tqa/predicate.hpp"

namespace tqa {

struct Table;

// Random predicate generation for round-trip fuzzing and adversarial tool runs.
ExprPtr random_predicate(std::mt19937_64& rng, int max_depth = 5);

// Column references and literals drawn from the given table, so applications
// produce a mix of matches, empty results and evaluation errors.
ExprPtr random_predicate_for_table(std::mt19937_64& rng, const Table& table, int max_depth = 4);

// Renders an AST in a randomly styled (but accepted) surface dialect:
// row/row_dict, call/method form, quote style, True/False, redundant parens
// and whitespace.
std::string styled_source(std::mt19937_64& rng, const ExprPtr& expr);

struct FuzzReport {
  std::size_t ast_cases = 0;
  std::size_t ast_failures = 0;
  std::size_t source_cases = 0;
  std::size_t source_failures = 0;
  std::vector<std::string> failure_samples;

  bool ok() const { return ast_failures == 0 && source_failures == 0; }
};

// parse(render(t)) structurally equal to t over random ASTs, and
// render(parse(s)) stable under a second parse/render pass over randomly
// styled sources.
FuzzReport run_predicate_fuzz(std::uint64_t seed, std::size_t iterations);

}  // namespace tqa
