#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tqa/result.hpp"
#include "tqa/table.hpp"

namespace tqa {

struct QAInstance {
  std::string id;
  std::string question;
  Table table;
  std::vector<std::string> gold_answers;
  std::optional<std::string> gold_filter;  // canonical predicate text when known
};

struct LoadStats {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::size_t padded_rows = 0;  // ragged rows fixed up during validation
  std::vector<std::string> errors;
};

struct LoadedDataset {
  std::vector<QAInstance> instances;
  LoadStats stats;
};

// Examples TSV (id, utterance, context, targetValue) with referenced table
// files resolved against tables_dir. Multi-answer targets split on '|';
// malformed instances are skipped and counted.
LoadedDataset load_wtq(const std::string& examples_tsv, const std::string& tables_dir);

// Questions JSONL plus tables JSONL. Instances without materialized answer
// denotations are skipped (weak supervision keeps answers only, not programs).
LoadedDataset load_wikisql(const std::string& questions_jsonl, const std::string& tables_jsonl);

struct SqlAnnotation {
  std::string sql;
  std::map<std::string, std::string> columns;  // column code -> header name
};
using AnnotationMap = std::map<std::string, SqlAnnotation>;

// JSONL records {id, sql, columns?} or TSV lines "id<TAB>sql".
Result<AnnotationMap, std::string> load_annotations(const std::string& path);

struct FilterSubset {
  std::vector<QAInstance> instances;
  std::size_t untranslatable = 0;  // kept, but with no gold filter attached
};

// Keeps instances whose annotated SQL is a single SELECT with a WHERE clause
// and attaches the translated gold predicate when the clause is supported.
FilterSubset build_filter_subset(const std::vector<QAInstance>& instances,
                                 const AnnotationMap& annotations);

struct SyntheticConfig {
  std::size_t count = 200;
  std::uint64_t seed = 7;
  std::size_t min_rows = 5;
  std::size_t max_rows = 100;
  double lookup_share = 0.7;    // remainder are whole-table count questions
  std::size_t notes_words = 4;  // filler width, controls tokens per row
};

// Deterministic desk-scale dataset for the toy reader: lookup questions whose
// key row may fall beyond the truncation point and count questions that need
// the whole table. Gold filters are attached for gold-tool runs.
std::vector<QAInstance> make_synthetic(const SyntheticConfig& config);

}  // namespace tqa
