#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tqa/predicate.hpp"
#include "tqa/result.hpp"
#include "tqa/table.hpp"

namespace tqa {

enum class ToolBackend { remote, heuristic, replay };
const char* to_string(ToolBackend backend);

// Completion-request field names are configurable so arbitrary services fit
// the same wire shape.
struct WireFormat {
  std::string prompt_field = "prompt";
  std::string temperature_field = "temperature";
  std::string max_tokens_field = "max_tokens";
  std::string stop_field = "stop";
  std::string model_field = "model";
  std::string response_text_path = "choices.0.text";  // dotted; numeric parts index arrays
};

struct GeneratorConfig {
  ToolBackend backend = ToolBackend::heuristic;
  std::string endpoint_url;
  std::string api_key_env = "TQA_COMPLETION_API_KEY";
  std::string model;  // sent when non-empty
  double temperature = 0.2;
  int schema_rows = 2;
  int max_retries = 1;  // extra attempts on network failure only, never on bad completions
  int max_tokens = 128;
  std::vector<std::string> stop = {"\n"};
  std::string cache_path;
  WireFormat wire;
  int timeout_ms = 30'000;
};

struct GeneratedTool {
  PredicateExpr predicate;
  std::string raw_completion;
  std::string source;  // backend tag
  std::string question_table_key;
};

struct GenFailure {
  enum class Kind { network, extract_error, parse_error, cache_miss };
  Kind kind = Kind::network;
  std::string detail;
};

const char* to_string(GenFailure::Kind kind);

struct ExtractError {
  std::string message;
};

// Two-turn template: the question with a column-oriented schema view truncated
// to schema_rows values per column (trailing ellipsis only when truncated),
// ending at the lambda scaffold prefix so the completion is the predicate body.
std::string build_prompt(const std::string& question, const Table& table, int schema_rows);

// Slices the first balanced expression out of a completion, past any repeated
// scaffold prefix and before the ", axis=1)]" tail.
Result<std::string, ExtractError> extract_filter_source(std::string_view completion);

// Content hash of (question, table id, full table serialization).
std::string question_table_key(const std::string& question, const Table& table);

// Deterministic fallback generator: match the question's most salient quoted
// or capitalized phrase against headers and cells; tautology when nothing
// matches (no-filter questions exist and must stay untouched).
PredicateExpr heuristic_filter(const std::string& question, const Table& table);

// Query-specific row-filter generation with a JSONL replay cache. Successful
// generations are appended to the cache; the remote backend also consults it
// before issuing a request. Safe for concurrent generate calls.
class ToolGenerator {
 public:
  explicit ToolGenerator(GeneratorConfig config);

  Result<GeneratedTool, GenFailure> generate(const std::string& question, const Table& table);

  std::size_t cache_size() const;

 private:
  struct CacheRecord {
    std::string question;
    std::string table_id;
    std::string raw_completion;
    std::string canonical_predicate;
    std::string backend;
  };

  Result<std::string, GenFailure> request_completion(const std::string& prompt) const;
  void store(const std::string& key, const std::string& question, const std::string& table_id,
             const std::string& raw, const std::string& canonical, const std::string& backend);
  void load_cache_file(const std::string& path);

  GeneratorConfig config_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CacheRecord> cache_;
};

}  // namespace tqa
