#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tqa/result.hpp"
#include "tqa/table.hpp"

namespace tqa {

struct ReaderPrediction {
  std::string answer_text;
  std::vector<double> token_logprobs;  // natural log, each <= 0
  bool truncated_input = false;
  std::string backend;
};

struct BackendError {
  enum class Kind { network, cache_miss, malformed_response };
  Kind kind = Kind::network;
  std::string detail;
};

const char* to_string(BackendError::Kind kind);

enum class ReaderKind { remote, replay, toy };

struct ReaderConfig {
  ReaderKind kind = ReaderKind::toy;
  std::string endpoint_url;  // remote: http://host[:port]/path
  std::string api_key_env = "TQA_READER_API_KEY";
  std::string cache_path;    // replay source; remote warm/write-through target
  std::string record_path;   // optional tee of every prediction (builds replay caches)
  int timeout_ms = 30'000;
};

// Length-normalized mean of per-token log-probabilities; empty lists have no
// value.
std::optional<double> seq_log_prob(const ReaderPrediction& prediction);

// Pluggable TQA model interface. Every backend consumes the linearized,
// budget-truncated view of the table, so context loss is represented the same
// way for all of them. Safe for concurrent predict calls.
class Reader {
 public:
  explicit Reader(ReaderConfig config);

  Result<ReaderPrediction, BackendError> predict(const std::string& question, const Table& table,
                                                 std::size_t budget_tokens);

  std::size_t cache_size() const;

 private:
  struct CacheEntry {
    std::string answer;
    std::vector<double> token_logprobs;
    bool truncated = false;
  };

  ReaderPrediction toy_predict(const std::string& question, const Table& table,
                               const LinearizedInput& lin) const;
  Result<CacheEntry, BackendError> remote_predict(const std::string& question, const Table& table,
                                                  const LinearizedInput& lin,
                                                  std::size_t budget_tokens) const;
  void store(const std::string& key, const std::string& question, const LinearizedInput& lin,
             const CacheEntry& entry, bool append_cache_file);
  void load_cache_file(const std::string& path);

  ReaderConfig config_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CacheEntry> cache_;
  std::unordered_set<std::string> recorded_;
};

}  // namespace tqa
