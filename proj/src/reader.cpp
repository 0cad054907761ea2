#include "tqa/reader.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "httplib.h"
#include "json.hpp"

#include "http_util.hpp"
#include "tqa/hashing.hpp"

namespace tqa {
namespace {

using nlohmann::json;

constexpr double kConfidentLogProb = -0.1;
constexpr double kUncertainLogProb = -2.0;

bool whitespace_only(const std::string& s) {
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

// "value of <col> where <col2> == <val>"
struct LookupQuestion {
  std::string target_column;
  std::string key_column;
  std::string key_value;
};

std::optional<LookupQuestion> parse_lookup(const std::string& question) {
  const std::string prefix = "value of ";
  if (question.rfind(prefix, 0) != 0) return std::nullopt;
  auto where = question.find(" where ", prefix.size());
  if (where == std::string::npos) return std::nullopt;
  auto eq = question.find(" == ", where + 7);
  if (eq == std::string::npos) return std::nullopt;
  LookupQuestion q;
  q.target_column = question.substr(prefix.size(), where - prefix.size());
  q.key_column = question.substr(where + 7, eq - (where + 7));
  q.key_value = question.substr(eq + 4);
  if (q.target_column.empty() || q.key_column.empty()) return std::nullopt;
  return q;
}

std::optional<std::size_t> find_column(const Table& table, const std::string& name) {
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    if (table.column_names[c] == name) return c;
  }
  return std::nullopt;
}

std::vector<double> answer_logprobs(const std::string& answer, bool confident) {
  std::size_t tokens = count_tokens(answer);
  if (tokens == 0) tokens = 1;
  return std::vector<double>(tokens, confident ? kConfidentLogProb : kUncertainLogProb);
}

std::string prediction_key(const std::string& question, const LinearizedInput& lin) {
  return content_key({question, lin.text});
}

}  // namespace

const char* to_string(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::network: return "network";
    case BackendError::Kind::cache_miss: return "cache_miss";
    case BackendError::Kind::malformed_response: return "malformed_response";
  }
  return "network";
}

std::optional<double> seq_log_prob(const ReaderPrediction& prediction) {
  if (prediction.token_logprobs.empty()) return std::nullopt;
  double sum = std::accumulate(prediction.token_logprobs.begin(), prediction.token_logprobs.end(),
                               0.0);
  return sum / static_cast<double>(prediction.token_logprobs.size());
}

Reader::Reader(ReaderConfig config) : config_(std::move(config)) {
  if ((config_.kind == ReaderKind::replay || config_.kind == ReaderKind::remote) &&
      !config_.cache_path.empty()) {
    load_cache_file(config_.cache_path);
  }
}

std::size_t Reader::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

void Reader::load_cache_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("key") || !record.contains("answer")) continue;
    CacheEntry entry;
    entry.answer = record.value("answer", "");
    entry.truncated = record.value("truncated", false);
    if (record.contains("token_logprobs") && record["token_logprobs"].is_array()) {
      for (const auto& v : record["token_logprobs"]) {
        if (v.is_number()) entry.token_logprobs.push_back(v.get<double>());
      }
    }
    cache_[record["key"].get<std::string>()] = std::move(entry);
  }
}

void Reader::store(const std::string& key, const std::string& question, const LinearizedInput& lin,
                   const CacheEntry& entry, bool append_cache_file) {
  json record;
  record["key"] = key;
  record["question"] = question;
  record["table_hash"] = hex64(fnv1a64(lin.text));
  record["answer"] = entry.answer;
  record["token_logprobs"] = entry.token_logprobs;
  record["truncated"] = entry.truncated;
  const std::string line = record.dump();

  std::lock_guard<std::mutex> lock(mutex_);
  if (append_cache_file && !config_.cache_path.empty()) {
    cache_[key] = entry;
    std::ofstream out(config_.cache_path, std::ios::app);
    if (out) out << line << '\n';
  } else if (append_cache_file) {
    cache_[key] = entry;
  }
  if (!config_.record_path.empty() && recorded_.insert(key).second) {
    std::ofstream out(config_.record_path, std::ios::app);
    if (out) out << line << '\n';
  }
}

ReaderPrediction Reader::toy_predict(const std::string& question, const Table& table,
                                     const LinearizedInput& lin) const {
  const std::size_t visible = lin.rows_included;
  std::string answer;
  bool confident = false;

  if (question == "count rows") {
    answer = std::to_string(visible);
    confident = !lin.truncated;
  } else if (auto lookup = parse_lookup(question)) {
    auto target = find_column(table, lookup->target_column);
    auto key = find_column(table, lookup->key_column);
    if (target && key) {
      for (std::size_t r = 0; r < visible; ++r) {
        if (table.rows[r][*key] == lookup->key_value) {
          answer = table.rows[r][*target];
          confident = true;
          break;
        }
      }
    }
  }
  if (answer.empty() || whitespace_only(answer)) {
    answer = "unknown";
    confident = false;
  }

  ReaderPrediction prediction;
  prediction.answer_text = answer;
  prediction.token_logprobs = answer_logprobs(answer, confident);
  prediction.truncated_input = lin.truncated;
  prediction.backend = "toy";
  return prediction;
}

Result<Reader::CacheEntry, BackendError> Reader::remote_predict(const std::string& question,
                                                                const Table& table,
                                                                const LinearizedInput& lin,
                                                                std::size_t budget_tokens) const {
  auto target = detail::parse_http_url(config_.endpoint_url);
  if (!target) {
    return BackendError{BackendError::Kind::network,
                        "unsupported endpoint url '" + config_.endpoint_url + "'"};
  }

  json body;
  body["question"] = question;
  json columns = json::array();
  for (const auto& c : table.column_names) columns.push_back(c);
  json rows = json::array();
  for (std::size_t r = 0; r < lin.rows_included; ++r) {
    json row = json::array();
    for (const auto& cell : table.rows[r]) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  body["table"] = json{{"columns", std::move(columns)}, {"rows", std::move(rows)}};
  body["max_tokens_context"] = budget_tokens;

  httplib::Client client(target->host, target->port);
  client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto response = client.Post(target->path, headers, body.dump(), "application/json");
  if (!response) {
    return BackendError{BackendError::Kind::network, httplib::to_string(response.error())};
  }
  if (response->status != 200) {
    return BackendError{BackendError::Kind::network,
                        "HTTP " + std::to_string(response->status)};
  }
  json payload = json::parse(response->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("answer") || !payload["answer"].is_string()) {
    return BackendError{BackendError::Kind::malformed_response, "missing answer field"};
  }
  CacheEntry entry;
  entry.answer = payload["answer"].get<std::string>();
  entry.truncated = lin.truncated;
  if (payload.contains("token_logprobs") && payload["token_logprobs"].is_array()) {
    for (const auto& v : payload["token_logprobs"]) {
      if (!v.is_number()) {
        return BackendError{BackendError::Kind::malformed_response,
                            "token_logprobs must be numbers"};
      }
      entry.token_logprobs.push_back(v.get<double>());
    }
  } else if (payload.contains("total_logprob") && payload.contains("token_count")) {
    // lossy fallback for services that expose only sequence totals
    double total = payload["total_logprob"].get<double>();
    auto count = payload["token_count"].get<long>();
    if (count < 1) {
      return BackendError{BackendError::Kind::malformed_response, "token_count must be >= 1"};
    }
    entry.token_logprobs.assign(static_cast<std::size_t>(count),
                                total / static_cast<double>(count));
  } else {
    return BackendError{BackendError::Kind::malformed_response, "missing token_logprobs"};
  }
  return entry;
}

Result<ReaderPrediction, BackendError> Reader::predict(const std::string& question,
                                                       const Table& table,
                                                       std::size_t budget_tokens) {
  LinearizedInput lin = linearize(question, table, budget_tokens);
  const std::string key = prediction_key(question, lin);

  auto from_entry = [&](const CacheEntry& entry, const char* backend) {
    ReaderPrediction prediction;
    prediction.answer_text = entry.answer;
    prediction.token_logprobs = entry.token_logprobs;
    prediction.truncated_input = entry.truncated;
    prediction.backend = backend;
    return prediction;
  };

  switch (config_.kind) {
    case ReaderKind::toy: {
      ReaderPrediction prediction = toy_predict(question, table, lin);
      store(key, question, lin,
            CacheEntry{prediction.answer_text, prediction.token_logprobs,
                       prediction.truncated_input},
            /*append_cache_file=*/false);
      return prediction;
    }
    case ReaderKind::replay: {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it == cache_.end()) {
        return BackendError{BackendError::Kind::cache_miss,
                            "no cached prediction for key " + key};
      }
      return from_entry(it->second, "replay");
    }
    case ReaderKind::remote: {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return from_entry(it->second, "remote");
      }
      auto fetched = remote_predict(question, table, lin, budget_tokens);
      if (!fetched.ok()) return fetched.error();
      store(key, question, lin, fetched.value(), /*append_cache_file=*/true);
      return from_entry(fetched.value(), "remote");
    }
  }
  return BackendError{BackendError::Kind::network, "unknown reader backend"};
}

}  // namespace tqa
