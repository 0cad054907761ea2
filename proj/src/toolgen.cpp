#include "tqa/toolgen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "httplib.h"
#include "json.hpp"

#include "http_util.hpp"
#include "tqa/hashing.hpp"

namespace tqa {
namespace {

using nlohmann::json;

std::string quote_single(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('\'');
  for (char c : text) {
    if (c == '\\' || c == '\'') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// strip leading/trailing punctuation, keep inner ("School/Club" stays whole)
std::string clean_token(const std::string& token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && std::isalnum(static_cast<unsigned char>(token[begin])) == 0) ++begin;
  while (end > begin && std::isalnum(static_cast<unsigned char>(token[end - 1])) == 0) --end;
  return token.substr(begin, end - begin);
}

bool starts_uppercase(const std::string& token) {
  for (char c : token) {
    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      return std::isupper(static_cast<unsigned char>(c)) != 0;
    }
  }
  return false;
}

struct TermCandidate {
  std::vector<std::string> words;  // cleaned, lowercased
  bool quoted = false;
  std::size_t start = 0;
};

std::vector<TermCandidate> quoted_candidates(const std::string& question) {
  std::vector<TermCandidate> candidates;
  for (char quote : {'\'', '"'}) {
    std::size_t pos = 0;
    while (true) {
      auto open = question.find(quote, pos);
      if (open == std::string::npos) break;
      auto close = question.find(quote, open + 1);
      if (close == std::string::npos) break;
      std::string inner = question.substr(open + 1, close - open - 1);
      TermCandidate candidate;
      candidate.quoted = true;
      candidate.start = open;
      for (const auto& token : whitespace_tokens(inner)) {
        std::string word = lowercase(clean_token(token));
        if (!word.empty()) candidate.words.push_back(std::move(word));
      }
      if (!candidate.words.empty()) candidates.push_back(std::move(candidate));
      pos = close + 1;
    }
  }
  return candidates;
}

std::vector<TermCandidate> capitalized_candidates(const std::string& question) {
  std::vector<TermCandidate> candidates;
  auto tokens = whitespace_tokens(question);
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!starts_uppercase(tokens[i]) || clean_token(tokens[i]).empty()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    TermCandidate candidate;
    candidate.start = i;
    while (j < tokens.size() && starts_uppercase(tokens[j])) {
      // question-initial capitalization is orthography, not signal
      if (!(j == 0)) {
        std::string word = lowercase(clean_token(tokens[j]));
        if (!word.empty()) candidate.words.push_back(std::move(word));
      }
      ++j;
    }
    if (!candidate.words.empty()) {
      candidates.push_back(std::move(candidate));
    }
    i = j;
  }
  return candidates;
}

std::string read_api_key(const std::string& env_name) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  return value ? value : "";
}

const json* walk_response_path(const json& payload, const std::string& dotted) {
  const json* cursor = &payload;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    auto dot = dotted.find('.', start);
    std::string part =
        dotted.substr(start, dot == std::string::npos ? dotted.size() - start : dot - start);
    if (!part.empty() && std::all_of(part.begin(), part.end(), [](unsigned char c) {
          return std::isdigit(c) != 0;
        })) {
      std::size_t index = std::stoul(part);
      if (!cursor->is_array() || index >= cursor->size()) return nullptr;
      cursor = &(*cursor)[index];
    } else {
      if (!cursor->is_object() || !cursor->contains(part)) return nullptr;
      cursor = &(*cursor)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cursor;
}

}  // namespace

const char* to_string(ToolBackend backend) {
  switch (backend) {
    case ToolBackend::remote: return "remote";
    case ToolBackend::heuristic: return "heuristic";
    case ToolBackend::replay: return "replay";
  }
  return "heuristic";
}

const char* to_string(GenFailure::Kind kind) {
  switch (kind) {
    case GenFailure::Kind::network: return "network";
    case GenFailure::Kind::extract_error: return "extract_error";
    case GenFailure::Kind::parse_error: return "parse_error";
    case GenFailure::Kind::cache_miss: return "cache_miss";
  }
  return "network";
}

std::string build_prompt(const std::string& question, const Table& table, int schema_rows) {
  if (schema_rows < 1) schema_rows = 1;
  const std::size_t shown = std::min<std::size_t>(table.rows.size(),
                                                  static_cast<std::size_t>(schema_rows));
  const bool elided = table.rows.size() > shown;

  std::string out;
  out += "User 1:\n";
  out += "I need an expert to help me answer the question by making the table smaller.\n";
  out += "Question: " + question + "\n\n";
  out += "table = {";
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    if (c > 0) out += "\n";
    out += quote_single(table.column_names[c]);
    out += ": [";
    for (std::size_t r = 0; r < shown; ++r) {
      if (r > 0) out += ", ";
      out += quote_single(table.rows[r][c]);
    }
    out += elided ? ", ..." : "],";
  }
  out += "\n}\n\n";
  out += "User 2:\n";
  out += "For '" + question +
         "' the most impactful change will be to filter the rows. Since I don't know all the "
         "rows I'll use rough string matching, float casting, lowering and be as broad as "
         "possible.\n\n";
  out += ">>> new_table = table[table.apply(lambda row_dict:";
  return out;
}

Result<std::string, ExtractError> extract_filter_source(std::string_view completion) {
  std::size_t start = 0;
  if (auto lambda = completion.find("lambda"); lambda != std::string_view::npos) {
    if (auto colon = completion.find(':', lambda); colon != std::string_view::npos) {
      start = colon + 1;
    }
  }
  while (start < completion.size() &&
         std::isspace(static_cast<unsigned char>(completion[start])) != 0) {
    ++start;
  }

  std::vector<char> stack;
  bool in_string = false;
  char quote = 0;
  bool escaped = false;
  std::size_t i = start;
  for (; i < completion.size(); ++i) {
    char c = completion[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == quote) {
        in_string = false;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      in_string = true;
      quote = c;
      continue;
    }
    if (c == '(' || c == '[') {
      stack.push_back(c);
      continue;
    }
    if (c == ')' || c == ']') {
      if (stack.empty()) break;  // scaffold's own closing brackets
      char open = stack.back();
      if ((c == ')') != (open == '(')) break;
      stack.pop_back();
      continue;
    }
    if (stack.empty() && (c == ',' || c == '\n')) break;  // ", axis=1" tail or line end
  }
  if (in_string || !stack.empty()) {
    return ExtractError{"no balanced expression in completion"};
  }

  std::string_view slice = completion.substr(start, i - start);
  while (!slice.empty() && std::isspace(static_cast<unsigned char>(slice.back())) != 0) {
    slice.remove_suffix(1);
  }
  if (slice.empty()) {
    return ExtractError{"completion contains no expression"};
  }

  char first = slice.front();
  bool plausible = first == '\'' || first == '"' || first == '(' || first == '-' ||
                   std::isdigit(static_cast<unsigned char>(first)) != 0;
  if (!plausible && is_ident_start(first)) {
    std::size_t end = 1;
    while (end < slice.size() && is_ident_char(slice[end])) ++end;
    std::string_view word = slice.substr(0, end);
    plausible = word == "not" || word == "true" || word == "false" || word == "True" ||
                word == "False" || word == "row" || word == "row_dict" || word == "lower" ||
                word == "float" || word == "len";
  }
  if (!plausible) {
    return ExtractError{"completion does not start with an expression"};
  }
  return std::string(slice);
}

std::string question_table_key(const std::string& question, const Table& table) {
  return content_key({question, table.id, table_text(table)});
}

PredicateExpr heuristic_filter(const std::string& question, const Table& table) {
  std::vector<TermCandidate> candidates = quoted_candidates(question);
  for (auto& c : capitalized_candidates(question)) candidates.push_back(std::move(c));
  if (candidates.empty() || table.column_names.empty()) return make_bool(true);

  const TermCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!best) {
      best = &c;
      continue;
    }
    if (c.words.size() != best->words.size()) {
      if (c.words.size() > best->words.size()) best = &c;
      continue;
    }
    if (c.quoted != best->quoted) {
      if (c.quoted) best = &c;
      continue;
    }
    if (c.start > best->start) best = &c;
  }

  // headers weigh double: the schema names the concept even when the shown
  // cells do not contain the term
  std::vector<std::string> lowered_columns;
  lowered_columns.reserve(table.column_names.size());
  for (const auto& name : table.column_names) lowered_columns.push_back(lowercase(name));

  std::size_t best_column = 0;
  int best_score = 0;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    int score = 0;
    for (const auto& word : best->words) {
      if (lowered_columns[c].find(word) != std::string::npos) score += 2;
      for (const auto& row : table.rows) {
        if (lowercase(row[c]).find(word) != std::string::npos) {
          score += 1;
          break;
        }
      }
    }
    if (score > best_score) {
      best_score = score;
      best_column = c;
    }
  }
  if (best_score == 0) return make_bool(true);

  std::string term;
  for (const auto& word : best->words) {
    if (!term.empty()) term.push_back(' ');
    term += word;
  }
  return make_cmp(CmpKind::contains, make_str(std::move(term)),
                  make_call(Builtin::lower, make_col(table.column_names[best_column])));
}

ToolGenerator::ToolGenerator(GeneratorConfig config) : config_(std::move(config)) {
  if (!config_.cache_path.empty()) {
    load_cache_file(config_.cache_path);
  }
}

std::size_t ToolGenerator::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

void ToolGenerator::load_cache_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("key") ||
        !record.contains("canonical_predicate")) {
      continue;
    }
    CacheRecord entry;
    entry.question = record.value("question", "");
    entry.table_id = record.value("table_id", "");
    entry.raw_completion = record.value("raw_completion", "");
    entry.canonical_predicate = record.value("canonical_predicate", "");
    entry.backend = record.value("backend", "");
    cache_[record["key"].get<std::string>()] = std::move(entry);
  }
}

void ToolGenerator::store(const std::string& key, const std::string& question,
                          const std::string& table_id, const std::string& raw,
                          const std::string& canonical, const std::string& backend) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!cache_.insert({key, CacheRecord{question, table_id, raw, canonical, backend}}).second) {
    return;  // already cached; keep the file append-once
  }
  if (config_.cache_path.empty()) return;
  json record;
  record["key"] = key;
  record["question"] = question;
  record["table_id"] = table_id;
  record["raw_completion"] = raw;
  record["canonical_predicate"] = canonical;
  record["backend"] = backend;
  record["timestamp"] = static_cast<long long>(std::time(nullptr));
  std::ofstream out(config_.cache_path, std::ios::app);
  if (out) out << record.dump() << '\n';
}

Result<std::string, GenFailure> ToolGenerator::request_completion(const std::string& prompt) const {
  auto target = detail::parse_http_url(config_.endpoint_url);
  if (!target) {
    return GenFailure{GenFailure::Kind::network,
                      "unsupported endpoint url '" + config_.endpoint_url + "'"};
  }
  json body;
  if (!config_.model.empty()) body[config_.wire.model_field] = config_.model;
  body[config_.wire.prompt_field] = prompt;
  body[config_.wire.temperature_field] = config_.temperature;
  body[config_.wire.max_tokens_field] = config_.max_tokens;
  body[config_.wire.stop_field] = config_.stop;

  httplib::Client client(target->host, target->port);
  client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (std::string key = read_api_key(config_.api_key_env); !key.empty()) {
    headers.emplace("Authorization", "Bearer " + key);
  }
  auto response = client.Post(target->path, headers, body.dump(), "application/json");
  if (!response) {
    return GenFailure{GenFailure::Kind::network, httplib::to_string(response.error())};
  }
  if (response->status != 200) {
    return GenFailure{GenFailure::Kind::network, "HTTP " + std::to_string(response->status)};
  }
  json payload = json::parse(response->body, nullptr, false);
  if (payload.is_discarded()) {
    return GenFailure{GenFailure::Kind::network, "response is not valid JSON"};
  }
  const json* text = walk_response_path(payload, config_.wire.response_text_path);
  if (!text || !text->is_string()) {
    return GenFailure{GenFailure::Kind::network,
                      "response missing '" + config_.wire.response_text_path + "'"};
  }
  return text->get<std::string>();
}

Result<GeneratedTool, GenFailure> ToolGenerator::generate(const std::string& question,
                                                          const Table& table) {
  const std::string key = question_table_key(question, table);

  auto from_cache = [&](const CacheRecord& record,
                        const char* source) -> Result<GeneratedTool, GenFailure> {
    auto parsed = parse_predicate(record.canonical_predicate);
    if (!parsed.ok()) {
      return GenFailure{GenFailure::Kind::parse_error,
                        "cached predicate no longer parses: " + parsed.error().message};
    }
    GeneratedTool tool;
    tool.predicate = parsed.value();
    tool.raw_completion = record.raw_completion;
    tool.source = source;
    tool.question_table_key = key;
    return tool;
  };

  switch (config_.backend) {
    case ToolBackend::heuristic: {
      GeneratedTool tool;
      tool.predicate = heuristic_filter(question, table);
      tool.raw_completion = render_predicate(tool.predicate);
      tool.source = "heuristic";
      tool.question_table_key = key;
      store(key, question, table.id, tool.raw_completion, tool.raw_completion, "heuristic");
      return tool;
    }
    case ToolBackend::replay: {
      std::unique_lock<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it == cache_.end()) {
        return GenFailure{GenFailure::Kind::cache_miss, "no cached tool for key " + key};
      }
      CacheRecord record = it->second;
      lock.unlock();
      return from_cache(record, "replay");
    }
    case ToolBackend::remote: {
      {
        std::unique_lock<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
          CacheRecord record = it->second;
          lock.unlock();
          return from_cache(record, "remote");
        }
      }
      const std::string prompt = build_prompt(question, table, config_.schema_rows);
      Result<std::string, GenFailure> completion =
          GenFailure{GenFailure::Kind::network, "no attempt made"};
      for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        completion = request_completion(prompt);
        if (completion.ok()) break;
        if (completion.error().kind != GenFailure::Kind::network) break;
      }
      if (!completion.ok()) return completion.error();

      auto source = extract_filter_source(completion.value());
      if (!source.ok()) {
        return GenFailure{GenFailure::Kind::extract_error, source.error().message};
      }
      auto parsed = parse_predicate(source.value());
      if (!parsed.ok()) {
        return GenFailure{GenFailure::Kind::parse_error,
                          "completion does not parse at offset " +
                              std::to_string(parsed.error().position) + ": " +
                              parsed.error().message};
      }
      GeneratedTool tool;
      tool.predicate = parsed.value();
      tool.raw_completion = completion.value();
      tool.source = "remote";
      tool.question_table_key = key;
      store(key, question, table.id, tool.raw_completion, render_predicate(tool.predicate),
            "remote");
      return tool;
    }
  }
  return GenFailure{GenFailure::Kind::network, "unknown generator backend"};
}

}  // namespace tqa
