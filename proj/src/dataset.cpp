#include "tqa/dataset.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "tqa/hashing.hpp"
#include "tqa/predicate.hpp"
#include "tqa/sql_where.hpp"

namespace tqa {
namespace {

using nlohmann::json;

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// RFC4180-ish: quoted fields, "" escapes, embedded separators and newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t i = 0;
  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < content.size()) {
    char c = content[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty()) {
          quoted = true;
        } else {
          field.push_back(c);
        }
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field.push_back(c);
        ++i;
        break;
    }
  }
  if (any && (!field.empty() || !record.empty())) end_record();
  return records;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string json_cell_to_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value.get<double>());
    return std::string(buf, res.ptr);
  }
  if (value.is_null()) return "";
  return value.dump();
}

bool find_keyword(const std::string& lowered, const std::string& keyword, std::size_t from,
                  std::size_t* out_pos) {
  std::size_t pos = from;
  while ((pos = lowered.find(keyword, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || std::isalnum(static_cast<unsigned char>(lowered[pos - 1])) == 0;
    std::size_t after = pos + keyword.size();
    bool right_ok =
        after >= lowered.size() || std::isalnum(static_cast<unsigned char>(lowered[after])) == 0;
    if (left_ok && right_ok) {
      if (out_pos) *out_pos = pos;
      return true;
    }
    pos = after;
  }
  return false;
}

std::size_t count_keyword(const std::string& lowered, const std::string& keyword) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while (find_keyword(lowered, keyword, pos, &pos)) {
    ++count;
    pos += keyword.size();
  }
  return count;
}

std::size_t bounded(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

}  // namespace

LoadedDataset load_wtq(const std::string& examples_tsv, const std::string& tables_dir) {
  LoadedDataset out;
  std::ifstream in(examples_tsv);
  if (!in) {
    out.stats.errors.push_back("cannot open " + examples_tsv);
    return out;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id\t", 0) == 0) continue;  // header row
    auto fields = split(line, '\t');
    if (fields.size() < 4) {
      ++out.stats.skipped;
      out.stats.errors.push_back("line " + std::to_string(line_no) + ": expected 4 fields");
      continue;
    }
    const std::string& id = fields[0];
    const std::string& question = fields[1];
    const std::string& context = fields[2];
    const std::string& target = fields[3];

    std::filesystem::path table_path = std::filesystem::path(tables_dir) / context;
    auto content = read_file(table_path.string());
    if (!content) {
      ++out.stats.skipped;
      out.stats.errors.push_back(id + ": missing table file " + context);
      continue;
    }
    auto records = parse_csv(*content);
    if (records.empty()) {
      ++out.stats.skipped;
      out.stats.errors.push_back(id + ": empty table file " + context);
      continue;
    }
    std::vector<std::vector<std::string>> rows(records.begin() + 1, records.end());
    auto validated = validate_table(records.front(), std::move(rows), context);
    if (!validated.ok()) {
      ++out.stats.skipped;
      out.stats.errors.push_back(id + ": " + validated.error().message);
      continue;
    }
    out.stats.padded_rows += validated.value().warnings.size();

    QAInstance instance;
    instance.id = id;
    instance.question = question;
    instance.table = std::move(validated.value().table);
    for (auto& answer : split(target, '|')) instance.gold_answers.push_back(std::move(answer));
    if (instance.gold_answers.empty() || instance.question.empty()) {
      ++out.stats.skipped;
      out.stats.errors.push_back(id + ": empty question or answers");
      continue;
    }
    out.instances.push_back(std::move(instance));
    ++out.stats.loaded;
  }
  return out;
}

LoadedDataset load_wikisql(const std::string& questions_jsonl, const std::string& tables_jsonl) {
  LoadedDataset out;
  std::unordered_map<std::string, Table> tables;
  {
    std::ifstream in(tables_jsonl);
    if (!in) {
      out.stats.errors.push_back("cannot open " + tables_jsonl);
      return out;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.contains("id") || !record.contains("header")) {
        out.stats.errors.push_back("tables line " + std::to_string(line_no) + ": malformed");
        continue;
      }
      std::vector<std::string> columns;
      for (const auto& c : record["header"]) columns.push_back(json_cell_to_text(c));
      std::vector<std::vector<std::string>> rows;
      if (record.contains("rows")) {
        for (const auto& r : record["rows"]) {
          std::vector<std::string> row;
          for (const auto& cell : r) row.push_back(json_cell_to_text(cell));
          rows.push_back(std::move(row));
        }
      }
      std::string id = json_cell_to_text(record["id"]);
      auto validated = validate_table(std::move(columns), std::move(rows), id);
      if (!validated.ok()) {
        out.stats.errors.push_back("table " + id + ": " + validated.error().message);
        continue;
      }
      out.stats.padded_rows += validated.value().warnings.size();
      tables.emplace(id, std::move(validated.value().table));
    }
  }

  std::ifstream in(questions_jsonl);
  if (!in) {
    out.stats.errors.push_back("cannot open " + questions_jsonl);
    return out;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("question") || !record.contains("table_id")) {
      ++out.stats.skipped;
      out.stats.errors.push_back("questions line " + std::to_string(line_no) + ": malformed");
      continue;
    }
    std::string table_id = json_cell_to_text(record["table_id"]);
    auto table_it = tables.find(table_id);
    if (table_it == tables.end()) {
      ++out.stats.skipped;
      out.stats.errors.push_back("questions line " + std::to_string(line_no) +
                                 ": unknown table " + table_id);
      continue;
    }

    // weak supervision: answers must be materialized; SQL programs are ignored
    std::vector<std::string> gold;
    const char* answer_keys[] = {"answer", "answers", "answer_text"};
    for (const char* key : answer_keys) {
      if (!record.contains(key)) continue;
      const json& value = record[key];
      if (value.is_array()) {
        for (const auto& a : value) gold.push_back(json_cell_to_text(a));
      } else {
        gold.push_back(json_cell_to_text(value));
      }
      break;
    }
    if (gold.empty()) {
      ++out.stats.skipped;
      out.stats.errors.push_back("questions line " + std::to_string(line_no) +
                                 ": no answer denotation");
      continue;
    }

    QAInstance instance;
    instance.id = record.contains("id") ? json_cell_to_text(record["id"])
                                        : "wikisql-" + std::to_string(line_no);
    instance.question = record["question"].get<std::string>();
    instance.table = table_it->second;
    instance.gold_answers = std::move(gold);
    out.instances.push_back(std::move(instance));
    ++out.stats.loaded;
  }
  return out;
}

Result<AnnotationMap, std::string> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::string("cannot open " + path);
  AnnotationMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '{') {
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.contains("id") || !record.contains("sql")) {
        return std::string("annotations line " + std::to_string(line_no) + " malformed");
      }
      SqlAnnotation annotation;
      annotation.sql = record["sql"].get<std::string>();
      if (record.contains("columns") && record["columns"].is_object()) {
        for (const auto& [key, value] : record["columns"].items()) {
          annotation.columns[key] = json_cell_to_text(value);
        }
      }
      map[record["id"].get<std::string>()] = std::move(annotation);
    } else {
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        return std::string("annotations line " + std::to_string(line_no) +
                           " is neither JSON nor id<TAB>sql");
      }
      map[line.substr(0, tab)] = SqlAnnotation{line.substr(tab + 1), {}};
    }
  }
  return map;
}

FilterSubset build_filter_subset(const std::vector<QAInstance>& instances,
                                 const AnnotationMap& annotations) {
  FilterSubset subset;
  for (const auto& instance : instances) {
    auto it = annotations.find(instance.id);
    if (it == annotations.end()) continue;
    const std::string lowered = lowercase(it->second.sql);
    if (count_keyword(lowered, "select") != 1) continue;
    std::size_t select_pos = 0;
    find_keyword(lowered, "select", 0, &select_pos);
    std::size_t where_pos = 0;
    if (!find_keyword(lowered, "where", select_pos, &where_pos)) continue;

    QAInstance kept = instance;
    std::string where_body = it->second.sql.substr(where_pos + 5);
    auto translated = translate_sql_where(where_body, it->second.columns);
    if (translated.ok()) {
      kept.gold_filter = render_predicate(translated.value());
    } else {
      ++subset.untranslatable;
    }
    subset.instances.push_back(std::move(kept));
  }
  return subset;
}

std::vector<QAInstance> make_synthetic(const SyntheticConfig& config) {
  static const std::vector<std::string> kTeams = {"Springfield", "Riverton",  "Lakeside",
                                                  "Hillview",    "Maplewood", "Brookfield"};
  static const std::vector<std::string> kWords = {"alpha", "bravo",  "delta",    "echo",
                                                  "lima",  "oscar",  "tango",    "sierra",
                                                  "quebec", "victor", "november", "zulu"};

  std::vector<QAInstance> instances;
  instances.reserve(config.count);
  const std::size_t span = config.max_rows >= config.min_rows
                               ? config.max_rows - config.min_rows + 1
                               : 1;
  for (std::size_t i = 0; i < config.count; ++i) {
    std::mt19937_64 rng(fnv1a64(std::to_string(config.seed) + ":" + std::to_string(i)));
    const std::size_t n_rows = config.min_rows + bounded(rng, span);

    Table table;
    table.column_names = {"Name", "Team", "Score", "Notes"};
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "syn-%04zu", i);
    table.id = id_buf;
    table.rows.reserve(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      std::string notes;
      for (std::size_t w = 0; w < config.notes_words; ++w) {
        if (w > 0) notes.push_back(' ');
        notes += kWords[bounded(rng, kWords.size())];
      }
      table.rows.push_back({"item" + std::to_string(r), kTeams[bounded(rng, kTeams.size())],
                            std::to_string(bounded(rng, 100)), std::move(notes)});
    }

    QAInstance instance;
    instance.id = id_buf;
    const bool lookup = static_cast<double>(bounded(rng, 1000)) <
                        config.lookup_share * 1000.0;
    if (lookup && n_rows > 0) {
      const std::size_t key_row = bounded(rng, n_rows);
      const std::string key = "item" + std::to_string(key_row);
      instance.question = "value of Score where Name == " + key;
      instance.gold_answers = {table.rows[key_row][2]};
      instance.gold_filter =
          render_predicate(make_cmp(CmpKind::eq, make_col("Name"), make_str(key)));
    } else {
      instance.question = "count rows";
      instance.gold_answers = {std::to_string(n_rows)};
      // whole-table questions need no filtering; the gold tool is the identity
      instance.gold_filter = render_predicate(make_bool(true));
    }
    instance.table = std::move(table);
    instances.push_back(std::move(instance));
  }
  return instances;
}

}  // namespace tqa
