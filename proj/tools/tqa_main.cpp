// tqa: tabular question answering with generated row-filter tools.
//
// Subcommands: run, baseline, force-tool, train-detector, report, subset, fuzz.
// Every flag can also come from a JSON config file (--config); flags given on
// the command line win.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tqa/dataset.hpp"
#include "tqa/detector.hpp"
#include "tqa/metric.hpp"
#include "tqa/pipeline.hpp"
#include "tqa/predicate_fuzz.hpp"
#include "tqa/reader.hpp"
#include "tqa/toolgen.hpp"

using namespace tqa;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;

  std::string dataset = "synthetic";
  std::string wtq_tsv;
  std::string wtq_tables;
  std::string wikisql_questions;
  std::string wikisql_tables;
  std::string annotations;
  bool filter_subset = false;

  std::size_t synthetic_count = 200;
  std::size_t synthetic_min_rows = 5;
  std::size_t synthetic_max_rows = 100;
  double synthetic_lookup_share = 0.7;

  std::string reader = "toy";
  std::string reader_endpoint;
  std::string reader_api_key_env = "TQA_READER_API_KEY";
  std::string reader_cache;
  std::string reader_record;

  std::string generator = "identity";
  std::string gen_endpoint;
  std::string gen_api_key_env = "TQA_COMPLETION_API_KEY";
  std::string gen_model;
  std::string gen_cache;
  double temperature = 0.2;
  int schema_rows = 2;
  int max_tokens = 128;
  int max_retries = 1;
  std::vector<std::string> gen_stop = {"\\n"};
  double random_fraction = 0.5;

  std::string detector = "never";
  std::string detector_model_path;

  std::size_t budget_tokens = 1024;
  std::string buckets = "30,60";
  std::uint64_t seed = 0;
  std::string cache_dir;
  std::string out = "report.json";
  std::string trace;
  std::string bucket_csv;
  int jobs = 4;
  int timeout_ms = 30'000;
  std::size_t max_steps_per_row = 10'000;
  std::uint64_t max_total_steps = 10'000'000;
};

// Applies config-file values to every option the user did not set explicitly.
class ConfigBinder {
 public:
  template <typename T>
  void bind(CLI::Option* option, T* target) {
    items_.push_back({option, [target](const json& value) { *target = value.get<T>(); }});
  }

  bool apply_file(const std::string& path, std::string& error) {
    if (path.empty()) return true;
    std::ifstream in(path);
    if (!in) {
      error = "cannot open config file " + path;
      return false;
    }
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
      error = "config file " + path + " is not a JSON object";
      return false;
    }
    for (auto& [option, setter] : items_) {
      const std::string name = option->get_single_name();
      if (option->count() == 0 && config.contains(name)) {
        try {
          setter(config.at(name));
        } catch (const json::exception& ex) {
          error = "config key '" + name + "': " + ex.what();
          return false;
        }
      }
    }
    return true;
  }

 private:
  struct Item {
    CLI::Option* option;
    std::function<void(const json&)> setter;
  };
  std::vector<Item> items_;
};

void add_dataset_options(CLI::App* cmd, Options& opts, ConfigBinder& binder) {
  binder.bind(cmd->add_option("--dataset", opts.dataset, "wtq, wikisql or synthetic")
                  ->check(CLI::IsMember({"wtq", "wikisql", "synthetic"})),
              &opts.dataset);
  binder.bind(cmd->add_option("--wtq-tsv", opts.wtq_tsv, "WTQ examples TSV"), &opts.wtq_tsv);
  binder.bind(cmd->add_option("--wtq-tables", opts.wtq_tables, "WTQ dataset root for table files"),
              &opts.wtq_tables);
  binder.bind(cmd->add_option("--wikisql-questions", opts.wikisql_questions,
                              "WikiSQL questions JSONL"),
              &opts.wikisql_questions);
  binder.bind(cmd->add_option("--wikisql-tables", opts.wikisql_tables, "WikiSQL tables JSONL"),
              &opts.wikisql_tables);
  binder.bind(cmd->add_option("--annotations", opts.annotations,
                              "SQL annotations (JSONL {id,sql,columns} or id<TAB>sql)"),
              &opts.annotations);
  binder.bind(cmd->add_flag("--filter-subset", opts.filter_subset,
                            "restrict to the single-SELECT WHERE subset of --annotations"),
              &opts.filter_subset);
  binder.bind(cmd->add_option("--synthetic-count", opts.synthetic_count, "synthetic instances"),
              &opts.synthetic_count);
  binder.bind(cmd->add_option("--synthetic-min-rows", opts.synthetic_min_rows,
                              "smallest synthetic table"),
              &opts.synthetic_min_rows);
  binder.bind(cmd->add_option("--synthetic-max-rows", opts.synthetic_max_rows,
                              "largest synthetic table"),
              &opts.synthetic_max_rows);
  binder.bind(cmd->add_option("--synthetic-lookup-share", opts.synthetic_lookup_share,
                              "fraction of lookup questions"),
              &opts.synthetic_lookup_share);
  binder.bind(cmd->add_option("--seed", opts.seed, "seed for synthetic data and seeded tools"),
              &opts.seed);
}

void add_reader_options(CLI::App* cmd, Options& opts, ConfigBinder& binder) {
  binder.bind(cmd->add_option("--reader", opts.reader, "remote, replay or toy")
                  ->check(CLI::IsMember({"remote", "replay", "toy"})),
              &opts.reader);
  binder.bind(cmd->add_option("--reader-endpoint", opts.reader_endpoint,
                              "scoring service URL (http://host:port/path)"),
              &opts.reader_endpoint);
  binder.bind(cmd->add_option("--reader-api-key-env", opts.reader_api_key_env,
                              "env var holding the scoring bearer token"),
              &opts.reader_api_key_env);
  binder.bind(cmd->add_option("--reader-cache", opts.reader_cache, "reader replay cache JSONL"),
              &opts.reader_cache);
  binder.bind(cmd->add_option("--reader-record", opts.reader_record,
                              "tee every prediction into this replay cache"),
              &opts.reader_record);
  binder.bind(cmd->add_option("--budget-tokens", opts.budget_tokens,
                              "linearization token budget"),
              &opts.budget_tokens);
  binder.bind(cmd->add_option("--timeout-ms", opts.timeout_ms, "HTTP timeout"), &opts.timeout_ms);
  binder.bind(cmd->add_option("--jobs", opts.jobs, "worker pool width"), &opts.jobs);
  binder.bind(cmd->add_option("--cache-dir", opts.cache_dir,
                              "directory for default reader/tool caches"),
              &opts.cache_dir);
}

void add_generator_options(CLI::App* cmd, Options& opts, ConfigBinder& binder) {
  binder.bind(cmd->add_option("--generator", opts.generator,
                              "remote, heuristic, replay, gold, random, identity or adversarial")
                  ->check(CLI::IsMember({"remote", "heuristic", "replay", "gold", "random",
                                         "identity", "adversarial"})),
              &opts.generator);
  binder.bind(cmd->add_option("--gen-endpoint", opts.gen_endpoint, "completion service URL"),
              &opts.gen_endpoint);
  binder.bind(cmd->add_option("--gen-api-key-env", opts.gen_api_key_env,
                              "env var holding the completion bearer token"),
              &opts.gen_api_key_env);
  binder.bind(cmd->add_option("--gen-model", opts.gen_model, "model name sent when non-empty"),
              &opts.gen_model);
  binder.bind(cmd->add_option("--gen-cache", opts.gen_cache, "tool replay cache JSONL"),
              &opts.gen_cache);
  binder.bind(cmd->add_option("--temperature", opts.temperature, "sampling temperature"),
              &opts.temperature);
  binder.bind(cmd->add_option("--schema-rows", opts.schema_rows, "prompt schema rows"),
              &opts.schema_rows);
  binder.bind(cmd->add_option("--max-tokens", opts.max_tokens, "completion token cap"),
              &opts.max_tokens);
  binder.bind(cmd->add_option("--max-retries", opts.max_retries,
                              "extra attempts on network failure"),
              &opts.max_retries);
  binder.bind(cmd->add_option("--gen-stop", opts.gen_stop, "stop sequences (\\n for newline)"),
              &opts.gen_stop);
  binder.bind(cmd->add_option("--random-fraction", opts.random_fraction,
                              "row share removed by the random generator"),
              &opts.random_fraction);
  binder.bind(cmd->add_option("--max-steps-per-row", opts.max_steps_per_row,
                              "evaluator step budget per row"),
              &opts.max_steps_per_row);
  binder.bind(cmd->add_option("--max-total-steps", opts.max_total_steps,
                              "evaluator step budget per filter application"),
              &opts.max_total_steps);
}

void add_detector_options(CLI::App* cmd, Options& opts, ConfigBinder& binder) {
  binder.bind(cmd->add_option("--detector", opts.detector,
                              "never, always, oracle, seqlogprob or combined")
                  ->check(CLI::IsMember({"never", "always", "oracle", "seqlogprob", "combined"})),
              &opts.detector);
  binder.bind(cmd->add_option("--detector-model", opts.detector_model_path,
                              "trained detector model JSON"),
              &opts.detector_model_path);
}

void add_output_options(CLI::App* cmd, Options& opts, ConfigBinder& binder) {
  binder.bind(cmd->add_option("--out", opts.out, "report JSON path"), &opts.out);
  binder.bind(cmd->add_option("--trace", opts.trace, "per-instance trace JSONL path"),
              &opts.trace);
  binder.bind(cmd->add_option("--bucket-csv", opts.bucket_csv,
                              "bucket CSV path (default: <out>.buckets.csv)"),
              &opts.bucket_csv);
  binder.bind(cmd->add_option("--buckets", opts.buckets, "row-count bucket edges, e.g. 30,60"),
              &opts.buckets);
}

std::vector<long> parse_buckets(const std::string& text) {
  std::vector<long> edges;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      edges.push_back(std::stol(current));
      current.clear();
    }
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return edges;
}

std::string unescape_stop(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
      out.push_back('\n');
      ++i;
    } else if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 't') {
      out.push_back('\t');
      ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

Result<std::vector<QAInstance>, std::string> load_dataset(const Options& opts) {
  LoadedDataset loaded;
  if (opts.dataset == "synthetic") {
    SyntheticConfig config;
    config.count = opts.synthetic_count;
    config.seed = opts.seed;
    config.min_rows = opts.synthetic_min_rows;
    config.max_rows = opts.synthetic_max_rows;
    config.lookup_share = opts.synthetic_lookup_share;
    loaded.instances = make_synthetic(config);
    loaded.stats.loaded = loaded.instances.size();
  } else if (opts.dataset == "wtq") {
    if (opts.wtq_tsv.empty() || opts.wtq_tables.empty()) {
      return std::string("--dataset wtq needs --wtq-tsv and --wtq-tables");
    }
    loaded = load_wtq(opts.wtq_tsv, opts.wtq_tables);
  } else {
    if (opts.wikisql_questions.empty() || opts.wikisql_tables.empty()) {
      return std::string("--dataset wikisql needs --wikisql-questions and --wikisql-tables");
    }
    loaded = load_wikisql(opts.wikisql_questions, opts.wikisql_tables);
  }
  std::fprintf(stderr, "dataset: %zu instances loaded, %zu skipped\n", loaded.stats.loaded,
               loaded.stats.skipped);
  for (std::size_t i = 0; i < loaded.stats.errors.size() && i < 5; ++i) {
    std::fprintf(stderr, "  note: %s\n", loaded.stats.errors[i].c_str());
  }

  if (!opts.annotations.empty() && opts.filter_subset) {
    auto annotations = load_annotations(opts.annotations);
    if (!annotations.ok()) return annotations.error();
    auto subset = build_filter_subset(loaded.instances, annotations.value());
    std::fprintf(stderr, "filter subset: %zu of %zu instances kept (%zu without gold filter)\n",
                 subset.instances.size(), loaded.instances.size(), subset.untranslatable);
    loaded.instances = std::move(subset.instances);
  }
  if (loaded.instances.empty()) return std::string("no instances loaded");
  return loaded.instances;
}

ReaderConfig make_reader_config(const Options& opts) {
  ReaderConfig config;
  config.kind = opts.reader == "remote"   ? ReaderKind::remote
                : opts.reader == "replay" ? ReaderKind::replay
                                          : ReaderKind::toy;
  config.endpoint_url = opts.reader_endpoint;
  config.api_key_env = opts.reader_api_key_env;
  config.cache_path = opts.reader_cache;
  config.record_path = opts.reader_record;
  config.timeout_ms = opts.timeout_ms;
  if (config.cache_path.empty() && !opts.cache_dir.empty()) {
    config.cache_path = (std::filesystem::path(opts.cache_dir) / "reader_cache.jsonl").string();
  }
  return config;
}

ToolingConfig make_tooling_config(const Options& opts) {
  ToolingConfig tooling;
  tooling.source = tool_source_from_string(opts.generator).value_or(ToolSource::identity);
  tooling.random_fraction = opts.random_fraction;
  tooling.seed = opts.seed;
  tooling.generator.endpoint_url = opts.gen_endpoint;
  tooling.generator.api_key_env = opts.gen_api_key_env;
  tooling.generator.model = opts.gen_model;
  tooling.generator.temperature = opts.temperature;
  tooling.generator.schema_rows = opts.schema_rows;
  tooling.generator.max_tokens = opts.max_tokens;
  tooling.generator.max_retries = opts.max_retries;
  tooling.generator.timeout_ms = opts.timeout_ms;
  tooling.generator.cache_path = opts.gen_cache;
  if (tooling.generator.cache_path.empty() && !opts.cache_dir.empty()) {
    tooling.generator.cache_path =
        (std::filesystem::path(opts.cache_dir) / "tool_cache.jsonl").string();
  }
  tooling.generator.stop.clear();
  for (const auto& s : opts.gen_stop) tooling.generator.stop.push_back(unescape_stop(s));
  return tooling;
}

Result<RunConfig, std::string> make_run_config(const Options& opts, bool force_tool) {
  RunConfig config;
  config.budget_tokens = opts.budget_tokens;
  config.bucket_edges = parse_buckets(opts.buckets);
  config.jobs = opts.jobs;
  config.force_tool = force_tool;
  config.limits.eval.max_steps_per_row = opts.max_steps_per_row;
  config.limits.max_total_steps = opts.max_total_steps;
  auto policy = detector_policy_from_string(opts.detector);
  if (!policy) return std::string("unknown detector policy " + opts.detector);
  config.detector = *policy;
  if (*policy == DetectorPolicy::seqlogprob || *policy == DetectorPolicy::combined) {
    if (opts.detector_model_path.empty()) {
      return std::string("--detector " + opts.detector + " needs --detector-model");
    }
    std::ifstream in(opts.detector_model_path);
    if (!in) return std::string("cannot open " + opts.detector_model_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto model = detector_model_from_json(text);
    if (!model.ok()) return model.error();
    config.detector_model = model.value();
  }
  return config;
}

json config_snapshot(const Options& opts) {
  json snapshot;
  snapshot["dataset"] = opts.dataset;
  snapshot["reader"] = opts.reader;
  snapshot["generator"] = opts.generator;
  snapshot["detector"] = opts.detector;
  snapshot["budget_tokens"] = opts.budget_tokens;
  snapshot["buckets"] = opts.buckets;
  snapshot["seed"] = opts.seed;
  snapshot["random_fraction"] = opts.random_fraction;
  snapshot["temperature"] = opts.temperature;
  snapshot["schema_rows"] = opts.schema_rows;
  snapshot["max_tokens"] = opts.max_tokens;
  snapshot["budget_limits"] = json{{"max_steps_per_row", opts.max_steps_per_row},
                                   {"max_total_steps", opts.max_total_steps}};
  return snapshot;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

int write_outputs(const Options& opts, const std::vector<RunRecord>& records,
                  const RunReport& report, std::int64_t elapsed_ms) {
  json full = report_to_json(report);
  full["meta"] = json{{"generated_at", static_cast<long long>(std::time(nullptr))},
                      {"elapsed_ms", elapsed_ms},
                      {"jobs", opts.jobs}};
  if (!opts.out.empty()) {
    write_text(opts.out, full.dump(2) + "\n");
    std::string csv_path =
        opts.bucket_csv.empty() ? opts.out + ".buckets.csv" : opts.bucket_csv;
    write_text(csv_path, buckets_csv(report));
  }
  if (!opts.trace.empty()) {
    std::ofstream out(opts.trace);
    for (const auto& record : records) out << record_to_json(record).dump() << '\n';
  }
  std::printf("instances: %zu\n", report.instances);
  std::printf("em_baseline: %.4f\n", report.em_baseline);
  std::printf("em_system: %.4f\n", report.em_system);
  std::printf("em_oracle_headroom: %.4f%s\n", report.em_oracle_headroom,
              report.headroom_exact ? "" : " (partial: tool outcomes missing for sigma=0)");
  std::printf("tool_applications: %zu\n", report.tool_applications);
  return 0;
}

int run_command(const Options& opts, bool force_baseline_policy, bool force_tool) {
  Options effective = opts;
  if (force_baseline_policy) effective.detector = "never";

  auto instances = load_dataset(effective);
  if (!instances.ok()) return fail(instances.error());
  auto config = make_run_config(effective, force_tool);
  if (!config.ok()) return fail(config.error());

  Reader reader{make_reader_config(effective)};
  ToolingConfig tooling = make_tooling_config(effective);

  const auto started = std::chrono::steady_clock::now();
  auto records = run_dataset(instances.value(), reader, tooling, config.value());
  const auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
  auto report = build_report(records, config.value().bucket_edges, config_snapshot(effective));
  return write_outputs(effective, records, report, elapsed_ms);
}

int force_tool_command(const Options& opts) {
  auto instances = load_dataset(opts);
  if (!instances.ok()) return fail(instances.error());
  Options effective = opts;
  effective.detector = "never";  // tools are probed for every instance anyway
  auto config = make_run_config(effective, /*force_tool=*/true);
  if (!config.ok()) return fail(config.error());

  Reader reader{make_reader_config(opts)};
  ToolingConfig tooling = make_tooling_config(opts);
  const auto started = std::chrono::steady_clock::now();
  auto records = run_dataset(instances.value(), reader, tooling, config.value());
  const auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();

  if (opts.out.empty()) return fail("--out is required for force-tool outcomes");
  std::ofstream out(opts.out);
  if (!out) return fail("cannot write " + opts.out);
  for (const auto& record : records) {
    out << outcome_to_json(outcome_from_record(record)).dump() << '\n';
  }
  auto report = build_report(records, config.value().bucket_edges, config_snapshot(opts));
  std::printf("instances: %zu\n", report.instances);
  std::printf("em_baseline: %.4f\n", report.em_baseline);
  std::printf("em_oracle_headroom: %.4f\n", report.em_oracle_headroom);
  std::printf("outcomes written to %s in %lld ms\n", opts.out.c_str(),
              static_cast<long long>(elapsed_ms));
  return 0;
}

int train_command(const Options& opts, const std::string& records_path,
                  const std::string& tune_outcomes_path) {
  std::ifstream in(records_path);
  if (!in) return fail("cannot open " + records_path);
  std::vector<TrainRecord> training;
  std::string line;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      ++skipped;
      continue;
    }
    // accepts trace records ({"baseline":{...},"em":...,"row_count":...})
    const json* baseline = record.contains("baseline") && record["baseline"].is_object()
                               ? &record["baseline"]
                               : &record;
    if (!baseline->contains("seq_log_prob") || !(*baseline)["seq_log_prob"].is_number() ||
        !record.contains("row_count") || !record.contains("em")) {
      ++skipped;
      continue;
    }
    TrainRecord t;
    t.features.seq_log_prob = (*baseline)["seq_log_prob"].get<double>();
    t.features.row_count = record["row_count"].get<double>();
    t.label = record["em"].get<int>() == 1 ? 0 : 1;
    training.push_back(t);
  }
  if (skipped > 0) std::fprintf(stderr, "skipped %zu records without usable features\n", skipped);

  auto trained = train_detector(training);
  for (const auto& warning : trained.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }

  if (!tune_outcomes_path.empty()) {
    auto outcomes = load_outcomes(tune_outcomes_path);
    if (!outcomes.ok()) return fail(outcomes.error());
    std::vector<TuneRecord> tuning;
    for (const auto& outcome : outcomes.value()) {
      if (!outcome.seq_log_prob) continue;
      TuneRecord t;
      t.features = FeatureVector{*outcome.seq_log_prob, static_cast<double>(outcome.row_count)};
      t.em_baseline = exact_match(outcome.baseline_answer, outcome.gold);
      t.em_tool = exact_match(outcome.tool_answer, outcome.gold);
      tuning.push_back(t);
    }
    trained.model.threshold = tune_threshold(trained.model, tuning);
    std::fprintf(stderr, "tuned threshold: %.6f over %zu dev outcomes\n",
                 trained.model.threshold, tuning.size());
  }

  write_text(opts.out, detector_model_to_json(trained.model) + "\n");
  std::printf("trained %s detector on %zu records -> %s\n", to_string(trained.model.kind),
              training.size(), opts.out.c_str());
  return 0;
}

int report_command(const Options& opts, const std::string& outcomes_path) {
  auto outcomes = load_outcomes(outcomes_path);
  if (!outcomes.ok()) return fail(outcomes.error());
  auto policy = detector_policy_from_string(opts.detector);
  if (!policy) return fail("unknown detector policy " + opts.detector);

  DetectorModel model;
  const DetectorModel* model_ptr = nullptr;
  if (*policy == DetectorPolicy::seqlogprob || *policy == DetectorPolicy::combined) {
    if (opts.detector_model_path.empty()) {
      return fail("--detector " + opts.detector + " needs --detector-model");
    }
    std::ifstream in(opts.detector_model_path);
    if (!in) return fail("cannot open " + opts.detector_model_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto loaded = detector_model_from_json(text);
    if (!loaded.ok()) return fail(loaded.error());
    model = loaded.value();
    model_ptr = &model;
  }

  auto report = report_from_outcomes(outcomes.value(), *policy, model_ptr,
                                     parse_buckets(opts.buckets), config_snapshot(opts));
  std::vector<RunRecord> no_trace;
  return write_outputs(opts, no_trace, report, 0);
}

int subset_command(const Options& opts) {
  if (opts.annotations.empty()) return fail("subset needs --annotations");
  Options effective = opts;
  effective.filter_subset = false;  // the subset is built right here
  auto instances = load_dataset(effective);
  if (!instances.ok()) return fail(instances.error());
  auto annotations = load_annotations(opts.annotations);
  if (!annotations.ok()) return fail(annotations.error());

  auto subset = build_filter_subset(instances.value(), annotations.value());
  if (!opts.out.empty()) {
    std::ofstream out(opts.out);
    for (const auto& instance : subset.instances) {
      json record;
      record["id"] = instance.id;
      record["question"] = instance.question;
      record["table_id"] = instance.table.id;
      record["gold"] = instance.gold_answers;
      record["gold_filter"] =
          instance.gold_filter ? json(*instance.gold_filter) : json(nullptr);
      out << record.dump() << '\n';
    }
  }
  std::printf("subset size: %zu of %zu instances (%zu kept without a translatable filter)\n",
              subset.instances.size(), instances.value().size(), subset.untranslatable);
  return 0;
}

int fuzz_command(std::uint64_t seed, std::size_t iterations) {
  FuzzReport report = run_predicate_fuzz(seed, iterations);
  for (const auto& sample : report.failure_samples) {
    std::fprintf(stderr, "counterexample: %s\n", sample.c_str());
  }
  std::printf("ast round-trip: %zu cases, %zu failures\n", report.ast_cases, report.ast_failures);
  std::printf("styled sources: %zu cases, %zu failures\n", report.source_cases,
              report.source_failures);
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabular question answering with generated row-filter tools"};
  app.require_subcommand(1);

  Options opts;

  auto add_common = [&](CLI::App* cmd, ConfigBinder& binder, bool with_generator,
                        bool with_detector) {
    cmd->add_option("--config", opts.config_path, "JSON config file; flags override it");
    add_dataset_options(cmd, opts, binder);
    add_reader_options(cmd, opts, binder);
    if (with_generator) add_generator_options(cmd, opts, binder);
    if (with_detector) add_detector_options(cmd, opts, binder);
    add_output_options(cmd, opts, binder);
  };

  ConfigBinder run_binder;
  auto* run = app.add_subcommand("run", "full pipeline: baseline, detector, tool, rescore");
  add_common(run, run_binder, true, true);

  ConfigBinder baseline_binder;
  auto* baseline = app.add_subcommand("baseline", "reader-only pass (trace feeds train-detector)");
  add_common(baseline, baseline_binder, false, false);

  ConfigBinder force_binder;
  auto* force_tool =
      app.add_subcommand("force-tool", "compute tool outcomes for every instance (JSONL to --out)");
  add_common(force_tool, force_binder, true, false);

  ConfigBinder train_binder;
  auto* train =
      app.add_subcommand("train-detector", "fit the linear detector from baseline records");
  std::string records_path;
  std::string tune_outcomes_path;
  train->add_option("--records", records_path, "baseline trace JSONL")->required();
  train->add_option("--tune-outcomes", tune_outcomes_path,
                    "force-tool outcomes JSONL for threshold tuning");
  train_binder.bind(train->add_option("--out", opts.out, "model JSON path"), &opts.out);
  train->add_option("--config", opts.config_path, "JSON config file; flags override it");

  ConfigBinder report_binder;
  auto* report =
      app.add_subcommand("report", "re-score cached force-tool outcomes under any detector");
  std::string outcomes_path;
  report->add_option("--outcomes", outcomes_path, "force-tool outcomes JSONL")->required();
  report->add_option("--config", opts.config_path, "JSON config file; flags override it");
  add_detector_options(report, opts, report_binder);
  add_output_options(report, opts, report_binder);

  ConfigBinder subset_binder;
  auto* subset = app.add_subcommand("subset", "build the WHERE-clause filter subset");
  add_common(subset, subset_binder, false, false);

  auto* fuzz = app.add_subcommand("fuzz", "predicate language round-trip fuzzing");
  std::size_t fuzz_iterations = 1000;
  std::uint64_t fuzz_seed = 7;
  fuzz->add_option("--iterations", fuzz_iterations, "fuzz cases");
  fuzz->add_option("--seed", fuzz_seed, "fuzz seed");

  CLI11_PARSE(app, argc, argv);

  auto apply_config = [&](ConfigBinder& binder) -> int {
    std::string error;
    if (!binder.apply_file(opts.config_path, error)) return fail(error);
    return -1;
  };

  if (run->parsed()) {
    if (int rc = apply_config(run_binder); rc >= 0) return rc;
    return run_command(opts, /*force_baseline_policy=*/false, /*force_tool=*/false);
  }
  if (baseline->parsed()) {
    if (int rc = apply_config(baseline_binder); rc >= 0) return rc;
    return run_command(opts, /*force_baseline_policy=*/true, /*force_tool=*/false);
  }
  if (force_tool->parsed()) {
    if (int rc = apply_config(force_binder); rc >= 0) return rc;
    return force_tool_command(opts);
  }
  if (train->parsed()) {
    if (int rc = apply_config(train_binder); rc >= 0) return rc;
    return train_command(opts, records_path, tune_outcomes_path);
  }
  if (report->parsed()) {
    if (int rc = apply_config(report_binder); rc >= 0) return rc;
    return report_command(opts, outcomes_path);
  }
  if (subset->parsed()) {
    if (int rc = apply_config(subset_binder); rc >= 0) return rc;
    return subset_command(opts);
  }
  if (fuzz->parsed()) {
    return fuzz_command(fuzz_seed, fuzz_iterations);
  }
  return 0;
}
