#include "tqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <memory>
#include <random>
#include <thread>

#include "tqa/hashing.hpp"
#include "tqa/metric.hpp"
#include "tqa/predicate_fuzz.hpp"

namespace tqa {
namespace {

using nlohmann::json;

std::uint64_t instance_seed(std::uint64_t run_seed, const std::string& instance_id,
                            const char* salt) {
  return fnv1a64(std::to_string(run_seed) + ":" + salt + ":" + instance_id);
}

RevertReason failure_revert_reason(const GenFailure&) {
  // no usable program reached the filter; parse_error is the umbrella reason
  return RevertReason::parse_error;
}

json error_json(const BackendError& error) {
  return json{{"kind", to_string(error.kind)}, {"detail", error.detail}};
}

}  // namespace

const char* to_string(ToolSource source) {
  switch (source) {
    case ToolSource::remote: return "remote";
    case ToolSource::heuristic: return "heuristic";
    case ToolSource::replay: return "replay";
    case ToolSource::gold: return "gold";
    case ToolSource::random: return "random";
    case ToolSource::identity: return "identity";
    case ToolSource::adversarial: return "adversarial";
  }
  return "identity";
}

std::optional<ToolSource> tool_source_from_string(std::string_view text) {
  if (text == "remote") return ToolSource::remote;
  if (text == "heuristic") return ToolSource::heuristic;
  if (text == "replay") return ToolSource::replay;
  if (text == "gold") return ToolSource::gold;
  if (text == "random") return ToolSource::random;
  if (text == "identity") return ToolSource::identity;
  if (text == "adversarial") return ToolSource::adversarial;
  return std::nullopt;
}

const char* to_string(DetectorPolicy policy) {
  switch (policy) {
    case DetectorPolicy::never: return "never";
    case DetectorPolicy::always: return "always";
    case DetectorPolicy::oracle: return "oracle";
    case DetectorPolicy::seqlogprob: return "seqlogprob";
    case DetectorPolicy::combined: return "combined";
  }
  return "never";
}

std::optional<DetectorPolicy> detector_policy_from_string(std::string_view text) {
  if (text == "never") return DetectorPolicy::never;
  if (text == "always") return DetectorPolicy::always;
  if (text == "oracle") return DetectorPolicy::oracle;
  if (text == "seqlogprob") return DetectorPolicy::seqlogprob;
  if (text == "combined") return DetectorPolicy::combined;
  return std::nullopt;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs < 1) jobs = 1;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

namespace {

ToolAttempt attempt_tool(const QAInstance& instance, Reader& reader, ToolGenerator* generator,
                         const ToolingConfig& tooling, const RunConfig& config,
                         const RunRecord& record) {
  ToolAttempt attempt;
  FilterOutcome outcome = reverted_outcome(instance.table, RevertReason::parse_error);

  switch (tooling.source) {
    case ToolSource::remote:
    case ToolSource::heuristic:
    case ToolSource::replay: {
      if (!generator) {
        attempt.failure = GenFailure{GenFailure::Kind::cache_miss, "no generator configured"};
        break;
      }
      auto result = generator->generate(instance.question, instance.table);
      if (result.ok()) {
        attempt.tool = result.value();
      } else {
        attempt.failure = result.error();
      }
      break;
    }
    case ToolSource::gold: {
      if (!instance.gold_filter) {
        attempt.failure =
            GenFailure{GenFailure::Kind::cache_miss, "instance has no gold filter"};
        break;
      }
      auto parsed = parse_predicate(*instance.gold_filter);
      if (!parsed.ok()) {
        attempt.failure = GenFailure{GenFailure::Kind::parse_error,
                                     "gold filter does not parse: " + parsed.error().message};
        break;
      }
      GeneratedTool tool;
      tool.predicate = parsed.value();
      tool.raw_completion = *instance.gold_filter;
      tool.source = "gold";
      tool.question_table_key = question_table_key(instance.question, instance.table);
      attempt.tool = std::move(tool);
      break;
    }
    case ToolSource::identity: {
      GeneratedTool tool;
      tool.predicate = make_bool(true);
      tool.raw_completion = "true";
      tool.source = "identity";
      tool.question_table_key = question_table_key(instance.question, instance.table);
      attempt.tool = std::move(tool);
      break;
    }
    case ToolSource::adversarial: {
      std::mt19937_64 rng(instance_seed(tooling.seed, instance.id, "adversarial"));
      GeneratedTool tool;
      tool.predicate = random_predicate_for_table(rng, instance.table);
      tool.raw_completion = render_predicate(tool.predicate);
      tool.source = "adversarial";
      tool.question_table_key = question_table_key(instance.question, instance.table);
      attempt.tool = std::move(tool);
      break;
    }
    case ToolSource::random: {
      Table filtered = random_row_filter(
          instance.table, tooling.random_fraction,
          instance_seed(tooling.seed, instance.id, "random"));
      if (filtered.rows.empty()) {
        outcome = reverted_outcome(instance.table, RevertReason::empty_result);
      } else {
        outcome.table = std::move(filtered);
        outcome.applied = true;
        outcome.revert_reason = RevertReason::none;
      }
      break;
    }
  }

  if (attempt.tool) {
    outcome = apply_row_filter(instance.table, attempt.tool->predicate, config.limits);
  } else if (attempt.failure) {
    outcome = reverted_outcome(instance.table, failure_revert_reason(*attempt.failure));
  }

  attempt.applied = outcome.applied;
  attempt.revert_reason = outcome.revert_reason;

  if (outcome.applied) {
    auto prediction = reader.predict(instance.question, outcome.table, config.budget_tokens);
    if (prediction.ok()) {
      attempt.prediction = prediction.value();
      attempt.final_answer = prediction.value().answer_text;
    } else {
      attempt.error = prediction.error();
      attempt.final_answer.clear();
    }
  } else {
    // reverted: identical input, so the baseline prediction is reused
    attempt.final_answer = record.baseline ? record.baseline->answer_text : std::string();
  }
  attempt.em = exact_match(attempt.final_answer, instance.gold_answers);
  return attempt;
}

}  // namespace

RunRecord run_instance(const QAInstance& instance, Reader& reader, ToolGenerator* generator,
                       const ToolingConfig& tooling, const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();

  RunRecord record;
  record.instance_id = instance.id;
  record.question = instance.question;
  record.gold = instance.gold_answers;
  record.raw_row_count = static_cast<long>(instance.table.rows.size());

  auto baseline = reader.predict(instance.question, instance.table, config.budget_tokens);
  if (baseline.ok()) {
    record.baseline = baseline.value();
    record.em_baseline = exact_match(baseline.value().answer_text, instance.gold_answers);
    record.features = extract_features(baseline.value(), instance.table.rows.size());
  } else {
    record.baseline_error = baseline.error();
    record.em_baseline = 0;
  }

  switch (config.detector) {
    case DetectorPolicy::never:
      record.sigma = 0;
      break;
    case DetectorPolicy::always:
      record.sigma = 1;
      record.detector_score = 1.0;
      break;
    case DetectorPolicy::oracle:
      record.sigma = oracle_decide(instance.gold_answers,
                                   record.baseline ? record.baseline->answer_text : "");
      record.detector_score = static_cast<double>(record.sigma);
      break;
    case DetectorPolicy::seqlogprob:
    case DetectorPolicy::combined: {
      if (record.features) {
        DetectorModel model = config.detector_model;
        model.kind = config.detector == DetectorPolicy::seqlogprob
                         ? DetectorKind::seqlogprob_only
                         : DetectorKind::combined;
        Decision decision = decide(model, *record.features);
        record.sigma = decision.sigma;
        record.detector_score = decision.score;
      } else {
        record.sigma = 0;  // no usable baseline signal; leave the prediction alone
      }
      break;
    }
  }

  if (record.sigma == 1) {
    record.applied_tool = attempt_tool(instance, reader, generator, tooling, config, record);
    record.final_answer = record.applied_tool->final_answer;
    record.em_final = record.applied_tool->em;
  } else {
    record.final_answer = record.baseline ? record.baseline->answer_text : std::string();
    record.em_final = record.em_baseline;
    if (config.force_tool) {
      record.forced_tool = attempt_tool(instance, reader, generator, tooling, config, record);
    }
  }

  record.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return record;
}

std::vector<RunRecord> run_dataset(const std::vector<QAInstance>& instances, Reader& reader,
                                   const ToolingConfig& tooling, const RunConfig& config) {
  std::unique_ptr<ToolGenerator> generator;
  if (tooling.source == ToolSource::remote || tooling.source == ToolSource::heuristic ||
      tooling.source == ToolSource::replay) {
    GeneratorConfig generator_config = tooling.generator;
    generator_config.backend = tooling.source == ToolSource::remote    ? ToolBackend::remote
                               : tooling.source == ToolSource::replay ? ToolBackend::replay
                                                                      : ToolBackend::heuristic;
    generator = std::make_unique<ToolGenerator>(generator_config);
  }

  std::vector<RunRecord> records(instances.size());
  parallel_for(instances.size(), config.jobs, [&](std::size_t i) {
    records[i] = run_instance(instances[i], reader, generator.get(), tooling, config);
  });
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.instance_id < b.instance_id; });
  return records;
}

RunReport build_report(const std::vector<RunRecord>& records, const std::vector<long>& bucket_edges,
                       json config_snapshot) {
  RunReport report;
  report.config_snapshot = std::move(config_snapshot);
  report.instances = records.size();

  std::vector<long> edges = bucket_edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<BucketStat> buckets;
  long lo = 0;
  for (long edge : edges) {
    if (edge <= lo) continue;
    buckets.push_back(BucketStat{lo, edge, 0, 0.0, 0.0});
    lo = edge;
  }
  buckets.push_back(BucketStat{lo, std::nullopt, 0, 0.0, 0.0});

  if (records.empty()) {
    report.buckets = std::move(buckets);
    return report;
  }

  double base_total = 0;
  double final_total = 0;
  double headroom_total = 0;
  bool headroom_exact = true;
  std::vector<double> bucket_base(buckets.size(), 0.0);
  std::vector<double> bucket_final(buckets.size(), 0.0);

  for (const auto& record : records) {
    base_total += record.em_baseline;
    final_total += record.em_final;
    report.baseline_correct += record.em_baseline == 1 ? 1 : 0;
    report.tool_applications += record.sigma == 1 ? 1 : 0;

    const ToolAttempt* attempt = record.applied_tool ? &*record.applied_tool
                                : record.forced_tool ? &*record.forced_tool
                                                     : nullptr;
    if (attempt) {
      headroom_total += std::max(record.em_baseline, attempt->em);
      ++report.revert_reasons[to_string(attempt->revert_reason)];
      if (attempt->failure) {
        ++report.gen_failures[to_string(attempt->failure->kind)];
      }
    } else {
      headroom_total += record.em_baseline;
      headroom_exact = false;
    }

    std::size_t b = buckets.size() - 1;
    for (std::size_t k = 0; k < buckets.size(); ++k) {
      if (!buckets[k].hi || record.raw_row_count < *buckets[k].hi) {
        if (record.raw_row_count >= buckets[k].lo) {
          b = k;
          break;
        }
      }
    }
    ++buckets[b].population;
    bucket_base[b] += record.em_baseline;
    bucket_final[b] += record.em_final;
  }

  const double n = static_cast<double>(records.size());
  report.em_baseline = base_total / n;
  report.em_system = final_total / n;
  report.em_oracle_headroom = headroom_total / n;
  report.headroom_exact = headroom_exact;
  report.baseline_wrong = records.size() - report.baseline_correct;
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    if (buckets[k].population > 0) {
      buckets[k].em_baseline = bucket_base[k] / static_cast<double>(buckets[k].population);
      buckets[k].em_system = bucket_final[k] / static_cast<double>(buckets[k].population);
    }
  }
  report.buckets = std::move(buckets);
  return report;
}

json report_to_json(const RunReport& report) {
  json buckets = json::array();
  for (const auto& bucket : report.buckets) {
    json b;
    b["lo"] = bucket.lo;
    if (bucket.hi) {
      b["hi"] = *bucket.hi;
    } else {
      b["hi"] = nullptr;
    }
    b["population"] = bucket.population;
    b["em_baseline"] = bucket.em_baseline;
    b["em_system"] = bucket.em_system;
    b["delta"] = bucket.em_system - bucket.em_baseline;
    buckets.push_back(std::move(b));
  }
  json j;
  j["config"] = report.config_snapshot;
  j["overall"] = json{{"instances", report.instances},
                      {"em_baseline", report.em_baseline},
                      {"em_system", report.em_system},
                      {"em_oracle_headroom", report.em_oracle_headroom},
                      {"headroom_exact", report.headroom_exact}};
  j["partitions"] = json{{"baseline_correct", report.baseline_correct},
                         {"baseline_wrong", report.baseline_wrong}};
  j["tool_applications"] = report.tool_applications;
  j["buckets"] = std::move(buckets);
  j["revert_reasons"] = report.revert_reasons;
  j["gen_failures"] = report.gen_failures;
  j["em_normalization"] = kEmNormalizationVersion;
  return j;
}

std::string buckets_csv(const RunReport& report) {
  std::string csv = "lo,hi,population,em_baseline,em_system,delta\n";
  for (const auto& bucket : report.buckets) {
    csv += std::to_string(bucket.lo);
    csv += ',';
    csv += bucket.hi ? std::to_string(*bucket.hi) : "";
    csv += ',';
    csv += std::to_string(bucket.population);
    char buf[96];
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f\n", bucket.em_baseline, bucket.em_system,
                  bucket.em_system - bucket.em_baseline);
    csv += buf;
  }
  return csv;
}

namespace {

json attempt_to_json(const ToolAttempt& attempt) {
  json j;
  if (attempt.tool) {
    j["predicate"] = render_predicate(attempt.tool->predicate);
    j["source"] = attempt.tool->source;
    j["raw_completion"] = attempt.tool->raw_completion;
    j["key"] = attempt.tool->question_table_key;
  } else {
    j["predicate"] = nullptr;
  }
  j["failure"] = attempt.failure ? json(to_string(attempt.failure->kind)) : json(nullptr);
  j["applied"] = attempt.applied;
  j["revert_reason"] = to_string(attempt.revert_reason);
  j["answer"] = attempt.final_answer;
  j["reused_baseline"] = !attempt.prediction.has_value() && !attempt.error.has_value();
  j["em"] = attempt.em;
  if (attempt.error) j["error"] = error_json(*attempt.error);
  return j;
}

}  // namespace

json record_to_json(const RunRecord& record) {
  json j;
  j["id"] = record.instance_id;
  j["question"] = record.question;
  j["gold"] = record.gold;
  j["row_count"] = record.raw_row_count;
  json baseline;
  if (record.baseline) {
    baseline["answer"] = record.baseline->answer_text;
    auto slp = seq_log_prob(*record.baseline);
    baseline["seq_log_prob"] = slp ? json(*slp) : json(nullptr);
    baseline["truncated"] = record.baseline->truncated_input;
    baseline["backend"] = record.baseline->backend;
  } else {
    baseline = nullptr;
  }
  j["baseline"] = std::move(baseline);
  if (record.baseline_error) j["baseline_error"] = error_json(*record.baseline_error);
  j["em"] = record.em_baseline;
  j["sigma"] = record.sigma;
  j["score"] = record.detector_score;
  j["tool"] = record.applied_tool ? attempt_to_json(*record.applied_tool) : json(nullptr);
  j["forced_tool"] = record.forced_tool ? attempt_to_json(*record.forced_tool) : json(nullptr);
  j["final_answer"] = record.final_answer;
  j["em_final"] = record.em_final;
  j["elapsed_us"] = record.elapsed_us;
  return j;
}

OutcomeRecord outcome_from_record(const RunRecord& record) {
  OutcomeRecord outcome;
  outcome.id = record.instance_id;
  outcome.question = record.question;
  outcome.gold = record.gold;
  outcome.row_count = record.raw_row_count;
  outcome.baseline_answer = record.baseline ? record.baseline->answer_text : std::string();
  if (record.baseline) {
    outcome.seq_log_prob = seq_log_prob(*record.baseline);
    outcome.truncated = record.baseline->truncated_input;
  }
  const ToolAttempt* attempt = record.applied_tool ? &*record.applied_tool
                              : record.forced_tool ? &*record.forced_tool
                                                   : nullptr;
  if (attempt) {
    outcome.tool_answer = attempt->final_answer;
    if (attempt->tool) {
      outcome.predicate = render_predicate(attempt->tool->predicate);
      outcome.tool_backend = attempt->tool->source;
    }
    if (attempt->failure) outcome.gen_failure = to_string(attempt->failure->kind);
    outcome.applied = attempt->applied;
    outcome.revert_reason = to_string(attempt->revert_reason);
  } else {
    outcome.tool_answer = outcome.baseline_answer;
  }
  return outcome;
}

json outcome_to_json(const OutcomeRecord& outcome) {
  json j;
  j["id"] = outcome.id;
  j["question"] = outcome.question;
  j["gold"] = outcome.gold;
  j["row_count"] = outcome.row_count;
  j["truncated"] = outcome.truncated;
  j["baseline_answer"] = outcome.baseline_answer;
  j["seq_log_prob"] = outcome.seq_log_prob ? json(*outcome.seq_log_prob) : json(nullptr);
  j["tool_answer"] = outcome.tool_answer;
  j["predicate"] = outcome.predicate ? json(*outcome.predicate) : json(nullptr);
  j["tool_backend"] = outcome.tool_backend;
  j["gen_failure"] = outcome.gen_failure ? json(*outcome.gen_failure) : json(nullptr);
  j["applied"] = outcome.applied;
  j["revert_reason"] = outcome.revert_reason;
  return j;
}

Result<OutcomeRecord, std::string> outcome_from_json(const json& value) {
  if (!value.is_object() || !value.contains("id") || !value.contains("gold") ||
      !value.contains("baseline_answer") || !value.contains("tool_answer")) {
    return std::string("outcome record missing required fields");
  }
  OutcomeRecord outcome;
  try {
    outcome.id = value["id"].get<std::string>();
    outcome.question = value.value("question", "");
    for (const auto& g : value["gold"]) outcome.gold.push_back(g.get<std::string>());
    outcome.row_count = value.value("row_count", 0L);
    outcome.truncated = value.value("truncated", false);
    outcome.baseline_answer = value["baseline_answer"].get<std::string>();
    if (value.contains("seq_log_prob") && value["seq_log_prob"].is_number()) {
      outcome.seq_log_prob = value["seq_log_prob"].get<double>();
    }
    outcome.tool_answer = value["tool_answer"].get<std::string>();
    if (value.contains("predicate") && value["predicate"].is_string()) {
      outcome.predicate = value["predicate"].get<std::string>();
    }
    outcome.tool_backend = value.value("tool_backend", "");
    if (value.contains("gen_failure") && value["gen_failure"].is_string()) {
      outcome.gen_failure = value["gen_failure"].get<std::string>();
    }
    outcome.applied = value.value("applied", false);
    outcome.revert_reason = value.value("revert_reason", "none");
  } catch (const json::exception& ex) {
    return std::string("outcome record malformed: ") + ex.what();
  }
  return outcome;
}

Result<std::vector<OutcomeRecord>, std::string> load_outcomes(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::string("cannot open " + path);
  std::vector<OutcomeRecord> outcomes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded()) {
      return std::string("outcomes line " + std::to_string(line_no) + " is not valid JSON");
    }
    auto outcome = outcome_from_json(value);
    if (!outcome.ok()) {
      return std::string("outcomes line " + std::to_string(line_no) + ": " + outcome.error());
    }
    outcomes.push_back(std::move(outcome.value()));
  }
  return outcomes;
}

RunReport report_from_outcomes(const std::vector<OutcomeRecord>& outcomes, DetectorPolicy policy,
                               const DetectorModel* model, const std::vector<long>& bucket_edges,
                               json config_snapshot) {
  std::vector<RunRecord> records;
  records.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    RunRecord record;
    record.instance_id = outcome.id;
    record.question = outcome.question;
    record.gold = outcome.gold;
    record.raw_row_count = outcome.row_count;
    record.em_baseline = exact_match(outcome.baseline_answer, outcome.gold);

    ReaderPrediction baseline;
    baseline.answer_text = outcome.baseline_answer;
    baseline.truncated_input = outcome.truncated;
    if (outcome.seq_log_prob) baseline.token_logprobs = {*outcome.seq_log_prob};
    record.baseline = baseline;
    if (outcome.seq_log_prob) {
      record.features = FeatureVector{*outcome.seq_log_prob,
                                      static_cast<double>(outcome.row_count)};
    }

    ToolAttempt attempt;
    attempt.final_answer = outcome.tool_answer;
    attempt.em = exact_match(outcome.tool_answer, outcome.gold);
    attempt.applied = outcome.applied;
    if (outcome.predicate) {
      GeneratedTool tool;
      auto parsed = parse_predicate(*outcome.predicate);
      if (parsed.ok()) tool.predicate = parsed.value();
      tool.raw_completion = *outcome.predicate;
      tool.source = outcome.tool_backend;
      attempt.tool = std::move(tool);
    }
    if (outcome.gen_failure) {
      GenFailure failure;
      failure.detail = *outcome.gen_failure;
      if (*outcome.gen_failure == "network") failure.kind = GenFailure::Kind::network;
      else if (*outcome.gen_failure == "extract_error") failure.kind = GenFailure::Kind::extract_error;
      else if (*outcome.gen_failure == "cache_miss") failure.kind = GenFailure::Kind::cache_miss;
      else failure.kind = GenFailure::Kind::parse_error;
      attempt.failure = failure;
    }
    if (outcome.revert_reason == "parse_error") attempt.revert_reason = RevertReason::parse_error;
    else if (outcome.revert_reason == "eval_error") attempt.revert_reason = RevertReason::eval_error;
    else if (outcome.revert_reason == "empty_result") attempt.revert_reason = RevertReason::empty_result;
    else if (outcome.revert_reason == "budget_exceeded") attempt.revert_reason = RevertReason::budget_exceeded;
    else attempt.revert_reason = RevertReason::none;

    int sigma = 0;
    double score = 0.0;
    switch (policy) {
      case DetectorPolicy::never: break;
      case DetectorPolicy::always:
        sigma = 1;
        score = 1.0;
        break;
      case DetectorPolicy::oracle:
        sigma = record.em_baseline == 1 ? 0 : 1;
        score = sigma;
        break;
      case DetectorPolicy::seqlogprob:
      case DetectorPolicy::combined: {
        if (record.features && model) {
          DetectorModel adjusted = *model;
          adjusted.kind = policy == DetectorPolicy::seqlogprob ? DetectorKind::seqlogprob_only
                                                               : DetectorKind::combined;
          Decision decision = decide(adjusted, *record.features);
          sigma = decision.sigma;
          score = decision.score;
        }
        break;
      }
    }
    record.sigma = sigma;
    record.detector_score = score;
    if (sigma == 1) {
      record.applied_tool = attempt;
      record.final_answer = attempt.final_answer;
      record.em_final = attempt.em;
    } else {
      record.forced_tool = attempt;
      record.final_answer = outcome.baseline_answer;
      record.em_final = record.em_baseline;
    }
    records.push_back(std::move(record));
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.instance_id < b.instance_id; });
  return build_report(records, bucket_edges, std::move(config_snapshot));
}

}  // namespace tqa
