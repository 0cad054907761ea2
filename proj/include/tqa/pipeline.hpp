#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tqa/dataset.hpp"
#include "tqa/detector.hpp"
#include "tqa/reader.hpp"
#include "tqa/table.hpp"
#include "tqa/toolgen.hpp"

namespace tqa {

enum class ToolSource { remote, heuristic, replay, gold, random, identity, adversarial };
const char* to_string(ToolSource source);
std::optional<ToolSource> tool_source_from_string(std::string_view text);

enum class DetectorPolicy { never, always, oracle, seqlogprob, combined };
const char* to_string(DetectorPolicy policy);
std::optional<DetectorPolicy> detector_policy_from_string(std::string_view text);

struct ToolingConfig {
  ToolSource source = ToolSource::identity;
  GeneratorConfig generator;  // used by remote / heuristic / replay
  double random_fraction = 0.5;
  std::uint64_t seed = 0;  // per-instance seeds derived for random/adversarial
};

struct RunConfig {
  std::size_t budget_tokens = 1024;
  std::vector<long> bucket_edges{30, 60};
  DetectorPolicy detector = DetectorPolicy::never;
  DetectorModel detector_model;  // consulted by seqlogprob/combined
  FilterLimits limits;
  bool force_tool = false;  // also compute tool outcomes where sigma = 0
  int jobs = 1;
};

struct ToolAttempt {
  std::optional<GeneratedTool> tool;
  std::optional<GenFailure> failure;
  bool applied = false;
  RevertReason revert_reason = RevertReason::none;
  std::optional<ReaderPrediction> prediction;  // absent when the baseline was reused
  std::optional<BackendError> error;
  std::string final_answer;
  int em = 0;
};

struct RunRecord {
  std::string instance_id;
  std::string question;
  std::vector<std::string> gold;
  long raw_row_count = 0;
  std::optional<ReaderPrediction> baseline;
  std::optional<BackendError> baseline_error;
  std::optional<FeatureVector> features;
  double detector_score = 0.0;
  int sigma = 0;
  std::optional<ToolAttempt> applied_tool;  // present iff sigma == 1
  std::optional<ToolAttempt> forced_tool;   // force-tool probe when sigma == 0
  std::string final_answer;
  int em_baseline = 0;
  int em_final = 0;
  std::int64_t elapsed_us = 0;
};

// One instance through the full composition: baseline prediction, detector
// decision, and -- when the tool fires -- generation, filtering with revert
// semantics, and re-prediction. A reverted filter reuses the baseline
// prediction (identical input gives identical output under deterministic
// backends). Backend errors are recorded, never thrown.
RunRecord run_instance(const QAInstance& instance, Reader& reader, ToolGenerator* generator,
                       const ToolingConfig& tooling, const RunConfig& config);

// Worker-pool run over a dataset; aggregation is order-independent and the
// records come back sorted by instance id.
std::vector<RunRecord> run_dataset(const std::vector<QAInstance>& instances, Reader& reader,
                                   const ToolingConfig& tooling, const RunConfig& config);

struct BucketStat {
  long lo = 0;
  std::optional<long> hi;  // empty for the open-ended last bucket
  std::size_t population = 0;
  double em_baseline = 0.0;
  double em_system = 0.0;
};

struct RunReport {
  std::size_t instances = 0;
  double em_baseline = 0.0;
  double em_system = 0.0;
  double em_oracle_headroom = 0.0;
  bool headroom_exact = false;  // true when every record carries a tool outcome
  std::size_t baseline_correct = 0;
  std::size_t baseline_wrong = 0;
  std::size_t tool_applications = 0;
  std::vector<BucketStat> buckets;
  std::map<std::string, std::size_t> revert_reasons;
  std::map<std::string, std::size_t> gen_failures;
  nlohmann::json config_snapshot;
};

RunReport build_report(const std::vector<RunRecord>& records, const std::vector<long>& bucket_edges,
                       nlohmann::json config_snapshot);

// Deterministic report body; volatile metadata belongs in a separate block.
nlohmann::json report_to_json(const RunReport& report);
std::string buckets_csv(const RunReport& report);
nlohmann::json record_to_json(const RunRecord& record);

struct OutcomeRecord {
  std::string id;
  std::string question;
  std::vector<std::string> gold;
  long row_count = 0;
  bool truncated = false;
  std::string baseline_answer;
  std::optional<double> seq_log_prob;
  std::string tool_answer;
  std::optional<std::string> predicate;
  std::string tool_backend;
  std::optional<std::string> gen_failure;
  bool applied = false;
  std::string revert_reason = "none";
};

// The record must carry a tool attempt (applied or forced).
OutcomeRecord outcome_from_record(const RunRecord& record);
nlohmann::json outcome_to_json(const OutcomeRecord& outcome);
Result<OutcomeRecord, std::string> outcome_from_json(const nlohmann::json& value);
Result<std::vector<OutcomeRecord>, std::string> load_outcomes(const std::string& path);

// Offline re-scoring of cached tool outcomes under any detector policy; EM is
// recomputed from the stored answers against gold, not copied.
RunReport report_from_outcomes(const std::vector<OutcomeRecord>& outcomes, DetectorPolicy policy,
                               const DetectorModel* model, const std::vector<long>& bucket_edges,
                               nlohmann::json config_snapshot);

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace tqa
