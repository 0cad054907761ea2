#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tqa/reader.hpp"
#include "tqa/result.hpp"

namespace tqa {

struct FeatureVector {
  double seq_log_prob = 0.0;
  double row_count = 0.0;  // raw (pre-truncation) table rows
};

enum class DetectorKind { never, always, oracle, seqlogprob_only, combined };
const char* to_string(DetectorKind kind);
std::optional<DetectorKind> detector_kind_from_string(std::string_view text);

struct FeatureStats {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> stdev{1.0, 1.0};  // degenerate features clamped to 1
};

struct TrainingMeta {
  std::size_t records = 0;
  int epochs = 0;
  double learning_rate = 0.0;
};

struct DetectorModel {
  DetectorKind kind = DetectorKind::never;
  std::array<double, 2> weights{0.0, 0.0};
  double bias = 0.0;
  double threshold = 0.5;  // tau in (0,1)
  FeatureStats stats;
  TrainingMeta meta;
};

struct Decision {
  int sigma = 0;
  double score = 0.0;
};

// seq-log-prob from the baseline prediction, row count from the raw table;
// empty-logprob predictions have no features.
std::optional<FeatureVector> extract_features(const ReaderPrediction& baseline,
                                              std::size_t raw_row_count);

// never/always ignore features; linear kinds threshold a logistic score over
// standardized features, with seqlogprob_only dropping the row-count weight.
// kind=oracle needs gold answers and is resolved through oracle_decide.
Decision decide(const DetectorModel& model, const FeatureVector& features);

// sigma = 1 iff the baseline answer misses the gold set (exact-match 0).
int oracle_decide(const std::vector<std::string>& gold_answers, const std::string& baseline_answer);

struct TrainRecord {
  FeatureVector features;
  int label = 0;  // 1 = baseline prediction was wrong
};

struct TrainResult {
  DetectorModel model;
  std::vector<std::string> warnings;
};

// Full-batch logistic regression: zero init, 1000 epochs, learning rate 0.1,
// no regularization; bit-deterministic. Under two records or single-class
// labels fall back to the matching static detector with a warning.
TrainResult train_detector(const std::vector<TrainRecord>& records);

struct TuneRecord {
  FeatureVector features;
  int em_baseline = 0;
  int em_tool = 0;
};

// Sweeps tau over the observed scores, maximizing the combined-system EM on
// dev records; ties resolve to the larger tau (fewer tool applications).
double tune_threshold(const DetectorModel& model, const std::vector<TuneRecord>& records);

std::string detector_model_to_json(const DetectorModel& model);
Result<DetectorModel, std::string> detector_model_from_json(const std::string& text);

}  // namespace tqa
