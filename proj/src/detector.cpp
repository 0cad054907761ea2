#include "tqa/detector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "tqa/metric.hpp"

namespace tqa {
namespace {

using nlohmann::json;

constexpr int kEpochs = 1000;
constexpr double kLearningRate = 0.1;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::array<double, 2> standardize(const FeatureVector& f, const FeatureStats& stats) {
  return {(f.seq_log_prob - stats.mean[0]) / stats.stdev[0],
          (f.row_count - stats.mean[1]) / stats.stdev[1]};
}

}  // namespace

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::never: return "never";
    case DetectorKind::always: return "always";
    case DetectorKind::oracle: return "oracle";
    case DetectorKind::seqlogprob_only: return "seqlogprob_only";
    case DetectorKind::combined: return "combined";
  }
  return "never";
}

std::optional<DetectorKind> detector_kind_from_string(std::string_view text) {
  if (text == "never") return DetectorKind::never;
  if (text == "always") return DetectorKind::always;
  if (text == "oracle") return DetectorKind::oracle;
  if (text == "seqlogprob_only") return DetectorKind::seqlogprob_only;
  if (text == "combined") return DetectorKind::combined;
  return std::nullopt;
}

std::optional<FeatureVector> extract_features(const ReaderPrediction& baseline,
                                              std::size_t raw_row_count) {
  auto slp = seq_log_prob(baseline);
  if (!slp) return std::nullopt;
  FeatureVector features;
  features.seq_log_prob = *slp;
  features.row_count = static_cast<double>(raw_row_count);
  return features;
}

Decision decide(const DetectorModel& model, const FeatureVector& features) {
  switch (model.kind) {
    case DetectorKind::never:
      return {0, 0.0};
    case DetectorKind::always:
      return {1, 1.0};
    case DetectorKind::oracle:
      // needs gold answers; resolved by oracle_decide in the pipeline
      return {0, 0.0};
    case DetectorKind::seqlogprob_only:
    case DetectorKind::combined: {
      auto z = standardize(features, model.stats);
      double x = model.weights[0] * z[0] + model.bias;
      if (model.kind == DetectorKind::combined) x += model.weights[1] * z[1];
      double p = logistic(x);
      return {p >= model.threshold ? 1 : 0, p};
    }
  }
  return {0, 0.0};
}

int oracle_decide(const std::vector<std::string>& gold_answers,
                  const std::string& baseline_answer) {
  return exact_match(baseline_answer, gold_answers) == 1 ? 0 : 1;
}

TrainResult train_detector(const std::vector<TrainRecord>& records) {
  TrainResult result;
  result.model.threshold = 0.5;

  std::size_t positives = 0;
  for (const auto& r : records) positives += r.label != 0 ? 1 : 0;

  if (records.size() < 2 || positives == 0 || positives == records.size()) {
    if (records.empty() || positives == 0) {
      result.model.kind = DetectorKind::never;
      result.warnings.push_back("degenerate training data (no positive labels); "
                                "falling back to the never detector");
    } else {
      result.model.kind = DetectorKind::always;
      result.warnings.push_back("degenerate training data (no negative labels); "
                                "falling back to the always detector");
    }
    result.model.meta.records = records.size();
    return result;
  }

  FeatureStats stats;
  const double n = static_cast<double>(records.size());
  for (const auto& r : records) {
    stats.mean[0] += r.features.seq_log_prob;
    stats.mean[1] += r.features.row_count;
  }
  stats.mean[0] /= n;
  stats.mean[1] /= n;
  std::array<double, 2> variance{0.0, 0.0};
  for (const auto& r : records) {
    double d0 = r.features.seq_log_prob - stats.mean[0];
    double d1 = r.features.row_count - stats.mean[1];
    variance[0] += d0 * d0;
    variance[1] += d1 * d1;
  }
  for (int f = 0; f < 2; ++f) {
    double sd = std::sqrt(variance[f] / n);
    stats.stdev[f] = sd > 1e-12 ? sd : 1.0;  // constant features stay usable
  }

  std::vector<std::array<double, 2>> z;
  z.reserve(records.size());
  for (const auto& r : records) z.push_back(standardize(r.features, stats));

  std::array<double, 2> w{0.0, 0.0};
  double b = 0.0;
  for (int epoch = 0; epoch < kEpochs; ++epoch) {
    std::array<double, 2> grad_w{0.0, 0.0};
    double grad_b = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      double p = logistic(w[0] * z[i][0] + w[1] * z[i][1] + b);
      double err = p - static_cast<double>(records[i].label);
      grad_w[0] += err * z[i][0];
      grad_w[1] += err * z[i][1];
      grad_b += err;
    }
    w[0] -= kLearningRate * grad_w[0] / n;
    w[1] -= kLearningRate * grad_w[1] / n;
    b -= kLearningRate * grad_b / n;
  }

  result.model.kind = DetectorKind::combined;
  result.model.weights = w;
  result.model.bias = b;
  result.model.stats = stats;
  result.model.meta = TrainingMeta{records.size(), kEpochs, kLearningRate};
  return result;
}

double tune_threshold(const DetectorModel& model, const std::vector<TuneRecord>& records) {
  if (records.empty()) return model.threshold;

  std::set<double> unique_scores;
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) {
    double s = decide(model, r.features).score;
    scores.push_back(s);
    unique_scores.insert(s);
  }
  std::vector<double> candidates(unique_scores.begin(), unique_scores.end());
  // an extra candidate above every score expresses "never fire" within (0,1)
  candidates.push_back((candidates.back() + 1.0) / 2.0);

  double best_tau = candidates.front();
  double best_em = -1.0;
  for (double tau : candidates) {
    double total = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      total += scores[i] >= tau ? records[i].em_tool : records[i].em_baseline;
    }
    double em = total / static_cast<double>(records.size());
    if (em >= best_em) {  // ascending sweep, so ties keep the larger tau
      best_em = em;
      best_tau = tau;
    }
  }
  return best_tau;
}

std::string detector_model_to_json(const DetectorModel& model) {
  json j;
  j["kind"] = to_string(model.kind);
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["threshold"] = model.threshold;
  j["feature_stats"] = json{{"mean", model.stats.mean}, {"stdev", model.stats.stdev}};
  j["training_meta"] = json{{"records", model.meta.records},
                            {"epochs", model.meta.epochs},
                            {"learning_rate", model.meta.learning_rate}};
  return j.dump(2);
}

Result<DetectorModel, std::string> detector_model_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::string("detector model is not valid JSON");
  DetectorModel model;
  auto kind = detector_kind_from_string(j.value("kind", ""));
  if (!kind) return std::string("detector model has an unknown kind");
  model.kind = *kind;
  try {
    if (j.contains("weights")) {
      model.weights[0] = j["weights"].at(0).get<double>();
      model.weights[1] = j["weights"].at(1).get<double>();
    }
    model.bias = j.value("bias", 0.0);
    model.threshold = j.value("threshold", 0.5);
    if (j.contains("feature_stats")) {
      const auto& s = j["feature_stats"];
      model.stats.mean[0] = s["mean"].at(0).get<double>();
      model.stats.mean[1] = s["mean"].at(1).get<double>();
      model.stats.stdev[0] = s["stdev"].at(0).get<double>();
      model.stats.stdev[1] = s["stdev"].at(1).get<double>();
    }
    if (j.contains("training_meta")) {
      const auto& m = j["training_meta"];
      model.meta.records = m.value("records", std::size_t{0});
      model.meta.epochs = m.value("epochs", 0);
      model.meta.learning_rate = m.value("learning_rate", 0.0);
    }
  } catch (const json::exception& ex) {
    return std::string("detector model malformed: ") + ex.what();
  }
  if (model.threshold <= 0.0 || model.threshold >= 1.0) {
    return std::string("detector threshold must be in (0,1)");
  }
  if (model.stats.stdev[0] <= 0.0 || model.stats.stdev[1] <= 0.0) {
    return std::string("detector feature stdev must be positive");
  }
  return model;
}

}  // namespace tqa
