#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linetrust/classifier.hpp"
#include "linetrust/corpus.hpp"
#include "linetrust/dep_assess.hpp"
#include "linetrust/pdg.hpp"

namespace linetrust {

// Throws UndefinedGroundTruth when `truth` is empty.
double iou(const std::set<LineId>& suspicious, const std::set<LineId>& truth);

// The k highest-scored lines (ties: smaller line first). With `pdg` only lines
// resident in it are eligible. k = 0 is a precondition violation.
std::set<LineId> select_suspicious(const Explanation& expl, std::size_t k,
                                   const Pdg* pdg = nullptr);

// Untrustworthy iff iou_value <= threshold.
Verdict label_ground_truth(double iou_value, double threshold);

// Untrustworthy iff confidence < threshold.
std::vector<Verdict> naive_baseline(const std::vector<double>& confidences, double threshold);

enum class Orientation { LowerIsPositive, HigherIsPositive };

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Positive class is Untrustworthy.
Confusion confusion(const std::vector<Verdict>& truth, const std::vector<Verdict>& predicted);

struct MetricsRow {
  std::string method;
  Confusion cm;
  std::optional<double> accuracy, auc, precision, sensitivity, f1, specificity, gmean;
};

// Every ratio metric; a zero denominator leaves the field empty. auc is left
// empty.
MetricsRow metrics_from_confusion(const std::string& method, const Confusion& cm);

// Rank-based AUC (average ranks for ties). Empty when one class is missing.
std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<Verdict>& truth, Orientation orientation);

struct EvalRecord {
  std::string function_id;
  double iou = 0.0;
  Verdict gt_label = Verdict::Untrustworthy;
  std::map<std::string, double> scores;
  std::map<std::string, Verdict> verdicts;
};

inline constexpr const char* kTrustMethod = "trust";
inline constexpr const char* kNaiveMethod = "naive";

// Classifies with the verdicts stored on the records. Records must be
// non-empty and all carry `method`.
MetricsRow compute_metrics(const std::vector<EvalRecord>& records, const std::string& method,
                           Orientation orientation = Orientation::LowerIsPositive);

struct Calibration {
  double threshold = 0.0;
  double gmean = 0.0;
  bool degenerate = false;  // no threshold separates anything
};

// Lower-is-positive classifies score < t as Untrustworthy, higher-is-positive
// score > t. Candidates are midpoints of consecutive distinct scores; the best
// G-mean wins, ties to the smaller threshold. Throws Calibration when only one
// label is present.
Calibration calibrate_threshold(const std::vector<double>& scores,
                                const std::vector<Verdict>& labels, Orientation orientation);

// Predicted label for `score` under a calibrated threshold.
Verdict classify_score(double score, double threshold, Orientation orientation);

struct EvalConfig {
  double iou_threshold = 0.5;
  std::vector<double> iou_sweep;  // extra tables, one per value
  std::optional<double> trust_threshold;
  std::optional<double> naive_threshold;
  std::size_t top_k = 10;
  AssessOptions assess;
  double calibration_fraction = 0.2;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: hardware concurrency
};

struct MetricsTable {
  double iou_threshold = 0.5;
  double trust_threshold = 0.0;
  double naive_threshold = 0.0;
  bool trust_calibrated = false;
  bool naive_calibrated = false;
  bool degenerate = false;
  std::size_t evaluated = 0;
  std::size_t untrustworthy = 0;  // ground-truth positives among evaluated
  std::vector<MetricsRow> rows;   // trust first, then naive
  std::vector<std::string> warnings;
};

struct SkippedFunction {
  std::size_t index;
  std::string function_id;
  std::string reason;
};

struct EvalReport {
  std::size_t top_k = 0;
  std::vector<EvalRecord> records;            // main threshold, input order
  std::vector<bool> in_calibration;           // parallel to records
  std::vector<SkippedFunction> skipped;
  MetricsTable main;
  std::vector<MetricsTable> sweep;
};

// Assesses every parseable function, labels ground truth at each IoU
// threshold and calibrates missing thresholds on a seeded slice.
EvalReport run_evaluation(const std::vector<FunctionRecord>& corpus, const Ensemble& ensemble,
                          const EvalConfig& config);

}  // namespace linetrust
