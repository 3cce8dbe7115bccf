#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linetrust/features.hpp"
#include "linetrust/line_dataset.hpp"
#include "linetrust/pdg.hpp"
#include "linetrust/serialize.hpp"

namespace linetrust {

// A binary line classifier. score() estimates how much a normalized line
// resembles non-vulnerable code; implementations must be safe to call from
// several threads at once.
class LineClassifier {
public:
  virtual ~LineClassifier() = default;

  virtual double score(std::string_view normalized_line) const = 0;
  virtual double threshold() const = 0;
  virtual std::string name() const = 0;
};

struct Classification {
  int vote;      // 1 = benign candidate
  double score;  // in [0,1]
};

// vote = 1 iff score >= threshold. Empty lines violate the precondition.
Classification classify_line(const LineClassifier& model, std::string_view normalized_line);

using Ensemble = std::vector<std::shared_ptr<const LineClassifier>>;

// Majority vote: 1 iff (sum of votes) / K >= 0.5.
int ensemble_vote(std::span<const int> votes);

struct BenignVerdict {
  LineId line;
  std::vector<int> votes;
  bool is_benign_candidate;
};

// One verdict per explanation line that has text in `line_text` (lines the
// PDG does not contain are skipped). Classifier failures are rethrown with
// the offending line attached.
std::map<LineId, BenignVerdict> benign_candidates(const Ensemble& ensemble,
                                                  const Explanation& expl,
                                                  const std::map<LineId, std::string>& line_text);

struct TrainingConfig {
  std::uint64_t seed = 1;
  int epochs = 30;
  double learning_rate = 0.5;
  double l2 = 1e-5;
  double heldout_fraction = 0.1;
  double threshold = 0.5;
  std::size_t max_features = 50000;
};

struct TrainingReport {
  std::size_t train_size = 0;
  std::size_t heldout_size = 0;
  double train_accuracy = 0.0;
  std::optional<double> heldout_accuracy;  // absent when nothing was held out
};

// Logistic regression over one feature view. The benign (NonVulnerable)
// class is the positive one.
class LinearClassifier final : public LineClassifier {
public:
  LinearClassifier(FeatureView view, Vocabulary vocab, std::vector<double> weights,
                   double bias, double threshold, std::uint64_t seed, TrainingReport report);

  double score(std::string_view normalized_line) const override;
  double threshold() const override { return threshold_; }
  std::string name() const override { return to_string(view_); }

  FeatureView view() const noexcept { return view_; }
  const TrainingReport& report() const noexcept { return report_; }

  Json to_json() const;
  static LinearClassifier from_json(const Json& doc);

private:
  FeatureView view_;
  Vocabulary vocab_;
  std::vector<double> weights_;
  double bias_;
  double threshold_;
  std::uint64_t seed_;
  TrainingReport report_;
};

// Deterministic given (samples, view, config). Throws DegenerateTraining when
// only one label is present.
LinearClassifier train_classifier(const std::vector<LineSample>& samples, FeatureView view,
                                  const TrainingConfig& config);

}  // namespace linetrust
