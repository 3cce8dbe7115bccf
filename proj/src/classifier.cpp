#include "linetrust/classifier.hpp"

#include <cmath>
#include <numeric>

#include "linetrust/error.hpp"
#include "linetrust/random.hpp"

namespace linetrust {

Classification classify_line(const LineClassifier& model, std::string_view normalized_line) {
  if (normalized_line.find_first_not_of(" \t") == std::string_view::npos) {
    throw Error(ErrorKind::Precondition, "cannot classify an empty line");
  }
  double s = model.score(normalized_line);
  return {s >= model.threshold() ? 1 : 0, s};
}

int ensemble_vote(std::span<const int> votes) {
  if (votes.empty()) throw Error(ErrorKind::UndefinedInput, "ensemble vote over zero classifiers");
  std::size_t ones = 0;
  for (int v : votes) ones += v != 0 ? 1 : 0;
  // sum/K >= 0.5 without floating point
  return 2 * ones >= votes.size() ? 1 : 0;
}

std::map<LineId, BenignVerdict> benign_candidates(const Ensemble& ensemble,
                                                  const Explanation& expl,
                                                  const std::map<LineId, std::string>& line_text) {
  std::map<LineId, BenignVerdict> out;
  for (const auto& entry : expl.entries) {
    auto it = line_text.find(entry.line);
    if (it == line_text.end()) continue;
    BenignVerdict verdict{entry.line, {}, false};
    for (const auto& model : ensemble) {
      try {
        verdict.votes.push_back(classify_line(*model, it->second).vote);
      } catch (const AdapterError& e) {
        throw AdapterError("line " + std::to_string(entry.line.value()) + ": " + e.what(),
                           e.raw_response());
      } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(entry.line.value()) + ": " + e.what());
      }
    }
    verdict.is_benign_candidate = ensemble_vote(verdict.votes) == 1;
    out.emplace(entry.line, std::move(verdict));
  }
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(const FeatureVector& x, const std::vector<double>& w) {
  double s = 0.0;
  for (auto [id, v] : x.entries) s += w[id] * v;
  return s;
}

double target(LineLabel label) { return label == LineLabel::NonVulnerable ? 1.0 : 0.0; }

}  // namespace

LinearClassifier::LinearClassifier(FeatureView view, Vocabulary vocab,
                                   std::vector<double> weights, double bias,
                                   double threshold, std::uint64_t seed,
                                   TrainingReport report)
    : view_(view),
      vocab_(std::move(vocab)),
      weights_(std::move(weights)),
      bias_(bias),
      threshold_(threshold),
      seed_(seed),
      report_(report) {
  if (weights_.size() != vocab_.size()) {
    throw Error(ErrorKind::Schema, "classifier weights do not match its vocabulary");
  }
}

double LinearClassifier::score(std::string_view normalized_line) const {
  return sigmoid(dot(featurize(view_, vocab_, normalized_line), weights_) + bias_);
}

Json LinearClassifier::to_json() const {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "linear";
  doc["view"] = to_string(view_);
  doc["seed"] = seed_;
  doc["threshold"] = threshold_;
  doc["bias"] = bias_;
  doc["train_size"] = report_.train_size;
  doc["heldout_size"] = report_.heldout_size;
  doc["train_accuracy"] = report_.train_accuracy;
  doc["heldout_accuracy"] =
      report_.heldout_accuracy ? Json(*report_.heldout_accuracy) : Json(nullptr);
  doc["vocabulary"] = vocab_.names();
  doc["weights"] = weights_;
  return doc;
}

LinearClassifier LinearClassifier::from_json(const Json& doc) {
  check_schema_version(doc, "classifier");
  try {
    if (doc.at("kind").get<std::string>() != "linear") {
      throw Error(ErrorKind::Schema, "not a linear classifier document");
    }
    TrainingReport report;
    report.train_size = doc.value("train_size", std::size_t{0});
    report.heldout_size = doc.value("heldout_size", std::size_t{0});
    report.train_accuracy = doc.value("train_accuracy", 0.0);
    if (doc.contains("heldout_accuracy") && !doc["heldout_accuracy"].is_null()) {
      report.heldout_accuracy = doc["heldout_accuracy"].get<double>();
    }
    return LinearClassifier(feature_view_from_string(doc.at("view").get<std::string>()),
                            Vocabulary(doc.at("vocabulary").get<std::vector<std::string>>()),
                            doc.at("weights").get<std::vector<double>>(),
                            doc.at("bias").get<double>(), doc.at("threshold").get<double>(),
                            doc.at("seed").get<std::uint64_t>(), report);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("classifier: ") + e.what());
  }
}

LinearClassifier train_classifier(const std::vector<LineSample>& samples, FeatureView view,
                                  const TrainingConfig& config) {
  std::size_t positives = 0;
  for (const auto& s : samples) positives += s.label() == LineLabel::NonVulnerable ? 1 : 0;
  if (positives == 0 || positives == samples.size()) {
    throw Error(ErrorKind::DegenerateTraining,
                "training data needs both vulnerable and non-vulnerable lines");
  }

  Rng rng(config.seed);

  // Stratified hold-out drawn from one shuffled order, so the split does not
  // depend on which label is called which.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t counts[2] = {samples.size() - positives, positives};
  std::size_t quota[2] = {
      static_cast<std::size_t>(std::floor(config.heldout_fraction * counts[0])),
      static_cast<std::size_t>(std::floor(config.heldout_fraction * counts[1]))};
  std::vector<std::size_t> train, heldout;
  for (std::size_t idx : order) {
    int cls = samples[idx].label() == LineLabel::NonVulnerable ? 1 : 0;
    if (quota[cls] > 0) {
      --quota[cls];
      heldout.push_back(idx);
    } else {
      train.push_back(idx);
    }
  }

  std::vector<std::string> texts;
  texts.reserve(train.size());
  for (std::size_t idx : train) texts.push_back(samples[idx].text());
  Vocabulary vocab = Vocabulary::build(view, texts, config.max_features);

  std::vector<FeatureVector> xs(samples.size());
  for (std::size_t idx : order) xs[idx] = featurize(view, vocab, samples[idx].text());

  // Class-balanced sample weights.
  std::size_t train_pos = 0;
  for (std::size_t idx : train) train_pos += samples[idx].label() == LineLabel::NonVulnerable;
  const double n = static_cast<double>(train.size());
  const double w_pos = n / (2.0 * static_cast<double>(std::max<std::size_t>(train_pos, 1)));
  const double w_neg = n / (2.0 * static_cast<double>(std::max<std::size_t>(train.size() - train_pos, 1)));

  std::vector<double> w(vocab.size(), 0.0);
  double b = 0.0;
  std::vector<std::size_t> epoch_order = train;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(epoch_order);
    const double lr = config.learning_rate / std::sqrt(1.0 + epoch);
    for (std::size_t idx : epoch_order) {
      const FeatureVector& x = xs[idx];
      const double y = target(samples[idx].label());
      const double sw = y > 0.5 ? w_pos : w_neg;
      const double g = sw * (sigmoid(dot(x, w) + b) - y);
      for (auto [id, v] : x.entries) w[id] -= lr * (g * v + config.l2 * w[id]);
      b -= lr * g;
    }
  }

  auto accuracy = [&](const std::vector<std::size_t>& idxs) {
    std::size_t ok = 0;
    for (std::size_t idx : idxs) {
      int vote = sigmoid(dot(xs[idx], w) + b) >= config.threshold ? 1 : 0;
      ok += vote == static_cast<int>(target(samples[idx].label())) ? 1 : 0;
    }
    return static_cast<double>(ok) / static_cast<double>(idxs.size());
  };

  TrainingReport report;
  report.train_size = train.size();
  report.heldout_size = heldout.size();
  report.train_accuracy = accuracy(train);
  if (!heldout.empty()) report.heldout_accuracy = accuracy(heldout);
  return LinearClassifier(view, std::move(vocab), std::move(w), b, config.threshold,
                          config.seed, report);
}

}  // namespace linetrust
