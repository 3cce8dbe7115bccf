#include "linetrust/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "linetrust/error.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/random.hpp"

namespace linetrust {

double iou(const std::set<LineId>& suspicious, const std::set<LineId>& truth) {
  if (truth.empty()) {
    throw Error(ErrorKind::UndefinedGroundTruth, "IoU needs a non-empty ground-truth line set");
  }
  std::size_t inter = 0;
  for (LineId l : suspicious) inter += truth.contains(l) ? 1 : 0;
  std::size_t uni = suspicious.size() + truth.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<LineId> select_suspicious(const Explanation& expl, std::size_t k, const Pdg* pdg) {
  if (k == 0) throw Error(ErrorKind::Precondition, "k must be at least 1");
  std::vector<ExplanationEntry> eligible;
  for (const auto& e : expl.entries) {
    if (pdg == nullptr || pdg->has_node(e.line)) eligible.push_back(e);
  }
  std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.line < b.line;
  });
  std::set<LineId> out;
  for (std::size_t i = 0; i < eligible.size() && i < k; ++i) out.insert(eligible[i].line);
  return out;
}

Verdict label_ground_truth(double iou_value, double threshold) {
  return iou_value <= threshold ? Verdict::Untrustworthy : Verdict::Trustworthy;
}

std::vector<Verdict> naive_baseline(const std::vector<double>& confidences, double threshold) {
  std::vector<Verdict> out;
  out.reserve(confidences.size());
  for (double c : confidences) {
    out.push_back(c < threshold ? Verdict::Untrustworthy : Verdict::Trustworthy);
  }
  return out;
}

Confusion confusion(const std::vector<Verdict>& truth, const std::vector<Verdict>& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::Precondition, "label and prediction counts differ");
  }
  Confusion cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    bool pos = truth[i] == Verdict::Untrustworthy;
    bool pred = predicted[i] == Verdict::Untrustworthy;
    if (pos && pred) ++cm.tp;
    else if (!pos && pred) ++cm.fp;
    else if (!pos && !pred) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

MetricsRow metrics_from_confusion(const std::string& method, const Confusion& cm) {
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double tn = static_cast<double>(cm.tn), fn = static_cast<double>(cm.fn);
  MetricsRow row;
  row.method = method;
  row.cm = cm;
  row.accuracy = ratio(tp + tn, tp + fp + tn + fn);
  row.precision = ratio(tp, tp + fp);
  row.sensitivity = ratio(tp, tp + fn);
  row.specificity = ratio(tn, tn + fp);
  if (row.precision && row.sensitivity) {
    row.f1 = ratio(2.0 * *row.precision * *row.sensitivity, *row.precision + *row.sensitivity);
  }
  if (row.sensitivity && row.specificity) {
    row.gmean = std::sqrt(*row.sensitivity * *row.specificity);
  }
  return row;
}

std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<Verdict>& truth, Orientation orientation) {
  if (scores.size() != truth.size()) {
    throw Error(ErrorKind::Precondition, "score and label counts differ");
  }
  const std::size_t n = scores.size();
  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    key[i] = orientation == Orientation::HigherIsPositive ? scores[i] : -scores[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && key[order[j + 1]] == key[order[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double pos = 0, neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == Verdict::Untrustworthy) {
      pos += 1;
      rank_sum += rank[i];
    } else {
      neg += 1;
    }
  }
  if (pos == 0 || neg == 0) return std::nullopt;
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

MetricsRow compute_metrics(const std::vector<EvalRecord>& records, const std::string& method,
                           Orientation orientation) {
  if (records.empty()) throw Error(ErrorKind::Precondition, "no records to score");
  std::vector<Verdict> truth, predicted;
  std::vector<double> scores;
  for (const auto& r : records) {
    auto v = r.verdicts.find(method);
    auto s = r.scores.find(method);
    if (v == r.verdicts.end() || s == r.scores.end()) {
      throw Error(ErrorKind::Precondition,
                  "record " + r.function_id + " has no result for method " + method);
    }
    truth.push_back(r.gt_label);
    predicted.push_back(v->second);
    scores.push_back(s->second);
  }
  MetricsRow row = metrics_from_confusion(method, confusion(truth, predicted));
  row.auc = rank_auc(scores, truth, orientation);
  return row;
}

Verdict classify_score(double score, double threshold, Orientation orientation) {
  bool positive = orientation == Orientation::LowerIsPositive ? score < threshold : score > threshold;
  return positive ? Verdict::Untrustworthy : Verdict::Trustworthy;
}

Calibration calibrate_threshold(const std::vector<double>& scores,
                                const std::vector<Verdict>& labels, Orientation orientation) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::Precondition, "score and label counts differ");
  }
  bool has_pos = std::count(labels.begin(), labels.end(), Verdict::Untrustworthy) > 0;
  bool has_neg = std::count(labels.begin(), labels.end(), Verdict::Trustworthy) > 0;
  if (!has_pos || !has_neg) {
    throw Error(ErrorKind::Calibration, "calibration needs both labels present");
  }
  std::vector<double> distinct = scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) return {distinct.front(), 0.0, true};

  Calibration best{0.0, -1.0, false};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    double t = (distinct[i] + distinct[i + 1]) / 2.0;
    std::vector<Verdict> pred;
    pred.reserve(scores.size());
    for (double s : scores) pred.push_back(classify_score(s, t, orientation));
    double g = metrics_from_confusion("", confusion(labels, pred)).gmean.value_or(0.0);
    // Midpoints ascend, so strict improvement keeps the smaller one on ties.
    if (g > best.gmean) best = {t, g, false};
  }
  best.degenerate = best.gmean == 0.0;
  return best;
}

namespace {

struct Assessed {
  std::optional<SkippedFunction> skipped;
  std::string function_id;
  double trust = 0.0;
  double confidence = 0.0;
  double iou = 0.0;
};

Assessed assess_one(const FunctionRecord& rec, std::size_t index, const Ensemble& ensemble,
                    const EvalConfig& config) {
  Assessed out;
  out.function_id = rec.function_id;
  Pdg pdg;
  try {
    if (rec.graph) {
      pdg = merge_line_nodes(import_raw_graph(*rec.graph).graph, rec.source, rec.function_id);
    } else {
      pdg = build_pdg(rec.source, rec.function_id);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parse && e.kind() != ErrorKind::UnsupportedConstruct &&
        e.kind() != ErrorKind::Import) {
      throw;
    }
    out.skipped = SkippedFunction{index, rec.function_id, e.what()};
    return out;
  }
  AssessOptions opts = config.assess;
  opts.top_k = config.top_k;
  Assessment a = assess_prediction(*rec.explanation, pdg, ensemble, 0.0, opts);
  out.trust = a.trust_score;
  out.confidence = *rec.confidence;
  out.iou = iou(select_suspicious(*rec.explanation, config.top_k, &pdg), ground_truth_lines(rec));
  return out;
}

std::vector<Assessed> assess_all(const std::vector<FunctionRecord>& corpus,
                                 const Ensemble& ensemble, const EvalConfig& config) {
  std::vector<Assessed> results(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::size_t workers = config.workers != 0 ? config.workers
                                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(corpus.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        results[i] = assess_one(corpus[i], i + 1, ensemble, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "function " + corpus[i].function_id + ": " + e.what());
    }
  }
  return results;
}

struct Threshold {
  double value = 0.5;
  bool calibrated = false;
  bool degenerate = false;
};

Threshold pick_threshold(const std::optional<double>& fixed, const std::vector<double>& cal_scores,
                         const std::vector<Verdict>& cal_labels,
                         const std::vector<double>& all_scores,
                         const std::vector<Verdict>& all_labels, const std::string& method,
                         std::vector<std::string>& warnings) {
  if (fixed) return {*fixed, false, false};
  auto try_fit = [](const std::vector<double>& s,
                    const std::vector<Verdict>& l) -> std::optional<Calibration> {
    try {
      return calibrate_threshold(s, l, Orientation::LowerIsPositive);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto fit = try_fit(cal_scores, cal_labels);
  if (!fit) {
    warnings.push_back(method + ": calibration slice lacks both labels, calibrated on all records");
    fit = try_fit(all_scores, all_labels);
  }
  if (!fit) {
    warnings.push_back(method + ": corpus lacks both labels, threshold defaults to 0.5");
    return {0.5, false, true};
  }
  return {fit->threshold, true, fit->degenerate};
}

MetricsTable table_at(double iou_threshold, const std::vector<Assessed>& done,
                      const std::vector<bool>& in_cal, const EvalConfig& config,
                      std::vector<EvalRecord>* records_out) {
  MetricsTable table;
  table.iou_threshold = iou_threshold;
  std::vector<double> trust_cal, naive_cal, trust_all, naive_all;
  std::vector<Verdict> labels_cal, labels_all;
  for (std::size_t i = 0; i < done.size(); ++i) {
    Verdict gt = label_ground_truth(done[i].iou, iou_threshold);
    trust_all.push_back(done[i].trust);
    naive_all.push_back(done[i].confidence);
    labels_all.push_back(gt);
    if (in_cal[i]) {
      trust_cal.push_back(done[i].trust);
      naive_cal.push_back(done[i].confidence);
      labels_cal.push_back(gt);
    }
  }
  Threshold t = pick_threshold(config.trust_threshold, trust_cal, labels_cal, trust_all,
                               labels_all, kTrustMethod, table.warnings);
  Threshold c = pick_threshold(config.naive_threshold, naive_cal, labels_cal, naive_all,
                               labels_all, kNaiveMethod, table.warnings);
  table.trust_threshold = t.value;
  table.naive_threshold = c.value;
  table.trust_calibrated = t.calibrated;
  table.naive_calibrated = c.calibrated;
  table.degenerate = t.degenerate || c.degenerate;

  std::vector<EvalRecord> evaluated;
  for (std::size_t i = 0; i < done.size(); ++i) {
    EvalRecord r;
    r.function_id = done[i].function_id;
    r.iou = done[i].iou;
    r.gt_label = labels_all[i];
    r.scores[kTrustMethod] = done[i].trust;
    r.scores[kNaiveMethod] = done[i].confidence;
    r.verdicts[kTrustMethod] = classify_score(done[i].trust, t.value, Orientation::LowerIsPositive);
    r.verdicts[kNaiveMethod] = naive_baseline({done[i].confidence}, c.value).front();
    if (records_out) records_out->push_back(r);
    if (!in_cal[i]) evaluated.push_back(std::move(r));
  }
  table.evaluated = evaluated.size();
  for (const auto& r : evaluated) table.untrustworthy += r.gt_label == Verdict::Untrustworthy;
  if (evaluated.empty()) {
    table.degenerate = true;
    table.warnings.push_back("no records left to evaluate");
    return table;
  }
  if (evaluated.size() == 1) table.degenerate = true;
  table.rows.push_back(compute_metrics(evaluated, kTrustMethod));
  table.rows.push_back(compute_metrics(evaluated, kNaiveMethod));
  return table;
}

}  // namespace

EvalReport run_evaluation(const std::vector<FunctionRecord>& corpus, const Ensemble& ensemble,
                          const EvalConfig& config) {
  if (!(config.iou_threshold > 0.0 && config.iou_threshold <= 1.0)) {
    throw Error(ErrorKind::Precondition, "IoU threshold must lie in (0,1]");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& rec = corpus[i];
    std::string where = "record " + std::to_string(i + 1) + " (" + rec.function_id + ")";
    if (!rec.explanation) throw Error(ErrorKind::Schema, where + ": missing explanation");
    if (!rec.confidence) throw Error(ErrorKind::Schema, where + ": missing confidence");
    if (ground_truth_lines(rec).empty()) {
      throw Error(ErrorKind::UndefinedGroundTruth, where + ": no ground-truth vulnerable lines");
    }
  }

  EvalReport report;
  report.top_k = config.top_k;
  std::vector<Assessed> done;
  for (auto& a : assess_all(corpus, ensemble, config)) {
    if (a.skipped) {
      report.skipped.push_back(std::move(*a.skipped));
    } else {
      done.push_back(std::move(a));
    }
  }

  // Seeded calibration slice, only when some threshold has to be fitted.
  std::vector<bool> in_cal(done.size(), false);
  if (!config.trust_threshold || !config.naive_threshold) {
    auto n_cal = static_cast<std::size_t>(std::floor(config.calibration_fraction *
                                                     static_cast<double>(done.size())));
    if (n_cal < done.size()) {
      std::vector<std::size_t> order(done.size());
      std::iota(order.begin(), order.end(), 0);
      Rng rng(config.seed);
      rng.shuffle(order);
      for (std::size_t i = 0; i < n_cal; ++i) in_cal[order[i]] = true;
    }
  }
  report.in_calibration = in_cal;
  report.main = table_at(config.iou_threshold, done, in_cal, config, &report.records);
  for (double t : config.iou_sweep) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw Error(ErrorKind::Precondition, "IoU threshold must lie in (0,1]");
    }
    report.sweep.push_back(table_at(t, done, in_cal, config, nullptr));
  }
  return report;
}

}  // namespace linetrust
