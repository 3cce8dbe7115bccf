#include "linetrust/report.hpp"

#include <cstdio>
#include <sstream>

#include "linetrust/error.hpp"

namespace linetrust {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

Json assessment_to_json(const Assessment& a) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "assessment";
  doc["function_id"] = a.function_id;
  doc["trust_score"] = a.trust_score;
  doc["threshold"] = a.threshold_used;
  doc["verdict"] = to_string(a.verdict);
  doc["degenerate"] = a.degenerate;
  doc["confidence"] = a.explanation.confidence;

  std::map<LineId, const ReachRecord*> reach;
  for (const auto& r : a.records) reach.emplace(r.line, &r);
  std::vector<LineId> lines;
  for (const auto& e : a.explanation.entries) {
    if (a.weighted.pdg.has_node(e.line)) lines.push_back(e.line);
  }
  std::sort(lines.begin(), lines.end());

  Json jl = Json::array();
  for (LineId l : lines) {
    Json j;
    j["line"] = l.value();
    j["text"] = a.weighted.pdg.text_at(l);
    j["weight"] = a.weighted.weight_of(l);
    auto v = a.benign.find(l);
    j["votes"] = v != a.benign.end() ? Json(v->second.votes) : Json::array();
    bool benign = v != a.benign.end() && v->second.is_benign_candidate;
    j["benign"] = benign;
    j["distance"] = nullptr;
    j["target"] = nullptr;
    j["contribution"] = 0.0;
    if (auto it = reach.find(l); it != reach.end()) {
      const ReachRecord& r = *it->second;
      if (r.distance.is_finite()) {
        j["distance"] = r.distance.hops();
        j["target"] = r.target->value();
        j["contribution"] = (a.weighted.weight_of(l) + *r.target_score) / r.distance.hops();
      } else {
        j["distance"] = "inf";
      }
    }
    jl.push_back(std::move(j));
  }
  doc["lines"] = std::move(jl);
  Json dropped = Json::array();
  for (LineId l : a.weighted.dropped) dropped.push_back(l.value());
  doc["dropped_lines"] = std::move(dropped);
  doc["warnings"] = a.warnings;
  return doc;
}

std::string render_assessment(const Json& doc) {
  check_schema_version(doc, "assessment");
  std::ostringstream out;
  try {
    out << "== " << doc.at("function_id").get<std::string>() << "\n";
    out << pad("line", 6) << pad("weight", 9) << pad("votes", 9) << pad("benign", 8)
        << pad("dist", 6) << pad("target", 8) << pad("contrib", 9) << "text\n";
    for (const auto& j : doc.at("lines")) {
      std::string votes;
      for (const auto& v : j.at("votes")) votes += std::to_string(v.get<int>());
      std::string dist = "-";
      if (j["distance"].is_number()) dist = std::to_string(j["distance"].get<long long>());
      else if (j["distance"].is_string()) dist = "inf";
      std::string target = j["target"].is_number() ? std::to_string(j["target"].get<long long>()) : "-";
      out << pad(std::to_string(j.at("line").get<long long>()), 6)
          << pad(fixed(j.at("weight").get<double>()), 9) << pad(votes.empty() ? "-" : votes, 9)
          << pad(j.at("benign").get<bool>() ? "yes" : "no", 8) << pad(dist, 6) << pad(target, 8)
          << pad(fixed(j.at("contribution").get<double>()), 9)
          << j.at("text").get<std::string>() << "\n";
    }
    out << "T = " << fixed(doc.at("trust_score").get<double>(), 6)
        << "  threshold = " << fixed(doc.at("threshold").get<double>(), 6)
        << "  verdict = " << doc.at("verdict").get<std::string>();
    if (doc.value("degenerate", false)) out << "  (no benign candidates)";
    out << "\n";
    for (const auto& w : doc.value("warnings", Json::array())) {
      out << "warning: " << w.get<std::string>() << "\n";
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("assessment: ") + ex.what());
  }
  return out.str();
}

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json metrics_table_to_json(const MetricsTable& t) {
  Json doc;
  doc["iou_threshold"] = t.iou_threshold;
  doc["trust_threshold"] = t.trust_threshold;
  doc["naive_threshold"] = t.naive_threshold;
  doc["trust_calibrated"] = t.trust_calibrated;
  doc["naive_calibrated"] = t.naive_calibrated;
  doc["degenerate"] = t.degenerate;
  doc["evaluated"] = t.evaluated;
  doc["untrustworthy"] = t.untrustworthy;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back(Json{{"method", r.method},
                        {"tp", r.cm.tp},
                        {"fp", r.cm.fp},
                        {"tn", r.cm.tn},
                        {"fn", r.cm.fn},
                        {"accuracy", opt(r.accuracy)},
                        {"auc", opt(r.auc)},
                        {"precision", opt(r.precision)},
                        {"sensitivity", opt(r.sensitivity)},
                        {"f1", opt(r.f1)},
                        {"specificity", opt(r.specificity)},
                        {"gmean", opt(r.gmean)}});
  }
  doc["rows"] = std::move(rows);
  doc["warnings"] = t.warnings;
  return doc;
}

Json eval_report_to_json(const EvalReport& r) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "evaluation";
  doc["top_k"] = r.top_k;
  Json skipped = Json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back(Json{{"record", s.index}, {"function_id", s.function_id}, {"reason", s.reason}});
  }
  doc["skipped"] = std::move(skipped);
  doc["table"] = metrics_table_to_json(r.main);
  Json sweep = Json::array();
  for (const auto& t : r.sweep) sweep.push_back(metrics_table_to_json(t));
  doc["sweep"] = std::move(sweep);
  Json records = Json::array();
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    Json j;
    j["function_id"] = rec.function_id;
    j["iou"] = rec.iou;
    j["gt_label"] = to_string(rec.gt_label);
    j["calibration"] = i < r.in_calibration.size() && r.in_calibration[i];
    Json scores, verdicts;
    for (const auto& [m, s] : rec.scores) scores[m] = s;
    for (const auto& [m, v] : rec.verdicts) verdicts[m] = to_string(v);
    j["scores"] = std::move(scores);
    j["verdicts"] = std::move(verdicts);
    records.push_back(std::move(j));
  }
  doc["records"] = std::move(records);
  return doc;
}

std::string render_metrics_table(const MetricsTable& t) {
  std::ostringstream out;
  out << "IoU threshold " << fixed(t.iou_threshold, 2) << ", " << t.evaluated << " evaluated, "
      << t.untrustworthy << " untrustworthy\n";
  out << pad("method", 10);
  for (const char* h : {"Acc", "AUC", "Pre", "Sen", "F1", "Spe", "Gm"}) out << lpad(h, 8);
  out << lpad("thresh", 10) << "\n";
  for (const auto& r : t.rows) {
    out << pad(r.method, 10);
    for (const auto& v : {r.accuracy, r.auc, r.precision, r.sensitivity, r.f1, r.specificity, r.gmean}) {
      out << lpad(v ? fixed(*v, 3) : "-", 8);
    }
    double th = r.method == kTrustMethod ? t.trust_threshold : t.naive_threshold;
    out << lpad(fixed(th, 4), 10) << "\n";
  }
  for (const auto& w : t.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace linetrust
