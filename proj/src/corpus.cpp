#include "linetrust/corpus.hpp"

#include <sstream>

#include "linetrust/error.hpp"

namespace linetrust {

namespace {

[[noreturn]] void bad_record(std::size_t index, const std::string& why) {
  throw Error(ErrorKind::Schema, "record " + std::to_string(index) + ": " + why);
}

LineLabel parse_label(const Json& v, std::size_t index) {
  if (v.is_number_integer()) {
    auto n = v.get<long long>();
    if (n == 0 || n == 1) return n == 1 ? LineLabel::Vulnerable : LineLabel::NonVulnerable;
  } else if (v.is_string()) {
    try {
      return line_label_from_string(v.get<std::string>());
    } catch (const Error&) {
    }
  }
  bad_record(index, "label must be 0, 1, \"vulnerable\" or \"non-vulnerable\"");
}

}  // namespace

FunctionRecord function_record_from_json(const Json& doc, std::size_t index) {
  if (!doc.is_object()) bad_record(index, "not a JSON object");
  FunctionRecord rec;
  try {
    if (!doc.contains("function_id") || !doc["function_id"].is_string()) {
      bad_record(index, "missing string field 'function_id'");
    }
    if (!doc.contains("source") || !doc["source"].is_string()) {
      bad_record(index, "missing string field 'source'");
    }
    if (!doc.contains("label")) bad_record(index, "missing field 'label'");
    rec.function_id = doc["function_id"].get<std::string>();
    rec.source = doc["source"].get<std::string>();
    rec.label = parse_label(doc["label"], index);
    if (doc.contains("diff") && !doc["diff"].is_null()) rec.diff = doc["diff"].get<std::string>();
    if (doc.contains("vul_lines") && !doc["vul_lines"].is_null()) {
      std::set<LineId> lines;
      for (const auto& v : doc["vul_lines"]) {
        auto n = v.get<long long>();
        if (n < 1) bad_record(index, "vul_lines entries must be positive");
        lines.insert(LineId(static_cast<std::uint32_t>(n)));
      }
      rec.vul_lines = std::move(lines);
    }
    if (doc.contains("explanation") && !doc["explanation"].is_null()) {
      Explanation expl;
      expl.function_id = rec.function_id;
      expl.entries = explanation_entries_from_json(doc["explanation"]);
      expl.confidence = doc.value("confidence", 0.0);
      check_explanation(expl);
      rec.explanation = std::move(expl);
    }
    if (doc.contains("confidence") && !doc["confidence"].is_null()) {
      double c = doc["confidence"].get<double>();
      if (!(c >= 0.0 && c <= 1.0)) bad_record(index, "confidence must lie in [0,1]");
      rec.confidence = c;
    }
    if (doc.contains("graph") && !doc["graph"].is_null()) rec.graph = doc["graph"];
  } catch (const nlohmann::json::exception& ex) {
    bad_record(index, ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::Schema && std::string(ex.what()).rfind("record ", 0) == 0) throw;
    bad_record(index, ex.what());
  }
  return rec;
}

Json function_record_to_json(const FunctionRecord& rec) {
  Json doc;
  doc["function_id"] = rec.function_id;
  doc["source"] = rec.source;
  doc["label"] = to_string(rec.label);
  if (rec.diff) doc["diff"] = *rec.diff;
  if (rec.vul_lines) {
    Json lines = Json::array();
    for (LineId l : *rec.vul_lines) lines.push_back(l.value());
    doc["vul_lines"] = std::move(lines);
  }
  if (rec.explanation) {
    Json entries = Json::array();
    for (const auto& e : rec.explanation->entries) {
      entries.push_back(Json{{"line", e.line.value()}, {"score", e.score}});
    }
    doc["explanation"] = std::move(entries);
  }
  if (rec.confidence) doc["confidence"] = *rec.confidence;
  if (rec.graph) doc["graph"] = *rec.graph;
  return doc;
}

std::vector<FunctionRecord> parse_corpus(const std::string& jsonl) {
  std::vector<FunctionRecord> out;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++index;
    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      bad_record(index, std::string("invalid JSON: ") + ex.what());
    }
    out.push_back(function_record_from_json(doc, index));
  }
  return out;
}

std::vector<FunctionRecord> read_corpus(const std::string& path) {
  return parse_corpus(read_text_file(path));
}

std::set<LineId> ground_truth_lines(const FunctionRecord& rec) {
  if (rec.vul_lines) return *rec.vul_lines;
  if (rec.diff) return extract_vulnerable_lines(rec.source, *rec.diff);
  return {};
}

}  // namespace linetrust
