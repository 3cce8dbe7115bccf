#include "linetrust/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "linetrust/error.hpp"

namespace linetrust {

namespace {

std::uint32_t as_line(const Json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw Error(ErrorKind::Schema, what + " must be a positive integer");
  }
  return static_cast<std::uint32_t>(v.get<long long>());
}

}  // namespace

void check_schema_version(const Json& doc, const std::string& what) {
  if (!doc.is_object() || !doc.contains("schema_version") ||
      !doc["schema_version"].is_string()) {
    throw Error(ErrorKind::Schema, what + ": missing schema_version");
  }
  std::string version = doc["schema_version"].get<std::string>();
  std::string major = version.substr(0, version.find('.'));
  std::string ours(kSchemaVersion);
  if (major != ours.substr(0, ours.find('.'))) {
    throw Error(ErrorKind::Schema,
                what + ": unsupported schema version " + version);
  }
}

Json pdg_to_json(const Pdg& pdg) {
  std::vector<LineId> nodes = pdg.nodes;
  std::sort(nodes.begin(), nodes.end());
  std::vector<PdgEdge> edges = pdg.edges;
  std::sort(edges.begin(), edges.end());

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["function_id"] = pdg.function_id;
  Json jnodes = Json::array();
  for (LineId n : nodes) {
    Json vars = Json::array();
    for (const auto& v : pdg.vars_at(n)) vars.push_back(v);
    jnodes.push_back(Json{{"line", n.value()}, {"text", pdg.text_at(n)},
                          {"vars", std::move(vars)}});
  }
  doc["nodes"] = std::move(jnodes);
  Json jedges = Json::array();
  for (const auto& e : edges) {
    Json je{{"src", e.src.value()}, {"dst", e.dst.value()},
            {"kind", to_string(e.kind)}};
    je["var"] = e.variable ? Json(*e.variable) : Json(nullptr);
    jedges.push_back(std::move(je));
  }
  doc["edges"] = std::move(jedges);
  return doc;
}

Pdg pdg_from_json(const Json& doc) {
  check_schema_version(doc, "pdg");
  Pdg pdg;
  try {
    pdg.function_id = doc.at("function_id").get<std::string>();
    for (const auto& jn : doc.at("nodes")) {
      LineId line(as_line(jn.at("line"), "node line"));
      pdg.nodes.push_back(line);
      pdg.line_text[line] = jn.value("text", std::string{});
      std::set<std::string> vars;
      if (jn.contains("vars")) {
        for (const auto& v : jn["vars"]) vars.insert(v.get<std::string>());
      }
      pdg.line_vars[line] = std::move(vars);
    }
    for (const auto& je : doc.at("edges")) {
      PdgEdge e{LineId(as_line(je.at("src"), "edge src")),
                LineId(as_line(je.at("dst"), "edge dst")),
                dep_kind_from_string(je.at("kind").get<std::string>()),
                std::nullopt};
      if (je.contains("var") && !je["var"].is_null()) {
        e.variable = je["var"].get<std::string>();
      }
      pdg.edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("pdg: ") + ex.what());
  }
  return pdg;
}

Json explanation_to_json(const Explanation& expl) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["function_id"] = expl.function_id;
  doc["confidence"] = expl.confidence;
  Json entries = Json::array();
  for (const auto& e : expl.entries) {
    entries.push_back(Json{{"line", e.line.value()}, {"score", e.score}});
  }
  doc["entries"] = std::move(entries);
  return doc;
}

std::vector<ExplanationEntry> explanation_entries_from_json(const Json& entries) {
  std::vector<ExplanationEntry> out;
  if (!entries.is_array()) {
    throw Error(ErrorKind::Schema, "explanation entries must be an array");
  }
  try {
    for (const auto& je : entries) {
      if (je.is_array()) {
        if (je.size() != 2) {
          throw Error(ErrorKind::Schema, "explanation pair must be [line, score]");
        }
        out.push_back({LineId(as_line(je[0], "explanation line")),
                       je[1].get<double>()});
      } else {
        out.push_back({LineId(as_line(je.at("line"), "explanation line")),
                       je.at("score").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("explanation: ") + ex.what());
  }
  return out;
}

Explanation explanation_from_json(const Json& doc) {
  check_schema_version(doc, "explanation");
  Explanation expl;
  try {
    expl.function_id = doc.value("function_id", std::string{});
    expl.confidence = doc.value("confidence", 0.0);
    expl.entries = explanation_entries_from_json(doc.at("entries"));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("explanation: ") + ex.what());
  }
  return expl;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace linetrust
