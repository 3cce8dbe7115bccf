#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "linetrust/error.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/tokenizer.hpp"

namespace linetrust {

namespace {

std::string id_string(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorKind::Import, "node ids must be strings or integers");
}

}  // namespace

ImportResult import_raw_graph(const Json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw Error(ErrorKind::Import, "graph export has no 'nodes' array");
  }
  ImportResult result;
  result.graph.function_name = doc.value("function", std::string{});
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const Json& jn = doc["nodes"][i];
    if (!jn.is_object() || !jn.contains("id")) {
      throw Error(ErrorKind::Import, "node #" + std::to_string(i) + " has no id");
    }
    std::string id = id_string(jn["id"]);
    const Json* line = jn.contains("lineNumber") ? &jn["lineNumber"]
                       : jn.contains("line")     ? &jn["line"]
                                                 : nullptr;
    if (line == nullptr || !line->is_number_integer() || line->get<long long>() < 1) {
      throw Error(ErrorKind::Import, "node " + id + " has no usable lineNumber");
    }
    if (!ids.insert(id).second) {
      throw Error(ErrorKind::Import, "duplicate node id " + id);
    }
    result.graph.nodes.push_back({id, LineId(static_cast<std::uint32_t>(line->get<long long>())),
                                  jn.value("code", std::string{})});
  }
  if (!doc.contains("edges")) return result;
  for (const Json& je : doc["edges"]) {
    std::string label = je.value("label", std::string{});
    DepKind kind;
    if (label == "CDG") {
      kind = DepKind::Control;
    } else if (label == "REACHING_DEF" || label == "DDG") {
      kind = DepKind::Data;
    } else {
      ++result.dropped_edges;
      continue;
    }
    std::string src = id_string(je.at("src"));
    std::string dst = id_string(je.at("dst"));
    if (!ids.contains(src) || !ids.contains(dst)) {
      throw Error(ErrorKind::Import, "edge " + src + "->" + dst + " references an unknown node");
    }
    std::optional<std::string> var;
    if (kind == DepKind::Data) {
      if (!je.contains("variable") || !je["variable"].is_string() ||
          je["variable"].get<std::string>().empty()) {
        throw Error(ErrorKind::Import, "data edge " + src + "->" + dst + " has no variable");
      }
      var = je["variable"].get<std::string>();
    }
    result.graph.edges.push_back({src, dst, kind, var});
  }
  return result;
}

Json export_raw_graph(const RawDepGraph& raw) {
  Json doc;
  doc["function"] = raw.function_name;
  Json nodes = Json::array();
  for (const auto& n : raw.nodes) {
    nodes.push_back(Json{{"id", n.id}, {"lineNumber", n.line.value()}, {"code", n.code}});
  }
  doc["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& e : raw.edges) {
    Json je{{"src", e.src},
            {"dst", e.dst},
            {"label", e.kind == DepKind::Control ? "CDG" : "REACHING_DEF"}};
    if (e.variable) je["variable"] = *e.variable;
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  return doc;
}

Pdg merge_line_nodes(const RawDepGraph& raw, std::string_view source,
                     std::string function_id) {
  std::map<std::string, LineId> line_of;
  std::map<LineId, std::string> code_on_line;
  for (const auto& n : raw.nodes) {
    if (!line_of.emplace(n.id, n.line).second) {
      throw Error(ErrorKind::Import, "duplicate node id " + n.id);
    }
    auto& code = code_on_line[n.line];
    if (!code.empty()) code += ' ';
    code += n.code;
  }

  Pdg pdg;
  pdg.function_id = std::move(function_id);
  std::set<PdgEdge> edges;
  for (const auto& e : raw.edges) {
    auto s = line_of.find(e.src);
    auto d = line_of.find(e.dst);
    if (s == line_of.end() || d == line_of.end()) {
      throw Error(ErrorKind::Import, "edge " + e.src + "->" + e.dst + " references an unknown node");
    }
    edges.insert({s->second, d->second, e.kind, e.variable});
  }
  pdg.edges.assign(edges.begin(), edges.end());

  std::vector<std::string> lines;
  if (!source.empty()) lines = split_lines(strip_comments(source));
  for (const auto& [line, code] : code_on_line) {
    pdg.nodes.push_back(line);
    std::string text = line.value() <= lines.size() ? normalize_line(lines[line.value() - 1])
                                                    : normalize_line(code);
    if (text.empty()) text = normalize_line(code);
    pdg.line_vars[line] = extract_variables(text);
    pdg.line_text[line] = std::move(text);
  }
  return pdg;
}

}  // namespace linetrust
