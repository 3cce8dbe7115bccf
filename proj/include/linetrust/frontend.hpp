#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linetrust/pdg.hpp"
#include "linetrust/serialize.hpp"

namespace linetrust {

struct RawNode {
  std::string id;
  LineId line;
  std::string code;
};

struct RawEdge {
  std::string src;
  std::string dst;
  DepKind kind;
  std::optional<std::string> variable;
};

// Dependence graph before line merging: several nodes may share a line.
struct RawDepGraph {
  std::string function_name;
  std::vector<RawNode> nodes;
  std::vector<RawEdge> edges;
};

// Builds a statement-level dependence graph for one C function in the
// supported subset: declarations, expressions, calls, if/else, while, for,
// break/continue, return and blocks. Control dependences come from
// post-dominance over the CFG, data dependences from reaching definitions.
// Throws UnsupportedConstruct (switch, goto, do, labels, preprocessor) or
// Parse (unbalanced braces, missing body).
RawDepGraph parse_function(std::string_view source);

struct ImportResult {
  RawDepGraph graph;
  std::size_t dropped_edges = 0;  // edges whose label is neither CDG nor DDG
};

// Reads an exported graph; the accepted layout is documented in
// docs/import-schema.md.
ImportResult import_raw_graph(const Json& doc);
Json export_raw_graph(const RawDepGraph& raw);

// Collapses nodes sharing a line and deduplicates the resulting edges.
// Line text and variables come from `source` when given, otherwise from the
// node code.
Pdg merge_line_nodes(const RawDepGraph& raw, std::string_view source,
                     std::string function_id);

inline Pdg build_pdg(std::string_view source, std::string function_id) {
  return merge_line_nodes(parse_function(source), source, std::move(function_id));
}

}  // namespace linetrust
