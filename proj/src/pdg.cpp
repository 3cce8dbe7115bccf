#include "linetrust/pdg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "linetrust/error.hpp"

namespace linetrust {

LineId::LineId(std::uint32_t value) : value_(value) {
  if (value == 0) {
    throw Error(ErrorKind::Precondition, "line numbers are 1-based; got 0");
  }
}

std::string to_string(DepKind kind) {
  return kind == DepKind::Control ? "control" : "data";
}

DepKind dep_kind_from_string(const std::string& text) {
  if (text == "control") return DepKind::Control;
  if (text == "data") return DepKind::Data;
  throw Error(ErrorKind::Schema, "unknown dependency kind '" + text + "'");
}

bool Pdg::has_node(LineId line) const {
  return std::find(nodes.begin(), nodes.end(), line) != nodes.end();
}

const std::set<std::string>& Pdg::vars_at(LineId line) const {
  static const std::set<std::string> none;
  auto it = line_vars.find(line);
  return it == line_vars.end() ? none : it->second;
}

std::string Pdg::text_at(LineId line) const {
  auto it = line_text.find(line);
  return it == line_text.end() ? std::string{} : it->second;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DanglingEndpoint: return "dangling-endpoint";
    case ViolationKind::DuplicateNode: return "duplicate-node";
    case ViolationKind::MissingVariable: return "missing-variable";
    case ViolationKind::UnexpectedVariable: return "unexpected-variable";
    case ViolationKind::StrayLineVars: return "stray-line-vars";
  }
  return "unknown";
}

std::vector<PdgViolation> validate_pdg(const Pdg& pdg) {
  std::vector<PdgViolation> out;
  std::set<LineId> seen;
  for (LineId n : pdg.nodes) {
    if (!seen.insert(n).second) {
      out.push_back({ViolationKind::DuplicateNode,
                     "line " + std::to_string(n.value()) + " appears twice"});
    }
  }
  for (const PdgEdge& e : pdg.edges) {
    std::string where = std::to_string(e.src.value()) + "->" +
                        std::to_string(e.dst.value());
    if (!seen.contains(e.src) || !seen.contains(e.dst)) {
      out.push_back({ViolationKind::DanglingEndpoint, "edge " + where});
    }
    if (e.kind == DepKind::Data && (!e.variable || e.variable->empty())) {
      out.push_back({ViolationKind::MissingVariable, "data edge " + where});
    }
    if (e.kind == DepKind::Control && e.variable) {
      out.push_back({ViolationKind::UnexpectedVariable, "control edge " + where});
    }
  }
  for (const auto& [line, vars] : pdg.line_vars) {
    if (!seen.contains(line)) {
      out.push_back({ViolationKind::StrayLineVars,
                     "line " + std::to_string(line.value())});
    }
  }
  return out;
}

void check_explanation(const Explanation& expl) {
  if (!std::isfinite(expl.confidence) || expl.confidence < 0.0 ||
      expl.confidence > 1.0) {
    throw Error(ErrorKind::MalformedExplanation,
                "confidence outside [0,1] for " + expl.function_id);
  }
  std::set<LineId> lines;
  for (const auto& entry : expl.entries) {
    if (!lines.insert(entry.line).second) {
      throw Error(ErrorKind::MalformedExplanation,
                  "line " + std::to_string(entry.line.value()) +
                      " scored twice in explanation of " + expl.function_id);
    }
    if (!std::isfinite(entry.score) || entry.score < 0.0) {
      throw Error(ErrorKind::MalformedExplanation,
                  "line " + std::to_string(entry.line.value()) +
                      " has a negative or non-finite score");
    }
  }
}

double WeightedPdg::weight_of(LineId line) const {
  auto it = weights.find(line);
  return it == weights.end() ? 0.0 : it->second;
}

WeightedPdg build_weighted_pdg(const Pdg& pdg, const Explanation& expl,
                               bool normalize_weights) {
  if (pdg.function_id != expl.function_id) {
    throw Error(ErrorKind::Identity, "explanation for '" + expl.function_id +
                                         "' does not match graph '" +
                                         pdg.function_id + "'");
  }
  check_explanation(expl);

  WeightedPdg out{pdg, {}, {}};
  std::set<LineId> nodes(pdg.nodes.begin(), pdg.nodes.end());
  double total = 0.0;
  for (const auto& entry : expl.entries) {
    if (nodes.contains(entry.line)) {
      out.weights.emplace(entry.line, entry.score);
      total += entry.score;
    } else {
      out.dropped.push_back(entry.line);
    }
  }
  std::sort(out.dropped.begin(), out.dropped.end());
  if (normalize_weights && total > 0.0) {
    for (auto& [line, w] : out.weights) w /= total;
  }
  return out;
}

}  // namespace linetrust
