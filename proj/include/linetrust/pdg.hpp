#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace linetrust {

// 1-based line number inside one function's source text.
class LineId {
public:
  explicit LineId(std::uint32_t value);

  std::uint32_t value() const noexcept { return value_; }

  auto operator<=>(const LineId&) const = default;

private:
  std::uint32_t value_;
};

enum class DepKind { Control, Data };

std::string to_string(DepKind kind);
DepKind dep_kind_from_string(const std::string& text);

struct PdgEdge {
  LineId src;
  LineId dst;
  DepKind kind;
  std::optional<std::string> variable;  // set iff kind == Data

  bool is_self_loop() const noexcept { return src == dst; }

  auto operator<=>(const PdgEdge&) const = default;
};

// Line-level program dependence graph: one node per source line.
struct Pdg {
  std::string function_id;
  std::vector<LineId> nodes;
  std::vector<PdgEdge> edges;
  std::map<LineId, std::string> line_text;
  std::map<LineId, std::set<std::string>> line_vars;

  bool has_node(LineId line) const;
  const std::set<std::string>& vars_at(LineId line) const;
  std::string text_at(LineId line) const;
};

enum class ViolationKind {
  DanglingEndpoint,
  DuplicateNode,
  MissingVariable,
  UnexpectedVariable,
  StrayLineVars,
};

std::string to_string(ViolationKind kind);

struct PdgViolation {
  ViolationKind kind;
  std::string detail;
};

// Every invariant violation found in `pdg`; empty iff the graph is well-formed.
std::vector<PdgViolation> validate_pdg(const Pdg& pdg);

struct ExplanationEntry {
  LineId line;
  double score;
};

// Output of an explainer: scored suspicious lines plus the detector's confidence.
struct Explanation {
  std::string function_id;
  double confidence = 0.0;
  std::vector<ExplanationEntry> entries;
};

// Throws MalformedExplanation on duplicate lines, negative or non-finite
// scores, or a confidence outside [0,1].
void check_explanation(const Explanation& expl);

struct WeightedPdg {
  Pdg pdg;
  std::map<LineId, double> weights;
  std::vector<LineId> dropped;  // explanation lines with no PDG node

  double weight_of(LineId line) const;
};

WeightedPdg build_weighted_pdg(const Pdg& pdg, const Explanation& expl,
                               bool normalize_weights = true);

}  // namespace linetrust
