#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linetrust/classifier.hpp"
#include "linetrust/pdg.hpp"

namespace linetrust {

struct BenignSet {
  std::string function_id;
  std::set<LineId> members;

  bool contains(LineId line) const { return members.contains(line); }
};

BenignSet benign_set_from(const std::string& function_id,
                          const std::map<LineId, BenignVerdict>& verdicts);

// How the data-dependency rule decides that an edge's variable is involved
// at the non-benign line it leads to.
enum class DataRuleMode {
  Direct,          // variable appears at the target line
  TransitiveFlow,  // target reached through data edges only, carrying the flow
};

std::string to_string(DataRuleMode mode);
DataRuleMode data_rule_mode_from_string(const std::string& text);

// Edge count of a shortest path, or infinity.
class Distance {
public:
  static Distance infinite() { return Distance(); }
  static Distance of(std::uint32_t hops) { return Distance(hops); }

  bool is_finite() const noexcept { return hops_.has_value(); }
  std::uint32_t hops() const;

  bool operator==(const Distance&) const = default;

private:
  Distance() = default;
  explicit Distance(std::uint32_t h) : hops_(h) {}
  std::optional<std::uint32_t> hops_;
};

// Precomputes which edges of a weighted PDG are vulnerable dependencies for a
// given benign set, and answers shortest-path queries over that subgraph.
class DependencyAnalysis {
public:
  DependencyAnalysis(const WeightedPdg& g, const BenignSet& benign,
                     DataRuleMode mode = DataRuleMode::Direct);

  const WeightedPdg& graph() const noexcept { return *g_; }
  const BenignSet& benign() const noexcept { return *benign_; }

  // Throws UnknownEdge when `edge` is not in the graph.
  bool is_vulnerable(const PdgEdge& edge) const;

  // BFS from `start` over vulnerable non-self-loop edges, distances to every
  // reachable node.
  std::map<LineId, std::uint32_t> distances_from(LineId start) const;

private:
  std::size_t index_of(LineId line) const;

  const WeightedPdg* g_;
  const BenignSet* benign_;
  std::vector<LineId> nodes_;
  std::map<LineId, std::size_t> index_;
  std::vector<bool> vulnerable_;  // parallel to g_->pdg.edges
  std::vector<std::vector<std::size_t>> vulnerable_out_;
};

bool is_vulnerable_dependency(const PdgEdge& edge, const WeightedPdg& g, const BenignSet& benign,
                              DataRuleMode mode = DataRuleMode::Direct);

// Shortest all-vulnerable path from a benign candidate `start` to `target`.
// Throws Contract when start is not benign or equals target.
Distance reachability_distance(LineId start, LineId target, const WeightedPdg& g,
                               const BenignSet& benign,
                               DataRuleMode mode = DataRuleMode::Direct);

struct ReachRecord {
  LineId line;
  Distance distance;
  std::optional<LineId> target;
  std::optional<double> target_score;
};

// Nearest non-benign explanation line reachable from benign line `l`; ties on
// distance prefer the larger target weight, then the smaller line.
ReachRecord nearest_non_benign(LineId l, const Explanation& expl, const DependencyAnalysis& dep);
ReachRecord nearest_non_benign(LineId l, const Explanation& expl, const WeightedPdg& g,
                               const BenignSet& benign,
                               DataRuleMode mode = DataRuleMode::Direct);

struct TrustBreakdown {
  double score = 0.0;
  std::vector<ReachRecord> records;  // one per benign candidate, in line order
  bool degenerate = false;           // every resident line was non-benign
};

// Sum over benign candidates with a finite record of
// (own weight + target weight) / distance. When no resident explanation line
// is benign the score is the sum of resident weights instead.
TrustBreakdown trust_breakdown(const Explanation& expl, const DependencyAnalysis& dep);
double trust_score(const Explanation& expl, const WeightedPdg& g, const BenignSet& benign,
                   DataRuleMode mode = DataRuleMode::Direct);

enum class Verdict { Trustworthy, Untrustworthy };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& text);

struct AssessOptions {
  bool normalize_weights = true;
  DataRuleMode data_rule = DataRuleMode::Direct;
  std::size_t top_k = 0;  // 0 keeps every scored line
};

struct Assessment {
  std::string function_id;
  double trust_score = 0.0;
  std::vector<ReachRecord> records;
  std::map<LineId, BenignVerdict> benign;
  Verdict verdict = Verdict::Untrustworthy;
  double threshold_used = 0.0;
  bool degenerate = false;
  std::vector<std::string> warnings;
  WeightedPdg weighted;  // what the score was computed over
  Explanation explanation;
};

// Weighted PDG -> ensemble benign verdicts -> trust score -> verdict.
// Errors from each stage are rethrown prefixed with the stage name.
Assessment assess_prediction(const Explanation& expl, const Pdg& pdg, const Ensemble& ensemble,
                             double threshold, const AssessOptions& options = {});

}  // namespace linetrust
