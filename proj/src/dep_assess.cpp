#include "linetrust/dep_assess.hpp"

#include <algorithm>
#include <deque>

#include "linetrust/error.hpp"
#include "linetrust/eval.hpp"

namespace linetrust {

BenignSet benign_set_from(const std::string& function_id,
                          const std::map<LineId, BenignVerdict>& verdicts) {
  BenignSet set{function_id, {}};
  for (const auto& [line, v] : verdicts) {
    if (v.is_benign_candidate) set.members.insert(line);
  }
  return set;
}

std::string to_string(DataRuleMode mode) {
  return mode == DataRuleMode::Direct ? "direct" : "transitive_flow";
}

DataRuleMode data_rule_mode_from_string(const std::string& text) {
  if (text == "direct") return DataRuleMode::Direct;
  if (text == "transitive_flow") return DataRuleMode::TransitiveFlow;
  throw Error(ErrorKind::Schema, "unknown data rule mode '" + text + "'");
}

std::uint32_t Distance::hops() const {
  if (!hops_) throw Error(ErrorKind::Contract, "infinite distance has no hop count");
  return *hops_;
}

namespace {

// Nodes reachable from `from` (itself included) following edges accepted by
// `keep`.
std::vector<bool> reachable(std::size_t from, const std::vector<std::vector<std::size_t>>& out,
                            const std::vector<PdgEdge>& edges,
                            const std::map<LineId, std::size_t>& index, bool data_only) {
  std::vector<bool> seen(out.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t ei : out[x]) {
      if (data_only && edges[ei].kind != DepKind::Data) continue;
      std::size_t y = index.at(edges[ei].dst);
      if (!seen[y]) {
        seen[y] = true;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

}  // namespace

DependencyAnalysis::DependencyAnalysis(const WeightedPdg& g, const BenignSet& benign,
                                       DataRuleMode mode)
    : g_(&g), benign_(&benign) {
  if (auto violations = validate_pdg(g.pdg); !violations.empty()) {
    throw Error(ErrorKind::Contract, "malformed PDG for " + g.pdg.function_id + ": " +
                                         to_string(violations.front().kind) + " " +
                                         violations.front().detail);
  }
  nodes_ = g.pdg.nodes;
  std::sort(nodes_.begin(), nodes_.end());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);

  const auto& edges = g.pdg.edges;
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (std::size_t ei = 0; ei < edges.size(); ++ei) out[index_.at(edges[ei].src)].push_back(ei);

  std::vector<std::vector<bool>> reach(nodes_.size());
  std::vector<std::vector<bool>> data_reach(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    reach[i] = reachable(i, out, edges, index_, false);
    if (mode == DataRuleMode::TransitiveFlow) {
      data_reach[i] = reachable(i, out, edges, index_, true);
    }
  }

  vulnerable_.assign(edges.size(), false);
  vulnerable_out_.assign(nodes_.size(), {});
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const PdgEdge& e = edges[ei];
    const std::size_t y = index_.at(e.dst);
    bool ok = false;
    for (std::size_t z = 0; z < nodes_.size() && !ok; ++z) {
      if (benign.contains(nodes_[z])) continue;
      if (e.kind == DepKind::Control) {
        ok = reach[y][z];
      } else if (mode == DataRuleMode::Direct) {
        ok = reach[y][z] && g.pdg.vars_at(nodes_[z]).contains(*e.variable);
      } else {
        // The variable must flow along data edges; at y itself it must be
        // mentioned directly.
        ok = data_reach[y][z] && (z != y || g.pdg.vars_at(nodes_[z]).contains(*e.variable));
      }
    }
    vulnerable_[ei] = ok;
    if (ok && !e.is_self_loop()) vulnerable_out_[index_.at(e.src)].push_back(y);
  }
}

std::size_t DependencyAnalysis::index_of(LineId line) const {
  auto it = index_.find(line);
  if (it == index_.end()) {
    throw Error(ErrorKind::Contract, "line " + std::to_string(line.value()) + " is not in the PDG");
  }
  return it->second;
}

bool DependencyAnalysis::is_vulnerable(const PdgEdge& edge) const {
  const auto& edges = g_->pdg.edges;
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    if (edges[ei] == edge) return vulnerable_[ei];
  }
  throw Error(ErrorKind::UnknownEdge, "edge " + std::to_string(edge.src.value()) + "->" +
                                          std::to_string(edge.dst.value()) + " (" +
                                          to_string(edge.kind) + ") is not in the PDG");
}

std::map<LineId, std::uint32_t> DependencyAnalysis::distances_from(LineId start) const {
  const std::size_t s = index_of(start);
  std::vector<std::int64_t> dist(nodes_.size(), -1);
  std::deque<std::size_t> queue{s};
  dist[s] = 0;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : vulnerable_out_[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  std::map<LineId, std::uint32_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i != s && dist[i] > 0) out.emplace(nodes_[i], static_cast<std::uint32_t>(dist[i]));
  }
  return out;
}

bool is_vulnerable_dependency(const PdgEdge& edge, const WeightedPdg& g, const BenignSet& benign,
                              DataRuleMode mode) {
  return DependencyAnalysis(g, benign, mode).is_vulnerable(edge);
}

Distance reachability_distance(LineId start, LineId target, const WeightedPdg& g,
                               const BenignSet& benign, DataRuleMode mode) {
  if (!benign.contains(start)) {
    throw Error(ErrorKind::Contract,
                "line " + std::to_string(start.value()) + " is not a benign candidate");
  }
  if (start == target) {
    throw Error(ErrorKind::Contract, "reachability distance needs two distinct lines");
  }
  if (!g.pdg.has_node(target)) {
    throw Error(ErrorKind::Contract, "line " + std::to_string(target.value()) + " is not in the PDG");
  }
  auto dist = DependencyAnalysis(g, benign, mode).distances_from(start);
  auto it = dist.find(target);
  return it == dist.end() ? Distance::infinite() : Distance::of(it->second);
}

ReachRecord nearest_non_benign(LineId l, const Explanation& expl, const DependencyAnalysis& dep) {
  if (!dep.benign().contains(l)) {
    throw Error(ErrorKind::Contract,
                "line " + std::to_string(l.value()) + " is not a benign candidate");
  }
  const WeightedPdg& g = dep.graph();
  auto dist = dep.distances_from(l);
  ReachRecord best{l, Distance::infinite(), std::nullopt, std::nullopt};
  std::uint32_t best_d = 0;
  double best_w = 0.0;
  for (const auto& entry : expl.entries) {
    if (entry.line == l || dep.benign().contains(entry.line)) continue;
    auto it = dist.find(entry.line);
    if (it == dist.end()) continue;
    double w = g.weight_of(entry.line);
    bool better = !best.target || it->second < best_d ||
                  (it->second == best_d &&
                   (w > best_w || (w == best_w && entry.line < *best.target)));
    if (better) {
      best_d = it->second;
      best_w = w;
      best.target = entry.line;
    }
  }
  if (best.target) {
    best.distance = Distance::of(best_d);
    best.target_score = best_w;
  }
  return best;
}

ReachRecord nearest_non_benign(LineId l, const Explanation& expl, const WeightedPdg& g,
                               const BenignSet& benign, DataRuleMode mode) {
  return nearest_non_benign(l, expl, DependencyAnalysis(g, benign, mode));
}

TrustBreakdown trust_breakdown(const Explanation& expl, const DependencyAnalysis& dep) {
  const WeightedPdg& g = dep.graph();
  std::vector<LineId> resident;
  for (const auto& e : expl.entries) {
    if (g.pdg.has_node(e.line)) resident.push_back(e.line);
  }
  std::sort(resident.begin(), resident.end());

  TrustBreakdown out;
  bool any_benign = std::any_of(resident.begin(), resident.end(),
                                [&](LineId l) { return dep.benign().contains(l); });
  if (!resident.empty() && !any_benign) {
    out.degenerate = true;
    for (LineId l : resident) out.score += g.weight_of(l);
    return out;
  }
  for (LineId l : resident) {
    if (!dep.benign().contains(l)) continue;
    ReachRecord rec = nearest_non_benign(l, expl, dep);
    if (rec.distance.is_finite()) {
      out.score += (g.weight_of(l) + *rec.target_score) / rec.distance.hops();
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

double trust_score(const Explanation& expl, const WeightedPdg& g, const BenignSet& benign,
                   DataRuleMode mode) {
  return trust_breakdown(expl, DependencyAnalysis(g, benign, mode)).score;
}

std::string to_string(Verdict v) {
  return v == Verdict::Trustworthy ? "trustworthy" : "untrustworthy";
}

Verdict verdict_from_string(const std::string& text) {
  if (text == "trustworthy") return Verdict::Trustworthy;
  if (text == "untrustworthy") return Verdict::Untrustworthy;
  throw Error(ErrorKind::Schema, "unknown verdict '" + text + "'");
}

namespace {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const AdapterError& e) {
    throw AdapterError(std::string(stage) + ": " + e.what(), e.raw_response());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace

Assessment assess_prediction(const Explanation& expl, const Pdg& pdg, const Ensemble& ensemble,
                             double threshold, const AssessOptions& options) {
  Assessment a;
  a.function_id = expl.function_id;
  a.threshold_used = threshold;

  // Keep the top-k resident lines; non-resident lines stay so they are
  // reported as dropped.
  Explanation kept = expl;
  if (options.top_k > 0) {
    std::set<LineId> top = select_suspicious(expl, options.top_k, &pdg);
    std::erase_if(kept.entries, [&](const ExplanationEntry& e) {
      return pdg.has_node(e.line) && !top.contains(e.line);
    });
  }

  a.weighted = in_stage("weighting", [&] {
    return build_weighted_pdg(pdg, kept, options.normalize_weights);
  });
  a.benign = in_stage("line-assessment", [&] {
    if (ensemble.empty()) throw Error(ErrorKind::UndefinedInput, "empty classifier ensemble");
    return benign_candidates(ensemble, kept, a.weighted.pdg.line_text);
  });
  BenignSet benign = benign_set_from(expl.function_id, a.benign);
  TrustBreakdown t = in_stage("dependency-assessment", [&] {
    DependencyAnalysis dep(a.weighted, benign, options.data_rule);
    return trust_breakdown(kept, dep);
  });

  a.trust_score = t.score;
  a.records = std::move(t.records);
  a.degenerate = t.degenerate;
  a.verdict = a.trust_score < threshold ? Verdict::Untrustworthy : Verdict::Trustworthy;
  if (expl.entries.empty()) a.warnings.push_back("empty-explanation");
  if (a.degenerate) a.warnings.push_back("no-benign-candidates");
  if (!a.weighted.dropped.empty()) {
    a.warnings.push_back("dropped-lines:" + std::to_string(a.weighted.dropped.size()));
  }
  a.explanation = std::move(kept);
  return a;
}

}  // namespace linetrust
