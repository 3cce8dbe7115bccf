// One line per acceptance criterion; exits nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "linetrust/bleu.hpp"
#include "linetrust/corpus.hpp"
#include "linetrust/dep_assess.hpp"
#include "linetrust/eval.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/serialize.hpp"
#include "oracles.hpp"

using namespace linetrust;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::path(LINETRUST_SCRATCH_DIR) / "acceptance";
  fs::create_directories(dir);
  return dir / name;
}

int run_command(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// ---- synthetic functions ---------------------------------------------------

// A function with a vulnerable tail (m computed, then copied) and a side
// branch that never reaches it.
struct Synth {
  std::string id;
  std::string source;
  std::uint32_t v1 = 0, v2 = 0;          // vulnerable lines
  std::uint32_t branch1 = 0, branch2 = 0;  // disconnected branch lines
  std::vector<std::uint32_t> lines;      // every statement line
};

Synth make_synth(std::mt19937_64& rng, std::size_t idx, bool vulnerable = true) {
  Synth s;
  s.id = "synth_" + std::to_string(idx);
  int c = 1 + static_cast<int>(rng() % 9);
  std::ostringstream src;
  std::uint32_t line = 1;
  src << "int " << s.id << "(char *buf, int len, int flag)\n{\n";
  line = 3;
  src << "\tint n = len;\n";
  s.lines.push_back(line++);
  src << "\tchar *dst = buf;\n";
  s.lines.push_back(line++);
  std::size_t filler = rng() % 6;
  for (std::size_t j = 0; j < filler; ++j) {
    src << "\tint t" << j << " = " << j << " + flag;\n";
    s.lines.push_back(line++);
  }
  src << "\tif (flag > " << c << ") {\n";
  s.lines.push_back(line++);
  src << "\t\tint u = flag * " << c << ";\n";
  s.branch1 = line;
  s.lines.push_back(line++);
  src << "\t\tlog_value(u);\n";
  s.branch2 = line;
  s.lines.push_back(line++);
  src << "\t}\n";
  ++line;
  src << "\tint m = scale(n, " << c << ");\n";
  s.v1 = line;
  s.lines.push_back(line++);
  if (vulnerable) {
    src << "\tmemcpy(dst, buf, m);\n";
  } else {
    src << "\tdst[0] = buf[m % len];\n";
  }
  s.v2 = line;
  s.lines.push_back(line++);
  src << "\treturn m;\n}\n";
  s.lines.push_back(line++);
  s.source = src.str();
  return s;
}

// memcpy lines are the only non-benign ones.
Ensemble memcpy_ensemble() {
  Ensemble e;
  for (int i = 0; i < 3; ++i) {
    e.push_back(std::make_shared<RuleClassifier>(
        "rules" + std::to_string(i), 0.9, std::vector<RuleClassifier::Rule>{{"memcpy", 0.1}}));
  }
  return e;
}

FunctionRecord to_record(const Synth& s, Explanation expl, double confidence) {
  FunctionRecord r;
  r.function_id = s.id;
  r.source = s.source;
  r.label = LineLabel::Vulnerable;
  r.vul_lines = std::set<LineId>{LineId(s.v1), LineId(s.v2)};
  expl.function_id = s.id;
  expl.confidence = confidence;
  r.explanation = std::move(expl);
  r.confidence = confidence;
  return r;
}

// ---- criteria ----------------------------------------------------------------

Outcome worked_example() {
  Outcome o;
  auto t0 = Clock::now();
  Pdg pdg = build_pdg(read_text_file(fixture::path("vrrp_print_data.c")), "vrrp_print_data");
  AssessOptions opt;
  opt.normalize_weights = false;
  Assessment a =
      assess_prediction(fixture::vrrp_explanation(), pdg, fixture::stub_ensemble(), 0.5, opt);

  std::set<LineId> benign;
  for (const auto& [l, v] : a.benign)
    if (v.is_benign_candidate) benign.insert(l);
  o.require(benign == std::set<LineId>{LineId(1), LineId(3), LineId(4), LineId(5), LineId(8),
                                       LineId(9)},
            "benign set differs");

  BenignSet bs{"vrrp_print_data", benign};
  DependencyAnalysis dep(a.weighted, bs);
  const std::set<std::pair<std::uint32_t, std::uint32_t>> ones{{1, 3}, {3, 7}};
  const std::set<std::pair<std::uint32_t, std::uint32_t>> zeros{{3, 4}, {3, 5}, {7, 8}, {8, 9}};
  std::size_t seen = 0;
  for (const auto& e : pdg.edges) {
    std::pair<std::uint32_t, std::uint32_t> key{e.src.value(), e.dst.value()};
    bool v = dep.is_vulnerable(e);
    if (ones.count(key)) {
      ++seen;
      o.require(v, "p(" + std::to_string(key.first) + "->" + std::to_string(key.second) + ") != 1");
    } else {
      if (zeros.count(key)) ++seen;
      o.require(!v, "p(" + std::to_string(key.first) + "->" + std::to_string(key.second) + ") != 0");
    }
  }
  o.require(seen >= ones.size() + zeros.size(), "a listed edge is missing from the PDG");
  for (std::uint32_t l : {4u, 5u, 8u}) {
    o.require(!reachability_distance(LineId(l), LineId(7), a.weighted, bs).is_finite(),
              "r(" + std::to_string(l) + ",7) is finite");
  }
  o.require(near(a.trust_score, 0.245, 1e-9), "T = " + std::to_string(a.trust_score));
  double secs = seconds_since(t0);
  o.require(secs < 1.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "T = 0.245, " + std::to_string(secs) + " s";
  return o;
}

Outcome reachability_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t queries = 0, agree = 0;
  for (int i = 0; i < 1000; ++i) {
    auto rc = oracle::random_pdg(rng, 12, 30);
    Explanation expl{"random", 0.5, {}};
    for (LineId l : rc.pdg.nodes) expl.entries.push_back({l, 0.1});
    WeightedPdg g = build_weighted_pdg(rc.pdg, expl, false);
    BenignSet b{"random", rc.benign};
    auto vul = oracle::vulnerable_edges(rc.pdg, rc.benign);
    for (LineId s : rc.benign) {
      for (LineId t : rc.pdg.nodes) {
        if (t == s) continue;
        ++queries;
        auto want = oracle::enumerate_distance(rc.pdg, vul, s, t);
        Distance got = reachability_distance(s, t, g, b);
        bool same = want ? got.is_finite() && got.hops() == static_cast<std::uint32_t>(*want)
                         : !got.is_finite();
        agree += same;
      }
    }
  }
  double secs = seconds_since(t0);
  o.require(agree == queries, std::to_string(queries - agree) + " of " + std::to_string(queries) +
                                  " queries disagree");
  o.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = std::to_string(queries) + " queries, " + std::to_string(secs) + " s";
  return o;
}

Outcome vote_exhaustive() {
  Outcome o;
  std::size_t checked = 0;
  for (int k = 1; k <= 5; ++k) {
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<int> votes(k);
      int ones = 0;
      for (int i = 0; i < k; ++i) ones += votes[i] = (mask >> i) & 1;
      int want = 2 * ones >= k ? 1 : 0;
      o.require(ensemble_vote(votes) == want, "vote vector mismatch at K=" + std::to_string(k));
      ++checked;
    }
  }
  o.require(checked == 62, "checked " + std::to_string(checked) + " vectors");
  o.require(ensemble_vote(std::vector<int>{1, 0}) == 1, "[1,0] does not vote 1");
  if (o.pass) o.detail = "62 vectors";
  return o;
}

Outcome bleu_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  const std::vector<std::string> vocab{"x", "y", "=", "(", ")", ";", "+", "p", "->", "NULL"};
  auto draw = [&](std::size_t max_len) {
    oracle::Words w(1 + rng() % max_len);
    for (auto& s : w) s = vocab[rng() % vocab.size()];
    return w;
  };
  auto tokens = [](const oracle::Words& w) {
    std::vector<Token> out;
    for (const auto& s : w) out.push_back({TokenKind::Identifier, s});
    return out;
  };
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    auto cand = draw(12);
    std::vector<oracle::Words> refs(1 + rng() % 4);
    for (auto& r : refs) r = draw(12);
    std::vector<std::vector<Token>> trefs;
    for (const auto& r : refs) trefs.push_back(tokens(r));
    double diff = std::fabs(bleu(tokens(cand), trefs) - oracle::textbook_bleu(cand, refs, 4));
    worst = std::max(worst, diff);
  }
  o.require(worst <= 1e-9, "max deviation " + std::to_string(worst));
  auto x = tokens({"p", "->", "x", "=", "NULL", ";"});
  std::vector<std::vector<Token>> self{x};
  o.require(near(bleu(x, self), 1.0, 1e-12), "bleu(x,{x}) != 1");
  std::vector<std::vector<Token>> other{tokens({"a", "b", "c", "d", "e", "f"})};
  o.require(bleu(x, other) <= 1e-6, "disjoint score too high");
  if (o.pass) o.detail = "200 cases, max deviation " + std::to_string(worst);
  return o;
}

Outcome metric_identities() {
  Outcome o;
  std::mt19937_64 rng(5150);
  const Verdict U = Verdict::Untrustworthy, T = Verdict::Trustworthy;
  for (int i = 0; i < 50; ++i) {
    std::size_t n = 4 + rng() % 40;
    std::vector<EvalRecord> recs(n);
    std::vector<double> scores(n);
    std::vector<Verdict> truth(n);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < n; ++k) {
      auto& r = recs[k];
      r.gt_label = k == 0 ? U : k == 1 ? T : (rng() % 2 ? U : T);
      r.scores[kTrustMethod] = static_cast<double>(rng() % 1000) / 1000.0;
      r.verdicts[kTrustMethod] = rng() % 2 ? U : T;
      scores[k] = r.scores[kTrustMethod];
      truth[k] = r.gt_label;
      bool pos = r.gt_label == U, pred = r.verdicts[kTrustMethod] == U;
      (pos ? (pred ? tp : fn) : (pred ? fp : tn)) += 1;
    }
    MetricsRow row = compute_metrics(recs, kTrustMethod);
    o.require(row.cm.tp == tp && row.cm.fp == fp && row.cm.tn == tn && row.cm.fn == fn,
              "confusion counts differ");
    double wins = 0, pairs = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (truth[a] == U && truth[b] == T) {
          pairs += 1;
          wins += scores[a] < scores[b] ? 1.0 : scores[a] == scores[b] ? 0.5 : 0.0;
        }
    auto check = [&](const std::optional<double>& got, double num, double den, const char* name) {
      if (den == 0) {
        o.require(!got, std::string(name) + " should be empty");
      } else {
        o.require(got && near(*got, num / den, 1e-12), std::string(name) + " differs");
      }
    };
    check(row.accuracy, tp + tn, tp + tn + fp + fn, "accuracy");
    check(row.precision, tp, tp + fp, "precision");
    check(row.sensitivity, tp, tp + fn, "sensitivity");
    check(row.specificity, tn, tn + fp, "specificity");
    check(row.auc, wins, pairs, "auc");
    if (tp + fp > 0 && tp + fn > 0 && tp > 0) {
      double pre = tp / (tp + fp), sen = tp / (tp + fn);
      o.require(row.f1 && near(*row.f1, 2 * pre * sen / (pre + sen), 1e-12), "f1 differs");
    }
    if (tp + fn > 0 && tn + fp > 0) {
      o.require(row.gmean && near(*row.gmean, std::sqrt(tp / (tp + fn) * (tn / (tn + fp))), 1e-12),
                "gmean differs");
    }
  }

  // calibration fixtures: a fixed six-point set plus seeded random ones
  std::vector<std::pair<std::vector<double>, std::vector<bool>>> fixtures{
      {{0.05, 0.2, 0.35, 0.5, 0.65, 0.9}, {true, false, true, true, false, false}},
      {{0.2, 0.3, 0.7, 0.8}, {true, true, false, false}},
  };
  for (int i = 0; i < 30; ++i) {
    std::size_t n = 3 + rng() % 20;
    std::vector<double> s(n);
    std::vector<bool> p(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = static_cast<double>(rng() % 50) / 50.0;
      p[k] = rng() % 2;
    }
    p[0] = true;
    p[1] = false;
    s[0] = 0.1;
    s[1] = 0.9;
    fixtures.push_back({s, p});
  }
  for (const auto& [s, p] : fixtures) {
    std::vector<Verdict> labels;
    for (bool b : p) labels.push_back(b ? U : T);
    auto fit = calibrate_threshold(s, labels, Orientation::LowerIsPositive);
    double best = 0;
    for (const auto& c : oracle::gmean_sweep(s, p)) best = std::max(best, c.gmean);
    o.require(near(fit.gmean, best, 1e-12), "calibration misses the sweep optimum");
  }
  if (o.pass) o.detail = "50 matrices, " + std::to_string(fixtures.size()) + " calibration fixtures";
  return o;
}

Outcome iou_monotonicity() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FunctionRecord> corpus;
  for (std::size_t i = 0; i < 100; ++i) {
    Synth s = make_synth(rng, i);
    Explanation e;
    for (auto l : s.lines) e.entries.push_back({LineId(l), u(rng)});
    corpus.push_back(to_record(s, e, u(rng)));
  }
  EvalConfig cfg;
  cfg.top_k = 3;
  cfg.trust_threshold = 0.5;
  cfg.naive_threshold = 0.5;
  cfg.iou_sweep = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  auto report = run_evaluation(corpus, memcpy_ensemble(), cfg);
  o.require(report.skipped.empty(), "synthetic functions were skipped");
  o.require(report.records.size() == 100, "record count");
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < report.sweep.size(); ++i) {
    const auto& t = report.sweep[i];
    std::size_t direct = 0;
    for (const auto& r : report.records) direct += r.iou <= t.iou_threshold;
    o.require(t.untrustworthy == direct, "sweep count disagrees with IoU labels");
    if (i > 0) o.require(t.untrustworthy >= counts.back(), "count decreased");
    counts.push_back(t.untrustworthy);
  }
  if (o.pass) {
    std::ostringstream d;
    d << "counts";
    for (auto c : counts) d << " " << c;
    o.detail = d.str();
  }
  return o;
}

Outcome synthetic_discrimination() {
  Outcome o;
  auto t0 = Clock::now();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> hi(0.3, 0.5), lo(0.0, 0.1), conf(0.5, 1.0);
  std::vector<FunctionRecord> corpus;
  for (std::size_t i = 0; i < 200; ++i) {
    Synth s = make_synth(rng, i);
    bool on_target = i % 2 == 0;
    Explanation e;
    for (auto l : s.lines) {
      bool heavy = on_target ? (l == s.v1 || l == s.v2) : (l == s.branch1 || l == s.branch2);
      e.entries.push_back({LineId(l), heavy ? hi(rng) : lo(rng)});
    }
    corpus.push_back(to_record(s, e, conf(rng)));
  }
  EvalConfig cfg;
  cfg.top_k = 2;
  cfg.trust_threshold = 0.5;
  cfg.naive_threshold = 0.5;
  auto report = run_evaluation(corpus, memcpy_ensemble(), cfg);
  const auto& rows = report.main.rows;
  o.require(rows.size() == 2 && rows[0].auc && rows[1].auc, "AUC undefined");
  double secs = seconds_since(t0);
  if (o.pass) {
    double t_auc = *rows[0].auc, n_auc = *rows[1].auc;
    o.require(t_auc >= 0.90, "trust AUC " + std::to_string(t_auc));
    o.require(t_auc > n_auc, "naive AUC " + std::to_string(n_auc) + " not below trust");
    o.require(secs < 120.0, "took " + std::to_string(secs) + " s");
    if (o.pass) {
      o.detail = "trust AUC " + std::to_string(t_auc) + ", naive AUC " + std::to_string(n_auc) +
                 ", " + std::to_string(secs) + " s";
    }
  }
  return o;
}

// Writes a training corpus of synthetic vulnerable and clean functions.
fs::path training_corpus() {
  std::mt19937_64 rng(31337);
  fs::path path = scratch("train_corpus.jsonl");
  std::ostringstream out;
  for (std::size_t i = 0; i < 60; ++i) {
    bool vul = i % 2 == 0;
    Synth s = make_synth(rng, i, vul);
    FunctionRecord r;
    r.function_id = s.id;
    r.source = s.source;
    r.label = vul ? LineLabel::Vulnerable : LineLabel::NonVulnerable;
    if (vul) r.vul_lines = std::set<LineId>{LineId(s.v2)};
    out << function_record_to_json(r).dump() << "\n";
  }
  write_text_file(path.string(), out.str());
  return path;
}

fs::path long_explanation() {
  Pdg pdg = build_pdg(read_text_file(fixture::path("long_function.c")), "process_records");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Explanation e{"process_records", 0.87, {}};
  for (std::size_t i = 0; i < pdg.nodes.size(); i += 3) e.entries.push_back({pdg.nodes[i], u(rng)});
  fs::path path = scratch("long_explanation.json");
  write_text_file(path.string(), explanation_to_json(e).dump(2));
  return path;
}

// ingest -> train -> assess into `dir`; returns the files to compare.
std::vector<fs::path> pipeline(const fs::path& dir, const fs::path& corpus, std::string& error) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = q(LINETRUST_CLI);
  const std::string quiet = " >/dev/null 2>" + q(dir / "stderr.txt");
  if (run_command(cli + " ingest " + q(corpus) + " -o " + q(dir / "dataset.json") + " --seed 7" +
                  quiet) != 0) {
    error = "ingest failed";
    return {};
  }
  if (run_command(cli + " train " + q(dir / "dataset.json") + " -o " + q(dir / "models") +
                  " --seed 7" + quiet) != 0) {
    error = "train failed";
    return {};
  }
  int code = run_command(cli + " assess --models " + q(dir / "models") + " --explanation " +
                         q(long_explanation()) + " --source " +
                         q(fixture::path("long_function.c")) + " > " +
                         q(dir / "assessment.json") + " 2>" + q(dir / "stderr.txt"));
  if (code != 0 && code != 10) {
    error = "assess exited " + std::to_string(code);
    return {};
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir / "models")) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  files.push_back(dir / "assessment.json");
  return files;
}

Outcome determinism() {
  Outcome o;
  fs::path corpus = training_corpus();
  std::string err1, err2;
  auto a = pipeline(scratch("run1"), corpus, err1);
  auto b = pipeline(scratch("run2"), corpus, err2);
  o.require(err1.empty() && err2.empty(), err1.empty() ? err2 : err1);
  if (!o.pass) return o;
  o.require(a.size() == b.size() && a.size() == 5, "different file sets");
  for (std::size_t i = 0; i < a.size() && o.pass; ++i) {
    o.require(a[i].filename() == b[i].filename(), "different file sets");
    o.require(read_text_file(a[i].string()) == read_text_file(b[i].string()),
              a[i].filename().string() + " differs");
  }
  if (o.pass) o.detail = std::to_string(a.size()) + " files byte-identical";
  return o;
}

Outcome latency() {
  Outcome o;
  fs::path models = scratch("run1") / "models";
  if (!fs::exists(models / "manifest.json")) {
    std::string error;
    pipeline(scratch("run1"), training_corpus(), error);
  }
  const std::string cmd = q(LINETRUST_CLI) + " assess --models " + q(models) + " --explanation " +
                          q(long_explanation()) + " --source " +
                          q(fixture::path("long_function.c")) + " >/dev/null 2>&1";
  double total = 0;
  for (int i = 0; i < 10; ++i) {
    auto t0 = Clock::now();
    int code = run_command(cmd);
    total += seconds_since(t0);
    o.require(code == 0 || code == 10, "assess exited " + std::to_string(code));
  }
  double mean = total / 10;
  o.require(mean <= 1.5, "mean " + std::to_string(mean) + " s");
  if (o.pass) o.detail = "mean " + std::to_string(mean) + " s over 10 runs";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"worked example", worked_example},
      {"reachability oracle", reachability_oracle},
      {"vote exhaustiveness", vote_exhaustive},
      {"BLEU oracle", bleu_oracle},
      {"metric identities", metric_identities},
      {"ground-truth monotonicity", iou_monotonicity},
      {"synthetic discrimination", synthetic_discrimination},
      {"assess latency", latency},
      {"determinism", determinism},
  };
  // Determinism produces the trained models the latency run uses.
  std::vector<Outcome> results(criteria.size());
  const std::vector<std::size_t> order{0, 1, 2, 3, 4, 5, 6, 8, 7};
  for (std::size_t i : order) {
    try {
      results[i] = criteria[i].second();
    } catch (const std::exception& e) {
      results[i] = {false, std::string("exception: ") + e.what()};
    }
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& r = results[i];
    std::cout << "criterion " << i + 1 << " " << (r.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << r.detail << "\n";
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
