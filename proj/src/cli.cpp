#include "linetrust/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <future>

#include "linetrust/config.hpp"
#include "linetrust/corpus.hpp"
#include "linetrust/error.hpp"
#include "linetrust/eval.hpp"
#include "linetrust/frontend.hpp"
#include "linetrust/model_store.hpp"
#include "linetrust/report.hpp"
#include "linetrust/tokenizer.hpp"

namespace linetrust {

namespace {

namespace fs = std::filesystem;

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, path + ": invalid JSON: " + ex.what());
  }
}

std::string kebab(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// ---- ingest ---------------------------------------------------------------

struct IngestCounts {
  std::size_t functions = 0;
  std::size_t vulnerable = 0;
  std::size_t candidates = 0;
  std::size_t bleu_removed = 0;
  std::size_t non_vulnerable = 0;
};

Json sample_to_json(const LineSample& s) {
  return Json{{"text", s.text()},
              {"label", to_string(s.label())},
              {"corpus", s.origin().corpus},
              {"function_id", s.origin().function_id},
              {"line", s.origin().line}};
}

std::vector<LineSample> load_dataset(const std::string& path) {
  Json doc = read_json_file(path);
  check_schema_version(doc, "line dataset");
  std::vector<LineSample> out;
  try {
    for (const auto& j : doc.at("samples")) {
      out.emplace_back(j.at("text").get<std::string>(),
                       line_label_from_string(j.at("label").get<std::string>()),
                       LineOrigin{j.value("corpus", std::string{}), j.value("function_id", std::string{}),
                                  j.value("line", std::uint32_t{0})});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, path + ": " + ex.what());
  }
  return out;
}

int cmd_ingest(const std::vector<std::string>& inputs, const std::string& out_path,
               const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<LineSample> vulnerable;
  std::vector<SourceFunction> clean;
  IngestCounts counts;
  for (const auto& path : inputs) {
    std::vector<FunctionRecord> records;
    try {
      records = read_corpus(path);
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
    const std::string corpus = fs::path(path).filename().string();
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      ++counts.functions;
      if (rec.label == LineLabel::NonVulnerable) {
        clean.push_back({corpus, rec.function_id, rec.source});
        continue;
      }
      std::set<LineId> lines;
      try {
        if (!rec.diff && !rec.vul_lines) {
          throw Error(ErrorKind::Schema, "vulnerable function needs 'diff' or 'vul_lines'");
        }
        lines = ground_truth_lines(rec);
      } catch (const Error& e) {
        throw Error(e.kind(), path + ": record " + std::to_string(i + 1) + ": " + e.what());
      }
      for (auto& s : eligible_lines({corpus, rec.function_id, rec.source}, LineLabel::Vulnerable)) {
        if (lines.contains(LineId(s.origin().line))) vulnerable.push_back(std::move(s));
      }
    }
  }
  counts.vulnerable = vulnerable.size();

  std::vector<LineSample> negatives;
  if (counts.functions == 0) {
    err << "warning: no records in input, writing an empty dataset\n";
  } else if (!vulnerable.empty() && !clean.empty()) {
    std::size_t pool = 0;
    for (const auto& fn : clean) pool += eligible_lines(fn, LineLabel::NonVulnerable).size();
    auto wanted = static_cast<std::size_t>(
        std::llround(cfg.neg_ratio * static_cast<double>(vulnerable.size())));
    std::size_t n = std::min(pool, std::max<std::size_t>(wanted, 1));
    if (n < wanted) {
      err << "warning: only " << pool << " candidate negative lines available, wanted " << wanted
          << "\n";
    }
    if (n > 0) {
      auto candidates = sample_candidate_negatives(clean, n, cfg.seed);
      counts.candidates = candidates.size();
      negatives = filter_negatives(candidates, vulnerable, cfg.bleu_threshold, cfg.bleu_order);
    }
  } else if (vulnerable.empty()) {
    err << "warning: no vulnerable lines found\n";
  } else {
    err << "warning: no non-vulnerable functions to sample negatives from\n";
  }
  counts.non_vulnerable = negatives.size();
  counts.bleu_removed = counts.candidates - counts.non_vulnerable;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "line-dataset";
  doc["seed"] = cfg.seed;
  doc["bleu_threshold"] = cfg.bleu_threshold;
  doc["bleu_order"] = cfg.bleu_order;
  doc["neg_ratio"] = cfg.neg_ratio;
  doc["counts"] = Json{{"functions", counts.functions},
                       {"vulnerable", counts.vulnerable},
                       {"candidate_negatives", counts.candidates},
                       {"bleu_removed", counts.bleu_removed},
                       {"non_vulnerable", counts.non_vulnerable}};
  Json samples = Json::array();
  for (const auto& s : vulnerable) samples.push_back(sample_to_json(s));
  for (const auto& s : negatives) samples.push_back(sample_to_json(s));
  doc["samples"] = std::move(samples);
  write_text_file(out_path, dump(doc));

  out << "functions " << counts.functions << "\n"
      << "vulnerable " << counts.vulnerable << "\n"
      << "candidate_negatives " << counts.candidates << "\n"
      << "bleu_removed " << counts.bleu_removed << "\n"
      << "non_vulnerable " << counts.non_vulnerable << "\n";
  return kExitTrustworthy;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const std::string& dataset, const std::string& out_dir, const RunConfig& cfg,
              std::ostream& out) {
  auto samples = load_dataset(dataset);
  TrainingConfig tc;
  tc.seed = cfg.seed;
  const FeatureView views[] = {FeatureView::TokenNgram, FeatureView::CharNgram,
                               FeatureView::SyntaxShape};
  std::vector<std::future<LinearClassifier>> jobs;
  for (FeatureView v : views) {
    jobs.push_back(std::async(std::launch::async,
                              [&samples, &tc, v] { return train_classifier(samples, v, tc); }));
  }
  std::vector<LinearClassifier> models;
  for (auto& j : jobs) models.push_back(j.get());

  fs::create_directories(out_dir);
  Manifest m;
  m.seed = cfg.seed;
  for (const auto& model : models) {
    std::string file = model.name() + ".json";
    write_text_file((fs::path(out_dir) / file).string(), dump(model.to_json()));
    m.models.push_back({file, model.name(), "linear", model.report().heldout_accuracy});
    out << model.name() << ": train " << model.report().train_size << " lines, accuracy "
        << model.report().train_accuracy;
    if (model.report().heldout_accuracy) {
      out << ", held-out " << model.report().heldout_size << " lines, accuracy "
          << *model.report().heldout_accuracy;
    }
    out << "\n";
  }
  write_text_file((fs::path(out_dir) / kManifestFile).string(), dump(manifest_to_json(m)));
  return kExitTrustworthy;
}

// ---- assess ---------------------------------------------------------------

struct AssessArgs {
  std::string models;
  std::string source;
  std::string explanation;
  std::string pdg;
  std::string import_pdg;
  std::string format = "json";
};

Pdg load_pdg(const AssessArgs& args, const std::string& function_id) {
  if (!args.pdg.empty()) return pdg_from_json(read_json_file(args.pdg));
  std::string source = args.source.empty() ? std::string{} : read_text_file(args.source);
  if (!args.import_pdg.empty()) {
    return merge_line_nodes(import_raw_graph(read_json_file(args.import_pdg)).graph, source,
                            function_id);
  }
  if (args.source.empty()) {
    throw Error(ErrorKind::Precondition, "assess needs --source, --pdg or --import-pdg");
  }
  try {
    return build_pdg(source, function_id);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parse && e.kind() != ErrorKind::UnsupportedConstruct) throw;
    throw Error(e.kind(), args.source + ": " + e.what() +
                              " (export a dependence graph and pass it with --import-pdg)");
  }
}

int cmd_assess(const AssessArgs& args, const RunConfig& cfg, std::ostream& out) {
  Explanation expl = explanation_from_json(read_json_file(args.explanation));
  check_explanation(expl);
  Pdg pdg = load_pdg(args, expl.function_id);
  Ensemble ensemble = load_ensemble(args.models, parse_adapter_overrides(cfg.adapters));
  AssessOptions opts{cfg.normalize_weights, cfg.data_rule, cfg.top_k};
  Assessment a = assess_prediction(expl, pdg, ensemble, cfg.trust_threshold.value_or(0.5), opts);
  Json doc = assessment_to_json(a);
  out << (args.format == "text" ? render_assessment(doc) : dump(doc));
  return a.verdict == Verdict::Trustworthy ? kExitTrustworthy : kExitUntrustworthy;
}

// ---- evaluate -------------------------------------------------------------

int cmd_evaluate(const std::string& corpus_path, const std::string& models,
                 const std::string& out_path, const std::vector<double>& sweep,
                 const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto corpus = read_corpus(corpus_path);
  if (corpus.empty()) throw Error(ErrorKind::UndefinedGroundTruth, corpus_path + ": corpus is empty");
  Ensemble ensemble = load_ensemble(models, parse_adapter_overrides(cfg.adapters));
  EvalConfig ec;
  ec.iou_threshold = cfg.iou_threshold;
  ec.iou_sweep = sweep;
  ec.trust_threshold = cfg.trust_threshold;
  ec.naive_threshold = cfg.naive_threshold;
  ec.top_k = cfg.top_k;
  ec.assess = {cfg.normalize_weights, cfg.data_rule, 0};
  ec.calibration_fraction = cfg.calibration_fraction;
  ec.seed = cfg.seed;
  ec.workers = cfg.workers;
  if (ec.top_k == 0) {
    err << "warning: top_k 0 treated as 10 for suspicious-line selection\n";
    ec.top_k = 10;
  }
  EvalReport report = run_evaluation(corpus, ensemble, ec);
  if (!out_path.empty()) write_text_file(out_path, dump(eval_report_to_json(report)));
  out << "top_k " << report.top_k << ", skipped " << report.skipped.size() << " of "
      << corpus.size() << " functions\n";
  for (const auto& s : report.skipped) {
    err << "skipped record " << s.index << " (" << s.function_id << "): " << s.reason << "\n";
  }
  out << render_metrics_table(report.main);
  for (const auto& t : report.sweep) out << "\n" << render_metrics_table(t);
  return kExitTrustworthy;
}

// ---- report ---------------------------------------------------------------

int cmd_report(const std::vector<std::string>& files, std::ostream& out) {
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i > 0) out << "\n";
    out << render_assessment(read_json_file(files[i]));
  }
  return kExitTrustworthy;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide whether a vulnerability prediction's explanation can be trusted"};
  app.name("linetrust");
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "TOML file with run settings");
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& f : config_fields()) {
    flag_opts[f.key] = app.add_option("--" + kebab(f.key), raw[f.key], f.help);
  }

  std::vector<std::string> ingest_inputs;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Build a line dataset from function corpora");
  ingest->add_option("inputs", ingest_inputs, "JSONL corpus files");
  ingest->add_option("-o,--out", ingest_out, "dataset file to write")->required();

  std::string train_dataset, train_out;
  auto* train = app.add_subcommand("train", "Train the classifier ensemble");
  train->add_option("dataset", train_dataset, "dataset written by ingest")->required();
  train->add_option("-o,--out", train_out, "model directory")->required();

  AssessArgs aa;
  auto* assess = app.add_subcommand("assess", "Assess one prediction");
  assess->add_option("--models", aa.models, "model directory")->required();
  assess->add_option("--explanation", aa.explanation, "explanation JSON")->required();
  assess->add_option("--source", aa.source, "C source of the function");
  assess->add_option("--pdg", aa.pdg, "line-level PDG JSON");
  assess->add_option("--import-pdg", aa.import_pdg, "external dependence graph export");
  assess->add_option("--format", aa.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  std::string eval_corpus, eval_models, eval_out;
  std::vector<double> sweep;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate against ground truth");
  evaluate->add_option("corpus", eval_corpus, "JSONL corpus with explanations")->required();
  evaluate->add_option("--models", eval_models, "model directory")->required();
  evaluate->add_option("-o,--out", eval_out, "report JSON to write");
  evaluate->add_option("--sweep", sweep, "extra IoU thresholds")->delimiter(',');

  std::vector<std::string> report_files;
  auto* report = app.add_subcommand("report", "Render stored assessments");
  report->add_option("files", report_files, "assessment JSON files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitTrustworthy;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitTrustworthy;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : flag_opts) {
      if (opt->count() > 0) flags[key] = raw[key];
    }
    if (!flags.contains("adapters")) {
      if (const char* env = std::getenv("LINETRUST_ADAPTERS")) flags["adapters"] = env;
    }
    std::optional<std::string> file_text;
    if (!config_path.empty()) file_text = read_text_file(config_path);
    RunConfig cfg = resolve_config(file_text, flags);

    if (ingest->parsed()) return cmd_ingest(ingest_inputs, ingest_out, cfg, out, err);
    if (train->parsed()) return cmd_train(train_dataset, train_out, cfg, out);
    if (assess->parsed()) return cmd_assess(aa, cfg, out);
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_corpus, eval_models, eval_out, sweep, cfg, out, err);
    }
    if (report->parsed()) return cmd_report(report_files, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace linetrust
