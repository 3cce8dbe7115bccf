#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "linetrust/cli.hpp"
#include "linetrust/config.hpp"
#include "linetrust/corpus.hpp"
#include "linetrust/error.hpp"
#include "linetrust/serialize.hpp"

using namespace linetrust;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  fs::path dir = fs::path(LINETRUST_SCRATCH_DIR) / "cli";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::string> assess_args(std::vector<std::string> extra = {}) {
  std::vector<std::string> a{"assess",
                             "--models", fixture::path("stub_models"),
                             "--explanation", fixture::path("vrrp_explanation.json"),
                             "--source", fixture::path("vrrp_print_data.c")};
  a.insert(a.end(), extra.begin(), extra.end());
  return a;
}

}  // namespace

// ---- config ---------------------------------------------------------------

TEST_CASE("config round-trips through TOML") {
  RunConfig cfg;
  cfg.iou_threshold = 0.3;
  cfg.trust_threshold = 0.123456789012345;
  cfg.top_k = 7;
  cfg.normalize_weights = false;
  cfg.data_rule = DataRuleMode::TransitiveFlow;
  cfg.seed = 42;
  cfg.adapters = "token-ngram=exec:scorer --fast";
  cfg.neg_ratio = 2.5;
  std::string text = run_config_to_toml(cfg);
  CHECK(text.find("# naive_threshold is unset") != std::string::npos);
  CHECK(run_config_from_toml(text) == cfg);
  CHECK(run_config_from_toml(run_config_to_toml(RunConfig{})) == RunConfig{});
}

TEST_CASE("config precedence: flag over file over default") {
  std::string file = "top_k = 3\nseed = 9\n";
  RunConfig r = resolve_config(file, {{"seed", "11"}});
  CHECK(r.top_k == 3);
  CHECK(r.seed == 11);
  CHECK(r.iou_threshold == 0.5);
  for (const auto& f : config_fields()) {
    CAPTURE(f.key);
    CHECK_FALSE(f.help.empty());
  }
}

TEST_CASE("config errors") {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind([] { run_config_from_toml("bogus_key = 1\n"); }) == ErrorKind::Schema);
  CHECK(kind([] { run_config_from_toml("[section]\ntop_k = 1\n"); }) == ErrorKind::Schema);
  CHECK(kind([] { run_config_from_toml("top_k = \"many\"\n"); }) == ErrorKind::Schema);
  CHECK(kind([] { resolve_config(std::nullopt, {{"iou_threshold", "1.5"}}); }) ==
        ErrorKind::Precondition);
  CHECK(kind([] { resolve_config(std::nullopt, {{"bleu_order", "0"}}); }) == ErrorKind::Precondition);
}

TEST_CASE("config file and flags through the command line") {
  std::string cfg = scratch("run.toml");
  write_text_file(cfg, "normalize_weights = false\ntrust_threshold = 0.2\n");
  auto r = cli(assess_args({"--config", cfg}));
  CHECK(r.code == kExitTrustworthy);
  auto flag = cli(assess_args({"--config", cfg, "--trust-threshold", "0.3"}));
  CHECK(flag.code == kExitUntrustworthy);
}

// ---- ingest and train -----------------------------------------------------

TEST_CASE("ingest counts on the five-function corpus") {
  std::string out = scratch("dataset.json");
  auto r = cli({"ingest", fixture::path("ingest_corpus.jsonl"), "-o", out, "--neg-ratio", "4.5"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  // 2 vulnerable lines (memcpy, p->next = NULL); 9 clean lines in the pool,
  // of which only the copy of "p->next = NULL;" reaches BLEU 0.5
  CHECK(r.out.find("functions 5") != std::string::npos);
  CHECK(r.out.find("vulnerable 2") != std::string::npos);
  CHECK(r.out.find("candidate_negatives 9") != std::string::npos);
  CHECK(r.out.find("bleu_removed 1") != std::string::npos);
  CHECK(r.out.find("non_vulnerable 8") != std::string::npos);
  Json doc = Json::parse(read_text_file(out));
  Json expected = Json::parse(read_text_file(fixture::path("ingest_corpus.counts.json")));
  CHECK(doc["counts"] == expected["counts"]);
  CHECK(doc["kind"] == "line-dataset");
  CHECK(doc["samples"].size() == 10);
  CHECK(doc["samples"][0]["corpus"] == "ingest_corpus.jsonl");

  auto trained = cli({"train", out, "-o", scratch("models")});
  INFO(trained.err);
  CHECK(trained.code == 0);
  CHECK(fs::exists(scratch("models") + "/manifest.json"));
  CHECK(fs::exists(scratch("models") + "/syntax-shape.json"));
}

TEST_CASE("ingest edge cases") {
  std::string empty = scratch("empty.jsonl");
  write_text_file(empty, "\n");
  auto r = cli({"ingest", empty, "-o", scratch("empty_dataset.json")});
  CHECK(r.code == 0);
  CHECK(r.err.find("no records") != std::string::npos);

  std::string lines = read_text_file(fixture::path("ingest_corpus.jsonl"));
  std::istringstream in(lines);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  std::string bad = scratch("bad.jsonl");
  write_text_file(bad, l1 + "\n" + l2 + "\n{\"function_id\": \"x\", \"source\": 3}\n");
  auto b = cli({"ingest", bad, "-o", scratch("bad_dataset.json")});
  CHECK(b.code == kExitError);
  CHECK(b.err.find("record 3") != std::string::npos);

  std::string no_gt = scratch("no_gt.jsonl");
  write_text_file(no_gt, l2 + "\n" + R"({"function_id": "v", "label": 1, "source": "int v(void)\n{\n\treturn 0;\n}\n"})" + "\n");
  auto g = cli({"ingest", no_gt, "-o", scratch("no_gt_dataset.json")});
  CHECK(g.code == kExitError);
  CHECK(g.err.find("record 2") != std::string::npos);
}

TEST_CASE("training on one class fails") {
  std::string only_vul = scratch("only_vul.jsonl");
  std::string lines = read_text_file(fixture::path("ingest_corpus.jsonl"));
  write_text_file(only_vul, lines.substr(0, lines.find('\n') + 1));
  std::string ds = scratch("only_vul_dataset.json");
  REQUIRE(cli({"ingest", only_vul, "-o", ds}).code == 0);
  auto r = cli({"train", ds, "-o", scratch("one_class_models")});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("error:") == 0);
}

// ---- assess ---------------------------------------------------------------

TEST_CASE("assess exit codes and output") {
  auto r = cli(assess_args({"--normalize-weights", "false"}));
  CHECK(r.code == kExitUntrustworthy);
  Json doc = Json::parse(r.out);
  CHECK(doc["kind"] == "assessment");
  CHECK(doc["trust_score"].get<double>() == doctest::Approx(0.245));
  CHECK(doc["verdict"] == "untrustworthy");
  CHECK(doc["dropped_lines"] == Json::array({2}));

  auto ok = cli(assess_args({"--normalize-weights", "false", "--trust-threshold", "0.245"}));
  CHECK(ok.code == kExitTrustworthy);

  auto via_pdg = cli({"assess", "--models", fixture::path("stub_models"), "--explanation",
                      fixture::path("vrrp_explanation.json"), "--pdg", fixture::path("vrrp_pdg.json"),
                      "--normalize-weights", "false", "--format", "text"});
  CHECK(via_pdg.code == kExitUntrustworthy);
  CHECK(via_pdg.out.find("verdict = untrustworthy") != std::string::npos);
}

TEST_CASE("assess errors exit 2") {
  auto missing = cli({"assess", "--models", "/nonexistent", "--explanation",
                      fixture::path("vrrp_explanation.json"), "--source",
                      fixture::path("vrrp_print_data.c")});
  CHECK(missing.code == kExitError);
  CHECK(missing.err.find("model file not found") != std::string::npos);

  std::string broken = scratch("broken.c");
  write_text_file(broken, "int f(int x) {\n  return (x;\n}\n");
  auto parse = cli({"assess", "--models", fixture::path("stub_models"), "--explanation",
               fixture::path("vrrp_explanation.json"), "--source", broken});
  CHECK(parse.code == kExitError);
  CHECK(parse.err.find("--import-pdg") != std::string::npos);

  CHECK(cli({"assess"}).code == kExitError);
  CHECK(cli({"frobnicate"}).code == kExitError);
  CHECK(cli({"--help"}).code == 0);
}

// ---- evaluate and report --------------------------------------------------

TEST_CASE("evaluate needs ground truth") {
  FunctionRecord r;
  r.function_id = "vrrp";
  r.source = read_text_file(fixture::path("vrrp_print_data.c"));
  r.label = LineLabel::Vulnerable;
  r.explanation = fixture::vrrp_explanation();
  r.confidence = 0.91;
  std::string path = scratch("no_truth.jsonl");
  write_text_file(path, function_record_to_json(r).dump() + "\n");
  auto bad = cli({"evaluate", path, "--models", fixture::path("stub_models")});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("ground-truth") != std::string::npos);

  r.vul_lines = std::set<LineId>{LineId(7)};
  std::string jsonl;
  for (int i = 0; i < 4; ++i) {
    r.function_id = "vrrp" + std::to_string(i);
    jsonl += function_record_to_json(r).dump() + "\n";
  }
  write_text_file(path, jsonl);
  auto ok = cli({"evaluate", path, "--models", fixture::path("stub_models"), "-o",
                 scratch("eval.json"), "--sweep", "0.1,0.9"});
  INFO(ok.err);
  CHECK(ok.code == 0);
  Json doc = Json::parse(read_text_file(scratch("eval.json")));
  CHECK(doc["kind"] == "evaluation");
  CHECK(doc["sweep"].size() == 2);

  std::string empty = scratch("empty_eval.jsonl");
  write_text_file(empty, "");
  CHECK(cli({"evaluate", empty, "--models", fixture::path("stub_models")}).code == kExitError);
}

TEST_CASE("report renders stored assessments") {
  auto r = cli(assess_args({"--normalize-weights", "false"}));
  std::string a = scratch("a.json");
  write_text_file(a, r.out);
  auto one = cli({"report", a});
  CHECK(one.code == 0);
  CHECK(one.out.find("T = 0.245") != std::string::npos);
  CHECK(one.out.find("fopen") != std::string::npos);

  auto none = cli({"report"});
  CHECK(none.code == 0);
  CHECK(none.out.empty());

  auto two = cli({"report", a, a});
  CHECK(two.code == 0);
  std::size_t first = two.out.find("verdict =");
  CHECK(two.out.find("verdict =", first + 1) != std::string::npos);
}
