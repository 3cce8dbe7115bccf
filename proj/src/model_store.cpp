#include "linetrust/model_store.hpp"

#include <filesystem>

#include "linetrust/adapter.hpp"
#include "linetrust/error.hpp"

namespace linetrust {

RuleClassifier::RuleClassifier(std::string name, double default_score, std::vector<Rule> rules,
                               double threshold)
    : name_(std::move(name)),
      default_score_(default_score),
      rules_(std::move(rules)),
      threshold_(threshold) {
  auto check = [](double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::Schema, "rule scores must lie in [0,1]");
  };
  check(default_score_);
  for (const auto& r : rules_) check(r.score);
}

double RuleClassifier::score(std::string_view normalized_line) const {
  for (const auto& r : rules_) {
    if (normalized_line.find(r.contains) != std::string_view::npos) return r.score;
  }
  return default_score_;
}

Json RuleClassifier::to_json() const {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "rules";
  doc["view"] = name_;
  doc["threshold"] = threshold_;
  doc["default_score"] = default_score_;
  Json rules = Json::array();
  for (const auto& r : rules_) rules.push_back(Json{{"contains", r.contains}, {"score", r.score}});
  doc["rules"] = std::move(rules);
  return doc;
}

RuleClassifier RuleClassifier::from_json(const Json& doc, const std::string& name) {
  try {
    std::vector<Rule> rules;
    if (doc.contains("rules")) {
      for (const auto& r : doc["rules"]) {
        rules.push_back({r.at("contains").get<std::string>(), r.at("score").get<double>()});
      }
    }
    return RuleClassifier(doc.value("view", name), doc.value("default_score", 0.5),
                          std::move(rules), doc.value("threshold", 0.5));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("rules model: ") + ex.what());
  }
}

Json manifest_to_json(const Manifest& m) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "ensemble-manifest";
  doc["seed"] = m.seed;
  Json models = Json::array();
  for (const auto& e : m.models) {
    Json je{{"file", e.file}, {"view", e.view}, {"kind", e.kind}};
    je["heldout_accuracy"] = e.heldout_accuracy ? Json(*e.heldout_accuracy) : Json(nullptr);
    models.push_back(std::move(je));
  }
  doc["models"] = std::move(models);
  return doc;
}

Manifest manifest_from_json(const Json& doc) {
  check_schema_version(doc, "manifest");
  Manifest m;
  try {
    m.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& je : doc.at("models")) {
      ManifestEntry e;
      e.file = je.at("file").get<std::string>();
      e.view = je.value("view", std::string{});
      e.kind = je.value("kind", std::string{});
      if (je.contains("heldout_accuracy") && !je["heldout_accuracy"].is_null()) {
        e.heldout_accuracy = je["heldout_accuracy"].get<double>();
      }
      m.models.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, std::string("manifest: ") + ex.what());
  }
  if (m.models.empty()) throw Error(ErrorKind::Schema, "manifest lists no models");
  return m;
}

std::map<std::string, std::string> parse_adapter_overrides(const std::string& overrides) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= overrides.size()) {
    std::size_t end = overrides.find(';', pos);
    if (end == std::string::npos) end = overrides.size();
    std::string item = overrides.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorKind::Schema, "adapter override '" + item + "' is not view=endpoint");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::shared_ptr<const LineClassifier> model_from_json(const Json& doc) {
  check_schema_version(doc, "model");
  std::string kind = doc.value("kind", std::string{});
  if (kind == "linear") return std::make_shared<LinearClassifier>(LinearClassifier::from_json(doc));
  if (kind == "rules") return std::make_shared<RuleClassifier>(RuleClassifier::from_json(doc));
  if (kind == "adapter") {
    try {
      return std::make_shared<AdapterClassifier>(doc.at("view").get<std::string>(),
                                                 doc.at("endpoint").get<std::string>(),
                                                 doc.value("threshold", 0.5));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::Schema, std::string("adapter model: ") + ex.what());
    }
  }
  throw Error(ErrorKind::Schema, "unknown model kind '" + kind + "'");
}

namespace {

Json read_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::Io, "model file not found: " + path.string());
  }
  try {
    return Json::parse(read_text_file(path.string()));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Schema, path.string() + ": " + ex.what());
  }
}

}  // namespace

Ensemble load_ensemble(const std::string& dir,
                       const std::map<std::string, std::string>& overrides) {
  const std::filesystem::path root(dir);
  Manifest m = manifest_from_json(read_json(root / kManifestFile));
  Ensemble out;
  for (const auto& e : m.models) {
    if (auto it = overrides.find(e.view); it != overrides.end()) {
      out.push_back(std::make_shared<AdapterClassifier>(e.view, it->second));
      continue;
    }
    try {
      out.push_back(model_from_json(read_json(root / e.file)));
    } catch (const Error& ex) {
      if (ex.kind() == ErrorKind::Io) throw;
      throw Error(ex.kind(), (root / e.file).string() + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace linetrust
