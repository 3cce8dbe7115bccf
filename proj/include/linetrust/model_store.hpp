#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linetrust/classifier.hpp"

namespace linetrust {

// Scores by substring rules: the first rule whose needle occurs in the line
// decides, otherwise default_score. Used for fixed test ensembles.
class RuleClassifier final : public LineClassifier {
public:
  struct Rule {
    std::string contains;
    double score;
  };

  RuleClassifier(std::string name, double default_score, std::vector<Rule> rules,
                 double threshold = 0.5);

  double score(std::string_view normalized_line) const override;
  double threshold() const override { return threshold_; }
  std::string name() const override { return name_; }

  Json to_json() const;
  // Accepts a model document or a bare {default_score, rules} object.
  static RuleClassifier from_json(const Json& doc, const std::string& name = "rules");

private:
  std::string name_;
  double default_score_;
  std::vector<Rule> rules_;
  double threshold_;
};

struct ManifestEntry {
  std::string file;
  std::string view;
  std::string kind;
  std::optional<double> heldout_accuracy;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> models;
};

inline constexpr const char* kManifestFile = "manifest.json";

Json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const Json& doc);

// "view=endpoint;view=endpoint". Throws Schema on a malformed pair.
std::map<std::string, std::string> parse_adapter_overrides(const std::string& overrides);

// Reads one model document (kinds: linear, adapter, rules).
std::shared_ptr<const LineClassifier> model_from_json(const Json& doc);

// Loads every model listed in <dir>/manifest.json, in manifest order. A view
// named in `overrides` is served by an adapter at the given endpoint instead.
// Missing files throw Io naming the path.
Ensemble load_ensemble(const std::string& dir,
                       const std::map<std::string, std::string>& overrides = {});

}  // namespace linetrust
