#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linetrust/dep_assess.hpp"

namespace linetrust {

struct RunConfig {
  double iou_threshold = 0.5;
  std::optional<double> trust_threshold;  // calibrated by evaluate when absent
  std::optional<double> naive_threshold;
  std::size_t top_k = 10;
  bool normalize_weights = true;
  double bleu_threshold = 0.5;
  int bleu_order = 4;
  DataRuleMode data_rule = DataRuleMode::Direct;
  std::uint64_t seed = 1;
  std::string adapters;  // "view=endpoint;..."
  double neg_ratio = 1.0;
  std::size_t workers = 0;  // 0: one per logical core
  double calibration_fraction = 0.2;

  bool operator==(const RunConfig&) const = default;
};

// Key/value access to every RunConfig field. Keys use snake_case in files
// and kebab-case as flags.
struct ConfigField {
  std::string key;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;  // throws Schema on bad text
  std::function<std::string(const RunConfig&)> get;          // empty string: unset optional
};

const std::vector<ConfigField>& config_fields();

// Throws Precondition naming the first field outside its documented range.
void validate(const RunConfig& cfg);

std::string run_config_to_toml(const RunConfig& cfg);
// Starts from `base`; unknown keys throw Schema.
RunConfig run_config_from_toml(const std::string& text, RunConfig base = {});

// Applies file values, then `flags` (key -> raw text) on top, then validates.
RunConfig resolve_config(const std::optional<std::string>& file_text,
                         const std::map<std::string, std::string>& flags);

}  // namespace linetrust
