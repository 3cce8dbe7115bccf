#include "linetrust/config.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "linetrust/error.hpp"

namespace linetrust {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& text) {
  throw Error(ErrorKind::Schema, "config " + key + ": cannot parse '" + text + "'");
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) bad_value(key, text);
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) bad_value(key, text);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  bad_value(key, text);
}

std::string show(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> parse_opt(const std::string& key, const std::string& text) {
  if (text.empty() || text == "none") return std::nullopt;
  return parse_double(key, text);
}

template <typename T, typename P>
ConfigField number(std::string key, std::string help, T RunConfig::*member, P parse) {
  return {key, std::move(help),
          [key, member, parse](RunConfig& c, const std::string& t) {
            c.*member = static_cast<T>(parse(key, t));
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return show(c.*member);
            else return std::to_string(c.*member);
          }};
}

ConfigField optional_number(std::string key, std::string help,
                            std::optional<double> RunConfig::*member) {
  return {key, std::move(help),
          [key, member](RunConfig& c, const std::string& t) { c.*member = parse_opt(key, t); },
          [member](const RunConfig& c) { return c.*member ? show(*(c.*member)) : std::string{}; }};
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      number("iou_threshold", "IoU at or below which a prediction is untrustworthy",
             &RunConfig::iou_threshold, parse_double),
      optional_number("trust_threshold", "trust score threshold (calibrated when unset)",
                      &RunConfig::trust_threshold),
      optional_number("naive_threshold", "confidence threshold (calibrated when unset)",
                      &RunConfig::naive_threshold),
      number("top_k", "suspicious lines kept per explanation, 0 keeps all", &RunConfig::top_k,
             parse_uint),
      {"normalize_weights", "normalize explanation scores to sum to 1",
       [](RunConfig& c, const std::string& t) { c.normalize_weights = parse_bool("normalize_weights", t); },
       [](const RunConfig& c) { return std::string(c.normalize_weights ? "true" : "false"); }},
      number("bleu_threshold", "candidate negatives scoring at or above this are removed",
             &RunConfig::bleu_threshold, parse_double),
      number("bleu_order", "maximum n-gram order for BLEU", &RunConfig::bleu_order, parse_uint),
      {"data_rule_mode", "direct or transitive_flow",
       [](RunConfig& c, const std::string& t) { c.data_rule = data_rule_mode_from_string(t); },
       [](const RunConfig& c) { return to_string(c.data_rule); }},
      number("seed", "seed for sampling, training and splits", &RunConfig::seed, parse_uint),
      {"adapters", "view=endpoint pairs separated by ';'",
       [](RunConfig& c, const std::string& t) { c.adapters = t; },
       [](const RunConfig& c) { return c.adapters; }},
      number("neg_ratio", "candidate negatives sampled per vulnerable line",
             &RunConfig::neg_ratio, parse_double),
      number("workers", "worker threads, 0 for one per core", &RunConfig::workers, parse_uint),
      number("calibration_fraction", "share of the corpus used to fit thresholds",
             &RunConfig::calibration_fraction, parse_double),
  };
  return fields;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Precondition, "config " + what); };
  if (!(c.iou_threshold > 0.0 && c.iou_threshold <= 1.0)) fail("iou_threshold must lie in (0,1]");
  if (c.trust_threshold && !(*c.trust_threshold >= 0.0 && std::isfinite(*c.trust_threshold))) {
    fail("trust_threshold must be a finite non-negative number");
  }
  if (c.naive_threshold && !(*c.naive_threshold >= 0.0 && *c.naive_threshold <= 1.0)) {
    fail("naive_threshold must lie in [0,1]");
  }
  if (!(c.bleu_threshold >= 0.0 && c.bleu_threshold <= 1.0)) fail("bleu_threshold must lie in [0,1]");
  if (c.bleu_order < 1) fail("bleu_order must be at least 1");
  if (!(c.neg_ratio > 0.0 && std::isfinite(c.neg_ratio))) fail("neg_ratio must be positive");
  if (!(c.calibration_fraction >= 0.0 && c.calibration_fraction < 1.0)) {
    fail("calibration_fraction must lie in [0,1)");
  }
}

std::string run_config_to_toml(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : config_fields()) {
    std::string v = f.get(cfg);
    if (v.empty() && f.key != "adapters") {
      out << "# " << f.key << " is unset\n";
      continue;
    }
    bool text = f.key == "adapters" || f.key == "data_rule_mode";
    out << f.key << " = " << (text ? quote(v) : v) << "\n";
  }
  return out.str();
}

RunConfig run_config_from_toml(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::Schema, std::string("config file: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) {
      throw Error(ErrorKind::Schema, "config file: sections are not supported ('" +
                                         item.parents.front() + "')");
    }
    auto it = std::find_if(config_fields().begin(), config_fields().end(),
                           [&](const ConfigField& f) { return f.key == item.name; });
    if (it == config_fields().end()) {
      throw Error(ErrorKind::Schema, "config file: unknown key '" + item.name + "'");
    }
    if (item.inputs.size() != 1) {
      throw Error(ErrorKind::Schema, "config file: '" + item.name + "' needs exactly one value");
    }
    it->set(base, item.inputs.front());
  }
  return base;
}

RunConfig resolve_config(const std::optional<std::string>& file_text,
                         const std::map<std::string, std::string>& flags) {
  RunConfig cfg;
  if (file_text) cfg = run_config_from_toml(*file_text);
  for (const auto& f : config_fields()) {
    if (auto it = flags.find(f.key); it != flags.end()) f.set(cfg, it->second);
  }
  validate(cfg);
  return cfg;
}

}  // namespace linetrust
