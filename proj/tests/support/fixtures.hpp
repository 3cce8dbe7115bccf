#pragma once

#include <memory>
#include <string>

#include "linetrust/classifier.hpp"
#include "linetrust/model_store.hpp"
#include "linetrust/pdg.hpp"
#include "linetrust/serialize.hpp"

#ifndef LINETRUST_FIXTURE_DIR
#error "LINETRUST_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace fixture {

inline std::string path(const std::string& name) {
  return std::string(LINETRUST_FIXTURE_DIR) + "/" + name;
}

inline linetrust::LineId L(std::uint32_t v) { return linetrust::LineId(v); }

// The worked-example graph, built by hand: 1->3 data(file), 3->4, 3->5,
// 3->7 control, 7->8 data(file), 8->9 data(count).
inline linetrust::Pdg vrrp_pdg() {
  using namespace linetrust;
  return pdg_from_json(Json::parse(read_text_file(path("vrrp_pdg.json"))));
}

inline linetrust::Explanation vrrp_explanation() {
  using namespace linetrust;
  return explanation_from_json(Json::parse(read_text_file(path("vrrp_explanation.json"))));
}

// Scores 0.1 for lines calling fopen and 0.9 otherwise: only line 7 of the
// worked example is non-benign.
inline linetrust::Ensemble stub_ensemble(std::size_t k = 3) {
  linetrust::Ensemble e;
  for (std::size_t i = 0; i < k; ++i) {
    e.push_back(std::make_shared<linetrust::RuleClassifier>(
        "stub" + std::to_string(i), 0.9,
        std::vector<linetrust::RuleClassifier::Rule>{{"fopen", 0.1}}));
  }
  return e;
}

// Fixed-score classifier.
class ConstantClassifier final : public linetrust::LineClassifier {
public:
  explicit ConstantClassifier(double s, double threshold = 0.5) : s_(s), t_(threshold) {}
  double score(std::string_view) const override { return s_; }
  double threshold() const override { return t_; }
  std::string name() const override { return "constant"; }

private:
  double s_, t_;
};

}  // namespace fixture
