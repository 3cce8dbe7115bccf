#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace linetrust {

// Three independent views of a normalized line, one per ensemble member.
enum class FeatureView {
  TokenNgram,   // token uni- and bigrams
  CharNgram,    // character 3..5-grams
  SyntaxShape,  // token-kind sequence, length buckets, keyword flags
};

std::string to_string(FeatureView view);
FeatureView feature_view_from_string(const std::string& text);

// Named features with raw counts.
std::map<std::string, double> raw_features(FeatureView view, std::string_view text);

class Vocabulary {
public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  // Features seen in `texts`, most frequent first when capped, stored sorted.
  static Vocabulary build(FeatureView view, const std::vector<std::string>& texts,
                          std::size_t max_features);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  // -1 when unknown.
  std::int64_t id(const std::string& name) const;

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct FeatureVector {
  FeatureView view;
  std::vector<std::pair<std::uint32_t, double>> entries;  // ascending ids, L2-normalised
};

// Log-scaled counts over the vocabulary; unknown features are ignored.
FeatureVector featurize(FeatureView view, const Vocabulary& vocab, std::string_view text);

}  // namespace linetrust
