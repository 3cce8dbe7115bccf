#include "linetrust/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "linetrust/error.hpp"

namespace linetrust {

namespace {

std::map<std::vector<std::string>, int> ngram_counts(std::span<const Token> toks, int n) {
  std::map<std::vector<std::string>, int> counts;
  if (toks.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::vector<std::string> gram;
    gram.reserve(n);
    for (int k = 0; k < n; ++k) gram.push_back(toks[i + k].text);
    ++counts[gram];
  }
  return counts;
}

}  // namespace

BleuReferences::BleuReferences(std::span<const std::vector<Token>> references,
                               int max_order)
    : max_order_(max_order), max_counts_(max_order > 0 ? max_order : 0) {
  if (max_order < 1) throw Error(ErrorKind::UndefinedInput, "BLEU max_order must be >= 1");
  for (const auto& ref : references) {
    lengths_.push_back(ref.size());
    for (int n = 1; n <= max_order_; ++n) {
      for (auto& [gram, c] : ngram_counts(ref, n)) {
        int& slot = max_counts_[n - 1][gram];
        slot = std::max(slot, c);
      }
    }
  }
  std::sort(lengths_.begin(), lengths_.end());
}

double BleuReferences::score(std::span<const Token> candidate) const {
  if (candidate.empty()) {
    throw Error(ErrorKind::UndefinedInput, "BLEU candidate is empty");
  }
  if (lengths_.empty()) return 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_order_; ++n) {
    auto counts = ngram_counts(candidate, n);
    if (counts.empty()) continue;
    long total = 0;
    long clipped = 0;
    for (const auto& [gram, c] : counts) {
      total += c;
      auto it = max_counts_[n - 1].find(gram);
      if (it != max_counts_[n - 1].end()) clipped += std::min(c, it->second);
    }
    double matched = clipped == 0 ? kBleuEpsilon : static_cast<double>(clipped);
    log_sum += std::log(matched / static_cast<double>(total));
    ++orders;
  }

  // Closest reference length; ties go to the shorter reference.
  const double c = static_cast<double>(candidate.size());
  std::size_t best = lengths_.front();
  for (std::size_t len : lengths_) {
    double d = std::abs(static_cast<double>(len) - c);
    double bd = std::abs(static_cast<double>(best) - c);
    if (d < bd) best = len;
  }
  double r = static_cast<double>(best);
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / orders);
}

double bleu(std::span<const Token> candidate,
            std::span<const std::vector<Token>> references, int max_order) {
  return BleuReferences(references, max_order).score(candidate);
}

}  // namespace linetrust
