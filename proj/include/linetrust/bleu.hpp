#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "linetrust/tokenizer.hpp"

namespace linetrust {

inline constexpr double kBleuEpsilon = 1e-9;

// Reference side of BLEU, preprocessed once: for every n-gram the largest
// count seen in any single reference, plus the reference lengths.
class BleuReferences {
public:
  BleuReferences(std::span<const std::vector<Token>> references, int max_order);

  int max_order() const noexcept { return max_order_; }
  bool empty() const noexcept { return lengths_.empty(); }

  // Sentence BLEU of `candidate` against every reference at once.
  double score(std::span<const Token> candidate) const;

private:
  int max_order_;
  std::vector<std::map<std::vector<std::string>, int>> max_counts_;  // per order
  std::vector<std::size_t> lengths_;
};

// Geometric mean of clipped n-gram precisions for orders 1..max_order times
// the brevity penalty against the closest reference length. Orders with no
// candidate n-grams are skipped; a zero clipped count is replaced by epsilon.
// Throws UndefinedInput for an empty candidate or max_order < 1.
double bleu(std::span<const Token> candidate,
            std::span<const std::vector<Token>> references, int max_order = 4);

}  // namespace linetrust
