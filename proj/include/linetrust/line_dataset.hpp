#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "linetrust/pdg.hpp"

namespace linetrust {

enum class LineLabel { Vulnerable, NonVulnerable };

std::string to_string(LineLabel label);
LineLabel line_label_from_string(const std::string& text);

struct LineOrigin {
  std::string corpus;
  std::string function_id;
  std::uint32_t line = 0;
};

// A normalized line with a fixed label. Construction rejects lines that
// normalize to nothing.
class LineSample {
public:
  LineSample(std::string text, LineLabel label, LineOrigin origin);

  const std::string& text() const noexcept { return text_; }
  LineLabel label() const noexcept { return label_; }
  const LineOrigin& origin() const noexcept { return origin_; }

  LineSample relabeled(LineLabel label) const { return {text_, label, origin_}; }

private:
  std::string text_;
  LineLabel label_;
  LineOrigin origin_;
};

// Lines deleted or modified by `diff` in the pre-change source, minus
// comments, blank lines and delimiter-only lines. Throws DiffMismatch when a
// hunk's context or removed lines disagree with `before_source`.
std::set<LineId> extract_vulnerable_lines(std::string_view before_source,
                                          std::string_view diff);

// Keeps candidates whose BLEU against all vulnerable lines is strictly below
// `threshold`; survivors are labelled NonVulnerable.
std::vector<LineSample> filter_negatives(const std::vector<LineSample>& candidates,
                                         const std::vector<LineSample>& vulnerable,
                                         double threshold = 0.5, int max_order = 4);

struct SourceFunction {
  std::string corpus;
  std::string function_id;
  std::string source;
};

// n eligible lines drawn uniformly without replacement, reproducible from
// `seed`. Throws InsufficientData when fewer than n lines are eligible.
std::vector<LineSample> sample_candidate_negatives(const std::vector<SourceFunction>& functions,
                                                   std::size_t n, std::uint64_t seed);

// All eligible lines of one function, normalized.
std::vector<LineSample> eligible_lines(const SourceFunction& fn, LineLabel label);

}  // namespace linetrust
