#include "linetrust/line_dataset.hpp"

#include <algorithm>
#include <charconv>

#include "linetrust/bleu.hpp"
#include "linetrust/error.hpp"
#include "linetrust/random.hpp"
#include "linetrust/tokenizer.hpp"

namespace linetrust {

std::string to_string(LineLabel label) {
  return label == LineLabel::Vulnerable ? "vulnerable" : "non-vulnerable";
}

LineLabel line_label_from_string(const std::string& text) {
  if (text == "vulnerable") return LineLabel::Vulnerable;
  if (text == "non-vulnerable") return LineLabel::NonVulnerable;
  throw Error(ErrorKind::Schema, "unknown line label '" + text + "'");
}

LineSample::LineSample(std::string text, LineLabel label, LineOrigin origin)
    : text_(std::move(text)), label_(label), origin_(std::move(origin)) {
  if (normalize_line(text_).empty()) {
    throw Error(ErrorKind::Precondition, "line sample text is empty after normalization");
  }
}

namespace {

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// "-12,3" or "+4" -> (start, count)
std::pair<std::size_t, std::size_t> parse_range(std::string_view field) {
  field.remove_prefix(1);
  std::size_t start = 0, count = 1;
  auto comma = field.find(',');
  auto head = field.substr(0, comma);
  if (std::from_chars(head.data(), head.data() + head.size(), start).ec != std::errc{}) {
    throw Error(ErrorKind::DiffMismatch, "bad hunk range '" + std::string(field) + "'");
  }
  if (comma != std::string_view::npos) {
    auto tail = field.substr(comma + 1);
    if (std::from_chars(tail.data(), tail.data() + tail.size(), count).ec != std::errc{}) {
      throw Error(ErrorKind::DiffMismatch, "bad hunk range '" + std::string(field) + "'");
    }
  }
  return {start, count};
}

}  // namespace

std::set<LineId> extract_vulnerable_lines(std::string_view before_source,
                                          std::string_view diff) {
  const std::vector<std::string> source = split_lines(before_source);
  const std::vector<bool> code = code_line_mask(before_source);
  const std::vector<std::string> lines = split_lines(diff);

  std::set<LineId> out;
  std::size_t i = 0;
  while (i < lines.size()) {
    const std::string& header = lines[i++];
    if (header.rfind("@@", 0) != 0) continue;
    auto minus = header.find('-');
    auto space = header.find(' ', minus);
    if (minus == std::string::npos || space == std::string::npos) {
      throw Error(ErrorKind::DiffMismatch, "malformed hunk header '" + header + "'");
    }
    auto [old_start, old_count] = parse_range(std::string_view(header).substr(minus, space - minus));
    std::size_t old_line = old_count == 0 ? old_start + 1 : old_start;
    std::size_t consumed = 0;
    while (i < lines.size() && consumed < old_count) {
      std::string_view l = lines[i];
      if (l.rfind("@@", 0) == 0) break;
      ++i;
      char tag = l.empty() ? ' ' : l[0];
      std::string_view body = l.empty() ? l : l.substr(1);
      if (tag == '+' || tag == '\\') continue;
      if (tag != ' ' && tag != '-') {
        throw Error(ErrorKind::DiffMismatch, "unexpected diff line '" + std::string(l) + "'");
      }
      if (old_line == 0 || old_line > source.size() ||
          rstrip(source[old_line - 1]) != rstrip(body)) {
        throw Error(ErrorKind::DiffMismatch,
                    "hunk does not match source at line " + std::to_string(old_line));
      }
      if (tag == '-' && code[old_line - 1]) {
        out.insert(LineId(static_cast<std::uint32_t>(old_line)));
      }
      ++old_line;
      ++consumed;
    }
    if (consumed != old_count) {
      throw Error(ErrorKind::DiffMismatch, "hunk '" + header + "' is truncated");
    }
  }
  return out;
}

std::vector<LineSample> filter_negatives(const std::vector<LineSample>& candidates,
                                         const std::vector<LineSample>& vulnerable,
                                         double threshold, int max_order) {
  std::vector<std::vector<Token>> refs;
  refs.reserve(vulnerable.size());
  for (const auto& v : vulnerable) refs.push_back(tokenize_line(v.text()));
  BleuReferences references(refs, max_order);

  std::vector<LineSample> kept;
  for (const auto& c : candidates) {
    auto toks = tokenize_line(c.text());
    if (references.score(toks) < threshold) {
      kept.push_back(c.relabeled(LineLabel::NonVulnerable));
    }
  }
  return kept;
}

std::vector<LineSample> eligible_lines(const SourceFunction& fn, LineLabel label) {
  std::vector<LineSample> out;
  const auto mask = code_line_mask(fn.source);
  const auto lines = split_lines(strip_comments(fn.source));
  for (std::size_t i = 0; i < lines.size() && i < mask.size(); ++i) {
    if (!mask[i]) continue;
    out.emplace_back(normalize_line(lines[i]), label,
                     LineOrigin{fn.corpus, fn.function_id, static_cast<std::uint32_t>(i + 1)});
  }
  return out;
}

std::vector<LineSample> sample_candidate_negatives(const std::vector<SourceFunction>& functions,
                                                   std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::Precondition, "sample size must be at least 1");
  std::vector<LineSample> pool;
  for (const auto& fn : functions) {
    auto lines = eligible_lines(fn, LineLabel::NonVulnerable);
    pool.insert(pool.end(), std::make_move_iterator(lines.begin()),
                std::make_move_iterator(lines.end()));
  }
  if (pool.size() < n) {
    throw Error(ErrorKind::InsufficientData, "asked for " + std::to_string(n) +
                                                 " negative lines but only " +
                                                 std::to_string(pool.size()) + " are eligible");
  }
  // Partial Fisher-Yates: the first n slots end up a uniform sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(n), pool.end());
  return pool;
}

}  // namespace linetrust
