#include "linetrust/features.hpp"

#include <algorithm>
#include <cmath>

#include "linetrust/error.hpp"
#include "linetrust/tokenizer.hpp"

namespace linetrust {

std::string to_string(FeatureView view) {
  switch (view) {
    case FeatureView::TokenNgram: return "token-ngram";
    case FeatureView::CharNgram: return "char-ngram";
    case FeatureView::SyntaxShape: return "syntax-shape";
  }
  return "?";
}

FeatureView feature_view_from_string(const std::string& text) {
  if (text == "token-ngram") return FeatureView::TokenNgram;
  if (text == "char-ngram") return FeatureView::CharNgram;
  if (text == "syntax-shape") return FeatureView::SyntaxShape;
  throw Error(ErrorKind::Schema, "unknown feature view '" + text + "'");
}

namespace {

std::string bucket(std::size_t n) {
  if (n <= 2) return std::to_string(n);
  if (n <= 4) return "3-4";
  if (n <= 8) return "5-8";
  if (n <= 16) return "9-16";
  if (n <= 32) return "17-32";
  return "33+";
}

std::string kind_tag(const Token& t) {
  switch (t.kind) {
    case TokenKind::Identifier: return "ID";
    case TokenKind::Keyword: return t.text;
    case TokenKind::Literal: return t.text == "STR" || t.text == "CHR" ? t.text : "NUM";
    case TokenKind::Operator: return t.text;
    case TokenKind::Punct: return t.text;
  }
  return "?";
}

}  // namespace

std::map<std::string, double> raw_features(FeatureView view, std::string_view text) {
  std::map<std::string, double> f;
  switch (view) {
    case FeatureView::TokenNgram: {
      auto toks = tokenize_line(text);
      for (std::size_t i = 0; i < toks.size(); ++i) {
        f["u:" + toks[i].text] += 1;
        std::string prev = i == 0 ? "<s>" : toks[i - 1].text;
        f["b:" + prev + " " + toks[i].text] += 1;
      }
      if (!toks.empty()) f["b:" + toks.back().text + " </s>"] += 1;
      break;
    }
    case FeatureView::CharNgram: {
      std::string padded = " " + std::string(text) + " ";
      for (std::size_t n = 3; n <= 5; ++n) {
        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
          f["c:" + padded.substr(i, n)] += 1;
        }
      }
      break;
    }
    case FeatureView::SyntaxShape: {
      auto toks = tokenize_line(text);
      std::string prev = "<s>";
      for (const auto& t : toks) {
        std::string tag = kind_tag(t);
        f["k:" + tag] += 1;
        f["kk:" + prev + " " + tag] += 1;
        if (t.kind == TokenKind::Keyword) f["kw:" + t.text] = 1;
        prev = std::move(tag);
      }
      f["kk:" + prev + " </s>"] += 1;
      f["ntok:" + bucket(toks.size())] = 1;
      f["nchr:" + bucket(text.size() / 4)] = 1;
      std::size_t calls = 0;
      for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].kind == TokenKind::Identifier && toks[i + 1].text == "(") ++calls;
      }
      f["calls:" + bucket(calls)] = 1;
      break;
    }
  }
  return f;
}

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    index_.emplace(names_[i], static_cast<std::uint32_t>(i));
  }
}

Vocabulary Vocabulary::build(FeatureView view, const std::vector<std::string>& texts,
                             std::size_t max_features) {
  std::map<std::string, std::size_t> df;
  for (const auto& t : texts) {
    for (const auto& [name, c] : raw_features(view, t)) ++df[name];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  if (max_features > 0 && ranked.size() > max_features) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(max_features);
  }
  std::vector<std::string> names;
  names.reserve(ranked.size());
  for (auto& [name, c] : ranked) names.push_back(std::move(name));
  std::sort(names.begin(), names.end());
  return Vocabulary(std::move(names));
}

std::int64_t Vocabulary::id(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

FeatureVector featurize(FeatureView view, const Vocabulary& vocab, std::string_view text) {
  FeatureVector fv{view, {}};
  double norm = 0.0;
  for (const auto& [name, count] : raw_features(view, text)) {
    std::int64_t id = vocab.id(name);
    if (id < 0) continue;
    double v = 1.0 + std::log(count);
    fv.entries.emplace_back(static_cast<std::uint32_t>(id), v);
    norm += v * v;
  }
  std::sort(fv.entries.begin(), fv.entries.end());
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [id, v] : fv.entries) v /= norm;
  }
  return fv;
}

}  // namespace linetrust
