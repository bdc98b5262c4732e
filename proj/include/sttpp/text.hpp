#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sttpp/matrix.hpp"

namespace sttpp::text {

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
};

struct Vocabulary {
  std::vector<std::string> keywords;  // unique, sorted
  std::vector<std::size_t> doc_freq;
  Vec idf;
  std::size_t n_docs = 0;

  std::size_t size() const { return keywords.size(); }

  // index of keyword, or npos
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index_of(const std::string& kw) const {
    auto it = std::lower_bound(keywords.begin(), keywords.end(), kw);
    if (it == keywords.end() || *it != kw) return npos;
    return static_cast<std::size_t>(it - keywords.begin());
  }
};

using BowVector = Vec;  // dense TF-IDF weights, length vocab.size()

inline const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",       "about",  "above",   "after",  "again",  "against", "all",
      "am",      "an",     "and",     "any",    "are",    "as",      "at",
      "be",      "because","been",    "before", "being",  "below",   "between",
      "both",    "but",    "by",      "can",    "could",  "did",     "do",
      "does",    "doing",  "down",    "during", "each",   "few",     "for",
      "from",    "further","had",     "has",    "have",   "having",  "he",
      "her",     "here",   "hers",    "him",    "his",    "how",     "i",
      "if",      "in",     "into",    "is",     "it",     "its",     "just",
      "me",      "more",   "most",    "my",     "no",     "nor",     "not",
      "now",     "of",     "off",     "on",     "once",   "only",    "or",
      "other",   "our",    "ours",    "out",    "over",   "own",     "same",
      "she",     "should", "so",      "some",   "such",   "than",    "that",
      "the",     "their",  "theirs",  "them",   "then",   "there",   "these",
      "they",    "this",   "those",   "through","to",     "too",     "under",
      "until",   "up",     "very",    "was",    "we",     "were",    "what",
      "when",    "where",  "which",   "while",  "who",    "whom",    "why",
      "will",    "with",   "you",     "your",   "yours"};
  return words;
}

// lowercase, split on non-alphabetic characters, drop stop-words and
// tokens shorter than 2 characters
inline std::vector<std::string> tokenize(
    const std::string& raw_text,
    const std::set<std::string>& stopwords = default_stopwords()) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2 && stopwords.count(cur) == 0) out.push_back(cur);
    cur.clear();
  };
  for (unsigned char ch : raw_text) {
    if (std::isalpha(ch)) {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// Prune by corpus-wide term count and document-frequency ratio.
// idf(l) = ln((1 + n_docs) / (1 + doc_freq(l))), smoothed.
inline Vocabulary build_vocabulary(const std::vector<Document>& docs,
                                   std::size_t min_tf, double max_df_ratio) {
  if (docs.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
  std::map<std::string, std::size_t> term_count;
  std::map<std::string, std::size_t> doc_count;
  for (const auto& d : docs) {
    std::set<std::string> seen;
    for (const auto& tok : d.tokens) {
      ++term_count[tok];
      seen.insert(tok);
    }
    for (const auto& tok : seen) ++doc_count[tok];
  }
  Vocabulary vocab;
  vocab.n_docs = docs.size();
  const double n = static_cast<double>(docs.size());
  for (const auto& [kw, count] : term_count) {
    const std::size_t df = doc_count[kw];
    if (count < min_tf) continue;
    if (static_cast<double>(df) / n > max_df_ratio) continue;
    vocab.keywords.push_back(kw);
    vocab.doc_freq.push_back(df);
    vocab.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))));
  }
  if (vocab.keywords.empty()) {
    throw std::runtime_error("build_vocabulary: pruning removed every keyword");
  }
  return vocab;
}

// tf(l, d) = count(l, d) / |tokens(d)|; no length normalization, so the
// absolute selection threshold tau keeps its meaning downstream.
inline BowVector tfidf_vectorize(const Document& doc, const Vocabulary& vocab) {
  BowVector values(vocab.size(), 0.0);
  if (doc.tokens.empty()) return values;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& tok : doc.tokens) ++counts[tok];
  const double len = static_cast<double>(doc.tokens.size());
  for (const auto& [tok, count] : counts) {
    const std::size_t l = vocab.index_of(tok);
    if (l == Vocabulary::npos) continue;
    values[l] = (static_cast<double>(count) / len) * vocab.idf[l];
  }
  return values;
}

}  // namespace sttpp::text
