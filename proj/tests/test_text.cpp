#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sttpp/text.hpp"

using namespace sttpp::text;

static Document make_doc(std::string id, std::vector<std::string> tokens) {
  Document d;
  d.id = std::move(id);
  d.tokens = std::move(tokens);
  return d;
}

TEST_CASE("tokenize folds case and drops stop-words") {
  std::set<std::string> stopwords = {"the"};
  CHECK(tokenize("The dog. THE DOG", stopwords) ==
        std::vector<std::string>{"dog", "dog"});
}

TEST_CASE("tokenize on empty input") {
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize splits on punctuation") {
  CHECK(tokenize("bedroom ransacked, jewelry!") ==
        std::vector<std::string>{"bedroom", "ransacked", "jewelry"});
}

TEST_CASE("tokenize drops single-character tokens") {
  CHECK(tokenize("x yz", {}) == std::vector<std::string>{"yz"});
}

TEST_CASE("build_vocabulary prunes by document frequency") {
  std::vector<Document> docs = {make_doc("1", {"a", "b"}),
                                make_doc("2", {"a", "c"}),
                                make_doc("3", {"a"})};
  const auto vocab = build_vocabulary(docs, 1, 0.9);
  CHECK(vocab.keywords == std::vector<std::string>{"b", "c"});
  CHECK(vocab.n_docs == 3);
}

TEST_CASE("build_vocabulary errors when pruning empties the vocabulary") {
  std::vector<Document> docs = {make_doc("1", {"a", "b"})};
  CHECK_THROWS(build_vocabulary(docs, 100, 1.0));
}

TEST_CASE("build_vocabulary prunes by corpus-wide count") {
  std::vector<Document> docs = {make_doc("1", {"x", "x", "y"})};
  const auto vocab = build_vocabulary(docs, 2, 1.0);
  CHECK(vocab.keywords == std::vector<std::string>{"x"});
}

TEST_CASE("tfidf_vectorize on out-of-vocabulary document") {
  std::vector<Document> docs = {make_doc("1", {"aa", "bb"}),
                                make_doc("2", {"aa"})};
  const auto vocab = build_vocabulary(docs, 1, 1.0);
  const auto v = tfidf_vectorize(make_doc("q", {"zz", "qq"}), vocab);
  for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("tfidf_vectorize matches the fixed formula") {
  // 2 docs, keyword "kw" in 1 of them; query doc has 4 tokens, "kw" twice:
  // tf = 2/4, idf = ln((1+2)/(1+1))
  std::vector<Document> docs = {make_doc("1", {"kw", "other"}),
                                make_doc("2", {"other", "more"})};
  const auto vocab = build_vocabulary(docs, 1, 1.0);
  const auto v = tfidf_vectorize(make_doc("q", {"kw", "kw", "other", "filler"}), vocab);
  const auto l = vocab.index_of("kw");
  CHECK(v[l] == doctest::Approx(0.2027325540540822).epsilon(1e-12));
}

TEST_CASE("identical documents produce identical vectors") {
  std::vector<Document> docs = {make_doc("1", {"aa", "bb", "cc"}),
                                make_doc("2", {"bb", "cc"})};
  const auto vocab = build_vocabulary(docs, 1, 1.0);
  const auto d1 = make_doc("x", {"aa", "cc"});
  const auto d2 = make_doc("y", {"aa", "cc"});
  CHECK(tfidf_vectorize(d1, vocab) == tfidf_vectorize(d2, vocab));
}

TEST_CASE("monotone pruning: raising min_tf never adds a keyword") {
  std::vector<Document> docs = {
      make_doc("1", {"aa", "aa", "bb", "cc"}),
      make_doc("2", {"aa", "bb"}),
      make_doc("3", {"dd", "dd", "dd"})};
  for (std::size_t lo = 1; lo < 3; ++lo) {
    const auto small = build_vocabulary(docs, lo + 1, 1.0);
    const auto large = build_vocabulary(docs, lo, 1.0);
    for (const auto& kw : small.keywords) {
      CHECK(large.index_of(kw) != Vocabulary::npos);
    }
  }
}

TEST_CASE("tfidf support lies inside vocabulary intersect document") {
  std::vector<Document> docs = {make_doc("1", {"aa", "bb", "cc"}),
                                make_doc("2", {"aa", "dd"})};
  const auto vocab = build_vocabulary(docs, 1, 1.0);
  const auto doc = make_doc("q", {"bb", "zz"});
  const auto v = tfidf_vectorize(doc, vocab);
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (v[l] != 0.0) {
      const auto& kw = vocab.keywords[l];
      CHECK(std::count(doc.tokens.begin(), doc.tokens.end(), kw) > 0);
    }
  }
}

TEST_CASE("determinism: rebuilding the vocabulary is byte-identical") {
  std::vector<Document> docs = {make_doc("1", {"cc", "aa", "bb"}),
                                make_doc("2", {"bb", "aa"})};
  const auto v1 = build_vocabulary(docs, 1, 1.0);
  const auto v2 = build_vocabulary(docs, 1, 1.0);
  CHECK(v1.keywords == v2.keywords);
  CHECK(v1.doc_freq == v2.doc_freq);
  CHECK(v1.idf == v2.idf);
}
