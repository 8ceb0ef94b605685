#include <doctest.h>

#include <cmath>
#include <memory>

#include "coldstart/tfidf.hpp"
#include "oracles.hpp"
#include "unit/helpers.hpp"

using namespace coldstart;

namespace {

struct Fitted {
  std::vector<TokenizedDocument> docs;
  TfIdfModel model;
};

Fitted fit(std::vector<std::vector<std::string>> token_lists) {
  std::vector<TokenizedDocument> docs;
  for (std::size_t i = 0; i < token_lists.size(); ++i) docs.push_back({"d" + std::to_string(i), token_lists[i]});
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs, 1));
  auto model = fit_tfidf(docs, vocab);
  return {std::move(docs), std::move(model)};
}

double weight(const SparseVector& v, const TfIdfModel& m, const std::string& token) {
  auto idx = m.vocabulary().index_of(token);
  return idx ? v.coeff(*idx) : 0.0;
}

}  // namespace

TEST_CASE("fit_tfidf: document frequencies") {
  auto f = fit({{"a", "b"}, {"b", "c"}, {"b"}});
  const auto& v = f.model.vocabulary();
  CHECK(f.model.corpus_size() == 3);
  CHECK(f.model.document_frequency(*v.index_of("a")) == 1);
  CHECK(f.model.document_frequency(*v.index_of("b")) == 3);
  CHECK(f.model.document_frequency(*v.index_of("c")) == 1);
  CHECK(f.model.idf(*v.index_of("b")) == doctest::Approx(std::log(3.0 / 4.0)).epsilon(1e-12));
  CHECK(std::log(3.0 / 4.0) == doctest::Approx(-0.2877).epsilon(1e-4));

  auto single = fit({{"a"}});
  CHECK(single.model.corpus_size() == 1);
  CHECK(single.model.document_frequency(0) == 1);
  CHECK_THROWS_AS(fit_tfidf(std::vector<TokenizedDocument>{}, single.model.vocabulary_ptr()), DataError);
}

TEST_CASE("transform_tfidf: worked examples") {
  auto f = fit({{"a", "b"}, {"b", "c"}, {"b"}});
  auto va = transform_tfidf(f.model, {"q", {"a", "a"}});
  CHECK(weight(va, f.model, "a") == doctest::Approx(2 * std::log(1.5)).epsilon(1e-12));
  CHECK(2 * std::log(1.5) == doctest::Approx(0.8109).epsilon(1e-4));
  CHECK(va.nonZeros() == 1);

  CHECK(transform_tfidf(f.model, {"q", {"zz", "yy"}}).nonZeros() == 0);

  auto vb = transform_tfidf(f.model, {"q", {"b"}});
  CHECK(weight(vb, f.model, "b") == doctest::Approx(std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("transform_tfidf: zero weights are not stored") {
  // N=2, df=1 gives idf = ln(2/2) = 0.
  auto f = fit({{"a", "b"}, {"b"}});
  auto v = transform_tfidf(f.model, {"q", {"a", "b"}});
  CHECK(v.nonZeros() == 1);
  for (SparseVector::InnerIterator it(v); it; ++it) CHECK(it.value() != 0.0);
}

TEST_CASE("transform_tfidf: oracle equivalence, linearity and idf monotonicity on random corpora") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::string>> lists(1 + uniform_index(rng, 20));
    for (auto& l : lists)
      for (std::size_t i = 0, n = 1 + uniform_index(rng, 50); i < n; ++i)
        l.push_back(testing::random_token(rng, 12));
    auto f = fit(lists);
    std::set<std::string> vocab;
    for (std::size_t i = 0; i < f.model.vocabulary().size(); ++i)
      vocab.insert(f.model.vocabulary().token_of(static_cast<int>(i)));
    const auto expected = oracle::tfidf(lists, vocab);
    for (std::size_t d = 0; d < lists.size(); ++d) {
      auto v = transform_tfidf(f.model, f.docs[d]);
      CHECK(static_cast<std::size_t>(v.nonZeros()) == expected[d].size());
      for (const auto& [token, w] : expected[d]) CHECK(std::abs(weight(v, f.model, token) - w) <= 1e-9);

      TokenizedDocument doubled = f.docs[d];
      doubled.tokens.insert(doubled.tokens.end(), f.docs[d].tokens.begin(), f.docs[d].tokens.end());
      auto v2 = transform_tfidf(f.model, doubled);
      CHECK((v2 - 2.0 * v).norm() <= 1e-12);
    }
    for (std::size_t i = 0; i < f.model.vocabulary().size(); ++i)
      for (std::size_t j = 0; j < f.model.vocabulary().size(); ++j) {
        const int a = static_cast<int>(i), b = static_cast<int>(j);
        if (f.model.document_frequency(a) <= f.model.document_frequency(b)) CHECK(f.model.idf(a) >= f.model.idf(b));
      }
  }
}

TEST_CASE("TfIdfModel: save/load round-trip") {
  auto f = fit({{"a", "b"}, {"b", "c"}, {"b"}});
  testing::TempDir dir;
  f.model.save(dir / "m.tsv");
  auto back = TfIdfModel::load(dir / "m.tsv");
  CHECK(back.corpus_size() == 3);
  REQUIRE(back.vocabulary().size() == f.model.vocabulary().size());
  for (int i = 0; i < static_cast<int>(back.vocabulary().size()); ++i) {
    CHECK(back.vocabulary().token_of(i) == f.model.vocabulary().token_of(i));
    CHECK(back.document_frequency(i) == f.model.document_frequency(i));
  }
  auto v1 = transform_tfidf(f.model, f.docs[0]);
  auto v2 = transform_tfidf(back, f.docs[0]);
  CHECK((v1 - v2).norm() == 0.0);
  CHECK_THROWS_AS(TfIdfModel::load(dir.write("bad.tsv", "garbage\n")), DataError);
}
