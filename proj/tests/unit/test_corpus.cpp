#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>

#include "coldstart/corpus.hpp"
#include "unit/helpers.hpp"

using namespace coldstart;

TEST_CASE("load_corpus: empty file gives an empty corpus") {
  testing::TempDir dir;
  CHECK(load_corpus(dir.write("c.jsonl", "")).empty());
}

TEST_CASE("load_corpus: field mapping and warm default") {
  testing::TempDir dir;
  auto p = dir.write("c.jsonl",
                     "{\"id\":\"j1\",\"body\":\"HVAC mechanic\",\"warm\":true}\n"
                     "\n"
                     "{\"id\":\"j2\",\"body\":\"x\",\"title\":\"T\",\"classification\":\"C1\",\"location\":\"NYC\","
                     "\"requirements\":\"r\",\"skills\":[\"a\",\"b\"]}\n");
  auto docs = load_corpus(p);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "j1");
  CHECK(docs[0].body == "HVAC mechanic");
  CHECK(docs[0].warm);
  CHECK_FALSE(docs[1].warm);
  CHECK(docs[1].title == "T");
  CHECK(docs[1].classification == "C1");
  CHECK(docs[1].location == "NYC");
  CHECK(docs[1].requirements == "r");
  CHECK(docs[1].skills == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_corpus: errors") {
  testing::TempDir dir;
  SUBCASE("duplicate id names the id") {
    auto p = dir.write("c.jsonl", "{\"id\":\"j1\",\"body\":\"a\"}\n{\"id\":\"j1\",\"body\":\"b\"}\n");
    try {
      load_corpus(p);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("j1") != std::string::npos);
    }
  }
  SUBCASE("malformed line reports its number") {
    auto p = dir.write("c.jsonl", "{\"id\":\"j1\",\"body\":\"a\"}\n{oops\n");
    try {
      load_corpus(p);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("missing id or body") {
    CHECK_THROWS_AS(load_corpus(dir.write("a.jsonl", "{\"body\":\"a\"}\n")), DataError);
    CHECK_THROWS_AS(load_corpus(dir.write("b.jsonl", "{\"id\":\"x\"}\n")), DataError);
    CHECK_THROWS_AS(load_corpus(dir.write("c.jsonl", "{\"id\":\"x\",\"body\":\"\"}\n")), DataError);
  }
  SUBCASE("unreadable file") { CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl"), DataError); }
  SUBCASE("wrong types") {
    CHECK_THROWS_AS(load_corpus(dir.write("w.jsonl", "{\"id\":\"x\",\"body\":\"b\",\"warm\":1}\n")), DataError);
    CHECK_THROWS_AS(load_corpus(dir.write("s.jsonl", "{\"id\":\"x\",\"body\":\"b\",\"skills\":\"a\"}\n")), DataError);
  }
}

TEST_CASE("load_corpus: unknown fields are ignored") {
  testing::TempDir dir;
  auto docs = load_corpus(dir.write("c.jsonl", "{\"id\":\"j1\",\"body\":\"a\",\"salary\":5}\n"));
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].body == "a");
}

TEST_CASE("save_corpus round-trips") {
  testing::TempDir dir;
  std::vector<Document> docs(2);
  docs[0] = {"a", "Title", "body one", "C", "L", "req", {"s1", "s2"}, true};
  docs[1] = {"b", "", "body \"two\"\nline", "", "", "", {}, false};
  save_corpus(dir / "c.jsonl", docs);
  auto back = load_corpus(dir / "c.jsonl");
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].id == docs[i].id);
    CHECK(back[i].title == docs[i].title);
    CHECK(back[i].body == docs[i].body);
    CHECK(back[i].classification == docs[i].classification);
    CHECK(back[i].location == docs[i].location);
    CHECK(back[i].requirements == docs[i].requirements);
    CHECK(back[i].skills == docs[i].skills);
    CHECK(back[i].warm == docs[i].warm);
  }
}

TEST_CASE("tokenize: worked examples") {
  const TokenizerOptions off{.remove_stopwords = false};
  CHECK(tokenize("HVAC Technician - PM", off) == std::vector<std::string>{"hvac", "technician", "pm"});
  CHECK(tokenize("", off).empty());
  CHECK(tokenize("C++ & Java, Java!", off) == std::vector<std::string>{"java", "java"});
}

TEST_CASE("tokenize: stopwords are toggleable") {
  CHECK(tokenize("the manager and the team") == std::vector<std::string>{"manager", "team"});
  CHECK(tokenize("the manager and the team", {.remove_stopwords = false}).size() == 5);
  CHECK(is_stopword("the"));
  CHECK_FALSE(is_stopword("java"));
}

TEST_CASE("tokenize: property - tokens are lowercase alphanumeric, length >= 2, idempotent") {
  Rng rng(7);
  const std::string alphabet = "aZ09 -_.,!?&+\t\nqQxX";
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const std::size_t len = uniform_index(rng, 60);
    for (std::size_t i = 0; i < len; ++i) text += alphabet[uniform_index(rng, alphabet.size())];
    for (bool stop : {true, false}) {
      const TokenizerOptions opt{.remove_stopwords = stop};
      auto tokens = tokenize(text, opt);
      std::string joined;
      for (const auto& t : tokens) {
        CHECK(t.size() >= 2);
        CHECK(std::all_of(t.begin(), t.end(), [](unsigned char c) {
          return std::isdigit(c) || (std::isalpha(c) && std::islower(c));
        }));
        joined += t + " ";
      }
      CHECK(tokenize(joined, opt) == tokens);
    }
  }
}

TEST_CASE("build_vocabulary: worked examples") {
  std::vector<TokenizedDocument> docs = {{"d", {"a", "b", "b"}}};
  auto v1 = build_vocabulary(docs, 1);
  CHECK(v1.size() == 2);
  CHECK(v1.index_of("b") == 0);
  CHECK(v1.index_of("a") == 1);
  auto v2 = build_vocabulary(docs, 2);
  CHECK(v2.size() == 1);
  CHECK(v2.index_of("b") == 0);
  CHECK_FALSE(v2.index_of("a"));

  std::vector<TokenizedDocument> single = {{"d", {"a"}}};
  CHECK_THROWS_AS(build_vocabulary(single, 2), DataError);
  CHECK_THROWS_AS(build_vocabulary(std::vector<TokenizedDocument>{}, 1), DataError);
  CHECK_THROWS_AS(build_vocabulary(docs, 0), UsageError);
}

TEST_CASE("build_vocabulary: ties are lexicographic") {
  std::vector<TokenizedDocument> docs = {{"d", {"zz", "aa", "mm", "aa", "zz"}}};
  auto v = build_vocabulary(docs, 1);
  CHECK(v.token_of(0) == "aa");
  CHECK(v.token_of(1) == "zz");
  CHECK(v.token_of(2) == "mm");
}

TEST_CASE("build_vocabulary: properties on random corpora") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenizedDocument> docs(1 + uniform_index(rng, 6));
    std::map<std::string, std::int64_t> counts;
    for (auto& d : docs) {
      const std::size_t n = 1 + uniform_index(rng, 15);
      for (std::size_t i = 0; i < n; ++i) {
        d.tokens.push_back(testing::random_token(rng, 8));
        ++counts[d.tokens.back()];
      }
    }
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (int min_count = 1; min_count <= 6; ++min_count) {
      std::size_t expected = 0;
      for (const auto& [t, c] : counts) expected += c >= min_count;
      if (expected == 0) {
        CHECK_THROWS_AS(build_vocabulary(docs, min_count), DataError);
        continue;
      }
      auto v = build_vocabulary(docs, min_count);
      CHECK(v.size() == expected);
      CHECK(v.size() <= previous);
      previous = v.size();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& t = v.token_of(static_cast<int>(i));
        CHECK(v.index_of(t) == static_cast<int>(i));
        CHECK(v.frequency(static_cast<int>(i)) == counts[t]);
        CHECK(v.frequency(static_cast<int>(i)) >= min_count);
        if (i > 0) {
          const auto& prev = v.token_of(static_cast<int>(i - 1));
          CHECK((counts[prev] > counts[t] || (counts[prev] == counts[t] && prev < t)));
        }
      }
    }
  }
}

TEST_CASE("Vocabulary: encode drops unknown tokens, save/load round-trips") {
  std::vector<TokenizedDocument> docs = {{"d", {"aa", "bb", "bb", "cc"}}};
  auto v = build_vocabulary(docs, 1);
  std::vector<std::string> tokens = {"cc", "zz", "bb"};
  CHECK(v.encode(tokens) == std::vector<int>{*v.index_of("cc"), *v.index_of("bb")});
  testing::TempDir dir;
  v.save(dir / "v.tsv");
  auto back = Vocabulary::load(dir / "v.tsv");
  REQUIRE(back.size() == v.size());
  CHECK(back.min_count() == v.min_count());
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    CHECK(back.token_of(i) == v.token_of(i));
    CHECK(back.frequency(i) == v.frequency(i));
  }
}
