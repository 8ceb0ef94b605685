#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coldstart/cf.hpp"
#include "coldstart/corpus.hpp"
#include "coldstart/synthetic.hpp"
#include "oracles.hpp"

namespace fixtures {

/// Five warm job ads with ratings plus two cold ads that near-copy w1 and w3.
struct SmallCatalog {
  std::filesystem::path corpus;
  std::filesystem::path ratings;
};

inline coldstart::Document job(std::string id, std::string body, bool warm) {
  coldstart::Document d;
  d.id = std::move(id);
  d.body = std::move(body);
  d.warm = warm;
  return d;
}

inline SmallCatalog write_small_catalog(const std::filesystem::path& dir) {
  const std::vector<coldstart::Document> docs = {
      job("w1", "python backend developer django rest api services", true),
      job("w2", "registered nurse hospital ward patient care", true),
      job("w3", "truck driver delivery route logistics license", true),
      job("w4", "accountant ledger audit tax reporting", true),
      job("w5", "chef kitchen restaurant menu cooking", true),
      job("c1", "python backend developer django rest api remote", false),
      job("c2", "truck driver delivery route logistics night", false),
  };
  const std::vector<coldstart::RatingMatrix::Entry> ratings = {
      {"u1", "w2", 5}, {"u1", "w4", 4}, {"u2", "w1", 5}, {"u2", "w2", 4}, {"u2", "w3", 3},
      {"u3", "w3", 5}, {"u3", "w4", 4}, {"u3", "w5", 2}, {"u4", "w1", 3}, {"u4", "w5", 4},
  };
  SmallCatalog out{dir / "corpus.jsonl", dir / "ratings.tsv"};
  coldstart::save_corpus(out.corpus, docs);
  coldstart::write_ratings_tsv(out.ratings, ratings);
  return out;
}

inline std::string item_id(std::size_t i) { return "i" + std::string(i < 10 ? "0" : "") + std::to_string(i); }
inline std::string user_id(std::size_t u) { return "u" + std::string(u < 10 ? "0" : "") + std::to_string(u); }

/// Random dense ratings where every item has at least one rating; ids are
/// zero-padded so index order matches id order.
inline oracle::Dense random_ratings(coldstart::Rng& rng, std::size_t users, std::size_t items, double density) {
  oracle::Dense r(users, std::vector<std::optional<double>>(items));
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t i = 0; i < items; ++i)
      if (coldstart::uniform01(rng) < density) r[u][i] = 1.0 + static_cast<double>(coldstart::uniform_index(rng, 5));
  for (std::size_t i = 0; i < items; ++i) {
    bool any = false;
    for (std::size_t u = 0; u < users; ++u) any = any || r[u][i].has_value();
    if (!any) r[coldstart::uniform_index(rng, users)][i] = 3.0;
  }
  return r;
}

inline coldstart::RatingMatrix to_matrix(const oracle::Dense& r) {
  std::vector<coldstart::RatingMatrix::Entry> e;
  std::vector<std::string> users;
  for (std::size_t u = 0; u < r.size(); ++u) {
    users.push_back(user_id(u));
    for (std::size_t i = 0; i < r[u].size(); ++i)
      if (r[u][i]) e.push_back({user_id(u), item_id(i), *r[u][i]});
  }
  return coldstart::RatingMatrix::from_entries(e, users);
}

}  // namespace fixtures
