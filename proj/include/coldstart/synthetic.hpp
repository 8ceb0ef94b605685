#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coldstart/cf.hpp"
#include "coldstart/corpus.hpp"

namespace coldstart {

/// Generated documents with one label per document (same order).
struct LabeledCorpus {
  std::vector<Document> docs;
  std::vector<std::string> labels;
};

/// Two clusters of `docs_per_cluster` documents; each cluster draws
/// `tokens_per_doc` tokens uniformly from its own `vocab_per_cluster` words
/// and the two vocabularies are disjoint.
LabeledCorpus cluster_corpus(std::uint64_t seed, std::size_t docs_per_cluster = 100,
                             std::size_t vocab_per_cluster = 50, std::size_t tokens_per_doc = 80);

/// Job-posting-like corpus: every company has one fixed boilerplate passage
/// reused verbatim by all of its postings, and every role has its own word
/// pool. A posting is its company's boilerplate followed by a role section
/// drawn from the role pool; the role section is also stored as the
/// document's requirements field. Labels are role names.
struct BoilerplateConfig {
  std::size_t docs = 300;
  std::size_t companies = 10;
  std::size_t roles = 10;
  std::size_t company_vocab = 40;
  std::size_t role_vocab = 200;
  std::size_t boilerplate_tokens = 70;
  std::size_t role_tokens = 30;
  std::uint64_t seed = 1;
};

LabeledCorpus boilerplate_corpus(const BoilerplateConfig& config);

/// A boilerplate corpus in which a fraction of documents is cold, plus
/// ratings on warm documents. Each user favors one role and rates
/// `ratings_per_user` warm postings, mostly from that role.
struct ScaleConfig {
  BoilerplateConfig corpus{10000, 50, 40, 60, 300, 70, 30, 1};
  double cold_fraction = 0.1;
  std::size_t users = 2000;
  std::size_t ratings_per_user = 20;
};

struct ScaleFixture {
  LabeledCorpus corpus;
  std::vector<RatingMatrix::Entry> ratings;
};

ScaleFixture scale_fixture(const ScaleConfig& config);

void write_ratings_tsv(const std::filesystem::path& path, std::span<const RatingMatrix::Entry> ratings);

}  // namespace coldstart
