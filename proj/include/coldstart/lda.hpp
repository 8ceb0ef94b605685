#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "coldstart/common.hpp"
#include "coldstart/corpus.hpp"

namespace coldstart {

struct LdaConfig {
  int topics = 20;
  int sweeps = 200;
  double alpha = 0.0;  ///< <= 0 selects 50 / topics
  double beta = 0.01;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }
};

/// Fitted topic-word counts. Counts are K x V, stored column-major so the K
/// counts of one word are contiguous.
class LdaModel {
 public:
  LdaModel(double alpha, double beta, std::uint64_t seed, Eigen::MatrixXi topic_word,
           std::shared_ptr<const Vocabulary> vocab);

  int topics() const { return static_cast<int>(topic_word_.rows()); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXi& topic_word_counts() const { return topic_word_; }
  const Eigen::VectorXi& topic_totals() const { return topic_totals_; }
  const Vocabulary& vocabulary() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const { return vocab_; }

  /// Header line "K=.. alpha=.. beta=.. V=.. seed=..", then K rows of V
  /// integers (row-major). The vocabulary is stored separately.
  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab);

 private:
  double alpha_;
  double beta_;
  std::uint64_t seed_;
  Eigen::MatrixXi topic_word_;
  Eigen::VectorXi topic_totals_;
  std::shared_ptr<const Vocabulary> vocab_;
};

/// Collapsed Gibbs sampler. Exposes its state between sweeps so callers can
/// watch count conservation and perplexity.
class LdaSampler {
 public:
  LdaSampler(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab,
             const LdaConfig& config);

  /// One full pass resampling every token's topic.
  void sweep();

  int sweeps_done() const { return sweeps_done_; }
  std::int64_t token_count() const { return token_count_; }
  const Eigen::MatrixXi& doc_topic_counts() const { return doc_topic_; }  ///< D x K
  const Eigen::MatrixXi& topic_word_counts() const { return topic_word_; }
  const Eigen::VectorXi& topic_totals() const { return topic_totals_; }
  std::size_t document_length(std::size_t d) const { return words_[d].size(); }

  /// exp(-mean token log-likelihood) under the current point estimates.
  double perplexity() const;

  LdaModel model() const;

 private:
  LdaConfig config_;
  double alpha_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<std::vector<int>> words_;
  std::vector<std::vector<int>> assignments_;
  Eigen::MatrixXi doc_topic_;
  Eigen::MatrixXi topic_word_;
  Eigen::VectorXi topic_totals_;
  std::vector<double> cumulative_;
  std::int64_t token_count_ = 0;
  int sweeps_done_ = 0;
  Rng rng_;
};

LdaModel fit_lda(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab,
                 const LdaConfig& config);

/// Folds a document in with the topic-word counts frozen and returns
/// (doc_topic + alpha) normalized to sum 1. A document without
/// in-vocabulary tokens yields the uniform vector.
Eigen::VectorXd lda_doc_vector(const LdaModel& model, const TokenizedDocument& doc,
                               int fold_in_sweeps = 50, std::uint64_t seed = 1);

}  // namespace coldstart
