#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "coldstart/corpus.hpp"

namespace coldstart {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixF = RowMatrix<float>;

struct TrainConfig {
  int dim = 100;
  int window = 5;
  int epochs = 1;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  int negative_k = 5;  ///< 0 selects the exact softmax (small vocabularies only)
  std::uint64_t seed = 1;
  int workers = 1;

  static constexpr std::size_t kMaxExactSoftmaxVocabulary = 2000;

  /// Throws UsageError on out-of-range settings.
  void validate(std::size_t vocab_size) const;
};

struct TrainReport {
  std::vector<double> epoch_mean_loss;  ///< mean per-token loss of each epoch
  std::size_t skipped_documents = 0;
};

struct TrainHooks {
  /// Called with the full output distribution at every exact-softmax step.
  std::function<void(std::span<const double>)> on_softmax;
};

/// PV-DM paragraph-vector model: input word vectors, output (softmax)
/// vectors and one paragraph vector per training document.
class Doc2VecModel {
 public:
  Doc2VecModel(int window, int negative_k, std::uint64_t seed, std::shared_ptr<const Vocabulary> vocab,
               RowMatrixF word_in, RowMatrixF word_out, RowMatrixF doc_vecs, std::vector<std::string> doc_ids);

  int dim() const { return static_cast<int>(word_in_.cols()); }
  int window() const { return window_; }
  int negative_k() const { return negative_k_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t documents() const { return doc_ids_.size(); }

  const RowMatrixF& word_in() const { return word_in_; }
  const RowMatrixF& word_out() const { return word_out_; }
  const RowMatrixF& doc_vectors() const { return doc_vecs_; }
  std::span<const std::string> doc_ids() const { return doc_ids_; }
  const Vocabulary& vocabulary() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const { return vocab_; }

  /// Cumulative unigram^0.75 noise distribution over the vocabulary.
  std::span<const double> noise_cdf() const { return noise_cdf_; }

  bool contains(std::string_view doc_id) const { return rows_.contains(std::string(doc_id)); }
  /// Stored paragraph vector; throws DataError for an unknown id.
  Eigen::VectorXf doc_vector(std::string_view doc_id) const;

  /// Text header and vocabulary, little-endian float32 row-major blocks
  /// (word_in, word_out, doc_vecs), then id\trow lines.
  void save(const std::filesystem::path& path) const;
  static Doc2VecModel load(const std::filesystem::path& path);

 private:
  int window_;
  int negative_k_;
  std::uint64_t seed_;
  std::shared_ptr<const Vocabulary> vocab_;
  RowMatrixF word_in_;
  RowMatrixF word_out_;
  RowMatrixF doc_vecs_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, int> rows_;
  std::vector<double> noise_cdf_;
};

/// Trains paragraph vectors with mean context combination. Documents with no
/// in-vocabulary token are skipped (and get no row).
Doc2VecModel train_doc2vec(std::span<const TokenizedDocument> docs, const TrainConfig& config,
                           std::shared_ptr<const Vocabulary> vocab, TrainReport* report = nullptr,
                           const TrainHooks& hooks = {});

/// Learns a fresh paragraph vector for `tokens` with all word and output
/// vectors frozen. Throws DataError when no token is in the vocabulary.
Eigen::VectorXf infer_doc_vector(const Doc2VecModel& model, std::span<const std::string> tokens, int steps,
                                 double lr_start, std::uint64_t seed);

// --- negative-sampling objective --------------------------------------------

/// Loss and slope d(loss)/d(score) of one (context, output) pair, where the
/// pair loss is -log sigma(score) for the observed word and
/// -log sigma(-score) for a noise word.
template <typename Scalar>
struct PairTerm {
  Scalar loss;
  Scalar slope;
};

template <typename Scalar>
PairTerm<Scalar> pair_term(Scalar score, bool observed) {
  using std::exp;
  using std::log1p;
  const Scalar x = observed ? score : -score;
  // -log sigma(x), stable for either sign.
  const Scalar loss = x >= Scalar(0) ? log1p(exp(-x)) : -x + log1p(exp(x));
  const Scalar sig = Scalar(1) / (Scalar(1) + exp(-score));
  return {loss, observed ? sig - Scalar(1) : sig};
}

/// -[log sigma(u.v+) + sum log sigma(-u.v-)] with v = rows of word_out.
template <typename DerivedU, typename DerivedW>
typename DerivedU::Scalar negative_sampling_loss(const Eigen::MatrixBase<DerivedU>& context, Eigen::Index target,
                                                 std::span<const Eigen::Index> negatives,
                                                 const Eigen::MatrixBase<DerivedW>& word_out) {
  using Scalar = typename DerivedU::Scalar;
  Scalar loss = pair_term<Scalar>(word_out.row(target).dot(context.transpose()), true).loss;
  for (Eigen::Index n : negatives) loss += pair_term<Scalar>(word_out.row(n).dot(context.transpose()), false).loss;
  return loss;
}

template <typename Scalar>
struct NegativeSamplingGradient {
  Scalar loss;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> context;  ///< d loss / d context
  RowMatrix<Scalar> word_out;                         ///< d loss / d word_out, same shape as word_out
};

/// Analytic gradient of negative_sampling_loss. The word_out gradient is
/// dense, so this is meant for small verification problems.
template <typename DerivedU, typename DerivedW>
NegativeSamplingGradient<typename DerivedU::Scalar> negative_sampling_gradient(
    const Eigen::MatrixBase<DerivedU>& context, Eigen::Index target, std::span<const Eigen::Index> negatives,
    const Eigen::MatrixBase<DerivedW>& word_out) {
  using Scalar = typename DerivedU::Scalar;
  NegativeSamplingGradient<Scalar> g{Scalar(0), Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(context.size()),
                                     RowMatrix<Scalar>::Zero(word_out.rows(), word_out.cols())};
  auto accumulate = [&](Eigen::Index row, bool observed) {
    const auto term = pair_term<Scalar>(word_out.row(row).dot(context.transpose()), observed);
    g.loss += term.loss;
    g.context += term.slope * word_out.row(row).transpose();
    g.word_out.row(row) += term.slope * context.transpose();
  };
  accumulate(target, true);
  for (Eigen::Index n : negatives) accumulate(n, false);
  return g;
}

/// Exact softmax over all output rows: p = softmax(word_out * context).
template <typename DerivedU, typename DerivedW>
Eigen::VectorXd softmax_probabilities(const Eigen::MatrixBase<DerivedU>& context,
                                      const Eigen::MatrixBase<DerivedW>& word_out) {
  Eigen::VectorXd logits = (word_out.template cast<double>() * context.template cast<double>()).eval();
  const double peak = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - peak).exp();
  return p / p.sum();
}

}  // namespace coldstart
