#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "coldstart/corpus.hpp"

namespace coldstart {

/// Sorted (index, weight) pairs with no explicit zeros.
using SparseVector = Eigen::SparseVector<double>;

/// Document frequencies over a fixed vocabulary.
///
/// idf(w) = ln(N / (1 + df(w))). The "+1" makes idf negative for a token
/// present in every document; such weights are kept as-is.
class TfIdfModel {
 public:
  TfIdfModel(int corpus_size, std::vector<int> document_frequency,
             std::shared_ptr<const Vocabulary> vocab);

  int corpus_size() const { return corpus_size_; }
  int document_frequency(int index) const { return df_.at(index); }
  double idf(int index) const { return idf_.at(index); }
  const Vocabulary& vocabulary() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const { return vocab_; }

  /// TSV: "N=<int>", then token\tdf rows in vocabulary order.
  void save(const std::filesystem::path& path) const;
  static TfIdfModel load(const std::filesystem::path& path);

 private:
  int corpus_size_;
  std::vector<int> df_;
  std::vector<double> idf_;
  std::shared_ptr<const Vocabulary> vocab_;
};

TfIdfModel fit_tfidf(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab);

/// Raw term count times idf; out-of-vocabulary tokens are ignored and the
/// result is not length-normalized.
SparseVector transform_tfidf(const TfIdfModel& model, const TokenizedDocument& doc);

}  // namespace coldstart
