#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "coldstart/doc2vec.hpp"
#include "coldstart/enrichment.hpp"
#include "coldstart/lda.hpp"
#include "coldstart/matcher.hpp"
#include "coldstart/tfidf.hpp"

namespace coldstart {

class TfIdfEmbedder {
 public:
  using vector_type = SparseVector;
  explicit TfIdfEmbedder(const TfIdfModel& model) : model_(&model) {}
  VectorKind kind() const { return VectorKind::TfIdf; }
  vector_type embed(const TokenizedDocument& doc) const { return transform_tfidf(*model_, doc); }

 private:
  const TfIdfModel* model_;
};

/// Topic proportions by fold-in; the sampler seed is derived from the
/// document id so results do not depend on processing order.
class LdaEmbedder {
 public:
  using vector_type = Eigen::VectorXd;
  LdaEmbedder(const LdaModel& model, int fold_in_sweeps, std::uint64_t seed)
      : model_(&model), fold_in_sweeps_(fold_in_sweeps), seed_(seed) {}
  VectorKind kind() const { return VectorKind::Lda; }
  vector_type embed(const TokenizedDocument& doc) const {
    return lda_doc_vector(*model_, doc, fold_in_sweeps_, derive_seed(seed_, doc.id));
  }

 private:
  const LdaModel* model_;
  int fold_in_sweeps_;
  std::uint64_t seed_;
};

/// Stored paragraph vector for documents seen in training, inference for
/// everything else.
class Doc2VecEmbedder {
 public:
  using vector_type = Eigen::VectorXd;
  Doc2VecEmbedder(const Doc2VecModel& model, int infer_steps, double infer_lr, std::uint64_t seed)
      : model_(&model), infer_steps_(infer_steps), infer_lr_(infer_lr), seed_(seed) {}
  VectorKind kind() const { return VectorKind::Doc2Vec; }
  vector_type embed(const TokenizedDocument& doc) const {
    if (model_->contains(doc.id)) return model_->doc_vector(doc.id).cast<double>();
    return infer_doc_vector(*model_, doc.tokens, infer_steps_, infer_lr_, derive_seed(seed_, doc.id))
        .cast<double>();
  }

 private:
  const Doc2VecModel* model_;
  int infer_steps_;
  double infer_lr_;
  std::uint64_t seed_;
};

/// A backend name as used on the command line and in reports: "tfidf",
/// "lda", "doc2vec", optionally suffixed "+ctx" for contextual enrichment.
struct BackendSpec {
  VectorKind kind = VectorKind::Doc2Vec;
  bool enriched = false;

  std::string name() const { return std::string(to_string(kind)) + (enriched ? "+ctx" : ""); }
  friend auto operator<=>(const BackendSpec&, const BackendSpec&) = default;
};

/// Throws UsageError for unknown names.
BackendSpec parse_backend(std::string_view name);

/// Report order: plain tfidf, lda, doc2vec, then the enriched variants.
bool report_order(const BackendSpec& a, const BackendSpec& b);

/// Everything needed to turn documents into vectors for any backend.
struct BackendSettings {
  TokenizerOptions tokenizer;
  EnrichmentConfig enrichment;
  int tfidf_min_count = 1;
  int min_count = 5;  ///< doc2vec and LDA
  LdaConfig lda;
  int lda_fold_in_sweeps = 50;
  TrainConfig doc2vec;
  int infer_steps = 50;
  double infer_lr = 0.025;
};

/// Enriches (when requested) and tokenizes.
std::vector<TokenizedDocument> prepare_documents(std::span<const Document> docs, const BackendSettings& settings,
                                                 bool enriched);

/// A fitted model of one kind.
struct FittedBackend {
  BackendSpec spec;
  std::optional<TfIdfModel> tfidf;
  std::optional<LdaModel> lda;
  std::optional<Doc2VecModel> doc2vec;
};

FittedBackend fit_backend(const BackendSpec& spec, std::span<const TokenizedDocument> docs,
                          const BackendSettings& settings, TrainReport* report = nullptr);

/// Model files written into `dir`; returns their paths.
std::vector<std::filesystem::path> save_backend(const FittedBackend& backend, const std::filesystem::path& dir);
FittedBackend load_backend(const BackendSpec& spec, const std::filesystem::path& dir);

/// Calls fn(embedder) with the embedder matching the fitted model.
template <typename Fn>
decltype(auto) visit_embedder(const FittedBackend& backend, const BackendSettings& settings, Fn&& fn) {
  switch (backend.spec.kind) {
    case VectorKind::TfIdf:
      return std::forward<Fn>(fn)(TfIdfEmbedder(backend.tfidf.value()));
    case VectorKind::Lda:
      return std::forward<Fn>(fn)(LdaEmbedder(backend.lda.value(), settings.lda_fold_in_sweeps, settings.lda.seed));
    case VectorKind::Doc2Vec:
      break;
  }
  return std::forward<Fn>(fn)(
      Doc2VecEmbedder(backend.doc2vec.value(), settings.infer_steps, settings.infer_lr, settings.doc2vec.seed));
}

}  // namespace coldstart
