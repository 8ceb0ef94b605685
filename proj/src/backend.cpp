#include "coldstart/backend.hpp"

#include <memory>

namespace coldstart {

namespace {

constexpr const char* kTfIdfFile = "tfidf.tsv";
constexpr const char* kLdaFile = "lda.model";
constexpr const char* kLdaVocabFile = "lda.vocab.tsv";
constexpr const char* kDoc2VecFile = "doc2vec.bin";

}  // namespace

BackendSpec parse_backend(std::string_view name) {
  BackendSpec spec;
  std::string_view base = name;
  if (base.ends_with("+ctx")) {
    spec.enriched = true;
    base.remove_suffix(4);
  }
  if (base == "tfidf") {
    spec.kind = VectorKind::TfIdf;
  } else if (base == "lda") {
    spec.kind = VectorKind::Lda;
  } else if (base == "doc2vec") {
    spec.kind = VectorKind::Doc2Vec;
  } else {
    throw UsageError("unknown backend '" + std::string(name) +
                     "' (expected tfidf, lda or doc2vec, optionally with +ctx)");
  }
  return spec;
}

bool report_order(const BackendSpec& a, const BackendSpec& b) {
  if (a.enriched != b.enriched) return !a.enriched;
  return a.kind < b.kind;
}

std::vector<TokenizedDocument> prepare_documents(std::span<const Document> docs, const BackendSettings& settings,
                                                 bool enriched) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs)
    out.push_back(enriched ? tokenize(enrich(d, settings.enrichment), settings.tokenizer)
                           : tokenize(d, settings.tokenizer));
  return out;
}

FittedBackend fit_backend(const BackendSpec& spec, std::span<const TokenizedDocument> docs,
                          const BackendSettings& settings, TrainReport* report) {
  FittedBackend fitted{spec, {}, {}, {}};
  switch (spec.kind) {
    case VectorKind::TfIdf: {
      auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs, settings.tfidf_min_count));
      fitted.tfidf = fit_tfidf(docs, std::move(vocab));
      break;
    }
    case VectorKind::Lda: {
      auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs, settings.min_count));
      fitted.lda = fit_lda(docs, std::move(vocab), settings.lda);
      break;
    }
    case VectorKind::Doc2Vec: {
      auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs, settings.min_count));
      fitted.doc2vec = train_doc2vec(docs, settings.doc2vec, std::move(vocab), report);
      break;
    }
  }
  return fitted;
}

std::vector<std::filesystem::path> save_backend(const FittedBackend& backend, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  switch (backend.spec.kind) {
    case VectorKind::TfIdf:
      backend.tfidf.value().save(dir / kTfIdfFile);
      return {dir / kTfIdfFile};
    case VectorKind::Lda:
      backend.lda.value().vocabulary().save(dir / kLdaVocabFile);
      backend.lda.value().save(dir / kLdaFile);
      return {dir / kLdaVocabFile, dir / kLdaFile};
    case VectorKind::Doc2Vec:
      break;
  }
  backend.doc2vec.value().save(dir / kDoc2VecFile);
  return {dir / kDoc2VecFile};
}

FittedBackend load_backend(const BackendSpec& spec, const std::filesystem::path& dir) {
  FittedBackend fitted{spec, {}, {}, {}};
  switch (spec.kind) {
    case VectorKind::TfIdf:
      fitted.tfidf = TfIdfModel::load(dir / kTfIdfFile);
      break;
    case VectorKind::Lda:
      fitted.lda = LdaModel::load(dir / kLdaFile,
                                  std::make_shared<const Vocabulary>(Vocabulary::load(dir / kLdaVocabFile)));
      break;
    case VectorKind::Doc2Vec:
      fitted.doc2vec = Doc2VecModel::load(dir / kDoc2VecFile);
      break;
  }
  return fitted;
}

}  // namespace coldstart
