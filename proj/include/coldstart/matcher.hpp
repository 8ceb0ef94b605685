#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <spdlog/spdlog.h>

#include "coldstart/common.hpp"
#include "coldstart/corpus.hpp"

namespace coldstart {

enum class VectorKind { TfIdf, Lda, Doc2Vec };

std::string_view to_string(VectorKind kind);

/// u.v / (|u| |v|), clamped to [-1, 1]. Works for dense and sparse Eigen
/// vectors alike. Throws DataError when either norm is zero.
template <typename VecU, typename VecV>
double cosine(const VecU& u, const VecV& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw DataError("cosine similarity is undefined for a zero-norm vector");
  return std::clamp(static_cast<double>(u.dot(v)) / (nu * nv), -1.0, 1.0);
}

/// Exhaustive-scan similarity index over vectors of one kind.
template <typename Vector>
class SimilarityIndex {
 public:
  explicit SimilarityIndex(VectorKind kind) : kind_(kind) {}

  /// Throws DataError for a duplicate id or a zero-norm vector.
  void add(std::string id, Vector vec) {
    const double norm = vec.norm();
    if (norm == 0.0) throw DataError("cannot index zero-norm vector for '" + id + "'");
    if (!positions_.emplace(id, ids_.size()).second) throw DataError("duplicate index id '" + id + "'");
    ids_.push_back(std::move(id));
    vectors_.push_back(std::move(vec));
    norms_.push_back(norm);
  }

  VectorKind kind() const { return kind_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const Vector& vector(std::size_t i) const { return vectors_[i]; }
  double norm(std::size_t i) const { return norms_[i]; }
  bool contains(std::string_view id) const { return positions_.contains(std::string(id)); }

 private:
  VectorKind kind_;
  std::vector<std::string> ids_;
  std::vector<Vector> vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> positions_;
};

/// The k highest-cosine entries, descending, ties by ascending id, with
/// `exclude` suppressed. Throws DataError on an empty index or zero query.
template <typename Vector>
std::vector<ScoredId> top_k_similar(const SimilarityIndex<Vector>& index, const Vector& query, std::size_t k,
                                    std::optional<std::string_view> exclude = std::nullopt) {
  if (k < 1) throw UsageError("top_k_similar needs k >= 1");
  if (index.empty()) throw DataError("similarity index is empty");
  const double query_norm = query.norm();
  if (query_norm == 0.0) throw DataError("cosine similarity is undefined for a zero-norm query");

  std::vector<ScoredId> scored;
  scored.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (exclude && index.id(i) == *exclude) continue;
    const double dot = static_cast<double>(index.vector(i).dot(query));
    scored.push_back({index.id(i), std::clamp(dot / (index.norm(i) * query_norm), -1.0, 1.0)});
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

/// cold id -> warm neighbors at or above the threshold, best first. Cold
/// items without a qualifying neighbor map to an empty list.
using PairingTable = std::map<std::string, std::vector<ScoredId>>;

struct PairingOptions {
  std::size_t top_m = 1;
  double threshold = 0.5;
  int workers = 1;
};

/// An embedder maps a tokenized document to a vector:
///   using vector_type = ...;
///   VectorKind kind() const;
///   vector_type embed(const TokenizedDocument&) const;  // may throw DataError
template <typename E>
concept Embedder = requires(const E& e, const TokenizedDocument& doc) {
  typename E::vector_type;
  { e.kind() } -> std::same_as<VectorKind>;
  { e.embed(doc) } -> std::convertible_to<typename E::vector_type>;
};

/// Pairs every cold document with its top_m warm neighbors by cosine.
/// Warm documents that cannot be embedded (or embed to zero) are left out of
/// the index; cold documents that cannot be embedded stay unpaired.
template <Embedder E>
PairingTable pair_cold_items(std::span<const TokenizedDocument> cold, std::span<const TokenizedDocument> warm,
                             const E& embedder, const PairingOptions& options) {
  if (warm.empty()) throw DataError("cannot pair cold items without warm items");
  if (options.top_m < 1) throw UsageError("top_m must be >= 1");

  std::unordered_set<std::string_view> warm_ids;
  for (const auto& w : warm) warm_ids.insert(w.id);
  for (const auto& c : cold)
    if (warm_ids.contains(c.id)) throw DataError("document '" + c.id + "' is both cold and warm");

  using Vector = typename E::vector_type;
  std::vector<std::optional<Vector>> warm_vecs(warm.size());
  parallel_for(warm.size(), options.workers, [&](std::size_t i) {
    try {
      Vector v = embedder.embed(warm[i]);
      if (v.norm() > 0.0) warm_vecs[i] = std::move(v);
    } catch (const DataError&) {
    }
  });
  SimilarityIndex<Vector> index(embedder.kind());
  for (std::size_t i = 0; i < warm.size(); ++i) {
    if (warm_vecs[i]) {
      index.add(warm[i].id, std::move(*warm_vecs[i]));
    } else {
      spdlog::warn("pairing: warm document '{}' has no usable embedding; excluded", warm[i].id);
    }
  }
  if (index.empty()) throw DataError("no warm document could be embedded");

  std::vector<std::vector<ScoredId>> lists(cold.size());
  parallel_for(cold.size(), options.workers, [&](std::size_t i) {
    std::optional<Vector> query;
    try {
      query = embedder.embed(cold[i]);
    } catch (const DataError&) {
      return;
    }
    if (query->norm() == 0.0) return;
    for (auto& hit : top_k_similar(index, *query, options.top_m))
      if (hit.score >= options.threshold) lists[i].push_back(std::move(hit));
  });

  PairingTable table;
  for (std::size_t i = 0; i < cold.size(); ++i) table.emplace(cold[i].id, std::move(lists[i]));
  return table;
}

/// TSV rows cold_id\twarm_id\tscore after a header; unpaired cold ids get
/// warm_id "-" and score "nan".
void write_pairing_tsv(const std::filesystem::path& path, const PairingTable& table);
PairingTable read_pairing_tsv(const std::filesystem::path& path);

struct PairingSummary {
  std::size_t paired = 0;
  std::size_t unpaired = 0;
  std::size_t rows = 0;  ///< (cold, warm) pairs
};
PairingSummary summarize(const PairingTable& table);

}  // namespace coldstart
