#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "coldstart/common.hpp"

namespace coldstart {

/// Sparse user x item ratings. User and item indices follow ascending id
/// order, so index order and id order agree for tie-breaking.
class RatingMatrix {
 public:
  struct Entry {
    std::string user;
    std::string item;
    double rating = 0.0;
  };

  RatingMatrix() = default;
  /// Throws DataError naming the first duplicate (user, item) pair.
  /// `extra_users` registers users that have no ratings.
  static RatingMatrix from_entries(std::span<const Entry> entries, std::span<const std::string> extra_users = {});

  std::size_t users() const { return user_ids_.size(); }
  std::size_t items() const { return item_ids_.size(); }
  std::size_t ratings() const { return static_cast<std::size_t>(by_item_.nonZeros()); }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  std::optional<int> user_index(std::string_view id) const;
  std::optional<int> item_index(std::string_view id) const;

  /// users x items, column-major: one column per item.
  const Eigen::SparseMatrix<double>& by_item() const { return by_item_; }
  /// users x items, row-major: one row per user.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& by_user() const { return by_user_; }
  /// Mean rating of an item over all of its raters.
  double item_mean(int item) const { return item_mean_[item]; }
  double item_norm(int item) const { return item_norm_[item]; }

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, int> user_pos_;
  std::unordered_map<std::string, int> item_pos_;
  Eigen::SparseMatrix<double> by_item_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> by_user_;
  std::vector<double> item_mean_;
  std::vector<double> item_norm_;
};

/// Reads user_id\titem_id\trating rows. An optional header line is accepted;
/// a row holding only a user id registers a user without ratings.
RatingMatrix load_ratings(const std::filesystem::path& path);

/// Pearson correlation over co-raters, centering each item on its mean over
/// all of its raters. nullopt when fewer than two co-raters exist or a
/// centered co-rating vector is all zeros. Throws DataError for unknown ids.
std::optional<double> pearson_item(std::string_view i, std::string_view j, const RatingMatrix& ratings);

/// Cosine of the full rating columns (missing ratings are zero). Throws
/// DataError for unknown ids or zero-norm columns.
double cosine_item(std::string_view i, std::string_view j, const RatingMatrix& ratings);

enum class SimilarityMetric { Pearson, Cosine };
SimilarityMetric parse_metric(std::string_view name);

/// item -> its top-K most similar other items, best first.
using ItemNeighborhood = std::map<std::string, std::vector<ScoredId>>;

/// Undefined Pearson pairs are not edges. Every item gets an entry, possibly
/// empty.
ItemNeighborhood build_item_neighborhoods(const RatingMatrix& ratings, SimilarityMetric metric, std::size_t k,
                                          int workers = 1);

struct Recommendation {
  std::string user;
  std::vector<ScoredId> items;
};

/// score(item) = sum over the user's rated items i with item in nbrs(i) of
/// sim(i, item) * r_ui; already-rated items are excluded. Top n, ties by id.
/// Throws DataError for an unknown user.
Recommendation recommend(const RatingMatrix& ratings, const ItemNeighborhood& nbrs, std::string_view user,
                         std::size_t n);

void write_neighborhoods_tsv(const std::filesystem::path& path, const ItemNeighborhood& nbrs);
ItemNeighborhood read_neighborhoods_tsv(const std::filesystem::path& path);

}  // namespace coldstart
