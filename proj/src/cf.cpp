#include "coldstart/cf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

namespace coldstart {

namespace {

constexpr std::string_view kRatingsHeader = "user_id\titem_id\trating";
constexpr std::string_view kNeighborhoodHeader = "item\tneighbor\tscore";

double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end == text.c_str() || *end != '\0' || !std::isfinite(value))
    throw DataError(where + ": non-numeric value '" + text + "'");
  return value;
}

int require_item(const RatingMatrix& r, std::string_view id) {
  auto i = r.item_index(id);
  if (!i) throw DataError("unknown item '" + std::string(id) + "'");
  return *i;
}

struct Candidate {
  double score;
  int item;
};

bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item < b.item;
}

// Per-worker accumulators over the items co-rated with one item.
struct CoRatingScratch {
  explicit CoRatingScratch(std::size_t items)
      : cross(items, 0.0), self_sq(items, 0.0), other_sq(items, 0.0), dot(items, 0.0), count(items, 0) {}
  std::vector<double> cross, self_sq, other_sq, dot;
  std::vector<int> count;
  std::vector<int> touched;

  void reset() {
    for (int j : touched) {
      cross[j] = self_sq[j] = other_sq[j] = dot[j] = 0.0;
      count[j] = 0;
    }
    touched.clear();
  }
};

std::vector<Candidate> neighbors_of(const RatingMatrix& r, int i, SimilarityMetric metric, std::size_t k,
                                    CoRatingScratch& s) {
  const auto& by_item = r.by_item();
  const auto& by_user = r.by_user();
  const double mean_i = r.item_mean(i);
  for (Eigen::SparseMatrix<double>::InnerIterator ui(by_item, i); ui; ++ui) {
    const double ri = ui.value();
    const double di = ri - mean_i;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator uj(by_user, ui.row()); uj; ++uj) {
      const int j = static_cast<int>(uj.col());
      if (j == i) continue;
      if (s.count[j] == 0) s.touched.push_back(j);
      const double dj = uj.value() - r.item_mean(j);
      s.cross[j] += di * dj;
      s.self_sq[j] += di * di;
      s.other_sq[j] += dj * dj;
      s.dot[j] += ri * uj.value();
      ++s.count[j];
    }
  }

  std::vector<Candidate> out;
  if (metric == SimilarityMetric::Pearson) {
    for (int j : s.touched) {
      if (s.count[j] < 2 || s.self_sq[j] == 0.0 || s.other_sq[j] == 0.0) continue;
      out.push_back({std::clamp(s.cross[j] / (std::sqrt(s.self_sq[j]) * std::sqrt(s.other_sq[j])), -1.0, 1.0), j});
    }
    std::sort(out.begin(), out.end(), candidate_before);
    if (out.size() > k) out.resize(k);
    return out;
  }

  // Cosine: every other item with a nonzero column is a candidate. Items not
  // co-rated score exactly 0 and rank between positives and negatives.
  if (r.item_norm(i) == 0.0) return out;
  std::vector<Candidate> positive, negative;
  std::vector<bool> nonzero(r.items(), false);
  for (int j : s.touched) {
    if (r.item_norm(j) == 0.0) continue;
    const double c = std::clamp(s.dot[j] / (r.item_norm(i) * r.item_norm(j)), -1.0, 1.0);
    if (c > 0.0) positive.push_back({c, j});
    if (c < 0.0) negative.push_back({c, j});
    nonzero[j] = c != 0.0;
  }
  std::sort(positive.begin(), positive.end(), candidate_before);
  for (const auto& c : positive) {
    if (out.size() == k) return out;
    out.push_back(c);
  }
  for (int j = 0; j < static_cast<int>(r.items()) && out.size() < k; ++j) {
    if (j == i || nonzero[j] || r.item_norm(j) == 0.0) continue;
    out.push_back({0.0, j});
  }
  std::sort(negative.begin(), negative.end(), candidate_before);
  for (const auto& c : negative) {
    if (out.size() == k) break;
    out.push_back(c);
  }
  return out;
}

}  // namespace

RatingMatrix RatingMatrix::from_entries(std::span<const Entry> entries, std::span<const std::string> extra_users) {
  RatingMatrix m;
  std::set<std::string> users(extra_users.begin(), extra_users.end());
  std::set<std::string> items;
  for (const auto& e : entries) {
    users.insert(e.user);
    items.insert(e.item);
  }
  m.user_ids_.assign(users.begin(), users.end());
  m.item_ids_.assign(items.begin(), items.end());
  for (std::size_t u = 0; u < m.user_ids_.size(); ++u) m.user_pos_.emplace(m.user_ids_[u], static_cast<int>(u));
  for (std::size_t i = 0; i < m.item_ids_.size(); ++i) m.item_pos_.emplace(m.item_ids_[i], static_cast<int>(i));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries) {
    const int u = m.user_pos_.at(e.user);
    const int i = m.item_pos_.at(e.item);
    if (!seen.emplace(u, i).second)
      throw DataError("duplicate rating for (user '" + e.user + "', item '" + e.item + "')");
    triplets.emplace_back(u, i, e.rating);
  }
  const auto n_users = static_cast<Eigen::Index>(m.user_ids_.size());
  const auto n_items = static_cast<Eigen::Index>(m.item_ids_.size());
  m.by_item_.resize(n_users, n_items);
  m.by_item_.setFromTriplets(triplets.begin(), triplets.end());
  m.by_item_.makeCompressed();
  m.by_user_ = m.by_item_;
  m.by_user_.makeCompressed();

  m.item_mean_.assign(m.item_ids_.size(), 0.0);
  m.item_norm_.assign(m.item_ids_.size(), 0.0);
  for (Eigen::Index i = 0; i < n_items; ++i) {
    double sum = 0.0, sq = 0.0;
    int n = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.by_item_, i); it; ++it) {
      sum += it.value();
      sq += it.value() * it.value();
      ++n;
    }
    m.item_mean_[i] = n ? sum / n : 0.0;
    m.item_norm_[i] = std::sqrt(sq);
  }
  return m;
}

std::optional<int> RatingMatrix::user_index(std::string_view id) const {
  auto it = user_pos_.find(std::string(id));
  if (it == user_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> RatingMatrix::item_index(std::string_view id) const {
  auto it = item_pos_.find(std::string(id));
  if (it == item_pos_.end()) return std::nullopt;
  return it->second;
}

RatingMatrix load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read ratings: " + path.string());
  std::vector<RatingMatrix::Entry> entries;
  std::vector<std::string> bare_users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == kRatingsHeader)) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto fields = split(line, '\t');
    if (fields.size() == 1 && !fields[0].empty()) {
      bare_users.push_back(fields[0]);
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
      throw DataError(where + ": expected user_id\\titem_id\\trating");
    entries.push_back({fields[0], fields[1], parse_double(fields[2], where)});
  }
  return RatingMatrix::from_entries(entries, bare_users);
}

std::optional<double> pearson_item(std::string_view i_id, std::string_view j_id, const RatingMatrix& r) {
  const int i = require_item(r, i_id);
  const int j = require_item(r, j_id);
  const double mi = r.item_mean(i);
  const double mj = r.item_mean(j);
  Eigen::SparseMatrix<double>::InnerIterator a(r.by_item(), i), b(r.by_item(), j);
  double cross = 0.0, sa = 0.0, sb = 0.0;
  int co = 0;
  while (a && b) {
    if (a.row() < b.row()) {
      ++a;
    } else if (b.row() < a.row()) {
      ++b;
    } else {
      const double da = a.value() - mi;
      const double db = b.value() - mj;
      cross += da * db;
      sa += da * da;
      sb += db * db;
      ++co;
      ++a;
      ++b;
    }
  }
  if (co < 2 || sa == 0.0 || sb == 0.0) return std::nullopt;
  return std::clamp(cross / (std::sqrt(sa) * std::sqrt(sb)), -1.0, 1.0);
}

double cosine_item(std::string_view i_id, std::string_view j_id, const RatingMatrix& r) {
  const int i = require_item(r, i_id);
  const int j = require_item(r, j_id);
  if (r.item_norm(i) == 0.0 || r.item_norm(j) == 0.0)
    throw DataError("cosine undefined: zero-norm rating column");
  const double dot = r.by_item().col(i).dot(r.by_item().col(j));
  return std::clamp(dot / (r.item_norm(i) * r.item_norm(j)), -1.0, 1.0);
}

SimilarityMetric parse_metric(std::string_view name) {
  if (name == "pearson") return SimilarityMetric::Pearson;
  if (name == "cosine") return SimilarityMetric::Cosine;
  throw UsageError("unknown similarity metric '" + std::string(name) + "' (expected pearson or cosine)");
}

ItemNeighborhood build_item_neighborhoods(const RatingMatrix& r, SimilarityMetric metric, std::size_t k,
                                          int workers) {
  if (k < 1) throw UsageError("neighborhood size K must be >= 1");
  const std::size_t n = r.items();
  std::vector<std::vector<Candidate>> lists(n);
  const int chunks = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  parallel_for(static_cast<std::size_t>(chunks), chunks, [&](std::size_t c) {
    CoRatingScratch scratch(n);
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      lists[i] = neighbors_of(r, static_cast<int>(i), metric, k, scratch);
      scratch.reset();
    }
  });
  ItemNeighborhood out;
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = out[r.item_ids()[i]];
    list.reserve(lists[i].size());
    for (const auto& c : lists[i]) list.push_back({r.item_ids()[c.item], c.score});
  }
  return out;
}

Recommendation recommend(const RatingMatrix& r, const ItemNeighborhood& nbrs, std::string_view user,
                         std::size_t n) {
  const auto u = r.user_index(user);
  if (!u) throw DataError("unknown user '" + std::string(user) + "'");
  Recommendation rec{std::string(user), {}};

  std::unordered_set<std::string> rated;
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(r.by_user(), *u); it; ++it)
    rated.insert(r.item_ids()[it.col()]);

  std::map<std::string, double> scores;
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(r.by_user(), *u); it; ++it) {
    auto found = nbrs.find(r.item_ids()[it.col()]);
    if (found == nbrs.end()) continue;
    for (const auto& nb : found->second)
      if (!rated.contains(nb.id)) scores[nb.id] += nb.score * it.value();
  }
  rec.items.reserve(scores.size());
  for (auto& [id, score] : scores) rec.items.push_back({id, score});
  const std::size_t keep = std::min(n, rec.items.size());
  std::partial_sort(rec.items.begin(), rec.items.begin() + static_cast<std::ptrdiff_t>(keep), rec.items.end(),
                    ranks_before);
  rec.items.resize(keep);
  return rec;
}

void write_neighborhoods_tsv(const std::filesystem::path& path, const ItemNeighborhood& nbrs) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << kNeighborhoodHeader << '\n';
    char score[32];
    for (const auto& [item, list] : nbrs) {
      for (const auto& nb : list) {
        std::snprintf(score, sizeof score, "%.17g", nb.score);
        out << item << '\t' << nb.id << '\t' << score << '\n';
      }
    }
  });
}

ItemNeighborhood read_neighborhoods_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read neighborhoods: " + path.string());
  ItemNeighborhood out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == kNeighborhoodHeader)) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw DataError(where + ": expected item\\tneighbor\\tscore");
    out[fields[0]].push_back({fields[1], parse_double(fields[2], where)});
  }
  for (auto& [item, list] : out) std::stable_sort(list.begin(), list.end(), ranks_before);
  return out;
}

}  // namespace coldstart
