#include "coldstart/pairing.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

namespace coldstart {

namespace {

AugmentedRecommendation augment_items(std::string user, std::vector<AugmentedItem> input, Recommendation source,
                                      const ColdByWarm& by_warm, std::size_t max_len) {
  // Seeded with every input id: an item CF already lists is never inserted.
  std::unordered_set<std::string> present;
  for (const auto& item : input) present.insert(item.id);

  AugmentedRecommendation out{std::move(user), {}, std::move(source)};
  out.items.reserve(input.size());
  // CF items always stay; only insertions count against the cap.
  std::size_t budget = input.size() >= max_len ? 0 : max_len - input.size();
  for (auto& item : input) {
    const bool is_cf = item.provenance == Provenance::Cf;
    const std::string id = item.id;
    out.items.push_back(std::move(item));
    if (!is_cf || budget == 0) continue;
    auto partners = by_warm.find(id);
    if (partners == by_warm.end()) continue;
    for (const auto& cold : partners->second) {
      if (budget == 0) break;
      if (!present.insert(cold).second) continue;
      out.items.push_back({cold, Provenance::Paired});
      --budget;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Provenance p) { return p == Provenance::Cf ? "cf" : "paired"; }

ColdByWarm invert_pairs(const PairingTable& pairs) {
  std::map<std::string, std::vector<ScoredId>> scored;
  for (const auto& [cold, list] : pairs)
    for (const auto& w : list) scored[w.id].push_back({cold, w.score});
  ColdByWarm out;
  for (auto& [warm, list] : scored) {
    std::sort(list.begin(), list.end(), ranks_before);
    auto& ids = out[warm];
    for (auto& c : list) ids.push_back(std::move(c.id));
  }
  return out;
}

AugmentedRecommendation augment(const Recommendation& rec, const ColdByWarm& by_warm, std::size_t max_len) {
  std::vector<AugmentedItem> items;
  items.reserve(rec.items.size());
  for (const auto& it : rec.items) items.push_back({it.id, Provenance::Cf});
  return augment_items(rec.user, std::move(items), rec, by_warm, max_len);
}

AugmentedRecommendation augment(const Recommendation& rec, const PairingTable& pairs, std::size_t max_len) {
  return augment(rec, invert_pairs(pairs), max_len);
}

AugmentedRecommendation augment(const AugmentedRecommendation& rec, const PairingTable& pairs, std::size_t max_len) {
  return augment_items(rec.user, rec.items, rec.source, invert_pairs(pairs), max_len);
}

void write_augmented_tsv(std::ostream& out, const AugmentedRecommendation& rec, bool header) {
  if (header) out << "user_id\trank\titem_id\tprovenance\n";
  for (std::size_t r = 0; r < rec.items.size(); ++r)
    out << rec.user << '\t' << (r + 1) << '\t' << rec.items[r].id << '\t' << to_string(rec.items[r].provenance)
        << '\n';
}

}  // namespace coldstart
