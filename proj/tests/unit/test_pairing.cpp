#include <doctest.h>

#include <set>
#include <sstream>

#include "coldstart/pairing.hpp"
#include "unit/helpers.hpp"

using namespace coldstart;

namespace {

Recommendation rec_of(std::vector<std::string> ids) {
  Recommendation r{"u", {}};
  double score = static_cast<double>(ids.size());
  for (auto& id : ids) r.items.push_back({std::move(id), score--});
  return r;
}

std::vector<std::string> ids_of(const AugmentedRecommendation& a) {
  std::vector<std::string> out;
  for (const auto& it : a.items) out.push_back(it.id);
  return out;
}

}  // namespace

TEST_CASE("augment: worked examples") {
  auto rec = rec_of({"w1", "w2"});
  CHECK(ids_of(augment(rec, PairingTable{}, 10)) == std::vector<std::string>{"w1", "w2"});

  PairingTable one;
  one["c1"] = {{"w1", 0.9}};
  auto a = augment(rec, one, 10);
  CHECK(ids_of(a) == std::vector<std::string>{"w1", "c1", "w2"});
  CHECK(a.items[1].provenance == Provenance::Paired);
  CHECK(a.items[0].provenance == Provenance::Cf);

  PairingTable two;
  two["c1"] = {{"w1", 0.9}, {"w2", 0.8}};
  CHECK(ids_of(augment(rec_of({"w2", "w1"}), two, 10)) == std::vector<std::string>{"w2", "c1", "w1"});
}

TEST_CASE("augment: max_len caps insertions only") {
  PairingTable t;
  t["c1"] = {{"w1", 0.9}};
  t["c2"] = {{"w1", 0.8}};
  auto rec = rec_of({"w1", "w2"});
  CHECK(ids_of(augment(rec, t, 1)) == std::vector<std::string>{"w1", "w2"});
  CHECK(ids_of(augment(rec, t, 3)) == std::vector<std::string>{"w1", "c1", "w2"});
  CHECK(ids_of(augment(rec, t)) == std::vector<std::string>{"w1", "c1", "c2", "w2"});
}

TEST_CASE("augment: an item CF already recommends is not inserted again") {
  PairingTable t;
  t["w2"] = {{"w1", 0.9}};
  auto a = augment(rec_of({"w1", "w2"}), t);
  CHECK(ids_of(a) == std::vector<std::string>{"w1", "w2"});
  CHECK(a.items[1].provenance == Provenance::Cf);
}

TEST_CASE("invert_pairs: worked examples") {
  CHECK(invert_pairs(PairingTable{}).empty());
  PairingTable t;
  t["c1"] = {{"w1", 0.9}};
  t["c2"] = {{"w1", 0.7}};
  auto inv = invert_pairs(t);
  CHECK(inv == ColdByWarm{{"w1", {"c1", "c2"}}});
  PairingTable unpaired;
  unpaired["c1"] = {};
  CHECK(invert_pairs(unpaired).empty());
  PairingTable tie;
  tie["cb"] = {{"w", 0.5}};
  tie["ca"] = {{"w", 0.5}};
  tie["cc"] = {{"w", 0.6}};
  CHECK(invert_pairs(tie)["w"] == std::vector<std::string>{"cc", "ca", "cb"});
}

TEST_CASE("augment: conservation, soundness, completeness and idempotence on random instances") {
  Rng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n_warm = 1 + uniform_index(rng, 15), n_cold = uniform_index(rng, 10);
    std::vector<std::string> warm, cold;
    for (std::size_t i = 0; i < n_warm; ++i) warm.push_back("w" + std::to_string(i));
    for (std::size_t i = 0; i < n_cold; ++i) cold.push_back("c" + std::to_string(i));

    PairingTable table;
    for (const auto& c : cold) {
      auto& list = table[c];
      std::set<std::string> used;
      for (std::size_t m = 0, n = uniform_index(rng, 4); m < n; ++m) {
        const auto& w = warm[uniform_index(rng, warm.size())];
        if (used.insert(w).second) list.push_back({w, 0.5 + 0.5 * uniform01(rng)});
      }
      std::sort(list.begin(), list.end(), ranks_before);
    }
    std::vector<std::string> rec_ids;
    for (const auto& w : warm)
      if (uniform01(rng) < 0.6) rec_ids.push_back(w);
    for (std::size_t i = rec_ids.size(); i > 1; --i) std::swap(rec_ids[i - 1], rec_ids[uniform_index(rng, i)]);
    const auto rec = rec_of(rec_ids);
    const std::size_t max_len = uniform01(rng) < 0.5 ? kUnboundedLength : rec_ids.size() + uniform_index(rng, 5);

    const auto out = augment(rec, table, max_len);
    std::vector<std::string> cf_part;
    std::set<std::string> seen;
    std::map<std::string, std::size_t> position;
    for (std::size_t p = 0; p < out.items.size(); ++p) {
      const auto& it = out.items[p];
      CHECK(seen.insert(it.id).second);
      position[it.id] = p;
      if (it.provenance == Provenance::Cf) cf_part.push_back(it.id);
    }
    CHECK(cf_part == rec_ids);
    CHECK(out.items.size() <= std::max(max_len, rec_ids.size()));
    CHECK(out.source.items.size() == rec.items.size());

    for (const auto& it : out.items) {
      if (it.provenance != Provenance::Paired) continue;
      CHECK(it.id[0] == 'c');
      bool partner_earlier = false;
      for (const auto& hit : table.at(it.id)) {
        auto p = position.find(hit.id);
        if (p != position.end() && p->second < position[it.id] && out.items[p->second].provenance == Provenance::Cf)
          partner_earlier = true;
      }
      CHECK(partner_earlier);
    }

    if (max_len == kUnboundedLength) {
      std::set<std::string> rec_set(rec_ids.begin(), rec_ids.end());
      for (const auto& [c, list] : table) {
        bool should = false;
        for (const auto& hit : list) should = should || rec_set.contains(hit.id);
        CHECK(seen.contains(c) == should);
      }
    }

    const auto again = augment(out, table, max_len);
    CHECK(again.items == out.items);
  }
}

TEST_CASE("write_augmented_tsv") {
  PairingTable t;
  t["c1"] = {{"w1", 0.9}};
  std::ostringstream out;
  write_augmented_tsv(out, augment(rec_of({"w1", "w2"}), t));
  CHECK(out.str() == "user_id\trank\titem_id\tprovenance\nu\t1\tw1\tcf\nu\t2\tc1\tpaired\nu\t3\tw2\tcf\n");
}
