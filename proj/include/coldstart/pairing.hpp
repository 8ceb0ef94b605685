#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/cf.hpp"
#include "coldstart/matcher.hpp"

namespace coldstart {

enum class Provenance { Cf, Paired };

std::string_view to_string(Provenance p);

struct AugmentedItem {
  std::string id;
  Provenance provenance = Provenance::Cf;

  friend bool operator==(const AugmentedItem&, const AugmentedItem&) = default;
};

struct AugmentedRecommendation {
  std::string user;
  std::vector<AugmentedItem> items;
  Recommendation source;
};

inline constexpr std::size_t kUnboundedLength = std::numeric_limits<std::size_t>::max();

/// warm id -> cold items paired with it, by descending score then ascending
/// cold id.
using ColdByWarm = std::map<std::string, std::vector<std::string>>;

ColdByWarm invert_pairs(const PairingTable& pairs);

/// Walks the CF list in order and, right after each warm item, inserts the
/// cold items paired with it that are not already present, until the list
/// reaches max_len. CF items are never dropped or reordered.
AugmentedRecommendation augment(const Recommendation& rec, const PairingTable& pairs,
                                std::size_t max_len = kUnboundedLength);

AugmentedRecommendation augment(const Recommendation& rec, const ColdByWarm& by_warm,
                                std::size_t max_len = kUnboundedLength);

/// Re-augments an augmented list; with the same table this adds nothing.
AugmentedRecommendation augment(const AugmentedRecommendation& rec, const PairingTable& pairs,
                                std::size_t max_len = kUnboundedLength);

/// Rows user_id\trank\titem_id\tprovenance (rank is 1-based) after a header.
void write_augmented_tsv(std::ostream& out, const AugmentedRecommendation& rec, bool header = true);

}  // namespace coldstart
