#include "coldstart/matcher.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

namespace coldstart {

namespace {
constexpr std::string_view kPairingHeader = "cold_id\twarm_id\tscore";
}

std::string_view to_string(VectorKind kind) {
  switch (kind) {
    case VectorKind::TfIdf: return "tfidf";
    case VectorKind::Lda: return "lda";
    case VectorKind::Doc2Vec: return "doc2vec";
  }
  return "?";
}

void write_pairing_tsv(const std::filesystem::path& path, const PairingTable& table) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << kPairingHeader << '\n';
    char score[32];
    for (const auto& [cold, warm] : table) {
      if (warm.empty()) {
        out << cold << "\t-\tnan\n";
        continue;
      }
      for (const auto& w : warm) {
        std::snprintf(score, sizeof score, "%.17g", w.score);
        out << cold << '\t' << w.id << '\t' << score << '\n';
      }
    }
  });
}

PairingTable read_pairing_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read pairing table: " + path.string());
  PairingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == kPairingHeader)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected cold_id\\twarm_id\\tscore");
    auto& list = table[fields[0]];
    if (fields[1] == "-") continue;
    char* end = nullptr;
    const double score = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0' || std::isnan(score))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric score '" + fields[2] + "'");
    list.push_back({fields[1], score});
  }
  for (auto& [cold, list] : table) std::stable_sort(list.begin(), list.end(), ranks_before);
  return table;
}

PairingSummary summarize(const PairingTable& table) {
  PairingSummary s;
  for (const auto& [cold, list] : table) {
    if (list.empty()) {
      ++s.unpaired;
    } else {
      ++s.paired;
      s.rows += list.size();
    }
  }
  return s;
}

}  // namespace coldstart
