#include "coldstart/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "coldstart/common.hpp"

namespace coldstart {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kKnownFields = {
    "id", "title", "body", "classification", "location", "requirements", "skills", "warm"};

// Common English function words; deliberately short so domain terms survive.
constexpr std::array<std::string_view, 75> kStopwords = {
    "about", "after", "all", "also", "an", "and", "any", "are", "as", "at",
    "be", "been", "being", "but", "by", "can", "could", "do", "does", "for",
    "from", "had", "has", "have", "he", "her", "his", "how", "if", "in",
    "into", "is", "it", "its", "may", "more", "most", "must", "no", "not",
    "of", "on", "or", "our", "out", "over", "she", "so", "such", "than",
    "that", "the", "their", "them", "then", "there", "these", "they", "this", "to",
    "up", "us", "was", "we", "were", "what", "when", "which", "who", "will",
    "with", "would", "you", "your", "yours"};
static_assert(std::is_sorted(kStopwords.begin(), kStopwords.end()));

std::string optional_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string())
    throw DataError("line " + std::to_string(line) + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus: " + path.string());

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::set<std::string> warned;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object())
      throw DataError("line " + std::to_string(line_no) + ": expected a JSON object");

    Document doc;
    doc.id = optional_string(obj, "id", line_no);
    doc.body = optional_string(obj, "body", line_no);
    if (doc.id.empty()) throw DataError("line " + std::to_string(line_no) + ": missing id");
    if (doc.body.empty())
      throw DataError("line " + std::to_string(line_no) + ": missing body for id '" + doc.id + "'");
    doc.title = optional_string(obj, "title", line_no);
    doc.classification = optional_string(obj, "classification", line_no);
    doc.location = optional_string(obj, "location", line_no);
    doc.requirements = optional_string(obj, "requirements", line_no);
    if (auto it = obj.find("skills"); it != obj.end() && !it->is_null()) {
      if (!it->is_array())
        throw DataError("line " + std::to_string(line_no) + ": 'skills' must be an array");
      for (const auto& s : *it) {
        if (!s.is_string())
          throw DataError("line " + std::to_string(line_no) + ": skills must be strings");
        doc.skills.push_back(s.get<std::string>());
      }
    }
    if (auto it = obj.find("warm"); it != obj.end() && !it->is_null()) {
      if (!it->is_boolean())
        throw DataError("line " + std::to_string(line_no) + ": 'warm' must be a boolean");
      doc.warm = it->get<bool>();
    }
    for (const auto& [key, _] : obj.items()) {
      if (std::find(kKnownFields.begin(), kKnownFields.end(), key) == kKnownFields.end() &&
          warned.insert(key).second) {
        spdlog::warn("{}: ignoring unknown field '{}' (first seen on line {})", path.string(), key,
                     line_no);
      }
    }
    if (!seen.insert(doc.id).second)
      throw DataError("line " + std::to_string(line_no) + ": duplicate id '" + doc.id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_corpus(const std::filesystem::path& path, std::span<const Document> docs) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& d : docs) {
      json obj = {{"id", d.id}, {"body", d.body}, {"warm", d.warm}};
      if (!d.title.empty()) obj["title"] = d.title;
      if (!d.classification.empty()) obj["classification"] = d.classification;
      if (!d.location.empty()) obj["location"] = d.location;
      if (!d.requirements.empty()) obj["requirements"] = d.requirements;
      if (!d.skills.empty()) obj["skills"] = d.skills;
      out << obj.dump() << '\n';
    }
  });
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !(options.remove_stopwords && is_stopword(current)))
      tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TokenizedDocument tokenize(const Document& doc, const TokenizerOptions& options) {
  return {doc.id, tokenize(doc.body, options)};
}

std::vector<TokenizedDocument> tokenize_all(std::span<const Document> docs,
                                            const TokenizerOptions& options) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(tokenize(d, options));
  return out;
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::int64_t>> entries, int min_count)
    : min_count_(min_count) {
  tokens_.reserve(entries.size());
  counts_.reserve(entries.size());
  for (auto& [token, count] : entries) {
    const int index = static_cast<int>(tokens_.size());
    if (!index_.emplace(token, index).second)
      throw DataError("duplicate vocabulary token '" + token + "'");
    tokens_.push_back(std::move(token));
    counts_.push_back(count);
  }
}

std::optional<int> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto id = index_of(t)) ids.push_back(*id);
  return ids;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "min_count=" << min_count_ << '\n';
    for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << counts_[i] << '\n';
  });
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read vocabulary: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("min_count=", 0) != 0)
    throw DataError(path.string() + ": missing min_count header");
  const int min_count = std::stoi(line.substr(10));
  std::vector<std::pair<std::string, std::int64_t>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) throw DataError(path.string() + ": malformed vocabulary row");
    entries.emplace_back(fields[0], std::stoll(fields[1]));
  }
  return Vocabulary(std::move(entries), min_count);
}

Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, int min_count) {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  if (docs.empty()) throw DataError("cannot build a vocabulary from an empty corpus");

  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) ++counts[t];

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [token, count] : counts)
    if (count >= min_count) kept.emplace_back(token, count);
  if (kept.empty())
    throw DataError("vocabulary is empty: no token occurs at least " + std::to_string(min_count) +
                    " times");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return Vocabulary(std::move(kept), min_count);
}

}  // namespace coldstart
