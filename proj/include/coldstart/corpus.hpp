#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coldstart {

/// One item's text plus contextual metadata. Empty strings mean "absent".
struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::string classification;
  std::string location;
  std::string requirements;
  std::vector<std::string> skills;
  bool warm = false;  ///< true iff the item has behavioral data
};

struct TokenizedDocument {
  std::string id;
  std::vector<std::string> tokens;
};

struct TokenizerOptions {
  bool remove_stopwords = true;
};

/// Reads a JSONL corpus, one document object per line. Blank lines are
/// skipped; unknown fields are ignored with a warning.
/// Throws DataError on unreadable files, malformed lines (with the line
/// number), duplicate ids and missing id/body.
std::vector<Document> load_corpus(const std::filesystem::path& path);

void save_corpus(const std::filesystem::path& path, std::span<const Document> docs);

/// Lowercases, splits on every non-alphanumeric byte and drops tokens shorter
/// than two characters (and stopwords, when enabled).
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

/// Tokenizes the document body.
TokenizedDocument tokenize(const Document& doc, const TokenizerOptions& options = {});

std::vector<TokenizedDocument> tokenize_all(std::span<const Document> docs,
                                            const TokenizerOptions& options = {});

bool is_stopword(std::string_view token);

/// Dense token index ordered by descending corpus frequency, ties broken
/// lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Entries must already be in index order.
  Vocabulary(std::vector<std::pair<std::string, std::int64_t>> entries, int min_count);

  std::size_t size() const { return tokens_.size(); }
  int min_count() const { return min_count_; }

  std::optional<int> index_of(std::string_view token) const;
  const std::string& token_of(int index) const { return tokens_.at(index); }
  std::int64_t frequency(int index) const { return counts_.at(index); }
  std::span<const std::int64_t> frequencies() const { return counts_; }

  /// Maps tokens to indices, dropping out-of-vocabulary tokens.
  std::vector<int> encode(std::span<const std::string> tokens) const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int, Hash, std::equal_to<>> index_;
  int min_count_ = 1;
};

/// Keeps tokens with corpus frequency >= min_count. Throws UsageError when
/// min_count < 1 and DataError on an empty corpus or empty result.
Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, int min_count);

}  // namespace coldstart
