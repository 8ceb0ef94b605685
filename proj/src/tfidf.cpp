#include "coldstart/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "coldstart/common.hpp"

namespace coldstart {

TfIdfModel::TfIdfModel(int corpus_size, std::vector<int> document_frequency,
                       std::shared_ptr<const Vocabulary> vocab)
    : corpus_size_(corpus_size), df_(std::move(document_frequency)), vocab_(std::move(vocab)) {
  if (corpus_size_ < 1) throw DataError("tf-idf model needs N >= 1");
  if (!vocab_ || df_.size() != vocab_->size())
    throw DataError("tf-idf document frequencies do not match the vocabulary");
  idf_.resize(df_.size());
  for (std::size_t w = 0; w < df_.size(); ++w) {
    if (df_[w] < 0 || df_[w] > corpus_size_) throw DataError("document frequency out of range");
    idf_[w] = std::log(static_cast<double>(corpus_size_) / (1.0 + df_[w]));
  }
}

void TfIdfModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "N=" << corpus_size_ << '\n';
    for (std::size_t w = 0; w < df_.size(); ++w)
      out << vocab_->token_of(static_cast<int>(w)) << '\t' << df_[w] << '\n';
  });
}

TfIdfModel TfIdfModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read tf-idf model: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("N=", 0) != 0)
    throw DataError(path.string() + ": missing N= header");
  const int n = std::stoi(line.substr(2));
  std::vector<std::pair<std::string, std::int64_t>> entries;
  std::vector<int> df;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) throw DataError(path.string() + ": malformed row '" + line + "'");
    df.push_back(std::stoi(fields[1]));
    // The stored vocabulary only needs the token -> index mapping here, so
    // df stands in for the corpus frequency.
    entries.emplace_back(fields[0], df.back());
  }
  auto vocab = std::make_shared<const Vocabulary>(std::move(entries), 1);
  return TfIdfModel(n, std::move(df), std::move(vocab));
}

TfIdfModel fit_tfidf(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab) {
  if (docs.empty()) throw DataError("cannot fit tf-idf on an empty corpus");
  std::vector<int> df(vocab->size(), 0);
  std::vector<int> last_seen(vocab->size(), -1);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d].tokens) {
      auto w = vocab->index_of(t);
      if (!w || last_seen[*w] == static_cast<int>(d)) continue;
      last_seen[*w] = static_cast<int>(d);
      ++df[*w];
    }
  }
  return TfIdfModel(static_cast<int>(docs.size()), std::move(df), std::move(vocab));
}

SparseVector transform_tfidf(const TfIdfModel& model, const TokenizedDocument& doc) {
  std::map<int, int> counts;
  for (const auto& t : doc.tokens)
    if (auto w = model.vocabulary().index_of(t)) ++counts[*w];

  SparseVector v(static_cast<Eigen::Index>(model.vocabulary().size()));
  v.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [w, count] : counts) {
    const double weight = count * model.idf(w);
    if (weight != 0.0) v.insertBack(w) = weight;
  }
  return v;
}

}  // namespace coldstart
