#include "coldstart/lda.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace coldstart {

namespace {

int sample_cumulative(const std::vector<double>& cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                   static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

void validate(const LdaConfig& config) {
  if (config.topics < 1) throw UsageError("LDA needs at least one topic");
  if (config.sweeps < 1) throw UsageError("LDA needs at least one sweep");
  if (!(config.beta > 0.0)) throw UsageError("LDA beta must be positive");
}

}  // namespace

LdaModel::LdaModel(double alpha, double beta, std::uint64_t seed, Eigen::MatrixXi topic_word,
                   std::shared_ptr<const Vocabulary> vocab)
    : alpha_(alpha), beta_(beta), seed_(seed), topic_word_(std::move(topic_word)), vocab_(std::move(vocab)) {
  if (topic_word_.rows() < 1) throw DataError("LDA model has no topics");
  if (!vocab_ || static_cast<std::size_t>(topic_word_.cols()) != vocab_->size())
    throw DataError("LDA counts do not match the vocabulary size");
  if ((topic_word_.array() < 0).any()) throw DataError("LDA counts must be non-negative");
  topic_totals_ = topic_word_.rowwise().sum();
}

void LdaModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, [&](std::ostream& out) {
    char header[256];
    std::snprintf(header, sizeof header, "K=%d alpha=%.17g beta=%.17g V=%lld seed=%llu\n", topics(),
                  alpha_, beta_, static_cast<long long>(topic_word_.cols()),
                  static_cast<unsigned long long>(seed_));
    out << header;
    for (Eigen::Index k = 0; k < topic_word_.rows(); ++k) {
      for (Eigen::Index w = 0; w < topic_word_.cols(); ++w) {
        if (w) out << ' ';
        out << topic_word_(k, w);
      }
      out << '\n';
    }
  });
}

LdaModel LdaModel::load(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read LDA model: " + path.string());
  std::string line;
  std::getline(in, line);
  int k = 0;
  long long v = 0;
  double alpha = 0, beta = 0;
  unsigned long long seed = 0;
  if (std::sscanf(line.c_str(), "K=%d alpha=%lf beta=%lf V=%lld seed=%llu", &k, &alpha, &beta, &v, &seed) != 5)
    throw DataError(path.string() + ": malformed LDA header");
  if (k < 1 || v < 0) throw DataError(path.string() + ": invalid LDA dimensions");
  Eigen::MatrixXi counts(k, v);
  for (int t = 0; t < k; ++t)
    for (long long w = 0; w < v; ++w)
      if (!(in >> counts(t, w))) throw DataError(path.string() + ": truncated LDA counts");
  return LdaModel(alpha, beta, seed, std::move(counts), std::move(vocab));
}

LdaSampler::LdaSampler(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab,
                       const LdaConfig& config)
    : config_(config), alpha_(config.effective_alpha()), vocab_(std::move(vocab)), rng_(config.seed) {
  validate(config);
  if (docs.empty()) throw DataError("cannot fit LDA on an empty corpus");
  const int k = config.topics;
  const auto v = static_cast<Eigen::Index>(vocab_->size());
  doc_topic_ = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(docs.size()), k);
  topic_word_ = Eigen::MatrixXi::Zero(k, v);
  topic_totals_ = Eigen::VectorXi::Zero(k);
  cumulative_.resize(k);

  words_.reserve(docs.size());
  assignments_.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    words_.push_back(vocab_->encode(docs[d].tokens));
    auto& z = assignments_.emplace_back(words_.back().size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = static_cast<int>(uniform_index(rng_, k));
      ++doc_topic_(static_cast<Eigen::Index>(d), z[i]);
      ++topic_word_(z[i], words_.back()[i]);
      ++topic_totals_(z[i]);
    }
    token_count_ += static_cast<std::int64_t>(z.size());
  }
}

void LdaSampler::sweep() {
  const int k = config_.topics;
  const double beta = config_.beta;
  const double v_beta = static_cast<double>(vocab_->size()) * beta;
  for (std::size_t d = 0; d < words_.size(); ++d) {
    const auto row = static_cast<Eigen::Index>(d);
    auto& z = assignments_[d];
    for (std::size_t i = 0; i < z.size(); ++i) {
      const int w = words_[d][i];
      const int old = z[i];
      --doc_topic_(row, old);
      --topic_word_(old, w);
      --topic_totals_(old);

      double total = 0.0;
      for (int t = 0; t < k; ++t) {
        total += (doc_topic_(row, t) + alpha_) * (topic_word_(t, w) + beta) / (topic_totals_(t) + v_beta);
        cumulative_[t] = total;
      }
      const int fresh = sample_cumulative(cumulative_, rng_);
      z[i] = fresh;
      ++doc_topic_(row, fresh);
      ++topic_word_(fresh, w);
      ++topic_totals_(fresh);
    }
  }
  ++sweeps_done_;
}

double LdaSampler::perplexity() const {
  const int k = config_.topics;
  const double beta = config_.beta;
  const double v_beta = static_cast<double>(vocab_->size()) * beta;
  double log_likelihood = 0.0;
  Eigen::VectorXd theta(k);
  for (std::size_t d = 0; d < words_.size(); ++d) {
    const double length = static_cast<double>(words_[d].size());
    for (int t = 0; t < k; ++t)
      theta(t) = (doc_topic_(static_cast<Eigen::Index>(d), t) + alpha_) / (length + k * alpha_);
    for (int w : words_[d]) {
      double p = 0.0;
      for (int t = 0; t < k; ++t) p += theta(t) * (topic_word_(t, w) + beta) / (topic_totals_(t) + v_beta);
      log_likelihood += std::log(p);
    }
  }
  if (token_count_ == 0) return 1.0;
  return std::exp(-log_likelihood / static_cast<double>(token_count_));
}

LdaModel LdaSampler::model() const {
  return LdaModel(alpha_, config_.beta, config_.seed, topic_word_, vocab_);
}

LdaModel fit_lda(std::span<const TokenizedDocument> docs, std::shared_ptr<const Vocabulary> vocab,
                 const LdaConfig& config) {
  LdaSampler sampler(docs, std::move(vocab), config);
  for (int s = 0; s < config.sweeps; ++s) sampler.sweep();
  return sampler.model();
}

Eigen::VectorXd lda_doc_vector(const LdaModel& model, const TokenizedDocument& doc, int fold_in_sweeps,
                               std::uint64_t seed) {
  const int k = model.topics();
  const auto words = model.vocabulary().encode(doc.tokens);
  if (words.empty()) return Eigen::VectorXd::Constant(k, 1.0 / k);

  const double alpha = model.alpha();
  const double beta = model.beta();
  const double v_beta = static_cast<double>(model.vocabulary().size()) * beta;
  const auto& topic_word = model.topic_word_counts();
  const auto& totals = model.topic_totals();

  Rng rng(seed);
  std::vector<int> z(words.size());
  Eigen::VectorXi doc_topic = Eigen::VectorXi::Zero(k);
  for (auto& t : z) {
    t = static_cast<int>(uniform_index(rng, k));
    ++doc_topic(t);
  }
  std::vector<double> cumulative(k);
  for (int s = 0; s < fold_in_sweeps; ++s) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const int w = words[i];
      --doc_topic(z[i]);
      double total = 0.0;
      for (int t = 0; t < k; ++t) {
        total += (doc_topic(t) + alpha) * (topic_word(t, w) + beta) / (totals(t) + v_beta);
        cumulative[t] = total;
      }
      z[i] = sample_cumulative(cumulative, rng);
      ++doc_topic(z[i]);
    }
  }
  Eigen::VectorXd theta = doc_topic.cast<double>().array() + alpha;
  return theta / theta.sum();
}

}  // namespace coldstart
