#include "coldstart/doc2vec.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "coldstart/common.hpp"

namespace coldstart {

namespace {

using VectorMapF = Eigen::Map<Eigen::VectorXf>;
using ConstVectorMapF = Eigen::Map<const Eigen::VectorXf>;

std::vector<double> build_noise_cdf(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.size());
  double total = 0.0;
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    total += std::pow(static_cast<double>(vocab.frequency(static_cast<int>(w))), 0.75);
    cdf[w] = total;
  }
  return cdf;
}

int sample_noise(std::span<const double> cdf, Rng& rng) {
  const double u = uniform01(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

// Raw views of the shared parameters. Inference runs the kernel with
// kUpdateShared = false, which never writes through these pointers.
struct ParamView {
  float* word_in;
  float* word_out;
  int dim;
  int vocab_size;
  int window;
  int negative_k;
  std::span<const double> noise_cdf;
};

struct Scratch {
  explicit Scratch(int dim, int vocab_size, bool exact)
      : context(dim), error(dim), probabilities(exact ? vocab_size : 0) {}
  Eigen::VectorXf context;
  Eigen::VectorXf error;
  Eigen::VectorXd probabilities;
};

// One PV-DM gradient step predicting words[pos] from the mean of the
// paragraph vector and the surrounding window. Returns the step's loss.
template <bool kUpdateShared>
double pvdm_step(const ParamView& p, std::span<const int> words, std::size_t pos, float* doc_vec, float lr,
                 Rng& rng, Scratch& s, const TrainHooks* hooks) {
  const int dim = p.dim;
  const std::size_t lo = pos >= static_cast<std::size_t>(p.window) ? pos - p.window : 0;
  const std::size_t hi = std::min(words.size(), pos + p.window + 1);

  s.context = ConstVectorMapF(doc_vec, dim);
  int inputs = 1;
  for (std::size_t j = lo; j < hi; ++j) {
    if (j == pos) continue;
    s.context += ConstVectorMapF(p.word_in + static_cast<std::ptrdiff_t>(words[j]) * dim, dim);
    ++inputs;
  }
  s.context /= static_cast<float>(inputs);
  s.error.setZero();

  const int target = words[pos];
  double loss = 0.0;
  if (p.negative_k > 0) {
    auto apply = [&](int row, bool observed) {
      VectorMapF out(p.word_out + static_cast<std::ptrdiff_t>(row) * dim, dim);
      const auto term = pair_term<double>(static_cast<double>(out.dot(s.context)), observed);
      loss += term.loss;
      const float g = static_cast<float>(term.slope);
      s.error += g * out;
      if constexpr (kUpdateShared) out -= (lr * g) * s.context;
    };
    apply(target, true);
    for (int n = 0; n < p.negative_k; ++n) {
      const int noise = sample_noise(p.noise_cdf, rng);
      if (noise == target) continue;
      apply(noise, false);
    }
  } else {
    Eigen::Map<RowMatrixF> out(p.word_out, p.vocab_size, dim);
    s.probabilities = softmax_probabilities(s.context, out);
    if (hooks && hooks->on_softmax)
      hooks->on_softmax(std::span<const double>(s.probabilities.data(), s.probabilities.size()));
    loss = -std::log(std::max(s.probabilities(target), 1e-300));
    Eigen::VectorXf slope = s.probabilities.cast<float>();
    slope(target) -= 1.0f;
    s.error = out.transpose() * slope;
    if constexpr (kUpdateShared) out.noalias() -= (lr * slope) * s.context.transpose();
  }

  // d loss / d input = error / inputs for every averaged input.
  const float step = lr / static_cast<float>(inputs);
  VectorMapF(doc_vec, dim) -= step * s.error;
  if constexpr (kUpdateShared) {
    for (std::size_t j = lo; j < hi; ++j) {
      if (j == pos) continue;
      VectorMapF(p.word_in + static_cast<std::ptrdiff_t>(words[j]) * dim, dim) -= step * s.error;
    }
  }
  return loss;
}

void fill_uniform(float* data, std::size_t n, float half_width, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i)
    data[i] = static_cast<float>((uniform01(rng) * 2.0 - 1.0) * half_width);
}

void write_floats_le(std::ostream& out, const RowMatrixF& m) {
  std::vector<char> buffer(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(m.data()[i]);
    for (int b = 0; b < 4; ++b) buffer[static_cast<std::size_t>(i) * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

void read_floats_le(std::istream& in, RowMatrixF& m, const std::string& what) {
  std::vector<unsigned char> buffer(static_cast<std::size_t>(m.size()) * 4);
  if (!in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size())))
    throw DataError("truncated doc2vec model (" + what + ")");
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buffer[static_cast<std::size_t>(i) * 4 + b]) << (8 * b);
    m.data()[i] = std::bit_cast<float>(bits);
  }
}

}  // namespace

void TrainConfig::validate(std::size_t vocab_size) const {
  if (dim < 1) throw UsageError("doc2vec dim must be >= 1");
  if (window < 0) throw UsageError("doc2vec window must be >= 0");
  if (epochs < 1) throw UsageError("doc2vec epochs must be >= 1");
  if (!(lr_end > 0.0) || lr_start < lr_end) throw UsageError("doc2vec needs lr_start >= lr_end > 0");
  if (negative_k < 0) throw UsageError("doc2vec negative_k must be >= 0");
  if (negative_k == 0 && vocab_size > kMaxExactSoftmaxVocabulary)
    throw UsageError("exact softmax (negative_k=0) needs a vocabulary of at most " +
                     std::to_string(kMaxExactSoftmaxVocabulary) + " tokens");
  if (workers < 1) throw UsageError("workers must be >= 1");
}

Doc2VecModel::Doc2VecModel(int window, int negative_k, std::uint64_t seed, std::shared_ptr<const Vocabulary> vocab,
                           RowMatrixF word_in, RowMatrixF word_out, RowMatrixF doc_vecs,
                           std::vector<std::string> doc_ids)
    : window_(window),
      negative_k_(negative_k),
      seed_(seed),
      vocab_(std::move(vocab)),
      word_in_(std::move(word_in)),
      word_out_(std::move(word_out)),
      doc_vecs_(std::move(doc_vecs)),
      doc_ids_(std::move(doc_ids)) {
  const auto v = static_cast<Eigen::Index>(vocab_->size());
  if (word_in_.rows() != v || word_out_.rows() != v || word_out_.cols() != word_in_.cols() ||
      doc_vecs_.cols() != word_in_.cols() || doc_vecs_.rows() != static_cast<Eigen::Index>(doc_ids_.size()))
    throw DataError("doc2vec parameter shapes are inconsistent");
  for (std::size_t r = 0; r < doc_ids_.size(); ++r)
    if (!rows_.emplace(doc_ids_[r], static_cast<int>(r)).second)
      throw DataError("duplicate doc2vec document id '" + doc_ids_[r] + "'");
  noise_cdf_ = build_noise_cdf(*vocab_);
}

Eigen::VectorXf Doc2VecModel::doc_vector(std::string_view doc_id) const {
  auto it = rows_.find(std::string(doc_id));
  if (it == rows_.end()) throw DataError("unknown document id '" + std::string(doc_id) + "'");
  return doc_vecs_.row(it->second).transpose();
}

void Doc2VecModel::save(const std::filesystem::path& path) const {
  write_file_atomic(
      path,
      [&](std::ostream& out) {
        out << "coldstart-doc2vec dim=" << dim() << " V=" << vocab_->size() << " D=" << doc_ids_.size()
            << " window=" << window_ << " seed=" << seed_ << " negative=" << negative_k_
            << " min_count=" << vocab_->min_count() << '\n';
        for (std::size_t w = 0; w < vocab_->size(); ++w)
          out << vocab_->token_of(static_cast<int>(w)) << '\t' << vocab_->frequency(static_cast<int>(w)) << '\n';
        write_floats_le(out, word_in_);
        write_floats_le(out, word_out_);
        write_floats_le(out, doc_vecs_);
        for (std::size_t r = 0; r < doc_ids_.size(); ++r) out << doc_ids_[r] << '\t' << r << '\n';
      },
      /*binary=*/true);
}

Doc2VecModel Doc2VecModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read doc2vec model: " + path.string());
  std::string line;
  std::getline(in, line);
  int dim = 0, window = 0, negative = 0, min_count = 1;
  long long v = 0, d = 0;
  unsigned long long seed = 0;
  if (std::sscanf(line.c_str(), "coldstart-doc2vec dim=%d V=%lld D=%lld window=%d seed=%llu negative=%d min_count=%d",
                  &dim, &v, &d, &window, &seed, &negative, &min_count) != 7 ||
      dim < 1 || v < 1 || d < 0)
    throw DataError(path.string() + ": malformed doc2vec header");

  std::vector<std::pair<std::string, std::int64_t>> entries;
  entries.reserve(static_cast<std::size_t>(v));
  for (long long w = 0; w < v; ++w) {
    if (!std::getline(in, line)) throw DataError(path.string() + ": truncated vocabulary block");
    auto fields = split(line, '\t');
    if (fields.size() != 2) throw DataError(path.string() + ": malformed vocabulary row");
    entries.emplace_back(fields[0], std::stoll(fields[1]));
  }
  auto vocab = std::make_shared<const Vocabulary>(std::move(entries), min_count);

  RowMatrixF word_in(v, dim), word_out(v, dim), doc_vecs(d, dim);
  read_floats_le(in, word_in, "word_in");
  read_floats_le(in, word_out, "word_out");
  read_floats_le(in, doc_vecs, "doc_vecs");

  std::vector<std::string> ids(static_cast<std::size_t>(d));
  std::vector<bool> filled(ids.size(), false);
  for (long long r = 0; r < d; ++r) {
    if (!std::getline(in, line)) throw DataError(path.string() + ": truncated doc-id table");
    auto fields = split(line, '\t');
    if (fields.size() != 2) throw DataError(path.string() + ": malformed doc-id row");
    const auto row = std::stoull(fields[1]);
    if (row >= ids.size() || filled[row]) throw DataError(path.string() + ": invalid doc-id row " + fields[1]);
    ids[row] = fields[0];
    filled[row] = true;
  }
  return Doc2VecModel(window, negative, seed, std::move(vocab), std::move(word_in), std::move(word_out),
                      std::move(doc_vecs), std::move(ids));
}

Doc2VecModel train_doc2vec(std::span<const TokenizedDocument> docs, const TrainConfig& config,
                           std::shared_ptr<const Vocabulary> vocab, TrainReport* report, const TrainHooks& hooks) {
  config.validate(vocab->size());
  if (docs.empty()) throw DataError("cannot train doc2vec on an empty corpus");

  std::vector<std::vector<int>> encoded;
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  std::size_t skipped = 0;
  std::int64_t corpus_tokens = 0;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) throw DataError("duplicate document id '" + d.id + "'");
    auto words = vocab->encode(d.tokens);
    if (words.empty()) {
      spdlog::warn("doc2vec: skipping document '{}' with no in-vocabulary tokens", d.id);
      ++skipped;
      continue;
    }
    corpus_tokens += static_cast<std::int64_t>(words.size());
    encoded.push_back(std::move(words));
    ids.push_back(d.id);
  }
  if (encoded.empty()) throw DataError("no document has an in-vocabulary token");

  const int dim = config.dim;
  const auto v = static_cast<Eigen::Index>(vocab->size());
  const auto n_docs = static_cast<Eigen::Index>(encoded.size());
  const float half_width = 0.5f / static_cast<float>(dim);

  Rng init_rng(config.seed);
  RowMatrixF word_in(v, dim);
  RowMatrixF doc_vecs(n_docs, dim);
  RowMatrixF word_out = RowMatrixF::Zero(v, dim);
  fill_uniform(word_in.data(), static_cast<std::size_t>(word_in.size()), half_width, init_rng);
  fill_uniform(doc_vecs.data(), static_cast<std::size_t>(doc_vecs.size()), half_width, init_rng);

  const auto noise_cdf = build_noise_cdf(*vocab);
  const ParamView params{word_in.data(), word_out.data(), dim, static_cast<int>(v), config.window,
                         config.negative_k, noise_cdf};
  const double total_steps = static_cast<double>(corpus_tokens) * config.epochs;
  std::atomic<std::int64_t> steps_done{0};
  const int workers = std::min<int>(config.workers, static_cast<int>(encoded.size()));
  const bool exact = config.negative_k == 0;

  std::vector<double> epoch_loss;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<double> worker_loss(workers, 0.0);
    auto run = [&](int worker) {
      Rng rng(config.seed + 0x51ed270b27c6d1ULL * (static_cast<std::uint64_t>(epoch) * workers + worker + 1));
      Scratch scratch(dim, static_cast<int>(v), exact);
      const std::size_t begin = encoded.size() * worker / workers;
      const std::size_t end = encoded.size() * (worker + 1) / workers;
      double loss = 0.0;
      for (std::size_t d = begin; d < end; ++d) {
        const auto& words = encoded[d];
        float* doc_vec = doc_vecs.data() + static_cast<std::ptrdiff_t>(d) * dim;
        for (std::size_t pos = 0; pos < words.size(); ++pos) {
          const double progress = static_cast<double>(steps_done.fetch_add(1, std::memory_order_relaxed)) / total_steps;
          const auto lr = static_cast<float>(config.lr_start - (config.lr_start - config.lr_end) * progress);
          loss += pvdm_step<true>(params, words, pos, doc_vec, lr, rng, scratch, &hooks);
        }
      }
      worker_loss[worker] = loss;
    };
    if (workers <= 1) {
      run(0);
    } else {
      // Lock-free shared updates across workers; only single-worker runs are
      // bitwise reproducible.
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
      for (auto& t : pool) t.join();
    }
    double sum = 0.0;
    for (double l : worker_loss) sum += l;
    epoch_loss.push_back(sum / static_cast<double>(corpus_tokens));
  }

  if (report) {
    report->epoch_mean_loss = std::move(epoch_loss);
    report->skipped_documents = skipped;
  }
  return Doc2VecModel(config.window, config.negative_k, config.seed, std::move(vocab), std::move(word_in),
                      std::move(word_out), std::move(doc_vecs), std::move(ids));
}

Eigen::VectorXf infer_doc_vector(const Doc2VecModel& model, std::span<const std::string> tokens, int steps,
                                 double lr_start, std::uint64_t seed) {
  const auto words = model.vocabulary().encode(tokens);
  if (words.empty()) throw DataError("document has no in-vocabulary token; cannot infer a vector");
  const int dim = model.dim();
  const TrainConfig defaults;
  const double lr_end = std::min(defaults.lr_end, lr_start);

  Rng rng(seed);
  Eigen::VectorXf vec(dim);
  fill_uniform(vec.data(), static_cast<std::size_t>(dim), 0.5f / static_cast<float>(dim), rng);
  if (steps <= 0) return vec;

  const ParamView params{const_cast<float*>(model.word_in().data()), const_cast<float*>(model.word_out().data()),
                         dim, static_cast<int>(model.vocabulary().size()), model.window(), model.negative_k(),
                         model.noise_cdf()};
  Scratch scratch(dim, params.vocab_size, model.negative_k() == 0);
  const double total = static_cast<double>(steps) * static_cast<double>(words.size());
  std::int64_t done = 0;
  for (int s = 0; s < steps; ++s) {
    for (std::size_t pos = 0; pos < words.size(); ++pos) {
      const auto lr = static_cast<float>(lr_start - (lr_start - lr_end) * (static_cast<double>(done++) / total));
      pvdm_step<false>(params, words, pos, vec.data(), lr, rng, scratch, nullptr);
    }
  }
  return vec;
}

}  // namespace coldstart
