#include "coldstart/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

namespace coldstart {

namespace {

std::string word(char kind, std::size_t group, std::size_t index) {
  return std::string(1, kind) + std::to_string(group) + "w" + std::to_string(index);
}

std::string padded_id(const char* prefix, std::size_t i, std::size_t total) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::string sample_text(Rng& rng, char kind, std::size_t group, std::size_t vocab, std::size_t length) {
  std::string text;
  for (std::size_t t = 0; t < length; ++t) {
    if (t) text += ' ';
    text += word(kind, group, uniform_index(rng, vocab));
  }
  return text;
}

}  // namespace

LabeledCorpus cluster_corpus(std::uint64_t seed, std::size_t docs_per_cluster, std::size_t vocab_per_cluster,
                             std::size_t tokens_per_doc) {
  Rng rng(seed);
  LabeledCorpus out;
  const std::size_t total = 2 * docs_per_cluster;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t cluster = i % 2;
    Document d;
    d.id = padded_id("doc", i, total);
    d.body = sample_text(rng, 'k', cluster, vocab_per_cluster, tokens_per_doc);
    d.warm = true;
    out.docs.push_back(std::move(d));
    out.labels.push_back("cluster" + std::to_string(cluster));
  }
  return out;
}

LabeledCorpus boilerplate_corpus(const BoilerplateConfig& config) {
  if (config.companies == 0 || config.roles == 0 || config.company_vocab == 0 || config.role_vocab == 0)
    throw UsageError("boilerplate corpus needs at least one company, role and word per pool");
  Rng rng(config.seed);
  std::vector<std::string> boilerplate;
  for (std::size_t c = 0; c < config.companies; ++c)
    boilerplate.push_back(sample_text(rng, 'b', c, config.company_vocab, config.boilerplate_tokens));

  LabeledCorpus out;
  for (std::size_t i = 0; i < config.docs; ++i) {
    const std::size_t company = uniform_index(rng, config.companies);
    const std::size_t role = i % config.roles;
    Document d;
    d.id = padded_id("job", i, config.docs);
    d.requirements = sample_text(rng, 'r', role, config.role_vocab, config.role_tokens);
    d.body = boilerplate[company] + "\n" + d.requirements;
    d.warm = true;
    out.docs.push_back(std::move(d));
    out.labels.push_back("role" + std::to_string(role));
  }
  return out;
}

ScaleFixture scale_fixture(const ScaleConfig& config) {
  ScaleFixture out;
  out.corpus = boilerplate_corpus(config.corpus);
  Rng rng(derive_seed(config.corpus.seed, "scale"));

  std::vector<std::vector<std::size_t>> warm_by_role(config.corpus.roles);
  for (std::size_t i = 0; i < out.corpus.docs.size(); ++i) {
    auto& d = out.corpus.docs[i];
    d.warm = uniform01(rng) >= config.cold_fraction;
    if (d.warm) warm_by_role[i % config.corpus.roles].push_back(i);
  }
  std::vector<std::size_t> all_warm;
  for (const auto& r : warm_by_role) all_warm.insert(all_warm.end(), r.begin(), r.end());
  if (all_warm.empty()) return out;

  for (std::size_t u = 0; u < config.users; ++u) {
    const std::string user = padded_id("user", u, config.users);
    const std::size_t favorite = uniform_index(rng, config.corpus.roles);
    std::unordered_set<std::size_t> rated;
    const std::size_t want = std::min(config.ratings_per_user, all_warm.size());
    for (std::size_t attempt = 0; rated.size() < want && attempt < 20 * want; ++attempt) {
      const bool on_topic = uniform01(rng) < 0.8 && !warm_by_role[favorite].empty();
      const auto& pool = on_topic ? warm_by_role[favorite] : all_warm;
      const std::size_t item = pool[uniform_index(rng, pool.size())];
      if (!rated.insert(item).second) continue;
      const double rating = on_topic ? 3.0 + static_cast<double>(uniform_index(rng, 3))
                                     : 1.0 + static_cast<double>(uniform_index(rng, 3));
      out.ratings.push_back({user, out.corpus.docs[item].id, rating});
    }
  }
  return out;
}

void write_ratings_tsv(const std::filesystem::path& path, std::span<const RatingMatrix::Entry> ratings) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "user_id\titem_id\trating\n";
    for (const auto& e : ratings) out << e.user << '\t' << e.item << '\t' << e.rating << '\n';
  });
}

}  // namespace coldstart
