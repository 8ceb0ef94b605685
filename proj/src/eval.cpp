#include "coldstart/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace coldstart {

namespace {

std::size_t hits_in_top_k(std::span<const std::string> retrieved, const std::set<std::string>& relevant,
                          std::size_t k) {
  const std::size_t n = std::min(k, retrieved.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevant.contains(retrieved[i]);
  return hits;
}

template <Embedder E>
std::map<std::string, std::vector<std::string>> retrieve_all(std::span<const TokenizedDocument> docs,
                                                             const std::vector<std::size_t>& queries,
                                                             std::size_t depth, const E& embedder, int workers) {
  using Vector = typename E::vector_type;
  std::vector<std::optional<Vector>> vecs(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    try {
      Vector v = embedder.embed(docs[i]);
      if (v.norm() > 0.0) vecs[i] = std::move(v);
    } catch (const DataError&) {
    }
  });
  SimilarityIndex<Vector> index(embedder.kind());
  for (std::size_t i = 0; i < docs.size(); ++i)
    if (vecs[i]) index.add(docs[i].id, *vecs[i]);

  std::vector<std::vector<std::string>> lists(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t q) {
    const std::size_t d = queries[q];
    if (!vecs[d] || index.empty()) return;
    for (auto& hit : top_k_similar(index, *vecs[d], depth, docs[d].id)) lists[q].push_back(std::move(hit.id));
  });

  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t q = 0; q < queries.size(); ++q) out.emplace(docs[queries[q]].id, std::move(lists[q]));
  return out;
}

}  // namespace

GroundTruth load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth file '" + path.string() + "'");
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (line_no == 1 && fields.size() == 2 && fields[0] == "query_id" && fields[1] == "relevant_id") continue;
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected query_id<TAB>relevant_id");
    if (fields[0] == fields[1])
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": query '" + fields[0] +
                      "' listed as relevant to itself");
    truth[fields[0]].insert(fields[1]);
  }
  return truth;
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "query_id\trelevant_id\n";
    for (const auto& [query, relevant] : truth)
      for (const auto& r : relevant) out << query << '\t' << r << '\n';
  });
}

GroundTruth truth_from_labels(std::span<const Document> docs, std::span<const std::string> labels) {
  if (docs.size() != labels.size()) throw DataError("label count does not match document count");
  std::unordered_map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < docs.size(); ++i) members[labels[i]].push_back(i);
  GroundTruth truth;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::set<std::string> relevant;
    for (std::size_t j : members[labels[i]])
      if (j != i) relevant.insert(docs[j].id);
    if (!relevant.empty()) truth.emplace(docs[i].id, std::move(relevant));
  }
  return truth;
}

double precision_at_k(std::span<const std::string> retrieved, const std::set<std::string>& relevant, std::size_t k) {
  if (k < 1) throw UsageError("precision@k needs k >= 1");
  if (retrieved.empty()) return 0.0;
  return static_cast<double>(hits_in_top_k(retrieved, relevant, k)) /
         static_cast<double>(std::min(k, retrieved.size()));
}

double recall_at_k(std::span<const std::string> retrieved, const std::set<std::string>& relevant, std::size_t k) {
  if (k < 1) throw UsageError("recall@k needs k >= 1");
  if (relevant.empty()) throw DataError("recall is undefined for an empty relevant set");
  return static_cast<double>(hits_in_top_k(retrieved, relevant, k)) / static_cast<double>(relevant.size());
}

MetricsReport run_benchmark(std::span<const Document> corpus, const GroundTruth& truth,
                            std::span<const BackendSpec> backends, const BenchmarkConfig& config) {
  if (config.recall_ks.empty()) throw UsageError("at least one recall k is required");
  for (std::size_t k : config.recall_ks)
    if (k < 1) throw UsageError("recall k values must be >= 1");
  if (config.precision_k < 1) throw UsageError("precision k must be >= 1");
  if (truth.empty()) throw DataError("ground truth has no queries");

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < corpus.size(); ++i) position.emplace(corpus[i].id, i);
  std::vector<std::size_t> queries;
  for (const auto& [query, relevant] : truth) {
    auto it = position.find(query);
    if (it == position.end()) throw DataError("truth query '" + query + "' is not in the corpus");
    if (relevant.empty()) throw DataError("truth query '" + query + "' has no relevant documents");
    if (relevant.contains(query)) throw DataError("query '" + query + "' listed as relevant to itself");
    queries.push_back(it->second);
  }
  const std::size_t depth =
      std::max(config.precision_k, *std::max_element(config.recall_ks.begin(), config.recall_ks.end()));

  std::vector<BackendSpec> order(backends.begin(), backends.end());
  std::sort(order.begin(), order.end(), report_order);
  order.erase(std::unique(order.begin(), order.end()), order.end());

  MetricsReport report;
  report.precision_k = config.precision_k;
  report.recall_ks = config.recall_ks;
  std::sort(report.recall_ks.begin(), report.recall_ks.end());
  report.recall_ks.erase(std::unique(report.recall_ks.begin(), report.recall_ks.end()), report.recall_ks.end());

  BackendSettings settings = config.settings;
  settings.doc2vec.workers = config.workers;

  for (const auto& spec : order) {
    const auto start = std::chrono::steady_clock::now();
    const auto docs = prepare_documents(corpus, settings, spec.enriched);
    const auto fitted = fit_backend(spec, docs, settings);
    auto retrievals = visit_embedder(fitted, settings, [&](const auto& embedder) {
      return retrieve_all(docs, queries, depth, embedder, config.workers);
    });

    BackendMetrics row;
    row.backend = spec;
    for (std::size_t k : report.recall_ks) row.recall[k] = 0.0;
    for (const auto& [query, relevant] : truth) {
      const auto& got = retrievals.at(query);
      row.precision += precision_at_k(got, relevant, config.precision_k);
      for (std::size_t k : report.recall_ks) row.recall[k] += recall_at_k(got, relevant, k);
    }
    const double n = static_cast<double>(truth.size());
    row.precision /= n;
    for (auto& [k, value] : row.recall) value /= n;
    row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.keep_retrievals) row.retrievals = std::move(retrievals);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_text(std::ostream& out, const MetricsReport& report) {
  std::vector<std::string> header = {"backend", "precision@" + std::to_string(report.precision_k)};
  for (std::size_t k : report.recall_ks) header.push_back("recall@" + std::to_string(k));
  header.push_back("runtime_s");

  std::vector<std::vector<std::string>> table = {header};
  for (const auto& row : report.rows) {
    std::vector<std::string> cells = {row.backend.name()};
    auto fmt = [](double v, int digits) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(digits) << v;
      return s.str();
    };
    cells.push_back(fmt(row.precision, 4));
    for (std::size_t k : report.recall_ks) cells.push_back(fmt(row.recall.at(k), 4));
    cells.push_back(fmt(row.runtime_seconds, 3));
    table.push_back(std::move(cells));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& cells : table)
    for (std::size_t c = 0; c < cells.size(); ++c) width[c] = std::max(width[c], cells[c].size());
  for (const auto& cells : table) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
      }
    }
    out << '\n';
  }
}

void write_report_tsv(std::ostream& out, const MetricsReport& report) {
  out << "backend\tprecision@" << report.precision_k;
  for (std::size_t k : report.recall_ks) out << "\trecall@" << k;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& row : report.rows) {
    out << row.backend.name() << '\t' << row.precision;
    for (std::size_t k : report.recall_ks) out << '\t' << row.recall.at(k);
    out << '\n';
  }
}

}  // namespace coldstart
