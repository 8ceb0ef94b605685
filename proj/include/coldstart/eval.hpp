#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coldstart/backend.hpp"

namespace coldstart {

/// query id -> relevant ids (never containing the query itself).
using GroundTruth = std::map<std::string, std::set<std::string>>;

/// Reads query_id\trelevant_id rows. Throws DataError on malformed rows or a
/// query listed as relevant to itself.
GroundTruth load_truth(const std::filesystem::path& path);
void write_truth(const std::filesystem::path& path, const GroundTruth& truth);

/// Relevant = every other document sharing the query's label.
GroundTruth truth_from_labels(std::span<const Document> docs, std::span<const std::string> labels);

/// |top-k ∩ relevant| / min(k, |retrieved|); 0 for an empty retrieval.
double precision_at_k(std::span<const std::string> retrieved, const std::set<std::string>& relevant, std::size_t k);

/// |top-k ∩ relevant| / |relevant|. Throws DataError for an empty relevant set.
double recall_at_k(std::span<const std::string> retrieved, const std::set<std::string>& relevant, std::size_t k);

struct BenchmarkConfig {
  std::vector<std::size_t> recall_ks = {10, 20, 30, 50};
  std::size_t precision_k = 10;
  BackendSettings settings;
  int workers = 1;
  bool keep_retrievals = false;
};

struct BackendMetrics {
  BackendSpec backend;
  double precision = 0.0;                 ///< precision@precision_k, averaged over queries
  std::map<std::size_t, double> recall;   ///< k -> recall@k, averaged over queries
  double runtime_seconds = 0.0;
  /// query -> ranked neighbors (self excluded); filled when keep_retrievals.
  std::map<std::string, std::vector<std::string>> retrievals;
};

struct MetricsReport {
  std::size_t precision_k = 10;
  std::vector<std::size_t> recall_ks;
  std::vector<BackendMetrics> rows;  ///< report order
};

/// For each backend: fit on the corpus, retrieve the top max(k) neighbors of
/// every truth query and average the metrics. Throws DataError if a query is
/// not in the corpus.
MetricsReport run_benchmark(std::span<const Document> corpus, const GroundTruth& truth,
                            std::span<const BackendSpec> backends, const BenchmarkConfig& config);

/// Aligned columns, including runtimes.
void write_report_text(std::ostream& out, const MetricsReport& report);
/// Machine-readable metrics only; runtimes are left out so identical runs
/// produce identical files.
void write_report_tsv(std::ostream& out, const MetricsReport& report);

}  // namespace coldstart
