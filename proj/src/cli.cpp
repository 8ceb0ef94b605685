#include "coldstart/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "coldstart/backend.hpp"
#include "coldstart/cf.hpp"
#include "coldstart/eval.hpp"
#include "coldstart/pairing.hpp"
#include "coldstart/synthetic.hpp"

namespace coldstart {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string corpus;
  std::string ratings;
  std::string out_dir = "out";
  std::string model_dir;  // defaults to <out-dir>/model
  std::string pairs;
  std::string neighborhoods;
  std::string truth;
  std::string output;

  std::vector<std::string> backends = {"doc2vec"};
  int enrich_n = 3;
  std::string enrich_fields = "title,classification,location,requirements,skills";
  bool stopwords = true;
  int min_count = 5;

  int dim = 100;
  int window = 5;
  int epochs = 1;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  int negative = 5;
  int infer_steps = 50;

  int topics = 20;
  int sweeps = 200;
  double alpha = 0.0;
  double beta = 0.01;
  int fold_in_sweeps = 50;

  std::size_t top_m = 1;
  double threshold = 0.5;
  std::string metric = "cosine";
  std::size_t neighbors = 50;
  std::string user;
  std::size_t n = 10;
  std::size_t max_len = 0;  // 0 = unbounded

  std::vector<std::size_t> ks = {10, 20, 30, 50};
  std::uint64_t seed = 1;
  int workers = 1;

  std::string synth_kind = "boilerplate";
  std::size_t synth_docs = 300;
};

/// One registered configuration key and a printer for its current value.
struct Key {
  std::string name;
  std::function<std::string()> value;
};

std::string env_name(const std::string& key) {
  std::string env = "COLDSTART_";
  for (char c : key) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return env;
}

template <typename T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
  } else {
    return std::to_string(v);
  }
}

template <typename T>
std::string show(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + show(v[i]);
  return s;
}

class Registry {
 public:
  explicit Registry(CLI::App& app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app_.add_option("--" + key, target, help)->envname(env_name(key))->capture_default_str();
    if constexpr (!requires { target.begin(); } || std::is_same_v<T, std::string>)
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    if constexpr (requires { target.begin(); } && !std::is_same_v<T, std::string>) opt->delimiter(',');
    keys_.push_back({key, [&target] { return show(target); }});
    return opt;
  }

  const std::vector<Key>& keys() const { return keys_; }

 private:
  CLI::App& app_;
  std::vector<Key> keys_;
};

struct Context {
  Options opt;
  std::vector<Key> keys;
  std::ostream* out;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path out_dir(const Options& o) { return o.out_dir; }
fs::path model_dir(const Options& o) { return o.model_dir.empty() ? out_dir(o) / "model" : fs::path(o.model_dir); }
fs::path neighborhoods_path(const Options& o) {
  return o.neighborhoods.empty() ? out_dir(o) / "neighborhoods.tsv" : fs::path(o.neighborhoods);
}
fs::path pairs_output_path(const Options& o) { return o.pairs.empty() ? out_dir(o) / "pairs.tsv" : fs::path(o.pairs); }

void require_path(const std::string& key, const std::string& value) {
  if (value.empty()) throw UsageError("--" + key + " is required");
  if (!fs::exists(value)) throw DataError(key + " path '" + value + "' does not exist");
}

std::vector<BackendSpec> backend_specs(const Options& o) {
  if (o.backends.empty()) throw UsageError("--backend needs at least one name");
  std::vector<BackendSpec> specs;
  for (const auto& name : o.backends) specs.push_back(parse_backend(name));
  return specs;
}

BackendSpec single_backend(const Options& o) {
  auto specs = backend_specs(o);
  if (specs.size() != 1) throw UsageError("this command needs exactly one --backend");
  return specs.front();
}

BackendSettings settings_from(const Options& o) {
  if (o.enrich_n < 0) throw UsageError("--enrich-n must be >= 0");
  if (o.min_count < 1) throw UsageError("--min-count must be >= 1");
  if (o.infer_steps < 0) throw UsageError("--infer-steps must be >= 0");
  if (o.fold_in_sweeps < 0) throw UsageError("--fold-in-sweeps must be >= 0");
  BackendSettings s;
  s.tokenizer.remove_stopwords = o.stopwords;
  s.enrichment.n_repeats = o.enrich_n;
  s.enrichment.fields = parse_context_fields(o.enrich_fields);
  s.min_count = o.min_count;
  s.lda.topics = o.topics;
  s.lda.sweeps = o.sweeps;
  s.lda.alpha = o.alpha;
  s.lda.beta = o.beta;
  s.lda.seed = o.seed;
  s.lda_fold_in_sweeps = o.fold_in_sweeps;
  s.doc2vec.dim = o.dim;
  s.doc2vec.window = o.window;
  s.doc2vec.epochs = o.epochs;
  s.doc2vec.lr_start = o.lr_start;
  s.doc2vec.lr_end = o.lr_end;
  s.doc2vec.negative_k = o.negative;
  s.doc2vec.seed = o.seed;
  s.doc2vec.workers = o.workers;
  s.infer_steps = o.infer_steps;
  s.infer_lr = o.lr_start;
  return s;
}

std::string config_text(const std::vector<Key>& keys) {
  std::string text;
  for (const auto& k : keys) text += k.name + "=" + k.value() + "\n";
  return text;
}

// --- subcommands -------------------------------------------------------------

void cmd_ingest_check(Context& ctx) {
  const auto& o = ctx.opt;
  if (o.corpus.empty() && o.ratings.empty()) throw UsageError("ingest-check needs --corpus and/or --ratings");
  if (!o.corpus.empty()) {
    require_path("corpus", o.corpus);
    const auto docs = load_corpus(o.corpus);
    const auto settings = settings_from(o);
    const auto tokenized = tokenize_all(docs, settings.tokenizer);
    std::size_t warm = 0, tokens = 0, empty = 0;
    for (const auto& d : docs) warm += d.warm;
    for (const auto& t : tokenized) {
      tokens += t.tokens.size();
      empty += t.tokens.empty();
    }
    if (empty) spdlog::warn("{} document(s) have no tokens after tokenization", empty);
    std::size_t vocab = 0;
    if (tokens > 0) {
      try {
        vocab = build_vocabulary(tokenized, o.min_count).size();
      } catch (const DataError&) {
      }
    }
    *ctx.out << "documents=" << docs.size() << " warm=" << warm << " cold=" << docs.size() - warm
             << " tokens=" << tokens << " vocabulary=" << vocab << "\n";
  }
  if (!o.ratings.empty()) {
    require_path("ratings", o.ratings);
    const auto r = load_ratings(o.ratings);
    *ctx.out << "users=" << r.users() << " items=" << r.items() << " ratings=" << r.ratings() << "\n";
  }
}

void cmd_train(Context& ctx) {
  const auto& o = ctx.opt;
  require_path("corpus", o.corpus);
  const auto specs = backend_specs(o);
  const auto settings = settings_from(o);
  const auto docs = load_corpus(o.corpus);
  const fs::path dir = model_dir(o);
  fs::create_directories(dir);

  nlohmann::ordered_json manifest;
  nlohmann::ordered_json config;
  for (const auto& k : ctx.keys) config[k.name] = k.value();
  const std::string conf = config_text(ctx.keys);
  manifest["config"] = config;
  manifest["config_hash"] = hex64(fnv1a(conf));
  manifest["backends"] = nlohmann::ordered_json::object();

  for (const auto& spec : specs) {
    const auto start = std::chrono::steady_clock::now();
    const auto prepared = prepare_documents(docs, settings, spec.enriched);
    TrainReport report;
    const auto fitted = fit_backend(spec, prepared, settings, &report);
    const auto files = save_backend(fitted, dir / spec.name());
    nlohmann::ordered_json entry;
    entry["seconds"] = seconds_since(start);
    entry["files"] = nlohmann::ordered_json::object();
    for (const auto& f : files) entry["files"][fs::relative(f, dir).generic_string()] = hex64(file_checksum(f));
    if (spec.kind == VectorKind::Doc2Vec) {
      entry["epoch_mean_loss"] = report.epoch_mean_loss;
      entry["skipped_documents"] = report.skipped_documents;
    }
    manifest["backends"][spec.name()] = entry;
    *ctx.out << "trained " << spec.name() << " -> " << (dir / spec.name()).string() << "\n";
  }
  write_file_atomic(dir / "run.conf", [&](std::ostream& out) { out << conf; });
  write_file_atomic(dir / "manifest.json", [&](std::ostream& out) { out << manifest.dump(2) << "\n"; });
}

PairingSummary run_pair(Context& ctx, const fs::path& output) {
  const auto& o = ctx.opt;
  require_path("corpus", o.corpus);
  const auto spec = single_backend(o);
  const auto settings = settings_from(o);
  if (o.top_m < 1) throw UsageError("--top-m must be >= 1");
  const auto docs = load_corpus(o.corpus);
  const fs::path dir = model_dir(o) / spec.name();
  if (!fs::exists(dir)) throw DataError("no trained " + spec.name() + " model in '" + dir.string() + "'");

  const auto prepared = prepare_documents(docs, settings, spec.enriched);
  std::vector<TokenizedDocument> warm, cold;
  for (std::size_t i = 0; i < docs.size(); ++i) (docs[i].warm ? warm : cold).push_back(prepared[i]);
  if (warm.empty()) throw DataError("corpus has no warm items to pair with");

  PairingTable table;
  if (cold.empty()) {
    spdlog::warn("corpus has no cold items; writing an empty pairing table");
  } else {
    const auto fitted = load_backend(spec, dir);
    const PairingOptions options{o.top_m, o.threshold, o.workers};
    table = visit_embedder(fitted, settings,
                           [&](const auto& embedder) { return pair_cold_items(cold, warm, embedder, options); });
  }
  write_pairing_tsv(output, table);
  const auto summary = summarize(table);
  *ctx.out << "paired=" << summary.paired << " unpaired=" << summary.unpaired << " rows=" << summary.rows << "\n";
  return summary;
}

void run_cf_build(Context& ctx, const fs::path& output) {
  const auto& o = ctx.opt;
  require_path("ratings", o.ratings);
  if (o.neighbors < 1) throw UsageError("--neighbors must be >= 1");
  const auto metric = parse_metric(o.metric);
  const auto ratings = load_ratings(o.ratings);
  const auto nbrs = build_item_neighborhoods(ratings, metric, o.neighbors, o.workers);
  write_neighborhoods_tsv(output, nbrs);
  *ctx.out << "items=" << nbrs.size() << " neighborhoods -> " << output.string() << "\n";
}

void write_recommendations(Context& ctx, std::ostream& out, const fs::path& neighborhoods, const fs::path& pairs,
                           bool all_users) {
  const auto& o = ctx.opt;
  if (o.n < 1) throw UsageError("--n must be >= 1");
  const auto ratings = load_ratings(o.ratings);
  const auto nbrs = read_neighborhoods_tsv(neighborhoods);
  ColdByWarm by_warm;
  if (!pairs.empty()) by_warm = invert_pairs(read_pairing_tsv(pairs));
  const std::size_t max_len = o.max_len == 0 ? kUnboundedLength : o.max_len;

  std::vector<std::string> users;
  if (all_users) {
    users = ratings.user_ids();
  } else {
    users.push_back(o.user);
  }
  out << "user_id\trank\titem_id\tprovenance\n";
  for (const auto& u : users) write_augmented_tsv(out, augment(recommend(ratings, nbrs, u, o.n), by_warm, max_len), false);
}

void cmd_recommend(Context& ctx) {
  const auto& o = ctx.opt;
  require_path("ratings", o.ratings);
  const fs::path nbrs = neighborhoods_path(o);
  require_path("neighborhoods", nbrs.string());
  if (!o.pairs.empty()) require_path("pairs", o.pairs);
  const bool all_users = o.user.empty();
  if (o.output.empty()) {
    write_recommendations(ctx, *ctx.out, nbrs, o.pairs, all_users);
  } else {
    write_file_atomic(o.output, [&](std::ostream& out) { write_recommendations(ctx, out, nbrs, o.pairs, all_users); });
  }
}

void cmd_eval(Context& ctx) {
  const auto& o = ctx.opt;
  const auto specs = backend_specs(o);  // usage errors before touching files
  require_path("corpus", o.corpus);
  require_path("truth", o.truth);
  BenchmarkConfig config;
  config.recall_ks = o.ks;
  config.settings = settings_from(o);
  config.workers = o.workers;
  const auto docs = load_corpus(o.corpus);
  const auto truth = load_truth(o.truth);
  const auto report = run_benchmark(docs, truth, specs, config);

  const fs::path dir = out_dir(o);
  fs::create_directories(dir);
  write_file_atomic(dir / "report.tsv", [&](std::ostream& out) { write_report_tsv(out, report); });
  write_file_atomic(dir / "report.txt", [&](std::ostream& out) { write_report_text(out, report); });
  if (!o.output.empty()) write_file_atomic(o.output, [&](std::ostream& out) { write_report_text(out, report); });
  write_report_text(*ctx.out, report);
}

void cmd_pipeline(Context& ctx) {
  auto& o = ctx.opt;
  require_path("corpus", o.corpus);
  require_path("ratings", o.ratings);
  single_backend(o);
  const fs::path dir = out_dir(o);
  fs::create_directories(dir);

  nlohmann::ordered_json timings;
  auto start = std::chrono::steady_clock::now();
  cmd_train(ctx);
  timings["train"] = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const fs::path pairs = pairs_output_path(o);
  run_pair(ctx, pairs);
  timings["pair"] = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const fs::path nbrs = neighborhoods_path(o);
  run_cf_build(ctx, nbrs);
  timings["cf-build"] = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const fs::path recs = o.output.empty() ? dir / "recommendations.tsv" : fs::path(o.output);
  write_file_atomic(recs, [&](std::ostream& out) { write_recommendations(ctx, out, nbrs, pairs, true); });
  timings["recommend"] = seconds_since(start);
  write_file_atomic(dir / "timings.json", [&](std::ostream& out) { out << timings.dump(2) << "\n"; });
  *ctx.out << "recommendations -> " << recs.string() << "\n";
}

void cmd_synth(Context& ctx) {
  const auto& o = ctx.opt;
  const fs::path dir = out_dir(o);
  fs::create_directories(dir);
  LabeledCorpus corpus;
  std::vector<RatingMatrix::Entry> ratings;
  if (o.synth_kind == "clusters") {
    corpus = cluster_corpus(o.seed, o.synth_docs / 2);
  } else if (o.synth_kind == "boilerplate") {
    BoilerplateConfig config;
    config.docs = o.synth_docs;
    config.seed = o.seed;
    corpus = boilerplate_corpus(config);
  } else if (o.synth_kind == "scale") {
    ScaleConfig config;
    config.corpus.docs = o.synth_docs;
    config.corpus.seed = o.seed;
    auto fixture = scale_fixture(config);
    corpus = std::move(fixture.corpus);
    ratings = std::move(fixture.ratings);
  } else {
    throw UsageError("unknown --kind '" + o.synth_kind + "' (expected clusters, boilerplate or scale)");
  }
  save_corpus(dir / "corpus.jsonl", corpus.docs);
  write_truth(dir / "truth.tsv", truth_from_labels(corpus.docs, corpus.labels));
  if (!ratings.empty()) write_ratings_tsv(dir / "ratings.tsv", ratings);
  *ctx.out << "documents=" << corpus.docs.size() << " ratings=" << ratings.size() << " -> " << dir.string() << "\n";
}

void install_stderr_logger() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("coldstart");
    spdlog::set_default_logger(logger);
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  install_stderr_logger();
  Context ctx;
  ctx.out = &out;
  auto& o = ctx.opt;

  CLI::App app{"Cold-start pairing engine: embeddings, item-based CF and a pairing layer."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value configuration file");
  Registry reg(app);

  reg.add("corpus", o.corpus, "Corpus JSONL path");
  reg.add("ratings", o.ratings, "Ratings TSV path (user_id, item_id, rating)");
  reg.add("out-dir", o.out_dir, "Output directory");
  reg.add("model-dir", o.model_dir, "Model directory (default <out-dir>/model)");
  reg.add("pairs", o.pairs, "Pairing TSV (written by pair, read by recommend)");
  reg.add("neighborhoods", o.neighborhoods, "Item neighborhood TSV (default <out-dir>/neighborhoods.tsv)");
  reg.add("truth", o.truth, "Ground-truth TSV (query_id, relevant_id)");
  reg.add("output", o.output, "Output file (stdout when empty)");
  reg.add("backend", o.backends, "Backends: tfidf, lda, doc2vec, each optionally +ctx");
  reg.add("enrich-n", o.enrich_n, "Repetitions of each context field for +ctx backends");
  reg.add("enrich-fields", o.enrich_fields, "Context fields for +ctx backends");
  reg.add("stopwords", o.stopwords, "Remove stopwords when tokenizing");
  reg.add("min-count", o.min_count, "Minimum token frequency for doc2vec and LDA vocabularies");
  reg.add("dim", o.dim, "doc2vec dimensions");
  reg.add("window", o.window, "doc2vec context half-window");
  reg.add("epochs", o.epochs, "doc2vec epochs");
  reg.add("lr-start", o.lr_start, "doc2vec initial learning rate");
  reg.add("lr-end", o.lr_end, "doc2vec final learning rate");
  reg.add("negative", o.negative, "doc2vec negative samples (0 = exact softmax)");
  reg.add("infer-steps", o.infer_steps, "doc2vec inference passes for unseen documents");
  reg.add("topics", o.topics, "LDA topics");
  reg.add("sweeps", o.sweeps, "LDA Gibbs sweeps");
  reg.add("alpha", o.alpha, "LDA document-topic prior (0 = 50/topics)");
  reg.add("beta", o.beta, "LDA topic-word prior");
  reg.add("fold-in-sweeps", o.fold_in_sweeps, "LDA fold-in sweeps for document vectors");
  reg.add("top-m", o.top_m, "Warm partners per cold item");
  reg.add("threshold", o.threshold, "Minimum cosine for a pairing");
  reg.add("metric", o.metric, "CF item similarity: cosine or pearson");
  reg.add("neighbors", o.neighbors, "CF neighborhood size");
  reg.add("user", o.user, "User to recommend for (all users when empty)");
  reg.add("n", o.n, "Recommendations per user before pairing");
  reg.add("max-len", o.max_len, "Cap on the augmented list length (0 = none)");
  reg.add("ks", o.ks, "Recall cutoffs for eval");
  reg.add("seed", o.seed, "Seed for every stochastic stage");
  reg.add("workers", o.workers, "Worker threads");
  reg.add("kind", o.synth_kind, "synth: clusters, boilerplate or scale");
  reg.add("docs", o.synth_docs, "synth: number of documents");
  ctx.keys = reg.keys();

  std::function<void()> action;
  auto sub = [&](const char* name, const char* help, std::function<void()> fn) {
    app.add_subcommand(name, help)->fallthrough()->callback([&action, fn] { action = fn; });
  };
  sub("ingest-check", "Validate a corpus and/or ratings file", [&] { cmd_ingest_check(ctx); });
  sub("train", "Fit the selected backends and write model files plus a manifest", [&] { cmd_train(ctx); });
  sub("pair", "Pair cold items with warm items", [&] { run_pair(ctx, pairs_output_path(ctx.opt)); });
  sub("cf-build", "Build item neighborhoods from ratings", [&] { run_cf_build(ctx, neighborhoods_path(ctx.opt)); });
  sub("recommend", "CF recommendations augmented with paired cold items", [&] { cmd_recommend(ctx); });
  sub("eval", "Precision/recall benchmark against ground truth", [&] { cmd_eval(ctx); });
  sub("pipeline", "train, pair, cf-build and recommend for every user", [&] { cmd_pipeline(ctx); });
  sub("synth", "Generate a synthetic corpus (and ratings)", [&] { cmd_synth(ctx); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace coldstart
