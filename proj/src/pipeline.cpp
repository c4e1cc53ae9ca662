#include "psdvec/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <unordered_map>

#include "psdvec/embedding_io.hpp"
#include "psdvec/error.hpp"
#include "psdvec/genmodel.hpp"
#include "psdvec/psd_solver.hpp"
#include "psdvec/stats.hpp"

namespace psdvec {

namespace {

struct Interrupted {};

std::vector<std::filesystem::path> as_paths(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

std::string fmt_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void ensure_workdir(const PipelineConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.workdir, ec);
  if (ec) throw io_error("cannot create workdir " + cfg.workdir + ": " + ec.message());
}

// Settings that change the trained vectors; a checkpoint is only reused when they match.
std::string training_tag(const PipelineConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "kappa=%.17g cut=%.17g core=%ld block=%ld T=%d init=%.17g tol=%.17g reg=%s",
                cfg.kappa, cfg.cut_fraction, cfg.core_size, cfg.block_size, cfg.iterations, cfg.init_scale,
                cfg.convergence_tol, cfg.regularization.c_str());
  return buf;
}

void write_trajectory(const std::filesystem::path& path, const std::vector<double>& trajectory) {
  std::ofstream traj(path, std::ios::binary);
  if (!traj) throw io_error("cannot write " + path.string());
  traj << "iteration\tweighted_error\n";
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    traj << t << '\t' << fmt_double("%.17g", trajectory[t]) << '\n';
  }
  if (!traj) throw io_error("write failure on " + path.string());
}

std::vector<double> vocab_counts(const Vocabulary& vocab) {
  return {vocab.counts().begin(), vocab.counts().end()};
}

}  // namespace

CorpusData load_corpus(const std::vector<std::filesystem::path>& paths, std::uint64_t min_count,
                       std::size_t max_vocab, const TokenizerOptions& opts) {
  if (paths.empty()) throw invalid_argument("no corpus paths given");
  CorpusData data;
  std::unordered_map<std::string, std::uint64_t> freq;
  for_each_document(paths, [&](std::string_view text) {
    for (auto& t : tokenize(text, opts)) {
      ++freq[std::move(t)];
      ++data.raw_tokens;
    }
  });
  data.vocab = build_vocabulary(freq, min_count, max_vocab);
  freq.clear();
  for_each_document(paths, [&](std::string_view text) {
    auto doc = to_document(tokenize(text, opts), data.vocab);
    if (!doc.empty()) data.documents.push_back(std::move(doc));
  });
  return data;
}

RegularizationSchedule make_schedule(const std::string& name, Index vocab_size, Index core_size) {
  if (name == "none") return RegularizationSchedule::none();
  if (name == "tiered") return RegularizationSchedule::tiered(vocab_size, core_size);
  throw config_error("unknown regularization schedule '" + name + "'");
}

CountSummary cmd_count(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  ensure_workdir(cfg);
  const auto start = std::chrono::steady_clock::now();
  const auto data = load_corpus(as_paths(cfg.corpus), cfg.min_count, cfg.max_vocab);
  const auto counts = count_cooccurrences(data.documents, data.vocab.size(), cfg.window, cfg.thread_count());

  CountSummary s;
  s.vocab_size = data.vocab.size();
  s.documents = data.documents.size();
  s.tokens = static_cast<std::size_t>(counts.total_tokens());
  s.nnz = counts.nnz();

  std::ofstream vocab_out(cfg.vocab_path(), std::ios::binary);
  if (!vocab_out) throw io_error("cannot write " + cfg.vocab_path().string());
  data.vocab.write_tsv(vocab_out);
  std::ofstream counts_out(cfg.counts_path(), std::ios::binary);
  if (!counts_out) throw io_error("cannot write " + cfg.counts_path().string());
  counts.write_tsv(counts_out);
  if (!vocab_out || !counts_out) throw io_error("write failure in " + cfg.workdir);

  log << "count: " << data.raw_tokens << " raw tokens, " << s.tokens << " in-vocabulary tokens, " << s.documents
      << " documents, W=" << s.vocab_size << ", " << s.nnz << " nonzero pairs ("
      << fmt_double("%.1f", seconds_since(start)) << " s)\n";
  return s;
}

CountArtifacts load_count_artifacts(const PipelineConfig& cfg) {
  std::ifstream vin(cfg.vocab_path(), std::ios::binary);
  if (!vin) throw io_error("cannot open " + cfg.vocab_path().string() + " (run `count` first)");
  CountArtifacts a;
  a.vocab = Vocabulary::read_tsv(vin);
  std::ifstream cin(cfg.counts_path(), std::ios::binary);
  if (!cin) throw io_error("cannot open " + cfg.counts_path().string() + " (run `count` first)");
  a.counts = std::make_shared<const CooccurrenceCounts>(CooccurrenceCounts::read_tsv(cin, vocab_counts(a.vocab)));
  return a;
}

TrainSummary cmd_train(const PipelineConfig& cfg, std::ostream& log, const TrainControl& control) {
  cfg.validate();
  ensure_workdir(cfg);
  const auto start = std::chrono::steady_clock::now();
  const auto artifacts = load_count_artifacts(cfg);
  const CorpusStats stats(artifacts.counts, cfg.kappa, cfg.cut_fraction);
  const Index w = stats.vocab_size();
  const Index core = std::min<Index>(cfg.core_size, w);
  const auto plan = plan_blocks(w, core, cfg.block_size);
  const auto schedule = make_schedule(cfg.regularization, w, core);
  const BcdConfig bcd{cfg.rank, cfg.iterations, cfg.init_scale, cfg.convergence_tol};

  log << "train: W=" << w << " core=" << core << " N=" << cfg.rank << " groups=" << plan.size()
      << " kappa=" << cfg.kappa << " C_cut=" << fmt_double("%.6g", stats.c_cut()) << "\n";

  Checkpoint checkpoint(cfg.checkpoint_path(), artifacts.vocab.words(), cfg.rank, training_tag(cfg));
  std::vector<double> trajectory;
  TrainSummary summary;
  TrainOptions opts;
  opts.threads = cfg.thread_count();
  opts.checkpoint = &checkpoint;
  opts.words = &artifacts.vocab.words();
  opts.on_bcd_iteration = [&](int t, double err) {
    trajectory.push_back(err);
    log << "  bcd iteration " << t << ": weighted error " << fmt_double("%.10g", err) << " ("
        << fmt_double("%.1f", seconds_since(start)) << " s)\n";
  };
  opts.on_group_done = [&](std::size_t k, IndexRange r) {
    log << "  group " << k << " [" << r.begin << ", " << r.end << ") done ("
        << fmt_double("%.1f", seconds_since(start)) << " s)\n";
    if (k == 0 && !trajectory.empty()) write_trajectory(cfg.trajectory_path(), trajectory);
    if (control.stop_after_group && k >= *control.stop_after_group && k + 1 < plan.size()) throw Interrupted{};
  };

  BlockwiseResult result;
  try {
    result = train_blockwise(stats, plan, schedule, bcd, opts);
  } catch (const Interrupted&) {
    log << "train: interrupted; checkpoint kept at " << cfg.checkpoint_path().string() << "\n";
    summary.interrupted = true;
    return summary;
  }
  summary.trajectory = result.core_trajectory;
  summary.resumed_groups = result.resumed_groups;

  write_word2vec_text(cfg.embeddings_path(), Embeddings{artifacts.vocab.words(), std::move(result.embeddings)});
  std::filesystem::remove(cfg.checkpoint_path());
  log << "train: wrote " << cfg.embeddings_path().string() << " (" << fmt_double("%.1f", seconds_since(start))
      << " s)\n";
  return summary;
}

EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::filesystem::path& embeddings, std::ostream& out) {
  if (cfg.similarity_datasets.empty() && cfg.analogy_datasets.empty()) {
    throw config_error("no evaluation datasets configured");
  }
  const EmbeddingIndex model(read_word2vec_text(embeddings));
  EvalReport report;
  report.model_name = embeddings.stem().string();
  for (const auto& p : cfg.similarity_datasets) {
    report.similarity.push_back(similarity_eval(model, read_similarity_dataset(std::filesystem::path(p))));
  }
  for (const auto& p : cfg.analogy_datasets) {
    report.analogy.push_back(analogy_eval(model, read_analogy_dataset(std::filesystem::path(p)), cfg.thread_count()));
  }
  report.write_markdown(out);
  ensure_workdir(cfg);
  std::ofstream md(cfg.report_path(), std::ios::binary);
  report.write_markdown(md);
  auto tsv_path = cfg.report_path();
  tsv_path.replace_extension(".tsv");
  std::ofstream tsv(tsv_path, std::ios::binary);
  report.write_tsv(tsv);
  if (!md || !tsv) throw io_error("cannot write evaluation report under " + cfg.workdir);
  return report;
}

void cmd_svd_trap(std::ostream& out) { out << svd_trap_demo().to_text(); }

void cmd_diagnose(const PipelineConfig& cfg, const std::filesystem::path& embeddings, std::ostream& out) {
  cfg.validate();
  const auto artifacts = load_count_artifacts(cfg);
  const CorpusStats stats(artifacts.counts, cfg.kappa, cfg.cut_fraction);
  auto emb = read_word2vec_text(embeddings);
  if (emb.words != artifacts.vocab.words()) {
    throw shape_error("embedding vocabulary in " + embeddings.string() + " does not match " +
                      cfg.vocab_path().string());
  }
  const ModelHandle model(std::move(emb.vectors), stats, artifacts.counts->window());

  // Reservoir sample of documents, seeded from the config.
  std::mt19937_64 rng(cfg.seed);
  std::vector<Document> sample;
  std::size_t seen = 0;
  for_each_document(as_paths(cfg.corpus), [&](std::string_view text) {
    auto doc = to_document(tokenize(text), artifacts.vocab);
    if (doc.empty()) return;
    ++seen;
    if (sample.size() < cfg.diagnose_documents) {
      sample.push_back(std::move(doc));
    } else {
      const auto j = std::uniform_int_distribution<std::size_t>(0, seen - 1)(rng);
      if (j < sample.size()) sample[j] = std::move(doc);
    }
  });

  const auto report = model_perplexity_report(sample, model);
  ensure_workdir(cfg);
  const auto tsv_path = std::filesystem::path(cfg.workdir) / "perplexity.tsv";
  std::ofstream tsv(tsv_path, std::ios::binary);
  report.write_tsv(tsv);
  if (!tsv) throw io_error("cannot write " + tsv_path.string());

  out << "documents sampled: " << report.documents.size() << " of " << seen << ", tokens: " << report.tokens << "\n";
  out << "perplexity with residuals:   " << fmt_double("%.4f", report.perplexity_residuals()) << "\n";
  out << "perplexity interaction only: " << fmt_double("%.4f", report.perplexity_interaction_only()) << "\n";

  const auto pint = trigram_pint(sample, 15);
  out << "distinct trigrams: " << pint.distinct_trigrams << "\n";
  out << "interaction information (E[PInt]): " << fmt_double("%.6f", pint.interaction_information) << "\n";
  out << "mean |PInt|: " << fmt_double("%.6f", pint.mean_abs_pint) << "\n";
  out << "most frequent trigrams:\n";
  for (const auto& r : pint.top) {
    out << "  " << artifacts.vocab.word(r.x1) << ' ' << artifacts.vocab.word(r.x2) << ' '
        << artifacts.vocab.word(r.y) << "\tcount=" << r.count << "\tPInt=" << fmt_double("%.4f", r.pint) << "\n";
  }
  out << "per-document scores: " << tsv_path.string() << "\n";
}

}  // namespace psdvec
