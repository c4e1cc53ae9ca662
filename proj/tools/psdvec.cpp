#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "psdvec/config.hpp"
#include "psdvec/error.hpp"
#include "psdvec/pipeline.hpp"

using namespace psdvec;

namespace {

struct Overrides {
  std::vector<std::string> corpus;
  std::optional<std::uint64_t> min_count;
  std::optional<std::size_t> max_vocab;
  std::optional<int> window;
  std::optional<double> kappa;
  std::optional<double> cut_fraction;
  std::optional<long> rank;
  std::optional<int> iterations;
  std::optional<long> core_size;
  std::optional<long> block_size;
  std::optional<std::string> regularization;
  std::optional<std::string> workdir;
  std::vector<std::string> similarity;
  std::vector<std::string> analogy;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_config_flags(CLI::App* cmd, std::string& config_path, Overrides& o) {
  constexpr auto last = CLI::MultiOptionPolicy::TakeLast;
  cmd->add_option("-c,--config", config_path, "JSON pipeline config");
  cmd->add_option("--corpus", o.corpus, "corpus text files (documents separated by blank lines)");
  cmd->add_option("--min-count", o.min_count)->multi_option_policy(last);
  cmd->add_option("--max-vocab", o.max_vocab)->multi_option_policy(last);
  cmd->add_option("--window", o.window)->multi_option_policy(last);
  cmd->add_option("--kappa", o.kappa)->multi_option_policy(last);
  cmd->add_option("--cut-fraction", o.cut_fraction)->multi_option_policy(last);
  cmd->add_option("--rank", o.rank)->multi_option_policy(last);
  cmd->add_option("--iterations", o.iterations)->multi_option_policy(last);
  cmd->add_option("--core-size", o.core_size)->multi_option_policy(last);
  cmd->add_option("--block-size", o.block_size)->multi_option_policy(last);
  cmd->add_option("--regularization", o.regularization, "tiered | none")->multi_option_policy(last);
  cmd->add_option("--workdir", o.workdir)->multi_option_policy(last);
  cmd->add_option("--similarity", o.similarity, "similarity datasets (word1 word2 score)");
  cmd->add_option("--analogy", o.analogy, "analogy datasets (a a* b b*)");
  cmd->add_option("--seed", o.seed)->multi_option_policy(last);
  cmd->add_option("--threads", o.threads)->multi_option_policy(last);
}

template <typename T>
void apply(const std::optional<T>& v, T& field) {
  if (v) field = *v;
}

PipelineConfig resolve(const std::string& config_path, const Overrides& o) {
  PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
  if (!o.corpus.empty()) cfg.corpus = o.corpus;
  apply(o.min_count, cfg.min_count);
  apply(o.max_vocab, cfg.max_vocab);
  apply(o.window, cfg.window);
  apply(o.kappa, cfg.kappa);
  apply(o.cut_fraction, cfg.cut_fraction);
  apply(o.rank, cfg.rank);
  apply(o.iterations, cfg.iterations);
  apply(o.core_size, cfg.core_size);
  apply(o.block_size, cfg.block_size);
  apply(o.regularization, cfg.regularization);
  apply(o.workdir, cfg.workdir);
  if (!o.similarity.empty()) cfg.similarity_datasets = o.similarity;
  if (!o.analogy.empty()) cfg.analogy_datasets = o.analogy;
  apply(o.seed, cfg.seed);
  apply(o.threads, cfg.threads);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psdvec: PSD word embeddings from smoothed PMI"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  std::string embeddings;
  std::optional<std::size_t> stop_after;

  auto* count = app.add_subcommand("count", "build vocabulary and co-occurrence counts");
  add_config_flags(count, config_path, o);
  auto* train = app.add_subcommand("train", "fit core embeddings by BCD, then noncore blocks by ridge regression");
  add_config_flags(train, config_path, o);
  train->add_option("--stop-after-group", stop_after, "simulate an interruption after group k");
  auto* evaluate = app.add_subcommand("evaluate", "word similarity and analogy benchmarks");
  add_config_flags(evaluate, config_path, o);
  evaluate->add_option("-e,--embeddings", embeddings, "embedding file (default: <workdir>/embeddings.txt)");
  auto* svd_trap = app.add_subcommand("svd-trap", "SVD vs eigendecomposition on two 3x3 matrices");
  auto* diagnose = app.add_subcommand("diagnose", "perplexity and trigram interaction report");
  add_config_flags(diagnose, config_path, o);
  diagnose->add_option("-e,--embeddings", embeddings, "embedding file (default: <workdir>/embeddings.txt)");
  auto* dump = app.add_subcommand("config", "print the resolved config as JSON");
  add_config_flags(dump, config_path, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error[usage]: %s\n", e.what());
    return 2;
  }

  try {
    if (svd_trap->parsed()) {
      cmd_svd_trap(std::cout);
      return 0;
    }
    const PipelineConfig cfg = resolve(config_path, o);
    const std::filesystem::path emb = embeddings.empty() ? cfg.embeddings_path() : std::filesystem::path(embeddings);
    if (count->parsed()) {
      cmd_count(cfg, std::cerr);
    } else if (train->parsed()) {
      const auto s = cmd_train(cfg, std::cerr, TrainControl{stop_after});
      if (s.interrupted) return 3;
    } else if (evaluate->parsed()) {
      cmd_evaluate(cfg, emb, std::cout);
    } else if (diagnose->parsed()) {
      cmd_diagnose(cfg, emb, std::cout);
    } else if (dump->parsed()) {
      std::cout << cfg.dump();
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", e.kind().c_str(), e.what());
    return 1;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error[memory]: out of memory\n");
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 1;
  }
  return 0;
}
