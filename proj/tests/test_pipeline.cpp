#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "psdvec/embedding_io.hpp"
#include "psdvec/pipeline.hpp"

using namespace psdvec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

// The error report is the final stderr line; progress logging precedes it.
std::string last_line(const std::string& text) {
  const auto end = text.find_last_not_of('\n');
  if (end == std::string::npos) return "";
  const auto begin = text.rfind('\n', end);
  return text.substr(begin == std::string::npos ? 0 : begin + 1, end - (begin == std::string::npos ? 0 : begin + 1) + 1);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& root() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "psdvec_pipeline_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args) {
  const char* bin = std::getenv("PSDVEC_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "PSDVEC_CLI must point at the psdvec binary");
  const auto out = root() / "stdout.txt";
  const auto err = root() / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Zipf-like documents over w0..w79 with some repeated phrases.
const fs::path& corpus() {
  static const fs::path path = [] {
    const auto p = root() / "corpus.txt";
    std::mt19937_64 rng(91);
    std::vector<double> weights(80);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::ofstream out(p);
    for (int d = 0; d < 300; ++d) {
      for (int t = 0; t < 40; ++t) {
        const int w = pick(rng);
        out << 'w' << w << (w % 7 == 0 ? " x" + std::to_string(w + 1) : std::string()) << (t % 9 == 8 ? ".\n" : " ");
      }
      out << "\n\n";
    }
    return p;
  }();
  return path;
}

std::string base_flags(const std::string& workdir) {
  return "--corpus " + corpus().string() + " --workdir " + (root() / workdir).string() +
         " --min-count 2 --max-vocab 60 --core-size 20 --block-size 15 --rank 5 --iterations 4"
         " --cut-fraction 0.01 --threads 1";
}

}  // namespace

TEST_CASE("count is deterministic and writes artifacts") {
  REQUIRE(cli("count " + base_flags("c1")).code == 0);
  REQUIRE(cli("count " + base_flags("c2")).code == 0);
  CHECK(slurp(root() / "c1" / "vocab.tsv") == slurp(root() / "c2" / "vocab.tsv"));
  CHECK(slurp(root() / "c1" / "counts.tsv") == slurp(root() / "c2" / "counts.tsv"));
  const auto data = load_corpus({corpus()}, 2, 60);
  CHECK(data.vocab.size() == 60);
  CHECK(slurp(root() / "c1" / "vocab.tsv").rfind(data.vocab.word(0) + "\t", 0) == 0);
}

TEST_CASE("errors are reported as one machine-readable line") {
  const auto missing = cli("count --corpus /nonexistent/corpus.txt --workdir " + (root() / "m").string());
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error[io]: ", 0) == 0);
  CHECK(missing.err.find("/nonexistent/corpus.txt") != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  const auto empty = root() / "empty.txt";
  std::ofstream(empty) << "... !!! ,,,\n\n";
  const auto e = cli("count --corpus " + empty.string() + " --workdir " + (root() / "e").string());
  CHECK(e.code == 1);
  CHECK(e.err.rfind("error[empty-corpus]: ", 0) == 0);

  const auto bad_flag = cli("count --no-such-flag");
  CHECK(bad_flag.code == 2);
  CHECK(bad_flag.err.rfind("error[usage]: ", 0) == 0);

  const auto bad_value = cli("config --kappa 3");
  CHECK(bad_value.code == 1);
  CHECK(bad_value.err.rfind("error[config]: ", 0) == 0);
  CHECK(bad_value.err.find("kappa") != std::string::npos);

  const auto untrained = cli("train --workdir " + (root() / "nothing").string());
  CHECK(untrained.code == 1);
  CHECK(last_line(untrained.err).rfind("error[io]: ", 0) == 0);
}

TEST_CASE("config flags override the config file") {
  const auto path = root() / "cfg.json";
  PipelineConfig cfg;
  cfg.rank = 7;
  cfg.kappa = 0.1;
  cfg.save(path);
  const auto r = cli("config -c " + path.string() + " --rank 9");
  REQUIRE(r.code == 0);
  const auto resolved = PipelineConfig::parse(r.out);
  CHECK(resolved.rank == 9);
  CHECK(resolved.kappa == 0.1);
  CHECK(cli("config -c " + path.string()).out == cfg.dump());
}

TEST_CASE("train, resume and evaluate") {
  REQUIRE(cli("count " + base_flags("full")).code == 0);
  const auto full = cli("train " + base_flags("full"));
  REQUIRE(full.code == 0);
  CHECK_FALSE(fs::exists(root() / "full" / "checkpoint.txt"));
  const auto emb = read_word2vec_text(root() / "full" / "embeddings.txt");
  CHECK(emb.size() == 60);
  CHECK(emb.dim() == 5);

  // Trajectory: header, then t = 0..T, non-increasing from t = 1.
  std::istringstream traj(slurp(root() / "full" / "trajectory.tsv"));
  std::string line;
  std::getline(traj, line);
  CHECK(line == "iteration\tweighted_error");
  std::vector<double> errs;
  int t;
  double e;
  while (traj >> t >> e) errs.push_back(e);
  CHECK(errs.size() == 5);
  for (std::size_t i = 2; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] * (1.0 + 1e-9));

  // Interrupted after the first noncore group, then resumed.
  REQUIRE(cli("count " + base_flags("resume")).code == 0);
  const auto cut = cli("train " + base_flags("resume") + " --stop-after-group 1");
  CHECK(cut.code == 3);
  CHECK(fs::exists(root() / "resume" / "checkpoint.txt"));
  CHECK_FALSE(fs::exists(root() / "resume" / "embeddings.txt"));
  CHECK(fs::exists(root() / "resume" / "trajectory.tsv"));
  const auto again = cli("train " + base_flags("resume"));
  REQUIRE(again.code == 0);
  CHECK(slurp(root() / "resume" / "embeddings.txt") == slurp(root() / "full" / "embeddings.txt"));
  CHECK(slurp(root() / "resume" / "trajectory.tsv") == slurp(root() / "full" / "trajectory.tsv"));

  // A checkpoint from another configuration is refused.
  REQUIRE(cli("train " + base_flags("resume") + " --stop-after-group 1").code == 3);
  const auto clash = cli("train " + base_flags("resume") + " --kappa 0.3");
  CHECK(clash.code == 1);
  CHECK(last_line(clash.err).rfind("error[config]: ", 0) == 0);

  // Core covering the whole vocabulary.
  REQUIRE(cli("count " + base_flags("core")).code == 0);
  REQUIRE(cli("train " + base_flags("core") + " --core-size 60").code == 0);
  CHECK(read_word2vec_text(root() / "core" / "embeddings.txt").size() == 60);

  const auto sim = root() / "sim.txt";
  const auto ana = root() / "ana.txt";
  {
    std::ofstream s(sim);
    for (int i = 0; i < 12; ++i) s << 'w' << i << "\tw" << (i + 3) << '\t' << (i % 5) + 0.5 << '\n';
    s << "w1 unknownword 3\n";
    std::ofstream a(ana);
    a << ": toy\nw1 w2 w3 w4\nw5 w6 w7 w8\nw1 w2 w3 nope\n";
  }
  const std::string eval_flags = base_flags("full") + " --similarity " + sim.string() + " --analogy " + ana.string();
  const auto r1 = cli("evaluate " + eval_flags);
  REQUIRE(r1.code == 0);
  CHECK(r1.out.rfind("| Method | sim | ana |\n", 0) == 0);
  CHECK(r1.out.find("| coverage | 0.923 | 0.667 |") != std::string::npos);
  CHECK(cli("evaluate " + eval_flags).out == r1.out);
  CHECK(slurp(root() / "full" / "report.md") == r1.out);
  CHECK(fs::exists(root() / "full" / "report.tsv"));

  const auto d1 = cli("diagnose " + base_flags("full"));
  REQUIRE(d1.code == 0);
  CHECK(d1.out.find("perplexity with residuals") != std::string::npos);
  CHECK(d1.out.find("interaction information") != std::string::npos);
  CHECK(cli("diagnose " + base_flags("full")).out == d1.out);
  CHECK(fs::exists(root() / "full" / "perplexity.tsv"));
}

TEST_CASE("svd-trap subcommand") {
  const auto r = cli("svd-trap");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("M2:") != std::string::npos);
  CHECK(r.out.find("(negative)") != std::string::npos);
}
