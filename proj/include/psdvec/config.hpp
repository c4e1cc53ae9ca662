#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace psdvec {

struct PipelineConfig {
  std::vector<std::string> corpus;
  std::uint64_t min_count = 5;
  std::size_t max_vocab = 10000;
  int window = 3;
  double kappa = 0.02;
  double cut_fraction = 0.0002;
  long rank = 100;
  int iterations = 5;
  double init_scale = 0.5;
  double convergence_tol = 1e-5;
  long core_size = 5000;
  long block_size = 50000;
  std::string regularization = "tiered";  // "tiered" or "none"
  std::string workdir = "psdvec-work";
  std::vector<std::string> similarity_datasets;
  std::vector<std::string> analogy_datasets;
  std::size_t diagnose_documents = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  // Throws config error naming the offending field.
  void validate() const;
  unsigned thread_count() const;

  std::filesystem::path vocab_path() const { return std::filesystem::path(workdir) / "vocab.tsv"; }
  std::filesystem::path counts_path() const { return std::filesystem::path(workdir) / "counts.tsv"; }
  std::filesystem::path embeddings_path() const { return std::filesystem::path(workdir) / "embeddings.txt"; }
  std::filesystem::path checkpoint_path() const { return std::filesystem::path(workdir) / "checkpoint.txt"; }
  std::filesystem::path trajectory_path() const { return std::filesystem::path(workdir) / "trajectory.tsv"; }
  std::filesystem::path report_path() const { return std::filesystem::path(workdir) / "report.md"; }

  std::string dump() const;  // pretty JSON, stable key order
  static PipelineConfig parse(const std::string& json_text);
  static PipelineConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

}  // namespace psdvec
