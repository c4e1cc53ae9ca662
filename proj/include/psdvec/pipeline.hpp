#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psdvec/blockwise.hpp"
#include "psdvec/config.hpp"
#include "psdvec/corpus.hpp"
#include "psdvec/eval.hpp"

namespace psdvec {

struct CorpusData {
  Vocabulary vocab;
  std::vector<Document> documents;
  std::size_t raw_tokens = 0;
};

// Two passes over the files: frequencies, then id documents.
CorpusData load_corpus(const std::vector<std::filesystem::path>& paths, std::uint64_t min_count,
                       std::size_t max_vocab, const TokenizerOptions& opts = {});

// Pipeline stages behind the CLI subcommands. Progress lines go to `log`.
struct CountSummary {
  std::size_t vocab_size = 0;
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::size_t nnz = 0;
};
CountSummary cmd_count(const PipelineConfig& cfg, std::ostream& log);

struct TrainControl {
  // Abort (as if interrupted) after this many noncore groups are finished.
  std::optional<std::size_t> stop_after_group;
};
struct TrainSummary {
  std::vector<double> trajectory;
  std::vector<std::size_t> resumed_groups;
  bool interrupted = false;
};
TrainSummary cmd_train(const PipelineConfig& cfg, std::ostream& log, const TrainControl& control = {});

EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::filesystem::path& embeddings, std::ostream& out);

void cmd_svd_trap(std::ostream& out);

void cmd_diagnose(const PipelineConfig& cfg, const std::filesystem::path& embeddings, std::ostream& out);

// Reads vocab.tsv and counts.tsv from the workdir.
struct CountArtifacts {
  Vocabulary vocab;
  std::shared_ptr<const CooccurrenceCounts> counts;
};
CountArtifacts load_count_artifacts(const PipelineConfig& cfg);

RegularizationSchedule make_schedule(const std::string& name, Index vocab_size, Index core_size);

}  // namespace psdvec
