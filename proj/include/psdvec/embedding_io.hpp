#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "psdvec/linalg.hpp"

namespace psdvec {

// Word vectors with column i belonging to words[i].
struct Embeddings {
  std::vector<std::string> words;
  MatrixXd vectors;  // N x W

  Index dim() const { return vectors.rows(); }
  std::size_t size() const { return words.size(); }
};

// word2vec text format: a `W N` header line, then `word v_1 ... v_N`.
void write_word2vec_text(std::ostream& out, const Embeddings& emb, int precision = 9);
void write_word2vec_text(const std::filesystem::path& path, const Embeddings& emb, int precision = 9);
Embeddings read_word2vec_text(std::istream& in);
Embeddings read_word2vec_text(const std::filesystem::path& path);

enum class BlockKind : std::uint32_t { Pmi = 0, Weight = 1, Factor = 2, Bigram = 3 };

struct BlockHeader {
  BlockKind kind = BlockKind::Pmi;
  IndexRange rows;
  IndexRange cols;
  std::uint64_t vocab_size = 0;
  double kappa = 0.0;
  double c_cut = 0.0;

  bool operator==(const BlockHeader&) const = default;
};

// Dense little-endian block: fixed 72-byte header, then row-major doubles.
void write_block(std::ostream& out, const BlockHeader& header, const MatrixXd& block);
MatrixXd read_block(std::istream& in, BlockHeader& header);

// Append-only record of finished embedding groups. Each group is written as a
// `#group k begin end` line followed by its word vectors at full precision.
// Opening an existing file keeps only complete groups. The header records W,
// N and a caller-supplied tag; a mismatch on reopen is a config error.
class Checkpoint {
 public:
  Checkpoint(std::filesystem::path path, std::vector<std::string> words, Index dim, std::string tag = {});

  const std::map<std::size_t, MatrixXd>& completed() const { return groups_; }
  bool has_group(std::size_t k) const { return groups_.count(k) != 0; }
  const MatrixXd& group(std::size_t k) const { return groups_.at(k); }
  void append_group(std::size_t k, IndexRange range, const MatrixXd& vectors);

  const std::filesystem::path& path() const { return path_; }

 private:
  void load();

  std::filesystem::path path_;
  std::vector<std::string> words_;
  Index dim_;
  std::string tag_;
  std::map<std::size_t, MatrixXd> groups_;
  std::map<std::size_t, IndexRange> ranges_;
};

}  // namespace psdvec
