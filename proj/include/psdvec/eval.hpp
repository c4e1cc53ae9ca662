#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psdvec/embedding_io.hpp"

namespace psdvec {

struct SimilarityPair {
  std::string w1, w2;
  double rating;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> pairs;
};

struct AnalogyQuestion {
  std::string a, a_star, b, b_star;
};

struct AnalogyDataset {
  std::string name;
  std::vector<AnalogyQuestion> questions;
};

// `w1 w2 score` per line, tab or space separated. Blank lines and lines
// starting with '#' or ':' are skipped; words are lowercased. Duplicate
// unordered pairs keep their first occurrence.
SimilarityDataset read_similarity_dataset(std::istream& in, std::string name);
SimilarityDataset read_similarity_dataset(const std::filesystem::path& path);
// `a a* b b*` per line, same skipping and case-folding rules.
AnalogyDataset read_analogy_dataset(std::istream& in, std::string name);
AnalogyDataset read_analogy_dataset(const std::filesystem::path& path);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Average (1-based) ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& xs);

// Unit-normalized embedding table with word lookup.
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(const Embeddings& emb);

  std::optional<Index> find(const std::string& word) const;
  const std::string& word(Index id) const { return words_[static_cast<std::size_t>(id)]; }
  Index size() const { return unit_.cols(); }
  const MatrixXd& unit() const { return unit_; }  // N x W, zero columns stay zero
  double cosine(Index i, Index j) const { return unit_.col(i).dot(unit_.col(j)); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, Index> index_;
  MatrixXd unit_;
};

enum class AnalogyMethod { Add, Mul };

// Candidate id maximizing the method's objective, excluding a, a*, b.
// Ties go to the lowest id. Empty result signals an OOV question word.
std::optional<Index> analogy_answer(const EmbeddingIndex& model, const std::string& a,
                                    const std::string& a_star, const std::string& b, AnalogyMethod method);

struct SimilarityResult {
  std::string dataset;
  double spearman = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
  double coverage() const;
};

struct AnalogyResult {
  std::string dataset;
  double accuracy_add = 0.0;
  double accuracy_mul = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
  double coverage() const;
};

SimilarityResult similarity_eval(const EmbeddingIndex& model, const SimilarityDataset& data);
AnalogyResult analogy_eval(const EmbeddingIndex& model, const AnalogyDataset& data, unsigned threads = 1);

struct EvalReport {
  std::string model_name;
  std::vector<SimilarityResult> similarity;
  std::vector<AnalogyResult> analogy;

  // Datasets as columns, analogy entries as "add / mul".
  void write_markdown(std::ostream& out) const;
  // Long format: dataset, metric, value, scored, skipped, coverage.
  void write_tsv(std::ostream& out) const;
};

}  // namespace psdvec
