#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psdvec/corpus.hpp"
#include "psdvec/stats.hpp"

namespace psdvec {

// Read-only view of the fitted model: embeddings (N x W), unigrams, G*
// access for residuals, and the context window.
class ModelHandle {
 public:
  ModelHandle(MatrixXd embeddings, const CorpusStats& stats, int window);
  ModelHandle(MatrixXd embeddings, VectorXd unigrams, const PmiTarget* pmi, int window);

  Index vocab_size() const { return embeddings_.cols(); }
  int window() const { return window_; }
  const MatrixXd& embeddings() const { return embeddings_; }
  const VectorXd& unigrams() const { return unigrams_; }

  double interaction(Index i, Index j) const { return embeddings_.col(j).dot(embeddings_.col(i)); }
  // a_ij = G*_ij - v_i . v_j, computed on demand. Zero when no G* is attached.
  double residual(Index i, Index j) const;
  bool has_residuals() const { return pmi_ != nullptr; }

 private:
  MatrixXd embeddings_;
  VectorXd unigrams_;
  const PmiTarget* pmi_;
  int window_;
};

// exp(v_j . v_i + a_ij) u_i u_j with an explicit residual.
double bigram_joint(Index i, Index j, const ModelHandle& model, double residual);
// Same with the model's own residual, which reproduces H_ij.
double bigram_joint(Index i, Index j, const ModelHandle& model);

enum class Normalization { None, Exact };

// u_c exp(v_c . sum_i v_{w_i} + sum_i a_{w_i c}). `Exact` renormalizes over
// every candidate focus word (small vocabularies only).
double window_conditional(WordId focus, std::span<const WordId> context, const ModelHandle& model,
                          bool use_residuals, Normalization norm = Normalization::None);

// sum_j [log u_{w_j} + v_{w_j} . sum_k v_{w_k} + sum_k a_{w_k w_j}] over the
// c-word window before each position, clipped at the document start.
double document_log_likelihood(std::span<const WordId> doc, const ModelHandle& model,
                               bool use_residuals = true);
double document_log_likelihood(std::span<const std::string> tokens, const Vocabulary& vocab,
                               const ModelHandle& model, bool use_residuals = true);

// Joint distribution P(x1, x2, y) stored densely with y fastest.
class TrigramDistribution {
 public:
  TrigramDistribution(Index n1, Index n2, Index ny, std::vector<double> probabilities);

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  Index ny() const { return ny_; }
  double operator()(Index x1, Index x2, Index y) const { return p_[index(x1, x2, y)]; }

  double p_x1(Index x1) const;
  double p_x2(Index x2) const;
  double p_y(Index y) const;
  double p_x1x2(Index x1, Index x2) const;
  double p_x1y(Index x1, Index y) const;
  double p_x2y(Index x2, Index y) const;

 private:
  std::size_t index(Index x1, Index x2, Index y) const {
    return static_cast<std::size_t>((x1 * n2_ + x2) * ny_ + y);
  }

  Index n1_, n2_, ny_;
  std::vector<double> p_;
  std::vector<double> m1_, m2_, my_, m12_, m1y_, m2y_;
};

struct PintEntry {
  Index x1, x2, y;
  double probability;
  double pint;
};

struct PintReport {
  std::vector<PintEntry> entries;  // supported outcomes only
  double expectation = 0.0;        // E[PInt] = Int(x1, x2, y)
};

// log [P(x1) P(x2) P(y) P(x1,x2,y)] / [P(x1,x2) P(x1,y) P(x2,y)].
// Throws numeric error at a zero-probability outcome.
double pint(const TrigramDistribution& joint, Index x1, Index x2, Index y);
PintReport pint(const TrigramDistribution& joint);

// I(y; x1, x2) - I(y; x1) - I(y; x2), computed from mutual informations.
double interaction_information(const TrigramDistribution& joint);

struct DocumentScore {
  std::size_t id;
  std::size_t tokens;
  double ll_residuals;
  double ll_interaction_only;
};

struct PerplexityReport {
  std::vector<DocumentScore> documents;
  std::size_t tokens = 0;
  double nll_residuals = 0.0;  // mean per-token negative log-likelihood
  double nll_interaction_only = 0.0;

  double perplexity_residuals() const;
  double perplexity_interaction_only() const;
  // TSV: doc id, token count, log-likelihood with residuals, without.
  void write_tsv(std::ostream& out) const;
};

PerplexityReport model_perplexity_report(std::span<const Document> sample, const ModelHandle& model);

// Empirical PInt over consecutive word triples (x1, x2, y) = (w_{t-2}, w_{t-1}, w_t).
struct TrigramPintSummary {
  std::size_t distinct_trigrams = 0;
  double total = 0.0;
  double interaction_information = 0.0;  // expectation of PInt over the empirical joint
  double mean_abs_pint = 0.0;
  struct Row {
    WordId x1, x2, y;
    double count;
    double pint;
  };
  std::vector<Row> top;  // most frequent trigrams
};

TrigramPintSummary trigram_pint(std::span<const Document> documents, std::size_t top_k);

}  // namespace psdvec
