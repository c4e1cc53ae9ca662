#pragma once

#include <memory>

#include "psdvec/corpus.hpp"
#include "psdvec/linalg.hpp"

namespace psdvec {

// u_i = token frequency of word i / total in-vocabulary tokens.
VectorXd unigram_distribution(const CooccurrenceCounts& counts);

// Jelinek-Mercer smoothed joint probabilities
//   H_ij = (1 - kappa) x_ij / total_pairs + kappa u_i u_j.
// Entries are computed on demand; only requested blocks are materialized.
class SmoothedBigrams {
 public:
  SmoothedBigrams(std::shared_ptr<const CooccurrenceCounts> counts, VectorXd unigrams, double kappa);

  Index vocab_size() const { return unigrams_.size(); }
  double kappa() const { return kappa_; }
  const VectorXd& unigrams() const { return unigrams_; }
  const CooccurrenceCounts& counts() const { return *counts_; }

  double at(Index i, Index j) const;
  MatrixXd block(IndexRange rows, IndexRange cols) const;
  MatrixXd dense() const { return block({0, vocab_size()}, {0, vocab_size()}); }

 private:
  std::shared_ptr<const CooccurrenceCounts> counts_;
  VectorXd unigrams_;
  double kappa_;
  double empirical_scale_;  // (1 - kappa) / total_pairs
};

SmoothedBigrams smooth_bigrams(std::shared_ptr<const CooccurrenceCounts> counts,
                               const VectorXd& unigrams, double kappa);

// f(h) = sqrt(h)/C_cut below the cut, 1 above it, 0 on the diagonal.
class WeightMatrix {
 public:
  WeightMatrix(SmoothedBigrams bigrams, double c_cut);

  double c_cut() const { return c_cut_; }
  static double apply(double h, double c_cut, bool diagonal);

  double at(Index i, Index j) const { return apply(bigrams_.at(i, j), c_cut_, i == j); }
  MatrixXd block(IndexRange rows, IndexRange cols) const;
  // Weights of an already materialized H block.
  MatrixXd from_h_block(const MatrixXd& h, IndexRange rows, IndexRange cols) const;

 private:
  SmoothedBigrams bigrams_;
  double c_cut_;
};

// C_cut is the sqrt(h) of the ceil(cut_fraction * #observed)-th largest
// observed off-diagonal bigram. Default cut fraction is 0.02%.
WeightMatrix weight_matrix(const SmoothedBigrams& bigrams, double cut_fraction = 0.0002);

// G_ij = log B_ij - log u_j with B_ij = H_ij / u_i.
class PmiTarget {
 public:
  explicit PmiTarget(SmoothedBigrams bigrams);

  double at(Index i, Index j) const;
  double conditional(Index i, Index j) const;  // B_ij
  MatrixXd block(IndexRange rows, IndexRange cols) const;
  MatrixXd from_h_block(const MatrixXd& h, IndexRange rows, IndexRange cols) const;

  const SmoothedBigrams& bigrams() const { return bigrams_; }

 private:
  SmoothedBigrams bigrams_;
};

PmiTarget pmi_target(const SmoothedBigrams& bigrams);

struct SymmetrizedBlock {
  MatrixXd g_bar;
  MatrixXd f_bar;  // entries in [0, 2]
};

// f_bar = f_ij + f_ji^T and G_bar = (G_ij o f_ij + G_ji^T o f_ji^T) / f_bar,
// with 0/0 taken as 0.
SymmetrizedBlock symmetrize(const MatrixXd& g_ij, const MatrixXd& g_ji, const MatrixXd& f_ij,
                            const MatrixXd& f_ji);

// Same rule applied to a square diagonal block against its own transpose,
// overwriting g and f.
void symmetrize_in_place(MatrixXd& g, MatrixXd& f);

// Bundles H, f(H) and G* for one corpus.
class CorpusStats {
 public:
  CorpusStats(std::shared_ptr<const CooccurrenceCounts> counts, double kappa,
              double cut_fraction = 0.0002);

  Index vocab_size() const { return bigrams_.vocab_size(); }
  double kappa() const { return bigrams_.kappa(); }
  double c_cut() const { return weights_.c_cut(); }
  const VectorXd& unigrams() const { return bigrams_.unigrams(); }
  const SmoothedBigrams& bigrams() const { return bigrams_; }
  const WeightMatrix& weights() const { return weights_; }
  const PmiTarget& pmi() const { return pmi_; }

  struct Blocks {
    MatrixXd g;
    MatrixXd f;
  };
  // G* and f(H) over the same index block, sharing one H materialization.
  Blocks blocks(IndexRange rows, IndexRange cols) const;

 private:
  SmoothedBigrams bigrams_;
  WeightMatrix weights_;
  PmiTarget pmi_;
};

}  // namespace psdvec
