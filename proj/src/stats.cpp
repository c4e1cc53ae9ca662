#include "psdvec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "psdvec/error.hpp"

namespace psdvec {

VectorXd unigram_distribution(const CooccurrenceCounts& counts) {
  const double total = counts.total_tokens();
  if (!(total > 0.0)) throw invalid_argument("unigram distribution needs a positive token total");
  const auto& c = counts.unigram_counts();
  VectorXd u(static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) u[static_cast<Index>(i)] = c[i] / total;
  return u;
}

SmoothedBigrams::SmoothedBigrams(std::shared_ptr<const CooccurrenceCounts> counts, VectorXd unigrams,
                                 double kappa)
    : counts_(std::move(counts)), unigrams_(std::move(unigrams)), kappa_(kappa) {
  if (!counts_) throw invalid_argument("smoothed bigrams need counts");
  if (!(kappa_ >= 0.0 && kappa_ <= 1.0)) {
    throw invalid_argument("smoothing weight kappa must lie in [0,1], got " + std::to_string(kappa_));
  }
  if (static_cast<std::size_t>(unigrams_.size()) != counts_->vocab_size()) {
    throw shape_error("unigram vector length does not match the vocabulary size");
  }
  if (counts_->total_pairs() > 0.0) {
    empirical_scale_ = (1.0 - kappa_) / counts_->total_pairs();
  } else if (kappa_ == 1.0) {
    empirical_scale_ = 0.0;
  } else {
    throw empty_corpus("no observed bigrams; only kappa = 1 is defined");
  }
}

double SmoothedBigrams::at(Index i, Index j) const {
  return empirical_scale_ * counts_->at(static_cast<WordId>(i), static_cast<WordId>(j)) +
         kappa_ * unigrams_[i] * unigrams_[j];
}

MatrixXd SmoothedBigrams::block(IndexRange rows, IndexRange cols) const {
  if (rows.begin < 0 || cols.begin < 0 || rows.end > vocab_size() || cols.end > vocab_size() ||
      rows.size() < 0 || cols.size() < 0) {
    throw shape_error("requested H block lies outside the vocabulary");
  }
  MatrixXd h = kappa_ * unigrams_.segment(rows.begin, rows.size()) *
               unigrams_.segment(cols.begin, cols.size()).transpose();
  if (empirical_scale_ == 0.0) return h;
  const auto& pairs = counts_->pairs();
  for (Index i = rows.begin; i < rows.end; ++i) {
    const auto first = pairs.begin() + static_cast<std::ptrdiff_t>(counts_->row_begin(static_cast<WordId>(i)));
    const auto last = pairs.begin() + static_cast<std::ptrdiff_t>(counts_->row_begin(static_cast<WordId>(i + 1)));
    auto it = std::lower_bound(first, last, static_cast<WordId>(cols.begin),
                               [](const PairCount& p, WordId f) { return p.focus < f; });
    for (; it != last && static_cast<Index>(it->focus) < cols.end; ++it) {
      h(i - rows.begin, static_cast<Index>(it->focus) - cols.begin) += empirical_scale_ * it->count;
    }
  }
  return h;
}

SmoothedBigrams smooth_bigrams(std::shared_ptr<const CooccurrenceCounts> counts,
                               const VectorXd& unigrams, double kappa) {
  return SmoothedBigrams(std::move(counts), unigrams, kappa);
}

WeightMatrix::WeightMatrix(SmoothedBigrams bigrams, double c_cut)
    : bigrams_(std::move(bigrams)), c_cut_(c_cut) {
  if (!(c_cut_ > 0.0) || !std::isfinite(c_cut_)) throw invalid_argument("C_cut must be positive");
}

double WeightMatrix::apply(double h, double c_cut, bool diagonal) {
  if (diagonal) return 0.0;
  const double root = std::sqrt(h);
  return root >= c_cut ? 1.0 : root / c_cut;
}

MatrixXd WeightMatrix::from_h_block(const MatrixXd& h, IndexRange rows, IndexRange cols) const {
  MatrixXd f(h.rows(), h.cols());
  for (Index j = 0; j < h.cols(); ++j) {
    for (Index i = 0; i < h.rows(); ++i) {
      f(i, j) = apply(h(i, j), c_cut_, rows.begin + i == cols.begin + j);
    }
  }
  return f;
}

MatrixXd WeightMatrix::block(IndexRange rows, IndexRange cols) const {
  return from_h_block(bigrams_.block(rows, cols), rows, cols);
}

WeightMatrix weight_matrix(const SmoothedBigrams& bigrams, double cut_fraction) {
  if (!(cut_fraction > 0.0 && cut_fraction < 1.0)) {
    throw invalid_argument("cut_fraction must lie in (0,1)");
  }
  std::vector<double> observed;
  const auto& counts = bigrams.counts();
  observed.reserve(counts.nnz());
  for (const auto& p : counts.pairs()) {
    if (p.context != p.focus) observed.push_back(bigrams.at(p.context, p.focus));
  }
  if (observed.empty()) throw empty_corpus("no observed off-diagonal bigrams to calibrate C_cut");
  auto rank = static_cast<std::size_t>(std::ceil(cut_fraction * static_cast<double>(observed.size())));
  rank = std::clamp<std::size_t>(rank, 1, observed.size());
  std::nth_element(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   observed.end(), std::greater<>());
  return WeightMatrix(bigrams, std::sqrt(observed[rank - 1]));
}

PmiTarget::PmiTarget(SmoothedBigrams bigrams) : bigrams_(std::move(bigrams)) {
  const auto& u = bigrams_.unigrams();
  for (Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      throw numeric_error("unigram probability of word " + std::to_string(i) +
                          " is zero; PMI is undefined");
    }
  }
  const auto w = static_cast<double>(bigrams_.vocab_size());
  if (bigrams_.kappa() == 0.0 && static_cast<double>(bigrams_.counts().nnz()) < w * w) {
    throw numeric_error("unsmoothed H has zero entries so log H is undefined; smooth with kappa > 0 first");
  }
}

double PmiTarget::conditional(Index i, Index j) const {
  return bigrams_.at(i, j) / bigrams_.unigrams()[i];
}

double PmiTarget::at(Index i, Index j) const {
  const double h = bigrams_.at(i, j);
  if (!(h > 0.0)) {
    throw numeric_error("H(" + std::to_string(i) + "," + std::to_string(j) +
                        ") is zero; smooth with kappa > 0 first");
  }
  const auto& u = bigrams_.unigrams();
  return std::log(h / u[i]) - std::log(u[j]);
}

MatrixXd PmiTarget::from_h_block(const MatrixXd& h, IndexRange rows, IndexRange cols) const {
  const auto& u = bigrams_.unigrams();
  MatrixXd g(h.rows(), h.cols());
  for (Index j = 0; j < h.cols(); ++j) {
    const double log_uj = std::log(u[cols.begin + j]);
    for (Index i = 0; i < h.rows(); ++i) {
      const double hij = h(i, j);
      if (!(hij > 0.0)) {
        throw numeric_error("H(" + std::to_string(rows.begin + i) + "," + std::to_string(cols.begin + j) +
                            ") is zero; smooth with kappa > 0 first");
      }
      g(i, j) = std::log(hij / u[rows.begin + i]) - log_uj;
    }
  }
  return g;
}

MatrixXd PmiTarget::block(IndexRange rows, IndexRange cols) const {
  return from_h_block(bigrams_.block(rows, cols), rows, cols);
}

PmiTarget pmi_target(const SmoothedBigrams& bigrams) { return PmiTarget(bigrams); }

SymmetrizedBlock symmetrize(const MatrixXd& g_ij, const MatrixXd& g_ji, const MatrixXd& f_ij,
                            const MatrixXd& f_ji) {
  if (g_ij.rows() != f_ij.rows() || g_ij.cols() != f_ij.cols() || g_ji.rows() != f_ji.rows() ||
      g_ji.cols() != f_ji.cols() || g_ij.rows() != g_ji.cols() || g_ij.cols() != g_ji.rows()) {
    throw shape_error("symmetrize: block shapes do not conform");
  }
  SymmetrizedBlock out;
  out.f_bar = f_ij + f_ji.transpose();
  out.g_bar.resize(g_ij.rows(), g_ij.cols());
  for (Index j = 0; j < g_ij.cols(); ++j) {
    for (Index i = 0; i < g_ij.rows(); ++i) {
      const double w = out.f_bar(i, j);
      out.g_bar(i, j) = w > 0.0 ? (g_ij(i, j) * f_ij(i, j) + g_ji(j, i) * f_ji(j, i)) / w : 0.0;
    }
  }
  return out;
}

void symmetrize_in_place(MatrixXd& g, MatrixXd& f) {
  if (g.rows() != g.cols() || f.rows() != g.rows() || f.cols() != g.cols()) {
    throw shape_error("symmetrize_in_place: needs conforming square blocks");
  }
  const Index n = g.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double w = f(i, j) + f(j, i);
      const double v = w > 0.0 ? (g(i, j) * f(i, j) + g(j, i) * f(j, i)) / w : 0.0;
      g(i, j) = g(j, i) = v;
      f(i, j) = f(j, i) = w;
    }
  }
}

CorpusStats::CorpusStats(std::shared_ptr<const CooccurrenceCounts> counts, double kappa,
                         double cut_fraction)
    : bigrams_(counts, unigram_distribution(*counts), kappa),
      weights_(weight_matrix(bigrams_, cut_fraction)),
      pmi_(bigrams_) {}

CorpusStats::Blocks CorpusStats::blocks(IndexRange rows, IndexRange cols) const {
  const MatrixXd h = bigrams_.block(rows, cols);
  return {pmi_.from_h_block(h, rows, cols), weights_.from_h_block(h, rows, cols)};
}

}  // namespace psdvec
