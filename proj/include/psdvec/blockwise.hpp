#pragma once

#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "psdvec/psd_solver.hpp"
#include "psdvec/stats.hpp"

namespace psdvec {

class Checkpoint;

// Consecutive id ranges S_1..S_K covering [0, W); S_1 is the core.
struct BlockPlan {
  std::vector<IndexRange> groups;
  Index block_size = 0;

  Index vocab_size() const { return groups.empty() ? 0 : groups.back().end; }
  Index core_size() const { return groups.empty() ? 0 : groups.front().size(); }
  std::size_t size() const { return groups.size(); }
};

BlockPlan plan_blocks(Index vocab_size, Index core_size, Index block_size);

// Piecewise-constant mu over word rank, non-decreasing.
class RegularizationSchedule {
 public:
  struct Tier {
    Index first_rank;
    double mu;
  };

  RegularizationSchedule() = default;
  explicit RegularizationSchedule(std::vector<Tier> tiers);

  double mu(Index rank) const;
  const std::vector<Tier>& tiers() const { return tiers_; }

  // mu = 0 everywhere.
  static RegularizationSchedule none();
  // mu = 0 on the core, then 2, 4, 8 on three noncore bands whose widths
  // follow the 25k/80k/130k/180k layout scaled onto [core_size, vocab_size).
  static RegularizationSchedule tiered(Index vocab_size, Index core_size);

 private:
  std::vector<Tier> tiers_;
};

// Minimizer of sum_a f[a] (g[a] - v_a . v)^2 + mu |v|^2 where v_a is column a
// of the N x |S_1| core factor. All-zero weights give the prior mean 0.
VectorXd ridge_solve_word(const MatrixXd& core_factor, const VectorXd& g_bar, const VectorXd& f_bar,
                          double mu, std::string_view word = {});

// Solves the core block with BCD on the symmetrized core G* and weights
// halved into [0,1].
BcdResult solve_core(const CorpusStats& stats, IndexRange core, const BcdConfig& cfg,
                     const std::function<void(int, double)>& on_iteration = {});

// Embeddings of one noncore group regressed against fixed core embeddings.
// Words are processed in chunks of at most `chunk` columns.
MatrixXd solve_noncore_group(const CorpusStats& stats, const MatrixXd& core_factor, IndexRange group,
                             const RegularizationSchedule& schedule, unsigned threads = 1,
                             Index chunk = 1024, const std::vector<std::string>* words = nullptr);

struct TrainOptions {
  unsigned threads = 1;
  Checkpoint* checkpoint = nullptr;
  const std::vector<std::string>* words = nullptr;
  std::function<void(int, double)> on_bcd_iteration;
  std::function<void(std::size_t, IndexRange)> on_group_done;
};

struct BlockwiseResult {
  MatrixXd embeddings;  // N x W
  std::vector<double> core_trajectory;
  std::vector<std::size_t> resumed_groups;
};

BlockwiseResult train_blockwise(const CorpusStats& stats, const BlockPlan& plan,
                                const RegularizationSchedule& schedule, const BcdConfig& cfg,
                                const TrainOptions& opts = {});

}  // namespace psdvec
