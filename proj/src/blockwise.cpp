#include "psdvec/blockwise.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "psdvec/embedding_io.hpp"
#include "psdvec/error.hpp"

namespace psdvec {

namespace {

template <typename Fn>
void parallel_for(Index n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<Index>(n, 1))));
  if (threads == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (Index i = t; i < n; i += threads) fn(i);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

BlockPlan plan_blocks(Index vocab_size, Index core_size, Index block_size) {
  if (core_size < 1) throw invalid_argument("core_size must be >= 1");
  if (core_size > vocab_size) {
    throw invalid_argument("core_size " + std::to_string(core_size) + " exceeds vocabulary size " +
                           std::to_string(vocab_size));
  }
  if (block_size < 1) throw invalid_argument("block_size must be >= 1");
  BlockPlan plan;
  plan.block_size = block_size;
  plan.groups.push_back({0, core_size});
  for (Index begin = core_size; begin < vocab_size; begin += block_size) {
    plan.groups.push_back({begin, std::min(vocab_size, begin + block_size)});
  }
  return plan;
}

RegularizationSchedule::RegularizationSchedule(std::vector<Tier> tiers) : tiers_(std::move(tiers)) {
  for (std::size_t k = 0; k < tiers_.size(); ++k) {
    if (!(tiers_[k].mu >= 0.0) || !std::isfinite(tiers_[k].mu)) {
      throw invalid_argument("regularization mu must be finite and >= 0");
    }
    if (k > 0 && (tiers_[k].first_rank <= tiers_[k - 1].first_rank || tiers_[k].mu < tiers_[k - 1].mu)) {
      throw invalid_argument("regularization tiers must have increasing ranks and non-decreasing mu");
    }
  }
}

double RegularizationSchedule::mu(Index rank) const {
  double value = 0.0;
  for (const auto& t : tiers_) {
    if (rank < t.first_rank) break;
    value = t.mu;
  }
  return value;
}

RegularizationSchedule RegularizationSchedule::none() { return RegularizationSchedule({{0, 0.0}}); }

RegularizationSchedule RegularizationSchedule::tiered(Index vocab_size, Index core_size) {
  // Reference layout: core 25k, then bands ending at 80k, 130k and 180k.
  constexpr double kCore = 25000.0;
  constexpr double kSpan = 180000.0 - kCore;
  const auto noncore = static_cast<double>(vocab_size - core_size);
  const auto edge = [&](double reference) {
    return core_size + static_cast<Index>(std::llround(noncore * (reference - kCore) / kSpan));
  };
  std::vector<Tier> tiers{{0, 0.0}, {core_size, 2.0}};
  for (const auto& [reference, mu] : {std::pair{80000.0, 4.0}, std::pair{130000.0, 8.0}}) {
    const Index start = edge(reference);
    if (start > tiers.back().first_rank) tiers.push_back({start, mu});
  }
  return RegularizationSchedule(std::move(tiers));
}

VectorXd ridge_solve_word(const MatrixXd& core_factor, const VectorXd& g_bar, const VectorXd& f_bar,
                          double mu, std::string_view word) {
  const Index n = core_factor.rows();
  if (g_bar.size() != core_factor.cols() || f_bar.size() != core_factor.cols()) {
    throw shape_error("ridge_solve_word: target/weight length does not match the core size");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw invalid_argument("ridge_solve_word: mu must be >= 0");
  if (!(f_bar.minCoeff() >= 0.0) || !f_bar.allFinite()) {
    throw invalid_argument("ridge_solve_word: weights must be finite and >= 0");
  }
  if (f_bar.sum() == 0.0) return VectorXd::Zero(n);

  const MatrixXd weighted = core_factor * f_bar.asDiagonal();
  MatrixXd normal = weighted * core_factor.transpose();
  normal.diagonal().array() += mu;
  const VectorXd rhs = weighted * g_bar;

  const Eigen::LLT<MatrixXd> llt(normal);
  const double scale = normal.diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || !(scale > 0.0) || llt.rcond() < 1e-13) {
    throw singular_error("ridge system is singular for word '" + std::string(word) +
                         "' (mu = " + std::to_string(mu) + ", rank-deficient weighted design)");
  }
  return llt.solve(rhs);
}

BcdResult solve_core(const CorpusStats& stats, IndexRange core, const BcdConfig& cfg,
                     const std::function<void(int, double)>& on_iteration) {
  auto blocks = stats.blocks(core, core);
  symmetrize_in_place(blocks.g, blocks.f);
  blocks.f *= 0.5;
  return bcd_solve(blocks.g, blocks.f, cfg, on_iteration);
}

MatrixXd solve_noncore_group(const CorpusStats& stats, const MatrixXd& core_factor, IndexRange group,
                             const RegularizationSchedule& schedule, unsigned threads, Index chunk,
                             const std::vector<std::string>* words) {
  const IndexRange core{0, core_factor.cols()};
  if (group.begin < core.end || group.end > stats.vocab_size()) {
    throw shape_error("noncore group must lie after the core and inside the vocabulary");
  }
  MatrixXd out(core_factor.rows(), group.size());
  for (Index begin = group.begin; begin < group.end; begin += chunk) {
    const IndexRange part{begin, std::min(group.end, begin + chunk)};
    const auto forward = stats.blocks(core, part);   // |S1| x b
    const auto backward = stats.blocks(part, core);  // b x |S1|
    const auto sym = symmetrize(forward.g, backward.g, forward.f, backward.f);
    parallel_for(part.size(), threads, [&](Index c) {
      const Index id = part.begin + c;
      const std::string name = words ? (*words)[static_cast<std::size_t>(id)] : "#" + std::to_string(id);
      out.col(id - group.begin) =
          ridge_solve_word(core_factor, sym.g_bar.col(c), sym.f_bar.col(c), schedule.mu(id), name);
    });
  }
  return out;
}

BlockwiseResult train_blockwise(const CorpusStats& stats, const BlockPlan& plan,
                                const RegularizationSchedule& schedule, const BcdConfig& cfg,
                                const TrainOptions& opts) {
  cfg.validate();
  if (plan.groups.empty() || plan.vocab_size() != stats.vocab_size()) {
    throw shape_error("block plan does not cover the vocabulary");
  }
  BlockwiseResult result;
  result.embeddings = MatrixXd::Zero(cfg.rank, stats.vocab_size());

  const IndexRange core = plan.groups.front();
  MatrixXd core_factor;
  if (opts.checkpoint && opts.checkpoint->has_group(0)) {
    core_factor = opts.checkpoint->group(0);
    result.resumed_groups.push_back(0);
  } else {
    auto bcd = solve_core(stats, core, cfg, opts.on_bcd_iteration);
    core_factor = std::move(bcd.factor.V);
    result.core_trajectory = std::move(bcd.trajectory);
    if (opts.checkpoint) opts.checkpoint->append_group(0, core, core_factor);
  }
  result.embeddings.middleCols(core.begin, core.size()) = core_factor;
  if (opts.on_group_done) opts.on_group_done(0, core);

  for (std::size_t k = 1; k < plan.groups.size(); ++k) {
    const IndexRange group = plan.groups[k];
    if (opts.checkpoint && opts.checkpoint->has_group(k)) {
      result.embeddings.middleCols(group.begin, group.size()) = opts.checkpoint->group(k);
      result.resumed_groups.push_back(k);
    } else {
      MatrixXd block = solve_noncore_group(stats, core_factor, group, schedule, opts.threads, 1024, opts.words);
      if (opts.checkpoint) opts.checkpoint->append_group(k, group, block);
      result.embeddings.middleCols(group.begin, group.size()) = block;
    }
    if (opts.on_group_done) opts.on_group_done(k, group);
  }
  return result;
}

}  // namespace psdvec
