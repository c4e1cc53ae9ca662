#include "psdvec/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include "psdvec/error.hpp"

namespace psdvec {

namespace {

struct TripleKey {
  WordId a, b, c;
  bool operator==(const TripleKey&) const = default;
};

struct TripleHash {
  std::size_t operator()(const TripleKey& k) const noexcept {
    std::uint64_t h = k.a;
    h = h * 0x9E3779B97F4A7C15ull ^ k.b;
    h = h * 0x9E3779B97F4A7C15ull ^ k.c;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

std::uint64_t pair_key(WordId a, WordId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

void check_id(Index id, Index w) {
  if (id < 0 || id >= w) throw invalid_argument("word id " + std::to_string(id) + " is outside the vocabulary");
}

}  // namespace

ModelHandle::ModelHandle(MatrixXd embeddings, const CorpusStats& stats, int window)
    : ModelHandle(std::move(embeddings), stats.unigrams(), &stats.pmi(), window) {}

ModelHandle::ModelHandle(MatrixXd embeddings, VectorXd unigrams, const PmiTarget* pmi, int window)
    : embeddings_(std::move(embeddings)), unigrams_(std::move(unigrams)), pmi_(pmi), window_(window) {
  if (embeddings_.cols() != unigrams_.size()) {
    throw shape_error("model embeddings have " + std::to_string(embeddings_.cols()) +
                      " columns but the unigram vector has length " + std::to_string(unigrams_.size()));
  }
  if (pmi_ && pmi_->bigrams().vocab_size() != unigrams_.size()) {
    throw shape_error("model PMI target does not match the vocabulary size");
  }
  if (window_ < 1) throw invalid_argument("context window must be >= 1");
}

double ModelHandle::residual(Index i, Index j) const {
  if (!pmi_) return 0.0;
  return pmi_->at(i, j) - interaction(i, j);
}

double bigram_joint(Index i, Index j, const ModelHandle& model, double residual) {
  check_id(i, model.vocab_size());
  check_id(j, model.vocab_size());
  const auto& u = model.unigrams();
  return std::exp(model.interaction(i, j) + residual) * u[i] * u[j];
}

double bigram_joint(Index i, Index j, const ModelHandle& model) {
  check_id(i, model.vocab_size());
  check_id(j, model.vocab_size());
  return bigram_joint(i, j, model, model.residual(i, j));
}

namespace {

// log u_c + v_c . sum v_{w_i} + sum a_{w_i c}, with the context sum precomputed.
double log_score(WordId focus, std::span<const WordId> context, const VectorXd& context_sum,
                 const ModelHandle& model, bool use_residuals) {
  double s = std::log(model.unigrams()[focus]);
  if (context.empty()) return s;
  s += model.embeddings().col(focus).dot(context_sum);
  if (use_residuals) {
    for (WordId w : context) s += model.residual(w, focus);
  }
  return s;
}

VectorXd sum_context(std::span<const WordId> context, const ModelHandle& model) {
  VectorXd sum = VectorXd::Zero(model.embeddings().rows());
  for (WordId w : context) sum += model.embeddings().col(w);
  return sum;
}

}  // namespace

double window_conditional(WordId focus, std::span<const WordId> context, const ModelHandle& model,
                          bool use_residuals, Normalization norm) {
  check_id(focus, model.vocab_size());
  for (WordId w : context) check_id(w, model.vocab_size());
  if (static_cast<int>(context.size()) > model.window()) {
    throw invalid_argument("context of " + std::to_string(context.size()) + " words exceeds window " +
                           std::to_string(model.window()));
  }
  const VectorXd sum = sum_context(context, model);
  const double log_p = log_score(focus, context, sum, model, use_residuals);
  if (norm == Normalization::None) return std::exp(log_p);

  std::vector<double> scores(static_cast<std::size_t>(model.vocab_size()));
  for (Index c = 0; c < model.vocab_size(); ++c) {
    scores[static_cast<std::size_t>(c)] = log_score(static_cast<WordId>(c), context, sum, model, use_residuals);
  }
  const double peak = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - peak);
  return std::exp(log_p - peak) / z;
}

double document_log_likelihood(std::span<const WordId> doc, const ModelHandle& model, bool use_residuals) {
  const auto c = static_cast<std::size_t>(model.window());
  double ll = 0.0;
  for (std::size_t j = 0; j < doc.size(); ++j) {
    check_id(doc[j], model.vocab_size());
    const std::size_t start = j > c ? j - c : 0;
    const auto context = doc.subspan(start, j - start);
    ll += log_score(doc[j], context, sum_context(context, model), model, use_residuals);
  }
  return ll;
}

double document_log_likelihood(std::span<const std::string> tokens, const Vocabulary& vocab,
                               const ModelHandle& model, bool use_residuals) {
  Document doc;
  doc.reserve(tokens.size());
  std::string missing;
  for (const auto& t : tokens) {
    const auto id = vocab.find(t);
    if (id < 0) {
      missing += missing.empty() ? t : ", " + t;
    } else {
      doc.push_back(static_cast<WordId>(id));
    }
  }
  if (!missing.empty()) throw oov_error("out-of-vocabulary tokens in document: " + missing);
  return document_log_likelihood(doc, model, use_residuals);
}

TrigramDistribution::TrigramDistribution(Index n1, Index n2, Index ny, std::vector<double> probabilities)
    : n1_(n1), n2_(n2), ny_(ny), p_(std::move(probabilities)) {
  if (n1 < 1 || n2 < 1 || ny < 1 || p_.size() != static_cast<std::size_t>(n1 * n2 * ny)) {
    throw shape_error("trigram table size does not match its dimensions");
  }
  double total = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw invalid_argument("trigram probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw invalid_argument("trigram probabilities must sum to 1");

  const auto sz = [](Index n) { return static_cast<std::size_t>(n); };
  m1_.assign(sz(n1), 0.0);
  m2_.assign(sz(n2), 0.0);
  my_.assign(sz(ny), 0.0);
  m12_.assign(sz(n1 * n2), 0.0);
  m1y_.assign(sz(n1 * ny), 0.0);
  m2y_.assign(sz(n2 * ny), 0.0);
  for (Index a = 0; a < n1; ++a) {
    for (Index b = 0; b < n2; ++b) {
      for (Index y = 0; y < ny; ++y) {
        const double p = (*this)(a, b, y);
        m1_[sz(a)] += p;
        m2_[sz(b)] += p;
        my_[sz(y)] += p;
        m12_[sz(a * n2 + b)] += p;
        m1y_[sz(a * ny + y)] += p;
        m2y_[sz(b * ny + y)] += p;
      }
    }
  }
}

double TrigramDistribution::p_x1(Index x1) const { return m1_[static_cast<std::size_t>(x1)]; }
double TrigramDistribution::p_x2(Index x2) const { return m2_[static_cast<std::size_t>(x2)]; }
double TrigramDistribution::p_y(Index y) const { return my_[static_cast<std::size_t>(y)]; }
double TrigramDistribution::p_x1x2(Index x1, Index x2) const {
  return m12_[static_cast<std::size_t>(x1 * n2_ + x2)];
}
double TrigramDistribution::p_x1y(Index x1, Index y) const { return m1y_[static_cast<std::size_t>(x1 * ny_ + y)]; }
double TrigramDistribution::p_x2y(Index x2, Index y) const { return m2y_[static_cast<std::size_t>(x2 * ny_ + y)]; }

double pint(const TrigramDistribution& joint, Index x1, Index x2, Index y) {
  if (x1 < 0 || x1 >= joint.n1() || x2 < 0 || x2 >= joint.n2() || y < 0 || y >= joint.ny()) {
    throw invalid_argument("pint: outcome outside the table");
  }
  const double p = joint(x1, x2, y);
  if (!(p > 0.0)) {
    throw numeric_error("pint undefined at zero-probability outcome (" + std::to_string(x1) + ", " +
                        std::to_string(x2) + ", " + std::to_string(y) + ")");
  }
  return std::log(joint.p_x1(x1)) + std::log(joint.p_x2(x2)) + std::log(joint.p_y(y)) + std::log(p) -
         std::log(joint.p_x1x2(x1, x2)) - std::log(joint.p_x1y(x1, y)) - std::log(joint.p_x2y(x2, y));
}

PintReport pint(const TrigramDistribution& joint) {
  PintReport report;
  for (Index a = 0; a < joint.n1(); ++a) {
    for (Index b = 0; b < joint.n2(); ++b) {
      for (Index y = 0; y < joint.ny(); ++y) {
        const double p = joint(a, b, y);
        if (p <= 0.0) continue;
        const double v = pint(joint, a, b, y);
        report.entries.push_back({a, b, y, p, v});
        report.expectation += p * v;
      }
    }
  }
  return report;
}

double interaction_information(const TrigramDistribution& joint) {
  double i_joint = 0.0;
  for (Index a = 0; a < joint.n1(); ++a) {
    for (Index b = 0; b < joint.n2(); ++b) {
      for (Index y = 0; y < joint.ny(); ++y) {
        const double p = joint(a, b, y);
        if (p > 0.0) i_joint += p * std::log(p / (joint.p_x1x2(a, b) * joint.p_y(y)));
      }
    }
  }
  double i1 = 0.0;
  for (Index a = 0; a < joint.n1(); ++a) {
    for (Index y = 0; y < joint.ny(); ++y) {
      const double p = joint.p_x1y(a, y);
      if (p > 0.0) i1 += p * std::log(p / (joint.p_x1(a) * joint.p_y(y)));
    }
  }
  double i2 = 0.0;
  for (Index b = 0; b < joint.n2(); ++b) {
    for (Index y = 0; y < joint.ny(); ++y) {
      const double p = joint.p_x2y(b, y);
      if (p > 0.0) i2 += p * std::log(p / (joint.p_x2(b) * joint.p_y(y)));
    }
  }
  return i_joint - i1 - i2;
}

double PerplexityReport::perplexity_residuals() const { return std::exp(nll_residuals); }
double PerplexityReport::perplexity_interaction_only() const { return std::exp(nll_interaction_only); }

void PerplexityReport::write_tsv(std::ostream& out) const {
  out << "#doc\ttokens\tll_residuals\tll_interaction_only\n";
  char buf[128];
  for (const auto& d : documents) {
    std::snprintf(buf, sizeof buf, "%zu\t%zu\t%.10g\t%.10g\n", d.id, d.tokens, d.ll_residuals,
                  d.ll_interaction_only);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "#tokens=%zu nll_residuals=%.10g nll_interaction_only=%.10g\n", tokens,
                nll_residuals, nll_interaction_only);
  out << buf;
  std::snprintf(buf, sizeof buf, "#perplexity_residuals=%.10g perplexity_interaction_only=%.10g\n",
                perplexity_residuals(), perplexity_interaction_only());
  out << buf;
}

PerplexityReport model_perplexity_report(std::span<const Document> sample, const ModelHandle& model) {
  PerplexityReport report;
  double ll_res = 0.0;
  double ll_int = 0.0;
  for (std::size_t d = 0; d < sample.size(); ++d) {
    if (sample[d].empty()) continue;
    DocumentScore s{d, sample[d].size(), document_log_likelihood(sample[d], model, true),
                    document_log_likelihood(sample[d], model, false)};
    report.tokens += s.tokens;
    ll_res += s.ll_residuals;
    ll_int += s.ll_interaction_only;
    report.documents.push_back(s);
  }
  if (report.tokens == 0) throw empty_corpus("perplexity report needs at least one in-vocabulary token");
  report.nll_residuals = -ll_res / static_cast<double>(report.tokens);
  report.nll_interaction_only = -ll_int / static_cast<double>(report.tokens);
  return report;
}

TrigramPintSummary trigram_pint(std::span<const Document> documents, std::size_t top_k) {
  std::unordered_map<TripleKey, double, TripleHash> tri;
  for (const auto& doc : documents) {
    for (std::size_t t = 2; t < doc.size(); ++t) tri[{doc[t - 2], doc[t - 1], doc[t]}] += 1.0;
  }
  TrigramPintSummary out;
  if (tri.empty()) throw empty_corpus("no word triples to measure interaction on");

  std::unordered_map<WordId, double> m1, m2, my;
  std::unordered_map<std::uint64_t, double> m12, m1y, m2y;
  for (const auto& [k, n] : tri) {
    out.total += n;
    m1[k.a] += n;
    m2[k.b] += n;
    my[k.c] += n;
    m12[pair_key(k.a, k.b)] += n;
    m1y[pair_key(k.a, k.c)] += n;
    m2y[pair_key(k.b, k.c)] += n;
  }
  // Count ratios; all but one factor of total cancels.
  const double log_total = std::log(out.total);
  std::vector<TrigramPintSummary::Row> rows;
  rows.reserve(tri.size());
  for (const auto& [k, n] : tri) {
    const double v = std::log(m1[k.a]) + std::log(m2[k.b]) + std::log(my[k.c]) + std::log(n) -
                     std::log(m12[pair_key(k.a, k.b)]) - std::log(m1y[pair_key(k.a, k.c)]) -
                     std::log(m2y[pair_key(k.b, k.c)]) - log_total;
    const double p = n / out.total;
    out.interaction_information += p * v;
    out.mean_abs_pint += p * std::abs(v);
    rows.push_back({k.a, k.b, k.c, n, v});
  }
  out.distinct_trigrams = rows.size();
  const auto order = [](const TrigramPintSummary::Row& l, const TrigramPintSummary::Row& r) {
    if (l.count != r.count) return l.count > r.count;
    return std::tie(l.x1, l.x2, l.y) < std::tie(r.x1, r.x2, r.y);
  };
  const std::size_t k = std::min(top_k, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end(), order);
  rows.resize(k);
  out.top = std::move(rows);
  return out;
}

}  // namespace psdvec
