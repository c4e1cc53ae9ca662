#include "psdvec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "psdvec/error.hpp"

namespace psdvec {

namespace {

std::string lower(std::string s) {
  for (char& ch : s) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return s;
}

bool skip_line(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#' || line[p] == ':';
}

std::ifstream open_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open dataset: " + path.string());
  return in;
}

double fraction(std::size_t scored, std::size_t skipped) {
  const std::size_t total = scored + skipped;
  return total == 0 ? 0.0 : static_cast<double>(scored) / static_cast<double>(total);
}

}  // namespace

SimilarityDataset read_similarity_dataset(std::istream& in, std::string name) {
  SimilarityDataset data;
  data.name = std::move(name);
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    SimilarityPair p;
    if (!(fields >> p.w1 >> p.w2 >> p.rating) || !std::isfinite(p.rating)) {
      throw decode_error(data.name + ":" + std::to_string(lineno) + ": expected 'word1 word2 score'");
    }
    p.w1 = lower(p.w1);
    p.w2 = lower(p.w2);
    if (!seen.insert(std::minmax(p.w1, p.w2)).second) continue;
    data.pairs.push_back(std::move(p));
  }
  return data;
}

SimilarityDataset read_similarity_dataset(const std::filesystem::path& path) {
  auto in = open_dataset(path);
  return read_similarity_dataset(in, path.stem().string());
}

AnalogyDataset read_analogy_dataset(std::istream& in, std::string name) {
  AnalogyDataset data;
  data.name = std::move(name);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    AnalogyQuestion q;
    if (!(fields >> q.a >> q.a_star >> q.b >> q.b_star)) {
      throw decode_error(data.name + ":" + std::to_string(lineno) + ": expected four words");
    }
    data.questions.push_back({lower(q.a), lower(q.a_star), lower(q.b), lower(q.b_star)});
  }
  return data;
}

AnalogyDataset read_analogy_dataset(const std::filesystem::path& path) {
  auto in = open_dataset(path);
  return read_analogy_dataset(in, path.stem().string());
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw shape_error("spearman: inputs have different lengths");
  if (xs.size() < 2) throw invalid_argument("spearman needs at least two observations");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw numeric_error("spearman: non-finite input");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mean = 0.5 * static_cast<double>(xs.size() + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw numeric_error("spearman undefined: ranks have zero variance");
  return sxy / std::sqrt(sxx * syy);
}

EmbeddingIndex::EmbeddingIndex(const Embeddings& emb) : words_(emb.words), unit_(emb.vectors) {
  if (static_cast<Index>(words_.size()) != unit_.cols()) throw shape_error("embedding words and vectors disagree");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<Index>(i));
  for (Index c = 0; c < unit_.cols(); ++c) {
    const double n = unit_.col(c).norm();
    if (n > 0.0) unit_.col(c) /= n;
  }
}

std::optional<Index> EmbeddingIndex::find(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct QuestionIds {
  Index a, a_star, b;
};

// Best candidate given cosine columns against a, a*, b.
Index best_candidate(const QuestionIds& q, const double* ca, const double* cs, const double* cb, Index w,
                     AnalogyMethod method) {
  constexpr double kEps = 0.001;
  Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Index x = 0; x < w; ++x) {
    if (x == q.a || x == q.a_star || x == q.b) continue;
    double s;
    if (method == AnalogyMethod::Add) {
      s = cb[x] - ca[x] + cs[x];
    } else {
      s = (cb[x] + 1.0) * 0.5 * (cs[x] + 1.0) * 0.5 / ((ca[x] + 1.0) * 0.5 + kEps);
    }
    if (best < 0 || s > best_score) {
      best = x;
      best_score = s;
    }
  }
  return best;
}

std::optional<QuestionIds> lookup(const EmbeddingIndex& model, const std::string& a, const std::string& a_star,
                                  const std::string& b) {
  const auto ia = model.find(a);
  const auto is = model.find(a_star);
  const auto ib = model.find(b);
  if (!ia || !is || !ib) return std::nullopt;
  return QuestionIds{*ia, *is, *ib};
}

}  // namespace

std::optional<Index> analogy_answer(const EmbeddingIndex& model, const std::string& a,
                                    const std::string& a_star, const std::string& b, AnalogyMethod method) {
  const auto q = lookup(model, a, a_star, b);
  if (!q) return std::nullopt;
  const MatrixXd& u = model.unit();
  const VectorXd ca = u.transpose() * u.col(q->a);
  const VectorXd cs = u.transpose() * u.col(q->a_star);
  const VectorXd cb = u.transpose() * u.col(q->b);
  const Index best = best_candidate(*q, ca.data(), cs.data(), cb.data(), model.size(), method);
  if (best < 0) return std::nullopt;
  return best;
}

double SimilarityResult::coverage() const { return fraction(scored, skipped); }
double AnalogyResult::coverage() const { return fraction(scored, skipped); }

SimilarityResult similarity_eval(const EmbeddingIndex& model, const SimilarityDataset& data) {
  SimilarityResult r;
  r.dataset = data.name;
  std::vector<double> predicted, gold;
  for (const auto& p : data.pairs) {
    const auto i = model.find(p.w1);
    const auto j = model.find(p.w2);
    if (!i || !j) {
      ++r.skipped;
      continue;
    }
    predicted.push_back(model.cosine(*i, *j));
    gold.push_back(p.rating);
  }
  r.scored = predicted.size();
  if (r.scored < 2) {
    throw oov_error("similarity dataset '" + data.name + "': only " + std::to_string(r.scored) +
                    " scorable pairs (coverage " + std::to_string(r.coverage()) + ")");
  }
  r.spearman = spearman(predicted, gold);
  return r;
}

AnalogyResult analogy_eval(const EmbeddingIndex& model, const AnalogyDataset& data, unsigned threads) {
  AnalogyResult r;
  r.dataset = data.name;
  std::vector<QuestionIds> ids;
  std::vector<Index> answers;
  for (const auto& q : data.questions) {
    const auto l = lookup(model, q.a, q.a_star, q.b);
    const auto t = model.find(q.b_star);
    if (!l || !t) {
      ++r.skipped;
      continue;
    }
    ids.push_back(*l);
    answers.push_back(*t);
  }
  r.scored = ids.size();
  if (r.scored == 0) throw oov_error("analogy dataset '" + data.name + "': no scorable questions");

  constexpr std::size_t kBatch = 128;
  const MatrixXd& u = model.unit();
  const std::size_t batches = (ids.size() + kBatch - 1) / kBatch;
  std::vector<char> ok_add(ids.size(), 0), ok_mul(ids.size(), 0);
  const auto run_batch = [&](std::size_t bi) {
    const std::size_t lo = bi * kBatch;
    const std::size_t hi = std::min(ids.size(), lo + kBatch);
    const auto k = static_cast<Index>(hi - lo);
    MatrixXd q(u.rows(), 3 * k);
    for (Index i = 0; i < k; ++i) {
      const auto& id = ids[lo + static_cast<std::size_t>(i)];
      q.col(3 * i) = u.col(id.a);
      q.col(3 * i + 1) = u.col(id.a_star);
      q.col(3 * i + 2) = u.col(id.b);
    }
    const MatrixXd cos = u.transpose() * q;  // W x 3k
    for (Index i = 0; i < k; ++i) {
      const std::size_t n = lo + static_cast<std::size_t>(i);
      const double* ca = cos.col(3 * i).data();
      const double* cs = cos.col(3 * i + 1).data();
      const double* cb = cos.col(3 * i + 2).data();
      ok_add[n] = best_candidate(ids[n], ca, cs, cb, model.size(), AnalogyMethod::Add) == answers[n];
      ok_mul[n] = best_candidate(ids[n], ca, cs, cb, model.size(), AnalogyMethod::Mul) == answers[n];
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(batches)));
  if (threads == 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < batches; b += threads) run_batch(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  const auto count = [](const std::vector<char>& v) { return static_cast<double>(std::count(v.begin(), v.end(), 1)); };
  r.accuracy_add = count(ok_add) / static_cast<double>(r.scored);
  r.accuracy_mul = count(ok_mul) / static_cast<double>(r.scored);
  return r;
}

void EvalReport::write_markdown(std::ostream& out) const {
  char buf[64];
  out << "| Method |";
  for (const auto& s : similarity) out << ' ' << s.dataset << " |";
  for (const auto& a : analogy) out << ' ' << a.dataset << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < similarity.size() + analogy.size(); ++i) out << "---|";
  out << "\n| " << model_name << " |";
  for (const auto& s : similarity) {
    std::snprintf(buf, sizeof buf, " %.3f |", s.spearman);
    out << buf;
  }
  for (const auto& a : analogy) {
    std::snprintf(buf, sizeof buf, " %.3f / %.3f |", a.accuracy_add, a.accuracy_mul);
    out << buf;
  }
  out << "\n| coverage |";
  for (const auto& s : similarity) {
    std::snprintf(buf, sizeof buf, " %.3f |", s.coverage());
    out << buf;
  }
  for (const auto& a : analogy) {
    std::snprintf(buf, sizeof buf, " %.3f |", a.coverage());
    out << buf;
  }
  out << '\n';
}

void EvalReport::write_tsv(std::ostream& out) const {
  char buf[256];
  out << "dataset\tmetric\tvalue\tscored\tskipped\tcoverage\n";
  for (const auto& s : similarity) {
    std::snprintf(buf, sizeof buf, "%s\tspearman\t%.6f\t%zu\t%zu\t%.6f\n", s.dataset.c_str(), s.spearman, s.scored,
                  s.skipped, s.coverage());
    out << buf;
  }
  for (const auto& a : analogy) {
    std::snprintf(buf, sizeof buf, "%s\t3cosadd\t%.6f\t%zu\t%zu\t%.6f\n", a.dataset.c_str(), a.accuracy_add,
                  a.scored, a.skipped, a.coverage());
    out << buf;
    std::snprintf(buf, sizeof buf, "%s\t3cosmul\t%.6f\t%zu\t%zu\t%.6f\n", a.dataset.c_str(), a.accuracy_mul,
                  a.scored, a.skipped, a.coverage());
    out << buf;
  }
}

}  // namespace psdvec
