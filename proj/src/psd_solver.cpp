#include "psdvec/psd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "psdvec/error.hpp"

namespace psdvec {

namespace {

PsdFactor factor_from_eigenpairs(const EigenPairs& eig, Index n, Index rank) {
  PsdFactor out;
  out.V = MatrixXd::Zero(rank, n);
  out.eigenvalues = VectorXd::Zero(rank);
  for (Index c = 0; c < eig.values.size(); ++c) {
    const double lambda = eig.values[c];
    if (lambda > 0.0) {
      out.eigenvalues[c] = lambda;
      out.V.row(c) = std::sqrt(lambda) * eig.vectors.col(c).transpose();
    }
  }
  return out;
}

double weighted_error(const MatrixXd& g, const MatrixXd& x, const MatrixXd& w) {
  return (w.array() * (g.array() - x.array()).square()).sum();
}

// Projection without the symmetry check; consumes its input.
PsdFactor project(MatrixXd g, Index rank) {
  const Index n = g.rows();
  const Index k = std::min(rank, n);
  return factor_from_eigenpairs(top_eigenpairs(std::move(g), k), n, rank);
}

}  // namespace

void BcdConfig::validate() const {
  if (rank < 1) throw invalid_argument("rank N must be >= 1");
  if (iterations < 1) throw invalid_argument("iteration count must be >= 1");
  if (!std::isfinite(init_scale)) throw invalid_argument("init_scale must be finite");
  if (!(convergence_tol >= 0.0)) throw invalid_argument("convergence_tol must be >= 0");
}

PsdFactor psd_approximate(const MatrixXd& g, Index rank) {
  if (rank < 1) throw invalid_argument("rank N must be >= 1");
  if (g.rows() != g.cols()) throw shape_error("psd_approximate needs a square matrix");
  if (!g.allFinite()) throw numeric_error("psd_approximate input contains non-finite values");
  if (!is_symmetric(g)) throw invalid_argument("psd_approximate input is not symmetric");
  return project(g, rank);
}

double weighted_frobenius_sq(const MatrixXd& a, const MatrixXd& w) {
  if (a.rows() != w.rows() || a.cols() != w.cols()) {
    throw shape_error("weighted_frobenius_sq: shape mismatch");
  }
  return (w.array() * a.array().square()).sum();
}

BcdResult bcd_solve(const MatrixXd& g_star, const MatrixXd& weights, const BcdConfig& cfg,
                    const std::function<void(int, double)>& on_iteration) {
  cfg.validate();
  const Index n = g_star.rows();
  if (g_star.cols() != n || weights.rows() != n || weights.cols() != n) {
    throw shape_error("bcd_solve: G* and W must be square with equal dimensions");
  }
  if (!g_star.allFinite()) throw numeric_error("bcd_solve: G* contains non-finite values");
  if (!is_symmetric(g_star)) throw invalid_argument("bcd_solve: G* is not symmetric");
  if (!is_symmetric(weights)) throw invalid_argument("bcd_solve: weight matrix is not symmetric");
  if (!(weights.minCoeff() >= 0.0 && weights.maxCoeff() <= 1.0)) {
    throw invalid_argument("bcd_solve: weights must lie in [0,1]");
  }

  BcdResult result;
  MatrixXd x = cfg.init_scale * g_star;
  double err = weighted_error(g_star, x, weights);
  result.trajectory.push_back(err);
  if (on_iteration) on_iteration(0, err);

  for (int t = 1; t <= cfg.iterations; ++t) {
    // G_t = W o G* + (1 - W) o X^(t-1), formed in place.
    x.array() += weights.array() * (g_star.array() - x.array());
    result.factor = project(std::move(x), cfg.rank);
    x.resize(n, n);
    x.noalias() = result.factor.V.transpose() * result.factor.V;

    const double prev = err;
    err = weighted_error(g_star, x, weights);
    result.trajectory.push_back(err);
    result.iterations_run = t;
    if (on_iteration) on_iteration(t, err);
    // X^(0) is generally not PSD, so the first step is not a descent step.
    if (t >= 2 && cfg.convergence_tol > 0.0 && (prev <= 0.0 || (prev - err) / prev < cfg.convergence_tol)) {
      break;
    }
  }
  return result;
}

SvdTrapReport svd_trap_demo() {
  MatrixXd m1(3, 3);
  m1 << 1.4, 0.8, 0.0, 0.8, 2.6, 0.0, 0.0, 0.0, 2.0;
  MatrixXd m2(3, 3);
  m2 << 0.2, -1.6, 0.0, -1.6, -2.2, 0.0, 0.0, 0.0, 2.0;

  SvdTrapReport report;
  for (const auto& [name, m] : {std::pair<std::string, MatrixXd>{"M1", m1}, {"M2", m2}}) {
    SvdTrapCase c;
    c.name = name;
    c.matrix = m;
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU);
    c.singular_values = svd.singularValues();
    c.svd_factor.resize(2, 3);
    for (Index r = 0; r < 2; ++r) {
      VectorXd u = svd.matrixU().col(r);
      normalize_eigenvector_sign(u);
      c.svd_factor.row(r) = u.transpose();
    }
    c.eigenvalues = top_eigenpairs(m, 3).values;
    c.eigen_factor = psd_approximate(m, 2).V;
    c.svd_inner = c.svd_factor.col(0).dot(c.svd_factor.col(1));
    c.eigen_inner = c.eigen_factor.col(0).dot(c.eigen_factor.col(1));
    report.cases.push_back(std::move(c));
  }
  return report;
}

std::string SvdTrapReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  const Eigen::IOFormat fmt(4, 0, " ", "\n", "    [", "]");
  for (const auto& c : cases) {
    out << c.name << ":\n" << c.matrix.format(fmt) << "\n";
    out << "  singular values: " << c.singular_values.transpose().format(Eigen::IOFormat(4)) << "\n";
    out << "  eigenvalues:     " << c.eigenvalues.transpose().format(Eigen::IOFormat(4)) << "\n";
    out << "  SVD factor (rank 2):\n" << c.svd_factor.format(fmt) << "\n";
    out << "  v_s1.v_s2 (SVD)   = " << c.svd_inner << (c.svd_inner > 0 ? "  (positive)" : "  (negative)")
        << "\n";
    out << "  eigen factor (rank 2):\n" << c.eigen_factor.format(fmt) << "\n";
    out << "  v_s1.v_s2 (eigen) = " << c.eigen_inner
        << (c.eigen_inner > 0 ? "  (positive)" : "  (negative)") << "\n";
  }
  return out.str();
}

}  // namespace psdvec
