#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psdvec/linalg.hpp"

namespace psdvec {

// V is N x n; column i is the embedding of word i. X = V^T V.
struct PsdFactor {
  MatrixXd V;
  VectorXd eigenvalues;  // N retained eigenvalues, descending, clipped at 0

  MatrixXd gram() const { return V.transpose() * V; }
  Index rank() const { return V.rows(); }
};

struct BcdConfig {
  Index rank = 50;
  int iterations = 5;
  double init_scale = 0.5;
  // Stop once the relative drop of the weighted error between two feasible
  // iterates falls below this. Zero disables early stopping.
  double convergence_tol = 1e-5;

  void validate() const;
};

struct BcdResult {
  PsdFactor factor;
  // Weighted squared error ||G* - X^(t)||^2_W for t = 0 .. iterations run.
  // Entry 0 is the (infeasible) starting point; entries 1.. are non-increasing.
  std::vector<double> trajectory;
  int iterations_run = 0;
};

// Nearest rank-N PSD matrix to G in Frobenius norm: keep the (at most N)
// largest positive eigenpairs. Rows beyond the positive spectrum are zero.
PsdFactor psd_approximate(const MatrixXd& g, Index rank);

// sum_ij W_ij A_ij^2
double weighted_frobenius_sq(const MatrixXd& a, const MatrixXd& w);

// Fill-in / projection block coordinate descent for
//   min ||G* - X||^2_W  s.t. X PSD, rank(X) <= N,
// starting from X^(0) = init_scale * G*. Weights must lie in [0,1].
BcdResult bcd_solve(const MatrixXd& g_star, const MatrixXd& weights, const BcdConfig& cfg,
                    const std::function<void(int, double)>& on_iteration = {});

struct SvdTrapCase {
  std::string name;
  MatrixXd matrix;
  VectorXd singular_values;
  VectorXd eigenvalues;  // descending
  MatrixXd svd_factor;    // 2 x 3, rows are the top left singular vectors
  MatrixXd eigen_factor;  // 2 x 3, psd_approximate(M, 2)
  double svd_inner = 0.0;    // v_s1 . v_s2 under the SVD route
  double eigen_inner = 0.0;  // v_s1 . v_s2 under the eigen route
};

struct SvdTrapReport {
  std::vector<SvdTrapCase> cases;

  std::string to_text() const;
};

// Rank-2 SVD vs. eigendecomposition on two 3x3 PMI matrices with identical
// singular values, one of which has a negative principal eigenvalue.
SvdTrapReport svd_trap_demo();

}  // namespace psdvec
