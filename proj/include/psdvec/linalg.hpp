#pragma once

#include <Eigen/Dense>

namespace psdvec {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct IndexRange {
  Index begin = 0;
  Index end = 0;

  Index size() const { return end - begin; }
  bool contains(Index i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
// Each eigenvector is sign-normalized so that its entry of largest magnitude
// (first one on ties) is positive.
struct EigenPairs {
  VectorXd values;
  MatrixXd vectors;  // n x k, column c pairs with values[c]
};

// The k largest eigenpairs of `sym` (lower triangle is read). Takes the
// matrix by value: the LAPACK routine overwrites its input.
EigenPairs top_eigenpairs(MatrixXd sym, Index k);

void normalize_eigenvector_sign(Eigen::Ref<VectorXd> v);

// max |A_ij - A_ji| <= tol * max |A_ij|
bool is_symmetric(const MatrixXd& a, double rel_tol = 1e-10);

}  // namespace psdvec
