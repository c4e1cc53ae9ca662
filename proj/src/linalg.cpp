#include "psdvec/linalg.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

#include "psdvec/error.hpp"

namespace psdvec {

void normalize_eigenvector_sign(Eigen::Ref<VectorXd> v) {
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v.size() > 0 && v[arg] < 0.0) v = -v;
}

EigenPairs top_eigenpairs(MatrixXd sym, Index k) {
  const Index n = sym.rows();
  if (sym.cols() != n) throw shape_error("eigendecomposition needs a square matrix");
  if (k < 0 || k > n) throw invalid_argument("requested eigenpair count out of range");
  if (!sym.allFinite()) throw numeric_error("eigendecomposition input contains non-finite values");
  EigenPairs out;
  if (k == 0 || n == 0) {
    out.values.resize(0);
    out.vectors.resize(n, 0);
    return out;
  }

  VectorXd w(n);
  MatrixXd z(n, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', k == n ? 'A' : 'I', 'L', ln, sym.data(), ln, 0.0, 0.0,
      static_cast<lapack_int>(n - k + 1), ln, 0.0, &found, w.data(), z.data(), ln, support.data());
  if (info != 0) {
    throw numeric_error("symmetric eigendecomposition failed (dsyevr info=" + std::to_string(info) + ")");
  }
  if (found != k) throw numeric_error("eigensolver returned fewer eigenpairs than requested");

  // dsyevr returns ascending order.
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Index c = 0; c < k; ++c) {
    out.values[c] = w[k - 1 - c];
    out.vectors.col(c) = z.col(k - 1 - c);
    normalize_eigenvector_sign(out.vectors.col(c));
  }
  return out;
}

bool is_symmetric(const MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  const double tol = rel_tol * scale;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = j + 1; i < a.rows(); ++i) {
      if (!(std::abs(a(i, j) - a(j, i)) <= tol)) return false;
    }
  }
  return true;
}

}  // namespace psdvec
