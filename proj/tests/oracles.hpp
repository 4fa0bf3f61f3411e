#pragma once

// Independent reference computations shared by the unit tests.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

/// Gaussian elimination with partial pivoting on a dense copy.
inline Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    a.row(k).swap(a.row(p));
    std::swap(b[k], b[p]);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      a.row(i) -= l * a.row(k);
      b[i] -= l * b[k];
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (Eigen::Index j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

/// Smallest eigenvalue of the dense pencil (A, M) through the Cholesky
/// reduction and a symmetric full eigendecomposition.
inline double smallest_pencil_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  return es.eigenvalues().minCoeff();
}

}  // namespace oracle
