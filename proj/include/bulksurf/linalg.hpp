#pragma once

// Sparse symmetric kernels: SPD solves and the smallest eigenpair of a
// symmetric-definite pencil by shift-invert inverse iteration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bulksurf/error.hpp"

namespace bulksurf {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Symmetric matrix held in full compressed-column storage.
///
/// Entries are supplied once per unordered pair; off-diagonal entries are
/// mirrored and duplicates summed when the matrix is finalized.
class SparseSym {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;

  SparseSym() = default;

  static SparseSym from_triplets(Index n, std::span<const Triplet> entries) {
    require(n >= 1, ErrorCode::DimensionMismatch, "matrix dimension must be >= 1");
    std::vector<Eigen::Triplet<double, Index>> full;
    full.reserve(2 * entries.size());
    for (const auto& t : entries) {
      require(t.row >= 0 && t.row < n && t.col >= 0 && t.col < n, ErrorCode::DimensionMismatch,
              "triplet index out of range");
      full.emplace_back(t.row, t.col, t.value);
      if (t.row != t.col) full.emplace_back(t.col, t.row, t.value);
    }
    SparseSym out;
    out.m_.resize(n, n);
    out.m_.setFromTriplets(full.begin(), full.end());
    out.m_.makeCompressed();
    return out;
  }

  static SparseSym identity(Index n) {
    Vector ones = Vector::Ones(n);
    return diagonal(ones);
  }

  static SparseSym diagonal(const Vector& d) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return from_triplets(d.size(), t);
  }

  /// Wraps an already-symmetric Eigen matrix. Symmetry is checked.
  static SparseSym from_matrix(Storage m) {
    require(m.rows() == m.cols() && m.rows() >= 1, ErrorCode::DimensionMismatch,
            "matrix must be square and non-empty");
    const Storage mt = m.transpose();
    const double scale = std::max(1.0, m.norm());
    require((m - mt).norm() <= 1e-12 * scale, ErrorCode::InvalidArgument, "matrix is not symmetric");
    SparseSym out;
    out.m_ = std::move(m);
    out.m_.makeCompressed();
    return out;
  }

  Index size() const { return m_.rows(); }
  const Storage& matrix() const { return m_; }

  Vector operator*(const Vector& x) const {
    require(x.size() == size(), ErrorCode::DimensionMismatch, "vector length does not match matrix");
    return m_ * x;
  }

  double quadratic_form(const Vector& x) const { return x.dot((*this) * x); }

  /// this - shift * other
  SparseSym shifted(double shift, const SparseSym& other) const {
    require(other.size() == size(), ErrorCode::DimensionMismatch, "pencil dimensions differ");
    SparseSym out;
    out.m_ = m_ - shift * other.m_;
    out.m_.makeCompressed();
    return out;
  }

 private:
  Storage m_;
};

struct SolveOptions {
  double rtol = 1e-10;
  // Systems larger than this use preconditioned conjugate gradients.
  Index cg_threshold = 400000;
  Index cg_max_iterations = 20000;
};

/// Sparse LDL^T with AMD ordering; reports the inertia of the factored matrix.
class LdltFactorization {
 public:
  explicit LdltFactorization(const SparseSym& a) : n_(a.size()) {
    solver_.compute(a.matrix());
    if (solver_.info() != Eigen::Success) {
      positive_definite_ = false;
      return;
    }
    const Vector& d = solver_.vectorD();
    positive_definite_ = (d.array() > 0.0).all() && d.allFinite();
  }

  bool positive_definite() const { return positive_definite_; }

  Vector solve(const Vector& b) const {
    require(b.size() == n_, ErrorCode::DimensionMismatch, "right-hand side length does not match matrix");
    return solver_.solve(b);
  }

 private:
  Index n_;
  Eigen::SimplicialLDLT<SparseSym::Storage, Eigen::Lower, Eigen::AMDOrdering<Index>> solver_;
  bool positive_definite_ = false;
};

inline Vector solve_spd(const SparseSym& a, const Vector& b, const SolveOptions& opts = {}) {
  require(b.size() == a.size(), ErrorCode::DimensionMismatch, "right-hand side length does not match matrix");
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());

  Vector x;
  if (a.size() <= opts.cg_threshold) {
    LdltFactorization fact(a);
    require(fact.positive_definite(), ErrorCode::NotPositiveDefinite, "LDL^T pivot <= 0");
    x = fact.solve(b);
    // One step of iterative refinement keeps the residual well inside rtol.
    Vector r = b - a * x;
    if (r.norm() > opts.rtol * bnorm) x += fact.solve(r);
  } else {
    Eigen::ConjugateGradient<SparseSym::Storage, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<Index>>>
        cg;
    cg.setTolerance(opts.rtol * 0.5);
    cg.setMaxIterations(opts.cg_max_iterations);
    cg.compute(a.matrix());
    require(cg.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, "incomplete Cholesky failed");
    x = cg.solve(b);
    require(cg.info() == Eigen::Success && x.allFinite(), ErrorCode::NotPositiveDefinite,
            "conjugate gradient diverged or stalled");
  }
  const double res = (b - a * x).norm();
  require(std::isfinite(res), ErrorCode::NotPositiveDefinite, "solve produced non-finite values");
  require(res <= opts.rtol * bnorm, ErrorCode::NotPositiveDefinite,
          "residual " + std::to_string(res / bnorm) + " above tolerance");
  return x;
}

struct EigenPair {
  double value = 0.0;
  Vector coords;  // unit M-norm
};

struct EigenOptions {
  double tol = 1e-9;
  int max_iterations = 20000;
  double stagnation_change = 1e-14;
  int stagnation_window = 5;
  std::uint64_t restart_seed = 0x5eed;
  // Optional starting vector; defaults to all ones.
  Vector initial;
};

/// Smallest eigenvalue of A x = lambda M x by shift-invert inverse iteration.
///
/// The shift must lie strictly below the spectrum; this is checked through
/// the inertia of the LDL^T factors of A - shift*M.
inline EigenPair smallest_generalized_eigenpair(const SparseSym& a, const SparseSym& m, double shift,
                                                const EigenOptions& opts = {}) {
  require(a.size() == m.size(), ErrorCode::DimensionMismatch, "pencil dimensions differ");
  const Index n = a.size();

  LdltFactorization mass(m);
  require(mass.positive_definite(), ErrorCode::NotPositiveDefinite, "mass matrix is not positive definite");
  LdltFactorization shifted(a.shifted(shift, m));
  require(shifted.positive_definite(), ErrorCode::ShiftNotBelowSpectrum,
          "A - shift*M is not positive definite for shift " + std::to_string(shift));

  Vector x = opts.initial.size() == n ? opts.initial : Vector::Ones(n);
  auto m_normalize = [&](Vector& y) {
    const double nm = std::sqrt(std::max(m.quadratic_form(y), 0.0));
    require(nm > 0.0 && std::isfinite(nm), ErrorCode::ShiftNotBelowSpectrum, "iterate collapsed");
    y /= nm;
  };
  m_normalize(x);

  std::mt19937_64 rng(opts.restart_seed);
  std::normal_distribution<double> normal;
  int stagnant = 0;
  double value = a.quadratic_form(x);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Vector mx = m * x;
    Vector ax = a * x;
    value = x.dot(ax);
    Vector r = ax - value * mx;
    const double scale = ax.norm() + (std::abs(value) + std::abs(shift)) * mx.norm();
    if (r.norm() <= opts.tol * scale) {
      return {value, x};
    }

    Vector next = shifted.solve(mx);
    m_normalize(next);
    // Keep the sign of the previous iterate so the change test is meaningful.
    if (next.dot(mx) < 0.0) next = -next;
    const double change = (next - x).norm() / std::max(x.norm(), 1e-300);
    x = std::move(next);

    stagnant = change < opts.stagnation_change ? stagnant + 1 : 0;
    if (stagnant >= opts.stagnation_window) {
      Vector z(n);
      for (Index i = 0; i < n; ++i) z[i] = normal(rng);
      z -= x * (x.dot(m * z));
      const double zn = std::sqrt(std::max(m.quadratic_form(z), 0.0));
      if (zn > 0.0) x += 1e-3 * z / zn;
      m_normalize(x);
      stagnant = 0;
    }
  }
  throw Error(ErrorCode::ShiftNotBelowSpectrum,
              "inverse iteration did not converge in " + std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace bulksurf
