#pragma once

// Finite-volume Poisson solvers on the unit disk over a cell-centred polar
// grid, the Talenti comparison harness built on them, and the eigenvalue of
// the bulk-surface quadratic form with sampled potentials.
//
// Cells: r_i = (i + 1/2) / n_r for i = 0..n_r-1, theta_j = 2 pi j / m.
// The inner face of the first ring has radius 0 and carries no flux.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bulksurf/error.hpp"
#include "bulksurf/linalg.hpp"
#include "bulksurf/parallel.hpp"
#include "bulksurf/symmetrization.hpp"

namespace bulksurf {

struct DiskGrid {
  int n_r = 32;
  int m = 32;

  DiskGrid() = default;
  DiskGrid(int rings, int angles) : n_r(rings), m(angles) { validate(); }

  void validate() const {
    require(n_r >= 32, ErrorCode::InvalidArgument, "disk grid needs n_r >= 32");
    require(m >= 32 && m % 2 == 0, ErrorCode::InvalidArgument, "disk grid needs even m >= 32");
  }

  double dr() const { return 1.0 / n_r; }
  double dtheta() const { return 2.0 * std::numbers::pi / m; }
  double radius(int i) const { return (i + 0.5) / n_r; }
  double theta(int j) const { return dtheta() * j; }
  double cell_area(int i) const { return radius(i) * dr() * dtheta(); }
  Index dofs() const { return static_cast<Index>(n_r) * m; }
  Index index(int i, int j) const { return static_cast<Index>(i) * m + j; }

  template <class F>
  PolarField sample(F&& fn) const {
    std::vector<CircleField> rings(static_cast<std::size_t>(n_r));
    for (int i = 0; i < n_r; ++i) {
      rings[i].radius = radius(i);
      rings[i].values.resize(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) rings[i].values[j] = fn(radius(i), theta(j));
    }
    return PolarField(std::move(rings));
  }

  template <class F>
  CircleField sample_boundary(F&& fn) const {
    CircleField c;
    c.radius = 1.0;
    c.values.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) c.values[j] = fn(theta(j));
    return c;
  }

  PolarField zeros() const {
    return sample([](double, double) { return 0.0; });
  }
  CircleField boundary_zeros() const {
    return sample_boundary([](double) { return 0.0; });
  }

  Vector to_vector(const PolarField& f) const {
    check(f);
    Vector x(dofs());
    for (int i = 0; i < n_r; ++i)
      for (int j = 0; j < m; ++j) x[index(i, j)] = f.at(i, j);
    return x;
  }

  PolarField from_vector(const Vector& x) const {
    PolarField f = zeros();
    for (int i = 0; i < n_r; ++i)
      for (int j = 0; j < m; ++j) f.at(i, j) = x[index(i, j)];
    return f;
  }

  void check(const PolarField& f) const {
    require(f.ring_count() == static_cast<std::size_t>(n_r) && f.m() == static_cast<std::size_t>(m),
            ErrorCode::GridMismatch, "field does not match the disk grid");
    for (int i = 0; i < n_r; ++i)
      require(std::abs(f.rings[i].radius - radius(i)) <= 1e-12, ErrorCode::GridMismatch,
              "ring radii are not the cell centres of the disk grid");
  }

  void check(const CircleField& c) const {
    require(c.m() == static_cast<std::size_t>(m), ErrorCode::GridMismatch, "boundary field does not match the disk grid");
  }

  static DiskGrid of(const PolarField& f) {
    DiskGrid g(static_cast<int>(f.ring_count()), static_cast<int>(f.m()));
    g.check(f);
    return g;
  }
};

enum class BoundaryKind { Robin, Dirichlet };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Robin;
  double robin_beta = 1.0;

  /// Coefficient c with outward flux = c (w - beta_eff u_last), from the
  /// half-cell elimination of the boundary value.
  double diagonal(double dr) const {
    return kind == BoundaryKind::Robin ? robin_beta / (1.0 + 0.5 * robin_beta * dr) : 2.0 / dr;
  }
  double data_weight(double dr) const {
    return kind == BoundaryKind::Robin ? 1.0 / (1.0 + 0.5 * robin_beta * dr) : 2.0 / dr;
  }
};

namespace detail {

// Rows of the stencil are scaled so that K u = A f + boundary terms, with A
// the diagonal of cell areas; K is symmetric.
inline SparseSym assemble_stencil(const DiskGrid& g, const BoundaryCondition& bc, const std::vector<double>* potential) {
  const double dr = g.dr(), dth = g.dtheta();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.dofs()) * 3);
  for (int i = 0; i < g.n_r; ++i) {
    const double ri = g.radius(i);
    const double ang = dr / (ri * dth);
    const double outer = (i + 1) * dth;  // face radius (i+1) dr, times dtheta / dr
    for (int j = 0; j < g.m; ++j) {
      const Index p = g.index(i, j);
      double diag = 2.0 * ang;
      t.push_back({p, g.index(i, (j + 1) % g.m), -ang});
      if (i + 1 < g.n_r) {
        diag += outer;
        t.push_back({p, g.index(i + 1, j), -outer});
      } else {
        diag += dth * bc.diagonal(dr);
      }
      if (i > 0) diag += i * dth;
      if (potential) diag -= g.cell_area(i) * (*potential)[static_cast<std::size_t>(p)];
      t.push_back({p, p, diag});
    }
  }
  return SparseSym::from_triplets(g.dofs(), t);
}

inline Vector area_vector(const DiskGrid& g) {
  Vector a(g.dofs());
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.m; ++j) a[g.index(i, j)] = g.cell_area(i);
  return a;
}

inline Vector stencil_rhs(const DiskGrid& g, const PolarField& f, const CircleField& w, const BoundaryCondition& bc) {
  Vector b = area_vector(g).cwiseProduct(g.to_vector(f));
  const int last = g.n_r - 1;
  for (int j = 0; j < g.m; ++j) b[g.index(last, j)] += g.dtheta() * bc.data_weight(g.dr()) * w.values[j];
  return b;
}

struct DftTable {
  int m;
  std::vector<double> c, s;
  explicit DftTable(int m_) : m(m_), c(static_cast<std::size_t>(m_)), s(static_cast<std::size_t>(m_)) {
    for (int k = 0; k < m; ++k) {
      c[k] = std::cos(2.0 * std::numbers::pi * k / m);
      s[k] = std::sin(2.0 * std::numbers::pi * k / m);
    }
  }
  // F_n = (1/m) sum_j f_j e^{-i n theta_j}
  std::vector<std::complex<double>> forward(const std::vector<double>& f) const {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(m));
    for (int n = 0; n < m; ++n) {
      double re = 0.0, im = 0.0;
      for (int j = 0; j < m; ++j) {
        const int k = static_cast<int>((static_cast<long>(n) * j) % m);
        re += f[j] * c[k];
        im -= f[j] * s[k];
      }
      out[n] = {re / m, im / m};
    }
    return out;
  }
  std::vector<double> inverse(const std::vector<std::complex<double>>& F) const {
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      double re = 0.0;
      for (int n = 0; n < m; ++n) {
        const int k = static_cast<int>((static_cast<long>(n) * j) % m);
        re += F[n].real() * c[k] - F[n].imag() * s[k];
      }
      out[j] = re;
    }
    return out;
  }
};

// Thomas algorithm for a symmetric tridiagonal system; off[i] couples i, i+1.
inline std::vector<std::complex<double>> solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off,
                                                           std::vector<std::complex<double>> rhs, int mode) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!(diag[i - 1] > 1e-300))
      throw Error(ErrorCode::SingularMode, "radial system is singular for mode " + std::to_string(mode));
    const double l = off[i - 1] / diag[i - 1];
    diag[i] -= l * off[i - 1];
    rhs[i] -= l * rhs[i - 1];
  }
  if (!(diag[n - 1] > 1e-300))
    throw Error(ErrorCode::SingularMode, "radial system is singular for mode " + std::to_string(mode));
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

// Mode-by-mode solve of K u - A q u = A f + boundary data, where q is a
// ring-wise constant potential.
inline PolarField modal_solve(const DiskGrid& g, const PolarField& f, const CircleField& w, const BoundaryCondition& bc,
                              const std::vector<double>& ring_potential) {
  const DftTable dft(g.m);
  const double dr = g.dr(), dth = g.dtheta();
  std::vector<std::vector<std::complex<double>>> fh(static_cast<std::size_t>(g.n_r));
  for (int i = 0; i < g.n_r; ++i) fh[i] = dft.forward(f.rings[i].values);
  const auto wh = dft.forward(w.values);

  // Everything divided by dtheta: the angular DFT diagonalizes the ring coupling.
  std::vector<double> off(static_cast<std::size_t>(g.n_r - 1));
  for (int i = 0; i + 1 < g.n_r; ++i) off[i] = -(i + 1.0);

  auto modes = parallel_map(static_cast<std::size_t>(g.m), [&](std::size_t n) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(n) / g.m);
    const double kappa = 4.0 / (dth * dth) * s * s;
    std::vector<double> diag(static_cast<std::size_t>(g.n_r));
    std::vector<std::complex<double>> rhs(static_cast<std::size_t>(g.n_r));
    for (int i = 0; i < g.n_r; ++i) {
      const double ri = g.radius(i);
      double d = dr * kappa / ri - ri * dr * ring_potential[i];
      if (i + 1 < g.n_r) d += (i + 1);
      if (i > 0) d += i;
      rhs[i] = ri * dr * fh[i][n];
      diag[i] = d;
    }
    diag.back() += bc.diagonal(dr);
    rhs.back() += bc.data_weight(dr) * wh[n];
    return solve_tridiagonal(std::move(diag), off, std::move(rhs), static_cast<int>(n));
  });

  PolarField u = g.zeros();
  std::vector<std::complex<double>> ring(static_cast<std::size_t>(g.m));
  for (int i = 0; i < g.n_r; ++i) {
    for (int n = 0; n < g.m; ++n) ring[n] = modes[n][i];
    u.rings[i].values = dft.inverse(ring);
  }
  return u;
}

inline double max_abs(const std::vector<double>& v) {
  double x = 0.0;
  for (double y : v) x = std::max(x, std::abs(y));
  return x;
}

inline double max_abs(const PolarField& f) {
  double x = 0.0;
  for (const auto& r : f.rings) x = std::max(x, max_abs(r.values));
  return x;
}

inline bool is_ring_constant(const PolarField& f) {
  for (const auto& r : f.rings)
    for (double x : r.values)
      if (x != r.values.front()) return false;
  return true;
}

}  // namespace detail

/// Max-norm of the stencil residual divided by cell area, i.e. in units of f.
inline double stencil_residual(const PolarField& u, const PolarField& f, const CircleField& w, const BoundaryCondition& bc,
                               const PolarField* potential = nullptr) {
  const DiskGrid g = DiskGrid::of(u);
  g.check(f);
  g.check(w);
  std::vector<double> q;
  if (potential) q = potential->flat();
  const SparseSym k = detail::assemble_stencil(g, bc, potential ? &q : nullptr);
  const Vector res = (k * g.to_vector(u) - detail::stencil_rhs(g, f, w, bc)).cwiseQuotient(detail::area_vector(g));
  return res.lpNorm<Eigen::Infinity>();
}

/// -Laplace u = f in the disk, du/dn + robin_beta u = w on the circle.
inline PolarField solve_robin_poisson(const PolarField& f, const CircleField& w, double robin_beta) {
  require(robin_beta > 0.0, ErrorCode::InvalidArgument, "robin_beta must be positive");
  const DiskGrid g = DiskGrid::of(f);
  g.check(w);
  const BoundaryCondition bc{BoundaryKind::Robin, robin_beta};
  return detail::modal_solve(g, f, w, bc, std::vector<double>(static_cast<std::size_t>(g.n_r), 0.0));
}

/// -Laplace u = f in the disk, u = w on the circle.
inline PolarField solve_dirichlet_poisson(const PolarField& f, const CircleField& w) {
  const DiskGrid g = DiskGrid::of(f);
  g.check(w);
  const BoundaryCondition bc{BoundaryKind::Dirichlet, 0.0};
  return detail::modal_solve(g, f, w, bc, std::vector<double>(static_cast<std::size_t>(g.n_r), 0.0));
}

/// Smallest eigenvalue of -Laplace - m1 with the Robin condition, relative to
/// the L^2 mass.
inline double robin_potential_eigenvalue(const PolarField& m1, double robin_beta) {
  const DiskGrid g = DiskGrid::of(m1);
  const auto q = m1.flat();
  const SparseSym k = detail::assemble_stencil(g, {BoundaryKind::Robin, robin_beta}, &q);
  const SparseSym mass = SparseSym::diagonal(detail::area_vector(g));
  const double shift = -std::max(0.0, detail::max_abs(q)) - 1.0;
  return smallest_generalized_eigenpair(k, mass, shift).value;
}

/// Periodic solve of -w'' + m2 w = g on the unit circle.
inline CircleField solve_surface_problem(const CircleField& g, const CircleField& m2) {
  require(g.m() == m2.m(), ErrorCode::GridMismatch, "surface data on different grids");
  double lo = m2.values.front();
  for (double x : m2.values) lo = std::min(lo, x);
  require(lo > 1e-8, ErrorCode::SurfaceOperatorSingular, "min(m2) must exceed 1e-8");
  const Index m = static_cast<Index>(g.m());
  const double h = 2.0 * std::numbers::pi / static_cast<double>(m);
  std::vector<Triplet> t;
  Vector b(m);
  for (Index j = 0; j < m; ++j) {
    t.push_back({j, j, 2.0 / h + h * m2.values[j]});
    t.push_back({j, (j + 1) % m, -1.0 / h});
    b[j] = h * g.values[j];
  }
  const Vector w = solve_spd(SparseSym::from_triplets(m, t), b);
  CircleField out;
  out.radius = 1.0;
  out.values.assign(w.data(), w.data() + m);
  return out;
}

struct CoupledSolveResult {
  PolarField u;
  CircleField boundary;
  double residual = 0.0;
};

/// -Laplace u - m1 u = f, du/dn + robin_beta u = w_g, with -w_g'' + m2 w_g = g.
inline CoupledSolveResult solve_coupled_poisson(const PolarField& f, const CircleField& g, const PolarField& m1,
                                                const CircleField& m2, double robin_beta) {
  require(robin_beta > 0.0, ErrorCode::InvalidArgument, "robin_beta must be positive");
  const DiskGrid grid = DiskGrid::of(f);
  grid.check(m1);
  grid.check(g);
  grid.check(m2);
  for (const auto& r : m1.rings)
    for (double x : r.values) require(x >= 0.0, ErrorCode::NegativeInput, "m1 must be nonnegative");
  for (double x : m2.values) require(x >= 0.0, ErrorCode::NegativeInput, "m2 must be nonnegative");

  CoupledSolveResult out;
  out.boundary = solve_surface_problem(g, m2);

  const double lambda1 = robin_potential_eigenvalue(m1, robin_beta);
  if (!(lambda1 > 1e-8))
    throw Error(ErrorCode::PotentialTooLarge,
                "Robin eigenvalue with potential is " + std::to_string(lambda1) + ", must exceed 1e-8");

  const BoundaryCondition bc{BoundaryKind::Robin, robin_beta};
  if (detail::is_ring_constant(m1)) {
    std::vector<double> q(static_cast<std::size_t>(grid.n_r));
    for (int i = 0; i < grid.n_r; ++i) q[i] = m1.rings[i].values.front();
    out.u = detail::modal_solve(grid, f, out.boundary, bc, q);
  } else {
    const auto q = m1.flat();
    const SparseSym k = detail::assemble_stencil(grid, bc, &q);
    out.u = grid.from_vector(solve_spd(k, detail::stencil_rhs(grid, f, out.boundary, bc)));
  }
  out.residual = stencil_residual(out.u, f, out.boundary, bc, &m1);
  return out;
}

struct NormRecord {
  int p = 1;
  double norm_u = 0.0;
  double norm_v = 0.0;
};

/// Area-weighted discrete L^p norm.
inline double polar_lp_norm(const PolarField& u, int p) {
  const DiskGrid g = DiskGrid::of(u);
  double s = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.m; ++j) s += g.cell_area(i) * std::pow(std::abs(u.at(i, j)), p);
  return std::pow(s, 1.0 / p);
}

inline double polar_integral(const PolarField& u) {
  const DiskGrid g = DiskGrid::of(u);
  double s = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.m; ++j) s += g.cell_area(i) * u.at(i, j);
  return s;
}

enum class TalentiKind { Robin, Dirichlet, Coupled };

inline const char* to_string(TalentiKind k) {
  switch (k) {
    case TalentiKind::Robin: return "robin";
    case TalentiKind::Dirichlet: return "dirichlet";
    case TalentiKind::Coupled: return "coupled";
  }
  return "robin";
}

struct TalentiInputs {
  TalentiKind kind = TalentiKind::Robin;
  PolarField f;
  CircleField w;   // boundary datum (robin, dirichlet) or g (coupled)
  PolarField m1;   // coupled only
  CircleField m2;  // coupled only
  double robin_beta = 1.0;
  double tol = 1e-8;
};

struct TalentiReport {
  ComparisonReport comparison;
  std::vector<NormRecord> norms;  // p = 1, 2, 4
  double integral_u = 0.0;
  double integral_v = 0.0;
  double asymmetry = 0.0;  // ||f - f^sharp||_2
  PolarField u;
  PolarField v;
};

/// Solves the original and the symmetrized problem and compares u with v.
inline TalentiReport talenti_verify(const TalentiInputs& in) {
  TalentiReport rep;
  const PolarField fs = cap_symmetrize_disk(in.f);
  const CircleField ws = cap_symmetrize_circle(in.w);
  switch (in.kind) {
    case TalentiKind::Robin:
      rep.u = solve_robin_poisson(in.f, in.w, in.robin_beta);
      rep.v = solve_robin_poisson(fs, ws, in.robin_beta);
      break;
    case TalentiKind::Dirichlet:
      rep.u = solve_dirichlet_poisson(in.f, in.w);
      rep.v = solve_dirichlet_poisson(fs, ws);
      break;
    case TalentiKind::Coupled:
      rep.u = solve_coupled_poisson(in.f, in.w, in.m1, in.m2, in.robin_beta).u;
      rep.v = solve_coupled_poisson(fs, ws, cap_symmetrize_disk(in.m1), decreasing_cap_symmetrize_circle(in.m2),
                                    in.robin_beta)
                  .u;
      break;
  }
  rep.comparison = compare_concentration(rep.u, rep.v, in.tol);
  for (int p : {1, 2, 4}) rep.norms.push_back({p, polar_lp_norm(rep.u, p), polar_lp_norm(rep.v, p)});
  rep.integral_u = polar_integral(rep.u);
  rep.integral_v = polar_integral(rep.v);
  PolarField diff = in.f;
  for (std::size_t i = 0; i < diff.ring_count(); ++i)
    for (std::size_t j = 0; j < diff.m(); ++j) diff.at(i, j) -= fs.at(i, j);
  rep.asymmetry = polar_lp_norm(diff, 2);
  return rep;
}

struct DiskEigen {
  double lambda = 0.0;
  PolarField u;
  CircleField v;
};

/// Smallest eigenvalue of the bulk-surface form with potentials f (bulk) and
/// g (circle): |grad u|^2 - f u^2 + |v'|^2 - g v^2 + (u - v)^2 over
/// |u|^2 + |v|^2.
inline DiskEigen lambda_disk_general(const PolarField& f, const CircleField& g) {
  const DiskGrid grid = DiskGrid::of(f);
  grid.check(g);
  const Index nb = grid.dofs();
  const Index n = nb + grid.m;
  const double dr = grid.dr(), dth = grid.dtheta();

  // Bulk part: Neumann stencil (zero Robin coefficient) minus the potential.
  const auto q = f.flat();
  const SparseSym bulk = detail::assemble_stencil(grid, {BoundaryKind::Robin, 0.0}, &q);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(bulk.matrix().nonZeros() + 6 * grid.m));
  for (Index c = 0; c < bulk.matrix().outerSize(); ++c)
    for (SparseSym::Storage::InnerIterator it(bulk.matrix(), c); it; ++it)
      if (it.row() <= it.col()) t.push_back({it.row(), it.col(), it.value()});

  const double exch = dth / (1.0 + 0.5 * dr);
  for (int j = 0; j < grid.m; ++j) {
    const Index ub = grid.index(grid.n_r - 1, j);
    const Index vj = nb + j;
    t.push_back({ub, ub, exch});
    t.push_back({vj, vj, exch + 2.0 / dth - dth * g.values[j]});
    t.push_back({ub, vj, -exch});
    t.push_back({vj, nb + (j + 1) % grid.m, -1.0 / dth});
  }
  const SparseSym a = SparseSym::from_triplets(n, t);

  Vector mass(n);
  mass.head(nb) = detail::area_vector(grid);
  mass.tail(grid.m).setConstant(dth);

  double top = 0.0;
  for (double x : q) top = std::max(top, x);
  for (double x : g.values) top = std::max(top, x);
  const auto pair = smallest_generalized_eigenpair(a, SparseSym::diagonal(mass), -top - 1.0);

  DiskEigen out;
  out.lambda = pair.value;
  out.u = grid.from_vector(pair.coords.head(nb));
  out.v = grid.boundary_zeros();
  for (int j = 0; j < grid.m; ++j) out.v.values[j] = pair.coords[nb + j];
  return out;
}

}  // namespace bulksurf
