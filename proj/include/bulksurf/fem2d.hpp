#pragma once

// P1 finite elements for the bulk-surface eigenvalue problem on planar
// polygons: bulk unknowns at every vertex, separate surface unknowns on the
// boundary polyline, coupled through the exchange term.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bulksurf/error.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/linalg.hpp"
#include "bulksurf/parallel.hpp"

namespace bulksurf {

using Point = std::array<double, 2>;
using Tri = std::array<int, 3>;

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

inline double distance(const Point& a, const Point& b) { return std::hypot(b[0] - a[0], b[1] - a[1]); }

struct Mesh {
  std::vector<Point> vertices;
  std::vector<Tri> triangles;      // counter-clockwise
  std::vector<int> boundary_loop;  // counter-clockwise, closing edge implied

  std::size_t boundary_size() const { return boundary_loop.size(); }

  std::vector<double> boundary_edge_lengths() const {
    std::vector<double> out(boundary_loop.size());
    for (std::size_t p = 0; p < boundary_loop.size(); ++p)
      out[p] = distance(vertices[boundary_loop[p]], vertices[boundary_loop[(p + 1) % boundary_loop.size()]]);
    return out;
  }

  double area() const {
    double s = 0.0;
    for (const auto& t : triangles) s += signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    return s;
  }

  double perimeter() const {
    double s = 0.0;
    for (double l : boundary_edge_lengths()) s += l;
    return s;
  }

  /// Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const {
    double best = 180.0;
    for (const auto& t : triangles) {
      for (int c = 0; c < 3; ++c) {
        const Point& p = vertices[t[c]];
        const Point& q = vertices[t[(c + 1) % 3]];
        const Point& r = vertices[t[(c + 2) % 3]];
        const double ax = q[0] - p[0], ay = q[1] - p[1], bx = r[0] - p[0], by = r[1] - p[1];
        const double ang = std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
        best = std::min(best, ang * 180.0 / std::numbers::pi);
      }
    }
    return best;
  }

  /// Throws InvalidArgument when the mesh is not a conforming triangulation
  /// of a region bounded by boundary_loop.
  void validate() const {
    const int nv = static_cast<int>(vertices.size());
    require(nv >= 3 && !triangles.empty(), ErrorCode::InvalidArgument, "mesh is empty");
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : triangles) {
      for (int c : t) require(c >= 0 && c < nv, ErrorCode::InvalidArgument, "triangle references a missing vertex");
      require(signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0, ErrorCode::InvalidArgument,
              "triangle is degenerate or clockwise");
      for (int c = 0; c < 3; ++c) {
        auto [it, fresh] = directed.emplace(std::pair{t[c], t[(c + 1) % 3]}, 1);
        require(fresh, ErrorCode::InvalidArgument, "edge used twice with the same orientation");
      }
    }
    std::map<int, int> next;
    for (const auto& [e, _] : directed)
      if (!directed.count({e.second, e.first})) {
        require(!next.count(e.first), ErrorCode::InvalidArgument, "boundary is not a single simple loop");
        next[e.first] = e.second;
      }
    require(next.size() == boundary_loop.size(), ErrorCode::InvalidArgument, "boundary loop misses boundary edges");
    for (std::size_t p = 0; p < boundary_loop.size(); ++p) {
      auto it = next.find(boundary_loop[p]);
      require(it != next.end() && it->second == boundary_loop[(p + 1) % boundary_loop.size()],
              ErrorCode::InvalidArgument, "boundary loop does not follow the boundary edges");
    }
  }

  void require_quality(double min_degrees = 15.0) const {
    const double a = min_angle_degrees();
    if (a < min_degrees)
      throw Error(ErrorCode::MeshQualityFailure, "minimum angle " + std::to_string(a) + " degrees is below " +
                                                     std::to_string(min_degrees));
  }
};

/// Structured a x b rectangle, lower-left corner at the origin, each cell cut
/// along alternating diagonals.
inline Mesh make_rectangle_mesh(double a, double b, double h) {
  require(a > 0.0 && b > 0.0 && h > 0.0, ErrorCode::InvalidArgument, "rectangle sides and h must be positive");
  const int nx = std::max(1, static_cast<int>(std::ceil(a / h - 1e-12)));
  const int ny = std::max(1, static_cast<int>(std::ceil(b / h - 1e-12)));
  Mesh mesh;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({a * i / nx, b * j / ny});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int p = id(i, j), q = id(i + 1, j), r = id(i + 1, j + 1), s = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({p, q, r});
        mesh.triangles.push_back({p, r, s});
      } else {
        mesh.triangles.push_back({p, q, s});
        mesh.triangles.push_back({q, r, s});
      }
    }
  for (int i = 0; i < nx; ++i) mesh.boundary_loop.push_back(id(i, 0));
  for (int j = 0; j < ny; ++j) mesh.boundary_loop.push_back(id(nx, j));
  for (int i = nx; i > 0; --i) mesh.boundary_loop.push_back(id(i, ny));
  for (int j = ny; j > 0; --j) mesh.boundary_loop.push_back(id(0, j));
  mesh.require_quality();
  return mesh;
}

/// Unit disk from concentric rings k = 0..N (N = ceil(1/h)) of radius k/N
/// carrying 6k vertices; boundary vertices lie on the unit circle.
inline Mesh make_disk_mesh(double h) {
  require(h > 0.0 && h <= 0.5, ErrorCode::InvalidArgument, "disk mesh needs 0 < h <= 0.5");
  const int n = static_cast<int>(std::ceil(1.0 / h - 1e-12));
  Mesh mesh;
  std::vector<int> start(static_cast<std::size_t>(n + 1));
  mesh.vertices.push_back({0.0, 0.0});
  for (int k = 1; k <= n; ++k) {
    start[k] = static_cast<int>(mesh.vertices.size());
    const double rho = static_cast<double>(k) / n;
    for (int j = 0; j < 6 * k; ++j) {
      const double th = 2.0 * std::numbers::pi * j / (6.0 * k);
      mesh.vertices.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
  }
  for (int j = 0; j < 6; ++j) mesh.triangles.push_back({0, start[1] + j, start[1] + (j + 1) % 6});
  for (int k = 2; k <= n; ++k) {
    // Merge the two rings by angle; ring k-1 has 6(k-1) vertices, ring k has 6k.
    const int ni = 6 * (k - 1), no = 6 * k;
    int a = 0, b = 0;
    while (a < ni || b < no) {
      const double next_in = (a < ni) ? (a + 1.0) / ni : 2.0;
      const double next_out = (b < no) ? (b + 1.0) / no : 2.0;
      const int ia = start[k - 1] + a % ni, ob = start[k] + b % no;
      if (next_out <= next_in) {
        mesh.triangles.push_back({ia, ob, start[k] + (b + 1) % no});
        ++b;
      } else {
        mesh.triangles.push_back({ia, ob, start[k - 1] + (a + 1) % ni});
        ++a;
      }
    }
  }
  for (auto& t : mesh.triangles)
    if (signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < 0.0) std::swap(t[1], t[2]);
  for (int j = 0; j < 6 * n; ++j) mesh.boundary_loop.push_back(start[n] + j);
  mesh.require_quality();
  return mesh;
}

enum class CutoffProfile { Smoothstep, Smooth };

/// chi(rho): 0 for rho <= 0.25, 1 for rho >= 0.5, monotone in between.
/// Smoothstep is the C^2 quintic; Smooth is the C^infinity exp-ratio.
inline double cutoff(double rho, CutoffProfile profile) {
  if (rho <= 0.25) return 0.0;
  if (rho >= 0.5) return 1.0;
  const double s = (rho - 0.25) / 0.25;
  if (profile == CutoffProfile::Smoothstep) return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

/// Y_k(theta) = cos(k theta) / sqrt(pi).
inline double harmonic_2d(int k, double theta) { return std::cos(k * theta) / std::sqrt(std::numbers::pi); }

/// Maps a reference mesh by x -> x + t chi(|x|) Y_k(theta) x / |x|, so the unit
/// circle goes to r(theta) = 1 + t Y_k(theta).
inline Mesh perturb_disk_mesh(const Mesh& reference, int k, double t, CutoffProfile profile = CutoffProfile::Smoothstep) {
  Mesh mesh = reference;
  for (auto& x : mesh.vertices) {
    const double rho = std::hypot(x[0], x[1]);
    const double c = cutoff(rho, profile);
    if (c == 0.0) continue;
    const double th = std::atan2(x[1], x[0]);
    const double s = t * c * harmonic_2d(k, th) / rho;
    x[0] += s * x[0];
    x[1] += s * x[1];
  }
  mesh.require_quality();
  return mesh;
}

inline Mesh make_perturbed_disk_mesh(int k, double t, double h, CutoffProfile profile = CutoffProfile::Smoothstep) {
  require(k >= 0, ErrorCode::InvalidArgument, "harmonic degree must be >= 0");
  const int n = static_cast<int>(std::ceil(1.0 / h - 1e-12));
  require(k == 0 || 6 * n >= 8 * k, ErrorCode::InvalidArgument, "boundary resolution below 8 vertices per oscillation");
  return perturb_disk_mesh(make_disk_mesh(h), k, t, profile);
}

/// Red refinement: every triangle split into four through edge midpoints.
/// Boundary midpoints are inserted into the loop, so the domain is unchanged.
inline Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back({0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                            0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1])});
    mid.emplace(key, id);
    return id;
  };
  for (const auto& t : mesh.triangles) {
    const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  const std::size_t nb = mesh.boundary_loop.size();
  for (std::size_t p = 0; p < nb; ++p) {
    out.boundary_loop.push_back(mesh.boundary_loop[p]);
    out.boundary_loop.push_back(midpoint(mesh.boundary_loop[p], mesh.boundary_loop[(p + 1) % nb]));
  }
  return out;
}

// Text format: "VERTICES n", n lines "x y"; "TRIANGLES n", n lines "i j k";
// "BOUNDARY n", n lines with one index each. Coordinates use 17 significant
// digits.

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[64];
  os << "VERTICES " << mesh.vertices.size() << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v[0], v[1]);
    os << buf;
  }
  os << "TRIANGLES " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "BOUNDARY " << mesh.boundary_loop.size() << '\n';
  for (int b : mesh.boundary_loop) os << b << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  auto header = [&](const char* name) {
    std::string word;
    long long n = -1;
    require(static_cast<bool>(is >> word >> n) && word == name && n >= 0, ErrorCode::IoError,
            std::string("expected section ") + name);
    return static_cast<std::size_t>(n);
  };
  Mesh mesh;
  std::string a, b, c;
  mesh.vertices.resize(header("VERTICES"));
  for (auto& v : mesh.vertices) {
    require(static_cast<bool>(is >> a >> b), ErrorCode::IoError, "truncated VERTICES section");
    v = {parse_double(a), parse_double(b)};
  }
  mesh.triangles.resize(header("TRIANGLES"));
  for (auto& t : mesh.triangles) {
    require(static_cast<bool>(is >> a >> b >> c), ErrorCode::IoError, "truncated TRIANGLES section");
    t = {static_cast<int>(parse_int(a)), static_cast<int>(parse_int(b)), static_cast<int>(parse_int(c))};
  }
  mesh.boundary_loop.resize(header("BOUNDARY"));
  for (auto& v : mesh.boundary_loop) {
    require(static_cast<bool>(is >> a), ErrorCode::IoError, "truncated BOUNDARY section");
    v = static_cast<int>(parse_int(a));
  }
  mesh.validate();
  return mesh;
}

struct CoupledOperator {
  SparseSym A;
  SparseSym M;
  Index bulk_dofs = 0;     // bulk DOF of vertex i is i
  Index surface_dofs = 0;  // surface DOF of boundary_loop[p] is bulk_dofs + p
  double area = 0.0;
  double perimeter = 0.0;
  double c_i = 0.0;
  double c_b = 0.0;

  Index size() const { return bulk_dofs + surface_dofs; }
};

/// Pencil (A, M) for |grad u|^2 + c_i u^2 + |v'|^2 + (u - v)^2 - c_b v^2 over
/// u^2 + v^2, integrated exactly on P1 elements.
inline CoupledOperator assemble(const Mesh& mesh, double c_i, double c_b) {
  const Index nv = static_cast<Index>(mesh.vertices.size());
  const Index nb = static_cast<Index>(mesh.boundary_loop.size());
  require(nb >= 3, ErrorCode::InvalidArgument, "mesh has no boundary loop");
  std::vector<Triplet> ta, tm;
  ta.reserve(mesh.triangles.size() * 6 + static_cast<std::size_t>(nb) * 9);
  tm.reserve(mesh.triangles.size() * 6 + static_cast<std::size_t>(nb) * 3);

  CoupledOperator op;
  for (const auto& t : mesh.triangles) {
    const Point &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    const double area = signed_area(p0, p1, p2);
    require(area > 0.0, ErrorCode::InvalidArgument, "triangle is degenerate or clockwise");
    op.area += area;
    // Gradients of the barycentric coordinates times 2 * area.
    const double gx[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double gy[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        const double stiff = (gx[a] * gx[b] + gy[a] * gy[b]) / (4.0 * area);
        const double mass = area / 12.0 * (a == b ? 2.0 : 1.0);
        ta.push_back({t[a], t[b], stiff + c_i * mass});
        tm.push_back({t[a], t[b], mass});
      }
  }
  const auto lengths = mesh.boundary_edge_lengths();
  for (Index p = 0; p < nb; ++p) {
    const Index q = (p + 1) % nb;
    const double len = lengths[static_cast<std::size_t>(p)];
    op.perimeter += len;
    const Index ua = mesh.boundary_loop[p], ub = mesh.boundary_loop[q];
    const Index va = nv + p, vb = nv + q;
    const double md = len / 3.0, mo = len / 6.0;  // edge mass matrix entries
    // Surface stiffness and -c_b mass.
    ta.push_back({va, va, 1.0 / len - c_b * md});
    ta.push_back({vb, vb, 1.0 / len - c_b * md});
    ta.push_back({va, vb, -1.0 / len - c_b * mo});
    // Exchange (u - v)^2 on the edge.
    ta.push_back({ua, ua, md});
    ta.push_back({ub, ub, md});
    ta.push_back({ua, ub, mo});
    ta.push_back({va, va, md});
    ta.push_back({vb, vb, md});
    ta.push_back({va, vb, mo});
    ta.push_back({ua, va, -md});
    ta.push_back({ub, vb, -md});
    ta.push_back({ua, vb, -mo});
    ta.push_back({ub, va, -mo});
    tm.push_back({va, va, md});
    tm.push_back({vb, vb, md});
    tm.push_back({va, vb, mo});
  }
  op.A = SparseSym::from_triplets(nv + nb, ta);
  op.M = SparseSym::from_triplets(nv + nb, tm);
  op.bulk_dofs = nv;
  op.surface_dofs = nb;
  op.c_i = c_i;
  op.c_b = c_b;
  return op;
}

struct FemEigen {
  double lambda = 0.0;
  Vector coords;  // bulk DOFs then surface DOFs, positive orientation
  double area = 0.0;
  double perimeter = 0.0;
  double min_coord = 0.0;
};

inline FemEigen lambda_fem(const CoupledOperator& op, double tol = 1e-10) {
  EigenOptions opts;
  opts.tol = tol;
  const double shift = std::min(op.c_i, -op.c_b) - 1.0;
  auto pair = smallest_generalized_eigenpair(op.A, op.M, shift, opts);
  if (pair.coords.sum() < 0.0) pair.coords = -pair.coords;
  FemEigen out;
  out.lambda = pair.value;
  out.min_coord = pair.coords.minCoeff();
  out.coords = std::move(pair.coords);
  out.area = op.area;
  out.perimeter = op.perimeter;
  return out;
}

inline FemEigen lambda_fem(const Mesh& mesh, double c_i, double c_b, double tol = 1e-10) {
  return lambda_fem(assemble(mesh, c_i, c_b), tol);
}

struct NonexistenceRow {
  double aspect = 1.0;
  double area = 0.0;
  double perimeter = 0.0;
  double lambda_h = 0.0;
  double upper_bound = 0.0;  // constants in the Rayleigh quotient
  bool above_floor = false;  // lambda_h > -c_b
  bool below_bound = false;  // lambda_h <= upper_bound + 1e-2
};

/// Rectangles of area pi with sides sqrt(pi aspect) x sqrt(pi / aspect),
/// meshed with h = min(h_max, short side / 8).
inline std::vector<NonexistenceRow> nonexistence_scan(double c_i, double c_b, const std::vector<double>& aspects,
                                                      double h_max = 0.05) {
  require(-c_b < c_i, ErrorCode::InvalidArgument, "nonexistence scan needs -c_b < c_i");
  for (double a : aspects) require(a >= 1.0, ErrorCode::InvalidArgument, "aspect ratios must be >= 1");
  return parallel_map(aspects.size(), [&](std::size_t i) {
    NonexistenceRow row;
    row.aspect = aspects[i];
    const double a = std::sqrt(std::numbers::pi * row.aspect);
    const double b = std::sqrt(std::numbers::pi / row.aspect);
    const Mesh mesh = make_rectangle_mesh(a, b, std::min(h_max, b / 8.0));
    const auto eig = lambda_fem(mesh, c_i, c_b);
    row.area = eig.area;
    row.perimeter = eig.perimeter;
    row.lambda_h = eig.lambda;
    row.upper_bound = (c_i * row.area - c_b * row.perimeter) / (row.area + row.perimeter);
    row.above_floor = row.lambda_h > -c_b;
    row.below_bound = row.lambda_h <= row.upper_bound + 1e-2;
    return row;
  });
}

struct HessianFd {
  double value = 0.0;  // [L(t) + L(-t) - 2 L(0)] / t^2
  double l_plus = 0.0;
  double l_minus = 0.0;
  double l_zero = 0.0;
};

/// Second difference of L = lambda_h - mu * area along r = 1 + t Y_k(theta),
/// with all three domains mapped from one reference disk mesh.
inline HessianFd hessian_fd(int k, double c_i, double c_b, double t, double h, double mu,
                            CutoffProfile profile = CutoffProfile::Smoothstep) {
  require(t > 0.0, ErrorCode::InvalidArgument, "step t must be positive");
  const Mesh reference = make_disk_mesh(h);
  const int n = static_cast<int>(reference.boundary_size());
  require(8 * k <= n, ErrorCode::InvalidArgument, "boundary resolution below 8 vertices per oscillation");
  const double steps[3] = {t, -t, 0.0};
  const auto values = parallel_map(3, [&](std::size_t i) {
    const Mesh mesh = steps[i] == 0.0 ? reference : perturb_disk_mesh(reference, k, steps[i], profile);
    const auto eig = lambda_fem(mesh, c_i, c_b);
    return eig.lambda - mu * eig.area;
  });
  HessianFd out;
  out.l_plus = values[0];
  out.l_minus = values[1];
  out.l_zero = values[2];
  out.value = (values[0] + values[1] - 2.0 * values[2]) / (t * t);
  return out;
}

}  // namespace bulksurf
