#pragma once

// Principal eigencouple of the bulk-surface system on a ball by radial
// shooting, and the Robin eigenvalue of the unit ball.
//
// On the ball the surface density v is constant and u is radial, so the
// system reduces to
//   u'' + (d-1)/r u' + (lambda - c_i) u = 0   on (0, R),
//   u'(R) + u(R) = v,   (lambda + c_b - 1) v + u(R) = 0.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bulksurf/error.hpp"
#include "bulksurf/parallel.hpp"

namespace bulksurf {

/// Area of the unit sphere S^{d-1}.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

inline double ball_volume(int d, double radius) {
  return unit_sphere_area(d) * std::pow(radius, d) / d;
}

struct BallEigen {
  int d = 2;
  double R = 1.0;
  double c_i = 0.0;
  double c_b = 0.0;
  double lambda = 0.0;
  double lambda_bar = 0.0;    // lambda - c_i
  double lambda_tilde = 0.0;  // lambda + c_b - 1
  std::vector<double> r;      // r_0 = 0, ..., r_N = R
  std::vector<double> u;
  std::vector<double> du;
  double v = 0.0;
  double du_at_R = 0.0;
  double d2u_at_R = 0.0;
  double H = 0.0;  // (d-1)/R
  double shooting_residual = 0.0;

  double u_at_R() const { return u.back(); }
};

namespace detail {

struct RadialShot {
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
};

/// Regular solution of u'' + (d-1)/r u' + lambda_bar u = 0 on [0, R] with
/// u ~ 1 near the origin, classical RK4 on the uniform grid r_j = j R / n.
inline RadialShot shoot_radial(int d, double radius, double lambda_bar, int n) {
  RadialShot s;
  const double h = radius / n;
  s.r.resize(n + 1);
  s.u.resize(n + 1);
  s.du.resize(n + 1);
  for (int j = 0; j <= n; ++j) s.r[j] = j * h;

  const double dm1 = d - 1.0;
  auto rhs = [&](double r, double y0, double y1, double& f0, double& f1) {
    f0 = y1;
    f1 = -dm1 / r * y1 - lambda_bar * y0;
  };

  double y0 = 1.0;
  double y1 = -lambda_bar * h / d;
  s.u[1] = y0;
  s.du[1] = y1;
  s.u[0] = 1.0 / (1.0 - lambda_bar * h * h / (2.0 * d));
  s.du[0] = 0.0;
  for (int j = 1; j < n; ++j) {
    const double r = s.r[j];
    double k10, k11, k20, k21, k30, k31, k40, k41;
    rhs(r, y0, y1, k10, k11);
    rhs(r + 0.5 * h, y0 + 0.5 * h * k10, y1 + 0.5 * h * k11, k20, k21);
    rhs(r + 0.5 * h, y0 + 0.5 * h * k20, y1 + 0.5 * h * k21, k30, k31);
    rhs(r + h, y0 + h * k30, y1 + h * k31, k40, k41);
    y0 += h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
    y1 += h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
    s.u[j + 1] = y0;
    s.du[j + 1] = y1;
  }
  return s;
}

/// Composite Simpson rule for samples on a uniform grid with an even number of intervals.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size() - 1;
  double acc = f[0] + f[n];
  for (std::size_t j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * f[j];
  return acc * h / 3.0;
}

inline bool all_positive(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double x) { return x > 0.0; });
}

/// Smallest sign change of `fn` on [lo, hi] among sample intervals whose
/// root passes `accept`; bisection to machine precision plus secant polish.
template <class Fn, class Accept>
std::optional<double> smallest_accepted_root(Fn&& fn, Accept&& accept, double lo, double hi, int samples) {
  double a = lo;
  double fa = fn(a);
  for (int i = 1; i <= samples; ++i) {
    const double b = lo + (hi - lo) * i / samples;
    const double fb = fn(b);
    if (fa == 0.0 && accept(a)) return a;
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (x0 + x1);
        if (mid <= x0 || mid >= x1) break;
        const double fm = fn(mid);
        if (fm == 0.0) {
          x0 = x1 = mid;
          break;
        }
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      double root = 0.5 * (x0 + x1);
      // Secant polish, kept inside the final bracket.
      double xa = x0, xb = x1, ya = fn(xa), yb = fn(xb);
      for (int it = 0; it < 3 && ya != yb; ++it) {
        const double xs = xb - yb * (xb - xa) / (yb - ya);
        if (!(xs >= std::min(x0, x1) && xs <= std::max(x0, x1))) break;
        xa = xb;
        ya = yb;
        xb = xs;
        yb = fn(xs);
        if (std::abs(yb) < std::abs(fn(root))) root = xs;
      }
      if (accept(root)) return root;
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

}  // namespace detail

/// Principal eigencouple on the ball of radius R in dimension d, normalized
/// so that int_B u^2 + int_S v^2 = 1.
inline BallEigen solve_principal_ball(int d, double R, double c_i, double c_b, int grid_n) {
  require(d >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
  require(R > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  require(grid_n >= 64, ErrorCode::InvalidArgument, "grid_n must be >= 64");
  const int n = grid_n + (grid_n % 2);

  BallEigen e;
  e.d = d;
  e.R = R;
  e.c_i = c_i;
  e.c_b = c_b;
  e.H = (d - 1.0) / R;
  const double sphere = unit_sphere_area(d) * std::pow(R, d - 1);

  if (c_i == -c_b) {
    // Degenerate bracket: constants are the eigencouple.
    e.lambda = c_i;
    e.lambda_bar = 0.0;
    e.lambda_tilde = c_i + c_b - 1.0;
    const double amp = 1.0 / std::sqrt(ball_volume(d, R) + sphere);
    e.r.resize(n + 1);
    for (int j = 0; j <= n; ++j) e.r[j] = j * R / n;
    e.u.assign(n + 1, amp);
    e.du.assign(n + 1, 0.0);
    e.v = amp;
    e.du_at_R = 0.0;
    e.d2u_at_R = 0.0;
    return e;
  }

  auto residual = [&](const detail::RadialShot& s, double lambda) {
    const double lt = lambda + c_b - 1.0;
    return lt * (s.du.back() + s.u.back()) + s.u.back();
  };
  auto residual_at = [&](double lambda) {
    return residual(detail::shoot_radial(d, R, lambda - c_i, n), lambda);
  };
  auto positive_at = [&](double lambda) {
    const auto s = detail::shoot_radial(d, R, lambda - c_i, n);
    const double v = s.du.back() + s.u.back();
    return detail::all_positive(s.u) && v > 0.0;
  };

  const double lo = std::min(c_i, -c_b);
  const double hi = std::min(std::max(c_i, -c_b), 1.0 - c_b);
  std::optional<double> root;
  for (int samples = 256; samples <= 16384 && !root; samples *= 4)
    root = detail::smallest_accepted_root(residual_at, positive_at, lo, hi, samples);
  if (!root) {
    throw Error(ErrorCode::NoRootInBracket,
                "no positive eigencouple in (" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "); residuals " + std::to_string(residual_at(lo)) + ", " + std::to_string(residual_at(hi)));
  }

  e.lambda = *root;
  e.lambda_bar = e.lambda - c_i;
  e.lambda_tilde = e.lambda + c_b - 1.0;
  auto shot = detail::shoot_radial(d, R, e.lambda_bar, n);
  const double umax = *std::max_element(shot.u.begin(), shot.u.end());
  // Scaled by the magnitude of the terms entering the residual.
  e.shooting_residual = residual(shot, e.lambda) / ((1.0 + std::abs(e.lambda_tilde)) * std::max(1.0, umax));
  double v = shot.du.back() + shot.u.back();
  if (!detail::all_positive(shot.u))
    throw Error(ErrorCode::PositivityViolated, "principal shot changes sign");
  if (!(v > 0.0) || !(e.lambda_tilde < 0.0))
    throw Error(ErrorCode::AssertionBreach, "expected v > 0 and lambda_tilde < 0, got v = " + std::to_string(v) +
                                                ", lambda_tilde = " + std::to_string(e.lambda_tilde));

  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = shot.u[j] * shot.u[j] * std::pow(shot.r[j], d - 1);
  const double norm2 = unit_sphere_area(d) * detail::simpson(w, R / n) + sphere * v * v;
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& x : shot.u) x *= scale;
  for (auto& x : shot.du) x *= scale;
  v *= scale;

  e.r = std::move(shot.r);
  e.u = std::move(shot.u);
  e.du = std::move(shot.du);
  e.v = v;
  e.du_at_R = e.du.back();
  e.d2u_at_R = -e.H * e.du_at_R - e.lambda_bar * e.u.back();
  return e;
}

/// Coupled Rayleigh quotient of the stored radial couple, evaluated with
/// Simpson quadrature on the solver grid.
inline double rayleigh_quotient(const BallEigen& e) {
  const std::size_t n = e.r.size() - 1;
  const double h = e.R / n;
  std::vector<double> grad(n + 1), mass(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = std::pow(e.r[j], e.d - 1);
    grad[j] = e.du[j] * e.du[j] * w;
    mass[j] = e.u[j] * e.u[j] * w;
  }
  const double area = unit_sphere_area(e.d);
  const double sphere = area * std::pow(e.R, e.d - 1);
  const double bulk_grad = area * detail::simpson(grad, h);
  const double bulk_mass = area * detail::simpson(mass, h);
  const double jump = e.u.back() - e.v;
  const double num = bulk_grad + e.c_i * bulk_mass + sphere * (jump * jump - e.c_b * e.v * e.v);
  const double den = bulk_mass + sphere * e.v * e.v;
  return num / den;
}

/// Smallest eigenvalue of -Laplace on the unit ball with du/dn + beta u = 0.
inline double robin_eigenvalue(int d, double robin_beta, int grid_n) {
  require(d >= 2, ErrorCode::InvalidArgument, "dimension must be >= 2");
  require(robin_beta >= 0.0, ErrorCode::InvalidArgument, "robin_beta must be >= 0");
  require(grid_n >= 64, ErrorCode::InvalidArgument, "grid_n must be >= 64");
  if (robin_beta == 0.0) return 0.0;
  const int n = grid_n + (grid_n % 2);

  auto residual_at = [&](double lambda) {
    const auto s = detail::shoot_radial(d, 1.0, lambda, n);
    return s.du.back() + robin_beta * s.u.back();
  };
  auto positive_at = [&](double lambda) { return detail::all_positive(detail::shoot_radial(d, 1.0, lambda, n).u); };

  double upper = 1.0;
  for (int doubling = 0; doubling <= 60; ++doubling, upper *= 2.0) {
    if (residual_at(upper) < 0.0 || !positive_at(upper)) {
      if (auto root = detail::smallest_accepted_root(residual_at, positive_at, 0.0, upper, 256)) return *root;
    }
  }
  throw Error(ErrorCode::BracketFailure, "no sign change of the Robin shooting residual after 60 doublings");
}

struct LimitGapPoint {
  double c_i;
  double gap;  // lambda_{c_i,0} - c_i
};

/// l(c_i) = lambda_{c_i,0} - c_i along a strictly decreasing list of c_i <= -1.
/// The gap is non-increasing as a function of c_i, so the returned sequence
/// is non-decreasing along the list and bounded above by the Robin eigenvalue
/// with robin_beta = 1.
inline std::vector<LimitGapPoint> limit_gap_scan(int d, std::span<const double> c_i_list, int grid_n = 4096) {
  for (std::size_t i = 0; i < c_i_list.size(); ++i) {
    require(c_i_list[i] <= -1.0, ErrorCode::InvalidArgument, "limit_gap_scan needs c_i <= -1");
    if (i > 0)
      require(c_i_list[i] < c_i_list[i - 1], ErrorCode::InvalidArgument, "c_i_list must be strictly decreasing");
  }
  auto out = parallel_map(c_i_list.size(), [&](std::size_t i) {
    const auto e = solve_principal_ball(d, 1.0, c_i_list[i], 0.0, grid_n);
    return LimitGapPoint{c_i_list[i], e.lambda - c_i_list[i]};
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    require(out[i].gap > 0.0, ErrorCode::AssertionBreach, "gap must be positive");
    if (i > 0)
      require(out[i].gap >= out[i - 1].gap - 1e-9, ErrorCode::AssertionBreach,
              "gap must be non-increasing in c_i");
  }
  return out;
}

}  // namespace bulksurf
