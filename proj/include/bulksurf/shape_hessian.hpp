#pragma once

// First-order criticality data and the diagonal second shape derivative of
// the volume-constrained Lagrangian L = lambda - mu Vol at the unit ball.
//
// Along a normal perturbation with spherical-harmonic coefficients h_k, the
// Hessian is diagonal with entries
//   a_k = beta (sigma_k - H) + (gamma / (sigma_k - lambda_tilde) + delta) (p_k(1) + du/dn),
// where p_k is the regular solution of the degree-k radial equation with a
// Robin-type condition at r = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bulksurf/ball_radial.hpp"
#include "bulksurf/error.hpp"
#include "bulksurf/parallel.hpp"

namespace bulksurf {

struct BallCoefficients {
  double coeff_alpha = 0.0;
  double coeff_beta = 0.0;
  double coeff_gamma = 0.0;
  double coeff_delta = 0.0;
  double mu = 0.0;  // Lagrange multiplier of the volume constraint
};

inline BallCoefficients ball_coefficients(const BallEigen& eig) {
  require(std::abs(eig.R - 1.0) < 1e-14, ErrorCode::InvalidArgument, "ball coefficients need the unit ball");
  const double u1 = eig.u_at_R();
  const double dn = eig.du_at_R;
  const double H = eig.H;
  const double lb = eig.lambda_bar;
  const double lt = eig.lambda_tilde;
  const double v = eig.v;

  BallCoefficients c;
  c.coeff_alpha = dn * (-2.0 * (H - 1.0) * dn + u1 * (H - 2.0 * lb));
  c.coeff_beta = -u1 * dn;
  c.coeff_gamma = -2.0 * dn;
  c.coeff_delta = -2.0 * ((H - 1.0) * dn + lb * u1);
  c.mu = -dn * dn - lb * u1 * u1 + H * (u1 * u1 - 2.0 * u1 * v - lt * v * v);
  return c;
}

/// sigma_k = k (k + d - 2), eigenvalue of -Laplace-Beltrami on S^{d-1}.
constexpr double harmonic_eigenvalue(int k, int d) { return static_cast<double>(k) * (k + d - 2); }

struct PkSolution {
  double p_k1 = 0.0;
  double q_k = 0.0;
  std::vector<double> r;
  std::vector<double> p;
};

namespace detail {

inline double guarded_gap(double sigma, double lambda_tilde) {
  const double gap = sigma - lambda_tilde;
  if (std::abs(gap) < 1e-10)
    throw Error(ErrorCode::ResonantBoundary, "sigma_k - lambda_tilde vanishes");
  return gap;
}

// Regular Frobenius solution r^k sum_j a_j r^{2j} of the degree-k equation,
// scaled by r_ref^{-k}; returns value and derivative.
inline void regular_series(int k, int d, double lambda_bar, double r, double r_ref, double& value, double& deriv) {
  if (r == 0.0) {
    value = 0.0;
    deriv = (k == 1) ? 1.0 / r_ref : 0.0;
    return;
  }
  double term = 1.0, sum = 1.0, dsum = 0.0;
  const double r2 = r * r;
  for (int j = 1; j < 400; ++j) {
    term *= -lambda_bar * r2 / (2.0 * j * (2.0 * k + 2.0 * j + d - 2.0));
    sum += term;
    dsum += 2.0 * j * term / r;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  const double scale = std::pow(r / r_ref, k);
  value = scale * sum;
  deriv = scale * (k / r * sum + dsum);
}

}  // namespace detail

/// Solves the degree-k radial problem for p_k on [0, 1] by shooting.
inline PkSolution solve_pk(int k, const BallEigen& eig, int grid_n) {
  require(k >= 1, ErrorCode::InvalidArgument, "degree k must be >= 1");
  require(std::abs(eig.R - 1.0) < 1e-14, ErrorCode::InvalidArgument, "p_k is defined on the unit ball");
  require(grid_n >= 64, ErrorCode::InvalidArgument, "grid_n must be >= 64");
  const int d = eig.d;
  const int n = grid_n;
  const double h = 1.0 / n;
  const double sigma = harmonic_eigenvalue(k, d);
  const double gap = detail::guarded_gap(sigma, eig.lambda_tilde);
  const double dk = 1.0 - 1.0 / gap;
  const double lb = eig.lambda_bar;

  // Series data up to where explicit RK4 is comfortably stable for the
  // r^{-(k+d-2)} companion solution.
  const int j_start = std::min(n, std::max(1, 2 * (2 * k + d)));
  const double r_start = j_start * h;

  PkSolution out;
  out.r.resize(n + 1);
  out.p.resize(n + 1);
  std::vector<double> dp(n + 1);
  for (int j = 0; j <= n; ++j) out.r[j] = j * h;
  for (int j = 0; j <= j_start; ++j) detail::regular_series(k, d, lb, out.r[j], r_start, out.p[j], dp[j]);

  const double dm1 = d - 1.0;
  auto rhs = [&](double r, double y0, double y1, double& f0, double& f1) {
    f0 = y1;
    f1 = -dm1 / r * y1 + (sigma / (r * r) - lb) * y0;
  };
  double y0 = out.p[j_start], y1 = dp[j_start];
  for (int j = j_start; j < n; ++j) {
    const double r = out.r[j];
    double k10, k11, k20, k21, k30, k31, k40, k41;
    rhs(r, y0, y1, k10, k11);
    rhs(r + 0.5 * h, y0 + 0.5 * h * k10, y1 + 0.5 * h * k11, k20, k21);
    rhs(r + 0.5 * h, y0 + 0.5 * h * k20, y1 + 0.5 * h * k21, k30, k31);
    rhs(r + h, y0 + h * k30, y1 + h * k31, k40, k41);
    y0 += h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
    y1 += h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
    if (std::abs(y0) > 1e200) {
      constexpr double shrink = 1e-200;
      y0 *= shrink;
      y1 *= shrink;
      for (int i = 0; i <= j; ++i) out.p[i] *= shrink;
    }
    out.p[j + 1] = y0;
  }

  const double boundary = y1 + dk * y0;
  if (!(std::abs(boundary) >= 1e-12 * (std::abs(y0) + std::abs(y1))))
    throw Error(ErrorCode::ResonantBoundary, "boundary operator is numerically singular for k = " + std::to_string(k));

  const double target = -dk * eig.du_at_R - eig.d2u_at_R;
  const double scale = target / boundary;
  for (auto& x : out.p) x *= scale;
  out.p_k1 = out.p.back();
  out.q_k = (out.p_k1 + eig.du_at_R) / gap;
  return out;
}

struct HessianRow {
  int k = 1;
  double sigma_k = 0.0;
  double d_k = 0.0;
  double p_k1 = 0.0;
  double q_k = 0.0;
  double a_k = 0.0;
};

inline HessianRow hessian_row(int k, const BallEigen& eig, const BallCoefficients& coeffs, int grid_n) {
  const auto pk = solve_pk(k, eig, grid_n);
  HessianRow row;
  row.k = k;
  row.sigma_k = harmonic_eigenvalue(k, eig.d);
  const double gap = detail::guarded_gap(row.sigma_k, eig.lambda_tilde);
  row.d_k = 1.0 - 1.0 / gap;
  row.p_k1 = pk.p_k1;
  row.q_k = pk.q_k;
  row.a_k = coeffs.coeff_beta * (row.sigma_k - eig.H) +
            (coeffs.coeff_gamma / gap + coeffs.coeff_delta) * (row.p_k1 + eig.du_at_R);
  return row;
}

inline HessianRow hessian_row(int k, const BallEigen& eig) {
  return hessian_row(k, eig, ball_coefficients(eig), static_cast<int>(eig.r.size()) - 1);
}

enum class RegimeVerdict { NegativeDirectionFound, CoerciveUpToKmax };
enum class TailStatus { Certified, NotCertified, Unchecked };

inline const char* to_string(RegimeVerdict v) {
  return v == RegimeVerdict::NegativeDirectionFound ? "negative_direction_found" : "coercive_up_to_kmax";
}

inline const char* to_string(TailStatus t) {
  switch (t) {
    case TailStatus::Certified: return "certified";
    case TailStatus::NotCertified: return "not_certified";
    case TailStatus::Unchecked: return "unchecked";
  }
  return "unchecked";
}

struct RegimeScan {
  int d = 2;
  double c_i = 0.0;
  double c_b = 0.0;
  int k_max = 2;
  BallEigen eig;
  BallCoefficients coeffs;
  std::vector<HessianRow> rows;  // k = 1..k_max
  double min_ratio = 0.0;        // min over 2 <= k <= k_max of a_k / (1 + sigma_k)
  int argmin_k = 2;
  RegimeVerdict verdict = RegimeVerdict::CoerciveUpToKmax;
  TailStatus tail = TailStatus::Unchecked;
  bool outside_proven_regime = false;  // d >= 6
};

/// Signs of the diagonal Hessian coefficients for 2 <= k <= k_max.
///
/// The coercivity constant is reported against the W^{1,2}(S) norm of a unit
/// L^2 harmonic, 1 + sigma_k. The tail k > k_max is certified when beta > 0
/// and beta (sigma - H) at k_max + 1 already dominates the largest remainder
/// a_k - beta (sigma_k - H) seen in the scan.
inline RegimeScan regime_scan(int d, double c_i, double c_b, int k_max, int grid_n = 4096) {
  require(k_max >= 2, ErrorCode::InvalidArgument, "k_max must be >= 2");
  RegimeScan scan;
  scan.d = d;
  scan.c_i = c_i;
  scan.c_b = c_b;
  scan.k_max = k_max;
  scan.eig = solve_principal_ball(d, 1.0, c_i, c_b, grid_n);
  scan.coeffs = ball_coefficients(scan.eig);
  const int n = static_cast<int>(scan.eig.r.size()) - 1;
  scan.rows = parallel_map(static_cast<std::size_t>(k_max),
                           [&](std::size_t i) { return hessian_row(static_cast<int>(i) + 1, scan.eig, scan.coeffs, n); });

  scan.min_ratio = std::numeric_limits<double>::infinity();
  double max_remainder = 0.0;
  for (const auto& row : scan.rows) {
    if (row.k < 2) continue;
    const double ratio = row.a_k / (1.0 + row.sigma_k);
    if (ratio < scan.min_ratio) {
      scan.min_ratio = ratio;
      scan.argmin_k = row.k;
    }
    max_remainder = std::max(max_remainder, std::abs(row.a_k - scan.coeffs.coeff_beta * (row.sigma_k - scan.eig.H)));
  }
  scan.verdict = scan.min_ratio < 0.0 ? RegimeVerdict::NegativeDirectionFound : RegimeVerdict::CoerciveUpToKmax;
  if (scan.coeffs.coeff_beta > 0.0) {
    const double lead = scan.coeffs.coeff_beta * (harmonic_eigenvalue(k_max + 1, d) - scan.eig.H);
    scan.tail = lead > max_remainder ? TailStatus::Certified : TailStatus::NotCertified;
  }
  scan.outside_proven_regime = d >= 6;
  return scan;
}

}  // namespace bulksurf
