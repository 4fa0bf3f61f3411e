#pragma once

// Cap symmetrization on circles and on the disk, the concentration
// comparison u1 <= u2 (top-measure integrals on every ring), and numerical
// checks of the classical rearrangement inequalities.
//
// Discrete layout for m samples at theta_j = 2 pi j / m: sorted values are
// placed at angle indices 0, +1, -1, +2, -2, ..., m/2, with +theta taken
// first on ties.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bulksurf/error.hpp"
#include "bulksurf/format.hpp"

namespace bulksurf {

struct CircleField {
  double radius = 1.0;
  std::vector<double> values;  // at theta_j = 2 pi j / m

  CircleField() = default;
  CircleField(double r, std::vector<double> v) : radius(r), values(std::move(v)) { validate(); }

  std::size_t m() const { return values.size(); }

  void validate() const {
    require(m() >= 2 && m() % 2 == 0, ErrorCode::InvalidArgument, "circle sample count must be even and >= 2");
    require(radius > 0.0, ErrorCode::InvalidArgument, "circle radius must be positive");
    for (double x : values) require(std::isfinite(x), ErrorCode::InvalidArgument, "circle values must be finite");
  }
};

struct PolarField {
  std::vector<CircleField> rings;  // radii strictly increasing

  PolarField() = default;
  explicit PolarField(std::vector<CircleField> r) : rings(std::move(r)) { validate(); }

  std::size_t ring_count() const { return rings.size(); }
  std::size_t m() const { return rings.empty() ? 0 : rings.front().m(); }

  double& at(std::size_t ring, std::size_t j) { return rings[ring].values[j]; }
  double at(std::size_t ring, std::size_t j) const { return rings[ring].values[j]; }

  void validate() const {
    require(!rings.empty(), ErrorCode::InvalidArgument, "polar field needs at least one ring");
    for (std::size_t i = 0; i < rings.size(); ++i) {
      rings[i].validate();
      require(rings[i].m() == m(), ErrorCode::InvalidArgument, "all rings must share the sample count");
      if (i > 0)
        require(rings[i].radius > rings[i - 1].radius, ErrorCode::InvalidArgument, "ring radii must increase");
    }
  }

  /// Ring-major flattening, index ring * m + j.
  std::vector<double> flat() const {
    std::vector<double> out;
    out.reserve(ring_count() * m());
    for (const auto& ring : rings) out.insert(out.end(), ring.values.begin(), ring.values.end());
    return out;
  }
};

/// Angle indices in the order they receive values, from the pole outward.
inline std::vector<std::size_t> cap_layout(std::size_t m) {
  std::vector<std::size_t> order;
  order.reserve(m);
  order.push_back(0);
  for (std::size_t s = 1; s < m / 2; ++s) {
    order.push_back(s);
    order.push_back(m - s);
  }
  if (m >= 2) order.push_back(m / 2);
  return order;
}

namespace detail {

inline void require_nonnegative(const CircleField& f) {
  for (double x : f.values)
    require(x >= 0.0, ErrorCode::NegativeInput, "cap symmetrization needs nonnegative values");
}

inline CircleField arrange(const CircleField& f, bool decreasing_from_pole) {
  require_nonnegative(f);
  std::vector<double> sorted = f.values;
  if (decreasing_from_pole)
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
  else
    std::sort(sorted.begin(), sorted.end());
  const auto order = cap_layout(f.m());
  CircleField out;
  out.radius = f.radius;
  out.values.resize(f.m());
  for (std::size_t i = 0; i < order.size(); ++i) out.values[order[i]] = sorted[i];
  return out;
}

}  // namespace detail

/// f^sharp: values non-increasing in |theta|, maximum at theta = 0.
inline CircleField cap_symmetrize_circle(const CircleField& f) { return detail::arrange(f, true); }

/// f_sharp: values non-decreasing in |theta|, minimum at theta = 0.
inline CircleField decreasing_cap_symmetrize_circle(const CircleField& f) { return detail::arrange(f, false); }

inline PolarField cap_symmetrize_disk(const PolarField& f) {
  PolarField out;
  out.rings.reserve(f.ring_count());
  for (const auto& ring : f.rings) out.rings.push_back(cap_symmetrize_circle(ring));
  return out;
}

inline PolarField decreasing_cap_symmetrize_disk(const PolarField& f) {
  PolarField out;
  out.rings.reserve(f.ring_count());
  for (const auto& ring : f.rings) out.rings.push_back(decreasing_cap_symmetrize_circle(ring));
  return out;
}

struct ComparisonReport {
  bool holds = true;
  double worst_deficit = 0.0;  // min over rings and m0 of top_m0(u2) - top_m0(u1)
  std::size_t worst_ring = 0;
  std::size_t worst_cap = 0;  // m0, number of samples in the cap
};

/// Discrete u1 <= u2: on each ring the sum of the m0 largest samples of u1
/// never exceeds that of u2, for m0 = 1..m.
inline ComparisonReport compare_concentration(const PolarField& u1, const PolarField& u2, double tol = 1e-9) {
  require(u1.ring_count() == u2.ring_count() && u1.m() == u2.m(), ErrorCode::GridMismatch,
          "fields live on different grids");
  for (std::size_t i = 0; i < u1.ring_count(); ++i)
    require(u1.rings[i].radius == u2.rings[i].radius, ErrorCode::GridMismatch, "ring radii differ");

  ComparisonReport rep;
  rep.worst_deficit = std::numeric_limits<double>::infinity();
  std::vector<double> a, b;
  for (std::size_t i = 0; i < u1.ring_count(); ++i) {
    a = u1.rings[i].values;
    b = u2.rings[i].values;
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());
    double sa = 0.0, sb = 0.0;
    for (std::size_t m0 = 1; m0 <= a.size(); ++m0) {
      sa += a[m0 - 1];
      sb += b[m0 - 1];
      const double deficit = sb - sa;
      if (deficit < rep.worst_deficit) {
        rep.worst_deficit = deficit;
        rep.worst_ring = i;
        rep.worst_cap = m0;
      }
    }
  }
  rep.holds = rep.worst_deficit >= -tol;
  return rep;
}

/// Dirichlet energy int |df/dtheta|^2 dtheta of the trigonometric
/// interpolant of the samples (Nyquist mode taken as a cosine).
inline double circle_dirichlet_energy(const std::vector<double>& values) {
  const std::size_t m = values.size();
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
  double energy = 0.0;
  for (std::size_t n = 1; n <= m / 2; ++n) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = step * static_cast<double>((n * j) % m);
      re += values[j] * std::cos(a);
      im -= values[j] * std::sin(a);
    }
    re /= static_cast<double>(m);
    im /= static_cast<double>(m);
    const double nn = static_cast<double>(n * n);
    if (2 * n == m)
      energy += std::numbers::pi * nn * re * re;
    else
      energy += 4.0 * std::numbers::pi * nn * (re * re + im * im);
  }
  return energy;
}

/// Nearest-neighbour energy sum (f_{j+1} - f_j)^2 on the cycle.
inline double circle_difference_energy(const std::vector<double>& values) {
  double e = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double d = values[(j + 1) % values.size()] - values[j];
    e += d * d;
  }
  return e;
}

struct RearrangementReport {
  double lp_max_relative_error = 0.0;  // p in {1, 2, 3}
  double hardy_littlewood_slack = 0.0;  // sum f# g# - sum f g
  double contraction_slack = 0.0;       // sum (f-g)^2 - sum (f#-g#)^2
  double polya_szego_slack = 0.0;       // E(f) - E(f#), spectral energy
  double polya_szego_difference_slack = 0.0;  // same with the nearest-neighbour energy

  bool all_hold(double tol) const {
    return lp_max_relative_error <= tol && hardy_littlewood_slack >= -tol && contraction_slack >= -tol &&
           polya_szego_slack >= -tol && polya_szego_difference_slack >= -tol;
  }
};

inline RearrangementReport rearrangement_checks(const CircleField& f, const CircleField& g) {
  require(f.m() == g.m(), ErrorCode::GridMismatch, "circle fields differ in sample count");
  const auto fs = cap_symmetrize_circle(f);
  const auto gs = cap_symmetrize_circle(g);

  RearrangementReport rep;
  for (int p = 1; p <= 3; ++p) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < f.m(); ++j) {
      a += std::pow(std::abs(f.values[j]), p);
      b += std::pow(std::abs(fs.values[j]), p);
    }
    const double rel = std::abs(a - b) / std::max(std::abs(a), std::numeric_limits<double>::min());
    rep.lp_max_relative_error = std::max(rep.lp_max_relative_error, a == 0.0 ? std::abs(b) : rel);
  }
  double fg = 0.0, fsgs = 0.0, diff = 0.0, diffs = 0.0;
  for (std::size_t j = 0; j < f.m(); ++j) {
    fg += f.values[j] * g.values[j];
    fsgs += fs.values[j] * gs.values[j];
    diff += (f.values[j] - g.values[j]) * (f.values[j] - g.values[j]);
    diffs += (fs.values[j] - gs.values[j]) * (fs.values[j] - gs.values[j]);
  }
  rep.hardy_littlewood_slack = fsgs - fg;
  rep.contraction_slack = diff - diffs;
  rep.polya_szego_slack = circle_dirichlet_energy(f.values) - circle_dirichlet_energy(fs.values);
  rep.polya_szego_difference_slack = circle_difference_energy(f.values) - circle_difference_energy(fs.values);
  return rep;
}

// PolarField CSV: header "ring_index,r,theta_index,value", ring-major rows.

inline void write_polar_csv(std::ostream& os, const PolarField& f) {
  os << "ring_index,r,theta_index,value\n";
  for (std::size_t i = 0; i < f.ring_count(); ++i)
    for (std::size_t j = 0; j < f.m(); ++j)
      os << i << ',' << format_double(f.rings[i].radius) << ',' << j << ',' << format_double(f.at(i, j)) << '\n';
}

inline PolarField read_polar_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::IoError, "empty polar CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "ring_index,r,theta_index,value", ErrorCode::IoError, "unexpected polar CSV header");

  std::vector<CircleField> rings;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    require(cols.size() == 4, ErrorCode::IoError, "polar CSV rows need 4 columns");
    const auto ring = static_cast<std::size_t>(parse_int(cols[0]));
    const double r = parse_double(cols[1]);
    const auto j = static_cast<std::size_t>(parse_int(cols[2]));
    const double value = parse_double(cols[3]);
    if (ring == rings.size()) {
      rings.push_back(CircleField{});
      rings.back().radius = r;
    }
    require(ring + 1 == rings.size(), ErrorCode::IoError, "polar CSV rows must be ring-major");
    require(rings.back().radius == r, ErrorCode::IoError, "ring radius changes within a ring");
    require(j == rings.back().values.size(), ErrorCode::IoError, "theta indices must be consecutive");
    rings.back().values.push_back(value);
  }
  return PolarField(std::move(rings));
}

}  // namespace bulksurf
