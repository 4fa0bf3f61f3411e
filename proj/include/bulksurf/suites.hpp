#pragma once

// Randomized comparison suites on the disk: Talenti trials and the
// symmetrization inequality for the general-coefficient eigenvalue.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "bulksurf/disk_poisson.hpp"
#include "bulksurf/parallel.hpp"
#include "bulksurf/random_fields.hpp"

namespace bulksurf {

struct TalentiTrial {
  int trial = 0;
  ComparisonReport comparison;
  std::vector<NormRecord> norms;
  double integral_u = 0.0;
  double integral_v = 0.0;
  double asymmetry = 0.0;
};

struct TalentiSuite {
  TalentiKind kind = TalentiKind::Robin;
  std::vector<TalentiTrial> trials;
  int violations = 0;
  double worst_deficit = std::numeric_limits<double>::infinity();
  double max_integral_gap = 0.0;  // robin with zero boundary datum only
  double min_l2_gain = std::numeric_limits<double>::infinity();  // over trials with asymmetry >= 0.1
  bool rigidity_holds = true;
};

/// Data ranges: f, g, w in [0, 1]; m1 in [0, 0.5]; m2 in [0.1, 1.1].
/// With boundary_data false the Robin and Dirichlet data w vanish.
inline TalentiSuite talenti_suite(TalentiKind kind, int trials, std::uint64_t seed, const DiskGrid& grid,
                                  double robin_beta, double tol, bool boundary_data) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  TalentiSuite suite;
  suite.kind = kind;
  suite.trials = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t t) {
    auto rng = trial_stream(seed, t);
    TalentiInputs in;
    in.kind = kind;
    in.robin_beta = robin_beta;
    in.tol = tol;
    in.f = random_polar_field(grid, rng, 0.0, 1.0);
    in.w = (boundary_data || kind == TalentiKind::Coupled) ? random_circle_field(grid, rng, 0.0, 1.0)
                                                           : grid.boundary_zeros();
    if (kind == TalentiKind::Coupled) {
      in.m1 = random_polar_field(grid, rng, 0.0, 0.5);
      in.m2 = random_circle_field(grid, rng, 0.1, 1.1);
    }
    const auto rep = talenti_verify(in);
    return TalentiTrial{static_cast<int>(t), rep.comparison, rep.norms, rep.integral_u, rep.integral_v, rep.asymmetry};
  });

  const bool zero_datum = kind == TalentiKind::Robin && !boundary_data;
  for (const auto& tr : suite.trials) {
    if (!tr.comparison.holds) ++suite.violations;
    suite.worst_deficit = std::min(suite.worst_deficit, tr.comparison.worst_deficit);
    if (zero_datum) suite.max_integral_gap = std::max(suite.max_integral_gap, std::abs(tr.integral_u - tr.integral_v));
    if (kind == TalentiKind::Robin && tr.asymmetry >= 0.1) {
      const double gain = tr.norms[1].norm_v - tr.norms[1].norm_u;
      suite.min_l2_gain = std::min(suite.min_l2_gain, gain);
      if (!(gain > 0.0)) suite.rigidity_holds = false;
    }
  }
  return suite;
}

struct FkTrial {
  int trial = 0;
  double lambda = 0.0;
  double lambda_symmetrized = 0.0;
};

struct FkSuite {
  std::vector<FkTrial> trials;
  double min_gap = std::numeric_limits<double>::infinity();  // lambda - lambda_symmetrized
  int violations = 0;
};

/// Lambda(f, g) against Lambda(f^sharp, g^sharp) for f, g uniform in [0, 2].
inline FkSuite fk_suite(int trials, std::uint64_t seed, const DiskGrid& grid, double tol) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  FkSuite suite;
  suite.trials = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t t) {
    auto rng = trial_stream(seed, t);
    const PolarField f = random_polar_field(grid, rng, 0.0, 2.0);
    const CircleField g = random_circle_field(grid, rng, 0.0, 2.0);
    FkTrial tr;
    tr.trial = static_cast<int>(t);
    tr.lambda = lambda_disk_general(f, g).lambda;
    tr.lambda_symmetrized = lambda_disk_general(cap_symmetrize_disk(f), cap_symmetrize_circle(g)).lambda;
    return tr;
  });
  for (const auto& tr : suite.trials) {
    const double gap = tr.lambda - tr.lambda_symmetrized;
    suite.min_gap = std::min(suite.min_gap, gap);
    if (gap < -tol) ++suite.violations;
  }
  return suite;
}

}  // namespace bulksurf
