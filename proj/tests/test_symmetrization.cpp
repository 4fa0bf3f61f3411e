#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "bulksurf/symmetrization.hpp"

using namespace bulksurf;

namespace {

CircleField circle(std::vector<double> v, double r = 1.0) { return CircleField(r, std::move(v)); }

CircleField random_circle(std::mt19937_64& rng, std::size_t m, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(m);
  for (auto& x : v) x = u(rng);
  return circle(std::move(v));
}

PolarField random_polar(std::mt19937_64& rng, std::size_t rings, std::size_t m) {
  std::vector<CircleField> out;
  for (std::size_t i = 0; i < rings; ++i) {
    auto c = random_circle(rng, m);
    c.radius = (i + 0.5) / rings;
    out.push_back(c);
  }
  return PolarField(std::move(out));
}

// Sort oracle: descending values written at angles ordered by |theta|, the
// +theta sample first.
std::vector<double> sort_oracle(std::vector<double> v) {
  const std::size_t m = v.size();
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<double> out(m);
  std::size_t k = 0;
  out[0] = v[k++];
  for (std::size_t s = 1; s < m / 2; ++s) {
    out[s] = v[k++];
    out[m - s] = v[k++];
  }
  out[m / 2] = v[k];
  return out;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Convex combination with a cyclic shift: doubly stochastic, so it can only
// spread mass and the result is dominated in concentration.
CircleField spread(const CircleField& c, std::size_t shift, double keep) {
  CircleField out = c;
  const std::size_t m = c.m();
  for (std::size_t j = 0; j < m; ++j) out.values[j] = keep * c.values[j] + (1.0 - keep) * c.values[(j + shift) % m];
  return out;
}

PolarField spread(const PolarField& f, std::size_t shift, double keep) {
  PolarField out = f;
  for (auto& ring : out.rings) ring = spread(ring, shift, keep);
  return out;
}

}  // namespace

TEST(CapSymmetrization, SmallExample) {
  EXPECT_EQ(cap_symmetrize_circle(circle({0, 1, 2, 3})).values, (std::vector<double>{3, 2, 0, 1}));
}

TEST(CapSymmetrization, DecreasingSmallExample) {
  EXPECT_EQ(decreasing_cap_symmetrize_circle(circle({0, 1, 2, 3})).values, (std::vector<double>{0, 1, 3, 2}));
}

TEST(CapSymmetrization, LayoutOrder) {
  EXPECT_EQ(cap_layout(8), (std::vector<std::size_t>{0, 1, 7, 2, 6, 3, 5, 4}));
}

TEST(CapSymmetrization, ConstantUnchanged) {
  const auto c = circle(std::vector<double>(16, 0.7));
  EXPECT_EQ(cap_symmetrize_circle(c).values, c.values);
  EXPECT_EQ(decreasing_cap_symmetrize_circle(c).values, c.values);
}

TEST(CapSymmetrization, MatchesSortOracle) {
  std::mt19937_64 rng(11);
  for (std::size_t m : {2u, 4u, 8u, 64u, 130u}) {
    const auto c = random_circle(rng, m);
    EXPECT_EQ(cap_symmetrize_circle(c).values, sort_oracle(c.values));
  }
}

TEST(CapSymmetrization, EquimeasurableIdempotentAndRotationInvariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_circle(rng, 64);
    const auto s = cap_symmetrize_circle(c);
    const auto d = decreasing_cap_symmetrize_circle(c);
    EXPECT_EQ(sorted(s.values), sorted(c.values));
    EXPECT_EQ(sorted(d.values), sorted(c.values));
    EXPECT_EQ(cap_symmetrize_circle(s).values, s.values);
    EXPECT_EQ(decreasing_cap_symmetrize_circle(d).values, d.values);
    auto rotated = c;
    std::rotate(rotated.values.begin(), rotated.values.begin() + trial % 64, rotated.values.end());
    EXPECT_EQ(cap_symmetrize_circle(rotated).values, s.values);
    EXPECT_EQ(decreasing_cap_symmetrize_circle(rotated).values, d.values);
  }
}

TEST(CapSymmetrization, SymmetricAndNonIncreasingInAngle) {
  std::mt19937_64 rng(13);
  const std::size_t m = 32;
  const auto s = cap_symmetrize_circle(random_circle(rng, m)).values;
  for (std::size_t j = 1; j < m / 2; ++j) {
    EXPECT_GE(s[j], s[m - j]);
    EXPECT_GE(s[m - j], s[j + 1]);
  }
}

TEST(CapSymmetrization, ReversalIdentity) {
  std::mt19937_64 rng(14);
  for (std::size_t m : {4u, 16u, 66u}) {
    const auto c = random_circle(rng, m);
    const auto s = cap_symmetrize_circle(c).values;
    const auto d = decreasing_cap_symmetrize_circle(c).values;
    for (std::size_t j = 0; j < m; ++j) EXPECT_EQ(d[j], s[(j + m / 2) % m]);
  }
}

TEST(CapSymmetrization, RejectsNegativeValues) {
  try {
    cap_symmetrize_circle(circle({0.0, -1e-3, 1.0, 2.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeInput);
  }
  EXPECT_THROW(decreasing_cap_symmetrize_circle(circle({0.0, -1.0})), Error);
}

TEST(CapSymmetrization, RejectsOddSampleCount) { EXPECT_THROW(circle({1.0, 2.0, 3.0}), Error); }

TEST(DiskSymmetrization, RadialUnchanged) {
  std::vector<CircleField> rings;
  for (int i = 0; i < 8; ++i) rings.push_back(circle(std::vector<double>(16, 1.0 - i / 8.0), (i + 0.5) / 8.0));
  const PolarField f(rings);
  const auto s = cap_symmetrize_disk(f);
  for (std::size_t i = 0; i < f.ring_count(); ++i) EXPECT_EQ(s.rings[i].values, f.rings[i].values);
}

TEST(DiskSymmetrization, ClippedLinearProfile) {
  const std::size_t m = 64, n = 16;
  std::vector<CircleField> rings;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i + 0.5) / n;
    std::vector<double> v(m);
    // A rotated copy so the symmetrization has real work to do.
    for (std::size_t j = 0; j < m; ++j) v[j] = std::max(0.0, r * std::cos(2.0 * std::numbers::pi * j / m - 1.0));
    rings.push_back(circle(v, r));
  }
  const auto s = cap_symmetrize_disk(PolarField(rings));
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(s.rings[i].values, sort_oracle(rings[i].values));
    EXPECT_EQ(s.rings[i].radius, rings[i].radius);
    // Up to ties the arrangement is the centered profile r cos(theta) clipped.
    std::vector<double> analytic(m);
    for (std::size_t j = 0; j < m; ++j)
      analytic[j] = std::max(0.0, rings[i].radius * std::cos(2.0 * std::numbers::pi * j / m));
    double gap = 0.0;
    for (std::size_t j = 0; j < m; ++j) gap = std::max(gap, std::abs(s.rings[i].values[j] - analytic[j]));
    EXPECT_LE(gap, rings[i].radius * 2.0 * std::numbers::pi / m);
  }
}

TEST(DiskSymmetrization, RingsAreSymmetrizedIndividually) {
  std::mt19937_64 rng(15);
  const auto f = random_polar(rng, 6, 32);
  const auto s = cap_symmetrize_disk(f);
  const auto d = decreasing_cap_symmetrize_disk(f);
  for (std::size_t i = 0; i < f.ring_count(); ++i) {
    EXPECT_EQ(s.rings[i].values, cap_symmetrize_circle(f.rings[i]).values);
    EXPECT_EQ(d.rings[i].values, decreasing_cap_symmetrize_circle(f.rings[i]).values);
  }
}

TEST(Comparison, Reflexive) {
  std::mt19937_64 rng(16);
  const auto f = random_polar(rng, 5, 16);
  const auto rep = compare_concentration(f, f);
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.worst_deficit, 0.0);
}

TEST(Comparison, SymmetrizationIsEquivalent) {
  std::mt19937_64 rng(17);
  const auto f = random_polar(rng, 5, 16);
  const auto fs = cap_symmetrize_disk(f);
  EXPECT_TRUE(compare_concentration(f, fs).holds);
  EXPECT_TRUE(compare_concentration(fs, f).holds);
}

TEST(Comparison, LocalizedBumpIsDetected) {
  std::mt19937_64 rng(18);
  const auto fs = cap_symmetrize_disk(random_polar(rng, 8, 32));
  auto bumped = fs;
  bumped.at(5, 7) += 0.5;
  const auto rep = compare_concentration(bumped, fs);
  EXPECT_FALSE(rep.holds);
  EXPECT_EQ(rep.worst_ring, 5u);
  EXPECT_NEAR(rep.worst_deficit, -0.5, 1e-12);
  EXPECT_TRUE(compare_concentration(fs, bumped).holds);
}

TEST(Comparison, GridMismatch) {
  std::mt19937_64 rng(19);
  const auto a = random_polar(rng, 4, 16);
  const auto b = random_polar(rng, 5, 16);
  const auto c = random_polar(rng, 4, 32);
  auto d = a;
  d.rings[2].radius *= 1.01;
  for (const PolarField* other : {&b, &c, static_cast<const PolarField*>(&d)}) {
    try {
      compare_concentration(a, *other);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
  }
}

TEST(Comparison, TransitiveOnChains) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> keep(0.3, 0.9);
  std::uniform_int_distribution<std::size_t> shift(1, 15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_polar(rng, 4, 16);
    const auto b = spread(c, shift(rng), keep(rng));
    const auto a = spread(b, shift(rng), keep(rng));
    ASSERT_TRUE(compare_concentration(a, b).holds);
    ASSERT_TRUE(compare_concentration(b, c).holds);
    EXPECT_TRUE(compare_concentration(a, c).holds);
  }
}

TEST(Comparison, TransitiveOnRandomTriples) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_polar(rng, 2, 8), b = random_polar(rng, 2, 8), c = random_polar(rng, 2, 8);
    if (compare_concentration(a, b).holds && compare_concentration(b, c).holds)
      EXPECT_TRUE(compare_concentration(a, c).holds);
  }
}

TEST(Rearrangement, ConstantGivesEqualities) {
  const auto f = circle(std::vector<double>(32, 2.0));
  const auto g = circle(std::vector<double>(32, 0.5));
  const auto rep = rearrangement_checks(f, g);
  EXPECT_EQ(rep.lp_max_relative_error, 0.0);
  EXPECT_EQ(rep.hardy_littlewood_slack, 0.0);
  EXPECT_EQ(rep.contraction_slack, 0.0);
  EXPECT_NEAR(rep.polya_szego_slack, 0.0, 1e-12);
  EXPECT_EQ(rep.polya_szego_difference_slack, 0.0);
}

TEST(Rearrangement, RandomTrialsHold) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_circle(rng, 128), g = random_circle(rng, 128);
    const auto rep = rearrangement_checks(f, g);
    EXPECT_LE(rep.lp_max_relative_error, 1e-10);
    EXPECT_GE(rep.hardy_littlewood_slack, -1e-10);
    EXPECT_GE(rep.contraction_slack, -1e-10);
    EXPECT_GE(rep.polya_szego_slack, -1e-9);
    EXPECT_GE(rep.polya_szego_difference_slack, -1e-10);
    EXPECT_TRUE(rep.all_hold(1e-9));
  }
}

TEST(Rearrangement, SpectralEnergyOfSingleMode) {
  // f = cos(3 theta): integral of |f'|^2 is 9 pi.
  std::vector<double> v(64);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::cos(3.0 * 2.0 * std::numbers::pi * j / 64);
  EXPECT_NEAR(circle_dirichlet_energy(v), 9.0 * std::numbers::pi, 1e-12);
}

TEST(Rearrangement, HardyLittlewoodRigidity) {
  std::mt19937_64 rng(23);
  const std::size_t m = 32;
  std::vector<double> gv(m), fv(m);
  for (std::size_t j = 0; j < m; ++j) {
    gv[j] = 1.0 + j;
    fv[j] = 0.5 + 0.25 * j * j;
  }
  const auto g = cap_symmetrize_circle(circle(gv));
  int equal_cases = 0, strict_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto f = circle(fv);
    if (trial % 4 == 0)
      f = cap_symmetrize_circle(f);
    else
      std::shuffle(f.values.begin(), f.values.end(), rng);
    const double slack = rearrangement_checks(f, g).hardy_littlewood_slack;
    if (std::abs(slack) <= 1e-12) {
      EXPECT_EQ(f.values, cap_symmetrize_circle(f).values);
      ++equal_cases;
    } else {
      EXPECT_GT(slack, 0.0);
      ++strict_cases;
    }
  }
  EXPECT_GT(equal_cases, 0);
  EXPECT_GT(strict_cases, 0);
}

TEST(PolarCsv, RoundTripIsExact) {
  std::mt19937_64 rng(24);
  const auto f = random_polar(rng, 3, 8);
  std::stringstream ss;
  write_polar_csv(ss, f);
  const auto g = read_polar_csv(ss);
  ASSERT_EQ(g.ring_count(), f.ring_count());
  for (std::size_t i = 0; i < f.ring_count(); ++i) {
    EXPECT_EQ(g.rings[i].radius, f.rings[i].radius);
    EXPECT_EQ(g.rings[i].values, f.rings[i].values);
  }
}

TEST(PolarCsv, RejectsMalformedInput) {
  std::stringstream bad_header("ring,r,theta,value\n");
  EXPECT_THROW(read_polar_csv(bad_header), Error);
  std::stringstream skipped("ring_index,r,theta_index,value\n0,0.5,0,1\n0,0.5,2,1\n");
  EXPECT_THROW(read_polar_csv(skipped), Error);
}
