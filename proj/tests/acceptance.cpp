// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bulksurf/ball_radial.hpp"
#include "bulksurf/fem2d.hpp"
#include "bulksurf/random_fields.hpp"
#include "bulksurf/shape_hessian.hpp"
#include "bulksurf/suites.hpp"
#include "bulksurf/symmetrization.hpp"

using namespace bulksurf;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [fails]");
}

// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome criterion1() {
  Outcome o;
  const double l00 = solve_principal_ball(2, 1.0, 0.0, 0.0, 4096).lambda;
  note(o, std::abs(l00) <= 1e-8, "radial lambda_00 = " + fmt("%.3g", l00));
  std::vector<double> fem;
  for (double h : {0.08, 0.04, 0.02}) fem.push_back(lambda_fem(make_disk_mesh(h), 0.0, 0.0).lambda);
  const double extrapolated = (4.0 * fem[2] - fem[1]) / 3.0;
  note(o, std::abs(extrapolated) <= 1e-4, "FEM Richardson lambda_00 = " + fmt("%.3g", extrapolated));
  double worst = 0.0;
  for (double c : {-2.0, 0.5, 3.0})
    for (int d : {2, 3, 4}) worst = std::max(worst, std::abs(solve_principal_ball(d, 1.0, c, -c, 4096).lambda - c));
  note(o, worst <= 1e-8, "max |lambda_{c,-c} - c| = " + fmt("%.3g", worst));
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> coef(-10.0, 10.0);
  std::vector<std::pair<double, double>> pairs;
  while (pairs.size() < 100) {
    const double ci = coef(rng), cb = coef(rng);
    if (std::abs(ci + cb) >= 0.1) pairs.push_back({ci, cb});
  }
  double min_margin = INFINITY;
  for (int d : {2, 3}) {
    const auto margins = parallel_map(pairs.size(), [&](std::size_t i) {
      const auto [ci, cb] = pairs[i];
      const double l = solve_principal_ball(d, 1.0, ci, cb, 4096).lambda;
      return std::min(l - std::min(ci, -cb), std::max(ci, -cb) - l);
    });
    for (double m : margins) min_margin = std::min(min_margin, m);
  }
  note(o, min_margin > 0.0, "200 cases, min margin " + fmt("%.3g", min_margin));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const std::vector<double> hs = {0.08, 0.04, 0.02};
  for (auto [ci, cb] : {std::pair{1.0, 0.0}, {-3.0, 0.5}}) {
    const double radial = solve_principal_ball(2, 1.0, ci, cb, 4096).lambda;
    std::vector<double> err;
    for (double h : hs) err.push_back(std::abs(lambda_fem(make_disk_mesh(h), ci, cb).lambda - radial));
    const double order = fitted_order(hs, err);
    const std::string tag = "(" + fmt("%g", ci) + "," + fmt("%g", cb) + ")";
    note(o, err.back() <= 1e-2, tag + " |err(0.02)| = " + fmt("%.3g", err.back()));
    note(o, order >= 1.8,
         tag + " order " + fmt("%.3f", order) + " (pairwise " + fmt("%.3f", std::log2(err[0] / err[1])) + ", " +
             fmt("%.3f", std::log2(err[1] / err[2])) + ")");
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const std::vector<double> cis = {-40.0, -10.0, -1.0, 0.5, 3.0};
  const std::vector<double> cbs = {-2.0, -0.5, 0.0, 0.5, 2.0};
  struct Worst {
    double p1 = 0.0, a1 = 0.0, alpha = 0.0;
  };
  std::vector<std::tuple<int, double, double>> cases;
  for (int d : {2, 3, 5})
    for (double ci : cis)
      for (double cb : cbs) cases.emplace_back(d, ci, cb);
  const auto results = parallel_map(cases.size(), [&](std::size_t i) {
    const auto [d, ci, cb] = cases[i];
    const auto e = solve_principal_ball(d, 1.0, ci, cb, 4096);
    const auto c = ball_coefficients(e);
    const auto p1 = solve_pk(1, e, 4096);
    Worst w;
    for (std::size_t j = 0; j < p1.p.size(); ++j) w.p1 = std::max(w.p1, std::abs(p1.p[j] + e.du[j]));
    const double a1 = hessian_row(1, e, c, 4096).a_k, a2 = hessian_row(2, e, c, 4096).a_k;
    w.a1 = std::abs(a1) / std::max(std::abs(a2), 1e-300);
    if (a1 == 0.0) w.a1 = 0.0;
    w.alpha = std::abs(c.coeff_alpha - (-e.H * c.coeff_beta + e.du_at_R * c.coeff_delta)) /
              std::max(1.0, std::abs(c.coeff_alpha));
    return w;
  });
  Worst w;
  for (const auto& r : results) {
    w.p1 = std::max(w.p1, r.p1);
    w.a1 = std::max(w.a1, r.a1);
    w.alpha = std::max(w.alpha, r.alpha);
  }
  note(o, w.p1 <= 1e-6, "max |p_1 + u'| = " + fmt("%.3g", w.p1));
  note(o, w.a1 <= 1e-6, "max |a_1|/|a_2| = " + fmt("%.3g", w.a1));
  note(o, w.alpha <= 1e-12, "alpha identity residual " + fmt("%.3g", w.alpha));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const double h = 0.02;
  for (auto [ci, cb] : {std::pair{-40.0, 0.0}, {1.0, 0.0}}) {
    const auto e = solve_principal_ball(2, 1.0, ci, cb, 4096);
    const auto c = ball_coefficients(e);
    const double a2 = hessian_row(2, e).a_k;
    const std::string tag = "(" + fmt("%g", ci) + "," + fmt("%g", cb) + ")";
    for (int k : {1, 2, 3}) {
      const double ak = hessian_row(k, e).a_k;
      std::vector<double> v;
      for (double t : {0.02, 0.01, 0.005}) v.push_back(hessian_fd(k, ci, cb, t, h, c.mu).value);
      const double order = std::log2(std::abs(v[0] - v[1]) / std::abs(v[1] - v[2]));
      const std::string kt = tag + " k=" + std::to_string(k);
      if (k == 1)
        note(o, std::abs(v[1]) <= 0.05 * std::abs(a2), kt + " |fd|/|a_2| = " + fmt("%.3g", std::abs(v[1] / a2)));
      else
        note(o, std::abs(v[1] - ak) <= 0.05 * std::abs(ak), kt + " rel err " + fmt("%.3g", std::abs(v[1] - ak) / std::abs(ak)));
      note(o, std::abs(order - 2.0) <= 0.3, kt + " t-order " + fmt("%.2f", order));
    }
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto unit = regime_scan(2, 1.0, 0.0, 60);
  note(o, unit.verdict == RegimeVerdict::NegativeDirectionFound,
       "(1,0) d=2 min a_k/(1+sigma_k) = " + fmt("%.3g", unit.min_ratio) + " at k=" + std::to_string(unit.argmin_k));
  for (int d : {2, 3, 4, 5}) {
    const auto s60 = regime_scan(d, -60.0, 0.0, 200);
    const auto s120 = regime_scan(d, -120.0, 0.0, 200);
    const double drift = std::abs(s120.min_ratio - s60.min_ratio) / std::abs(s60.min_ratio);
    note(o, s60.min_ratio > 0.0 && s120.min_ratio > 0.0,
         "d=" + std::to_string(d) + " c=" + fmt("%.4g", s60.min_ratio) + " / " + fmt("%.4g", s120.min_ratio));
    note(o, drift <= 0.2, "d=" + std::to_string(d) + " drift " + fmt("%.3f", drift));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const std::vector<double> list = {-1.0, -5.0, -20.0, -80.0, -200.0};
  for (int d : {2, 3}) {
    try {
      const auto pts = limit_gap_scan(d, list, 4096);
      bool monotone = true;
      for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].gap >= pts[i - 1].gap;
      const double robin = robin_eigenvalue(d, 1.0, 4096);
      const double rel = std::abs(pts.back().gap - robin) / robin;
      note(o, monotone, "d=" + std::to_string(d) + " gaps non-increasing in c_i");
      note(o, rel <= 0.01, "d=" + std::to_string(d) + " |l_-200 - lambda_R|/lambda_R = " + fmt("%.4f", rel));
    } catch (const Error& e) {
      note(o, false, "d=" + std::to_string(d) + " " + e.what());
    }
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto rows = nonexistence_scan(1.0, 0.0, {1.0, 4.0, 16.0, 64.0}, 0.05);
  bool floor = true, bound = true;
  for (const auto& r : rows) {
    floor = floor && r.above_floor;
    bound = bound && r.below_bound;
  }
  note(o, floor, "lambda_h > 0 in every row");
  note(o, bound, "lambda_h <= perimeter bound + 1e-2");
  const double ratio = rows.back().lambda_h / rows.front().lambda_h;
  note(o, ratio <= 0.25,
       "gap ratio aspect 64 / aspect 1 = " + fmt("%.4f", rows.back().lambda_h) + " / " +
           fmt("%.4f", rows.front().lambda_h) + " = " + fmt("%.4f", ratio));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const DiskGrid grid(96, 128);
  const auto robin = talenti_suite(TalentiKind::Robin, 50, 1, grid, 1.0, 1e-8, false);
  note(o, robin.violations == 0,
       "robin 50 trials, violations " + std::to_string(robin.violations) + ", worst " + fmt("%.3g", robin.worst_deficit));
  note(o, robin.max_integral_gap <= 1e-8, "max |int u - int v| = " + fmt("%.3g", robin.max_integral_gap));
  int probed = 0;
  for (const auto& t : robin.trials) probed += t.asymmetry >= 0.1;
  note(o, robin.rigidity_holds && probed > 0,
       "min L2 gain " + fmt("%.3g", robin.min_l2_gain) + " over " + std::to_string(probed) + " asymmetric trials");
  try {
    const auto coupled = talenti_suite(TalentiKind::Coupled, 25, 2, grid, 1.0, 1e-8, true);
    note(o, coupled.violations == 0, "coupled 25 trials, violations " + std::to_string(coupled.violations) +
                                         ", worst " + fmt("%.3g", coupled.worst_deficit));
  } catch (const Error& e) {
    note(o, false, std::string("coupled suite: ") + e.what());
  }
  const auto dirichlet = talenti_suite(TalentiKind::Dirichlet, 25, 3, grid, 1.0, 1e-8, true);
  note(o, dirichlet.violations == 0, "dirichlet 25 trials, violations " + std::to_string(dirichlet.violations) +
                                         ", worst " + fmt("%.3g", dirichlet.worst_deficit));
  return o;
}

Outcome criterion10() {
  Outcome o;
  const DiskGrid grid(32, 128);
  bool equimeasurable = true, idempotent = true;
  double lp = 0.0, hl = INFINITY, contraction = INFINITY, ps = INFINITY;
  for (std::uint64_t t = 0; t < 200; ++t) {
    auto rng = trial_stream(10, t);
    const auto f = random_circle_field(grid, rng, 0.0, 1.0);
    const auto g = random_circle_field(grid, rng, 0.0, 1.0);
    for (const auto* c : {&f, &g}) {
      const auto s = cap_symmetrize_circle(*c);
      const auto d = decreasing_cap_symmetrize_circle(*c);
      auto a = c->values, b = s.values, e = d.values;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      std::sort(e.begin(), e.end());
      equimeasurable = equimeasurable && a == b && a == e;
      idempotent = idempotent && cap_symmetrize_circle(s).values == s.values &&
                   decreasing_cap_symmetrize_circle(d).values == d.values;
    }
    const auto rep = rearrangement_checks(f, g);
    lp = std::max(lp, rep.lp_max_relative_error);
    hl = std::min(hl, rep.hardy_littlewood_slack);
    contraction = std::min(contraction, rep.contraction_slack);
    ps = std::min(ps, rep.polya_szego_slack);
  }
  note(o, equimeasurable, "equimeasurable bit-exact");
  note(o, idempotent, "idempotent");
  note(o, lp <= 1e-12, "L^p error " + fmt("%.3g", lp));
  note(o, hl >= -1e-9, "Hardy-Littlewood slack " + fmt("%.3g", hl));
  note(o, contraction >= -1e-9, "contraction slack " + fmt("%.3g", contraction));
  note(o, ps >= -1e-9, "Polya-Szego slack " + fmt("%.3g", ps));
  return o;
}

Outcome criterion11() {
  Outcome o;
  const auto s = fk_suite(20, 11, DiskGrid(128, 128), 1e-6);
  note(o, s.violations == 0,
       "20 trials, violations " + std::to_string(s.violations) + ", min gap " + fmt("%.4g", s.min_gap));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"trivial eigenvalues", criterion1},
      {"eigenvalue bracket", criterion2},
      {"radial and FEM agree", criterion3},
      {"criticality data", criterion4},
      {"Hessian cross-validation", criterion5},
      {"regime classification", criterion6},
      {"limit gap", criterion7},
      {"non-existence trend", criterion8},
      {"Talenti suites", criterion9},
      {"symmetrization suite", criterion10},
      {"symmetrization lowers the eigenvalue", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
