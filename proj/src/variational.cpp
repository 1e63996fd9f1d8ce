#include "pspin/variational.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pspin/analytics.hpp"
#include "pspin/complexity.hpp"
#include "pspin/covariance.hpp"
#include "pspin/numerics.hpp"
#include "pspin/pair_rate.hpp"

namespace pspin {

namespace {

constexpr double kSnap = 1e-12;

double log_volume_factor(int p, double r) {
  return 0.5 * std::log((1.0 - r * r) / (1.0 - ipow(r, 2 * p - 2)));
}

PsiBranch branch_of(const RegimeClass& rc) {
  if (rc.boundary) return PsiBranch::Boundary;
  return rc.regime == PairRegime::Coupled ? PsiBranch::Parallel
                                          : PsiBranch::Perp;
}

double psi_value(const ModelParams& params, double r, double u1, double u2,
                 PsiBranch* branch) {
  const int p = params.p;
  const double g = gamma_p(p);
  const double ub1 = g * std::abs(u1), ub2 = g * std::abs(u2);
  const QuadForms qf = quad_forms(p, r, u1, u2);
  double val = 1.0 + std::log(p - 1.0) + log_volume_factor(p, r) +
               semicircle_log_potential(ub1) + semicircle_log_potential(ub2) -
               qf.H;
  const RegimeClass rc = classify_regime(p, r, std::max(ub1, 2.0),
                                         std::max(ub2, 2.0));
  if (params.ell >= 1) {
    const PairRateValue pr =
        pair_rate(p, r, params.ell, std::max(ub1, 2.0), std::max(ub2, 2.0));
    val -= pr.value.value;
  }
  if (branch) *branch = branch_of(rc);
  return val;
}

}  // namespace

PsiEvaluation bounding_psi(const ModelParams& params, double r, double u1,
                           double u2) {
  validate(params);
  require(std::abs(r) < 1.0, "overlap r must satisfy |r| < 1");
  const double e_inf = threshold_E_inf(params.p);
  require(u1 <= -e_inf + kSnap && u2 <= -e_inf + kSnap,
          "energies must lie below -E_inf(p)");
  PsiEvaluation ev;
  ev.r = r;
  ev.u1 = u1;
  ev.u2 = u2;
  ev.value = psi_value(params, r, u1, u2, &ev.branch);
  return ev;
}

PsiEvaluation psi_diagonal_extended(const ModelParams& params, double r,
                                    double u) {
  validate(params);
  require(std::abs(r) <= 1.0, "diagonal extension requires |r| <= 1");
  const int p = params.p;
  const double e_inf = threshold_E_inf(p);
  require(u <= -e_inf + kSnap, "energy must lie below -E_inf(p)");
  if (std::abs(r) < 1.0) return bounding_psi(params, r, u, u);
  const double ub = gamma_p(p) * std::abs(u);
  PsiEvaluation ev;
  ev.r = r;
  ev.u1 = ev.u2 = u;
  ev.branch = PsiBranch::ExtensionEndpoint;
  ev.value = 1.0 + 0.5 * std::log(p - 1.0) +
             2.0 * semicircle_log_potential(ub) -
             params.ell * rate_I1_closed(std::max(ub, 2.0)) -
             (3.0 * p - 2.0) / (4.0 * (p - 1.0)) * u * u;
  return ev;
}

PsiOpt optimize_psi(const ModelParams& params, double r_lo, double r_hi,
                    double u_lo, double u_hi) {
  validate(params);
  require(r_lo <= r_hi && r_lo > -1.0 && r_hi < 1.0,
          "overlap box must lie inside (-1,1)");
  const double e_inf = threshold_E_inf(params.p);
  const double e_ell = threshold_E_ell(params);
  require(u_lo <= u_hi, "energy box is empty");
  require(u_lo > -e_ell && u_hi < -e_inf,
          "energy box must lie inside (-E_ell, -E_inf)");

  const int p = params.p;
  const int ell = params.ell;
  const double g = gamma_p(p);
  const int nu = (u_hi > u_lo) ? 201 : 1;
  const int nr = (r_hi > r_lo) ? 201 : 1;

  std::vector<double> us(nu), ub(nu), om(nu), i1(nu), vv(nu);
  for (int i = 0; i < nu; ++i) {
    us[i] = (nu == 1) ? u_lo : u_lo + (u_hi - u_lo) * i / (nu - 1.0);
    ub[i] = std::max(g * std::abs(us[i]), 2.0);
    om[i] = semicircle_log_potential(ub[i]);
    i1[i] = rate_I1_closed(ub[i]);
    vv[i] = v_map(ub[i]);
  }
  const double c0 = 1.0 + std::log(p - 1.0);

  struct Best {
    double val = -1e300;
    int jr = 0, ia = 0, ib = 0;
  };
  std::vector<Best> best_r(nr);
  std::vector<double> rs(nr);
  for (int j = 0; j < nr; ++j)
    rs[j] = (nr == 1) ? r_lo : r_lo + (r_hi - r_lo) * j / (nr - 1.0);

#ifdef PSPIN_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int j = 0; j < nr; ++j) {
    const double r = rs[j];
    const CovarianceBundle cb = covariance_bundle(p, r, -1.0, -1.0);
    const double logG = log_volume_factor(p, r);
    const double s = ipow(std::abs(r), p - 2);
    const double logs_half = (s > 0.0) ? 0.5 * std::log(s) : 0.0;
    const double ds = 1.0 - s * s;
    const double cq = (1.0 + s * s) / (8.0 * ds);
    const double cx = s / (2.0 * ds);
    Best loc;
    for (int ia = 0; ia < nu; ++ia) {
      for (int ib = ia; ib < nu; ++ib) {
        const double sum = us[ia] + us[ib], dif = us[ia] - us[ib];
        const double H = sum * sum / (4.0 * cb.sigma1) +
                         dif * dif / (4.0 * cb.sigma2);
        double rate = 0.0;
        if (ell >= 1) {
          if (s > 0.0 && s * vv[ia] * vv[ib] > 1.0) {
            rate = ell * (0.5 * (i1[ia] + i1[ib]) + logs_half +
                          cq * (ub[ia] * ub[ia] + ub[ib] * ub[ib]) -
                          cx * ub[ia] * ub[ib]);
          } else {
            rate = ell * (i1[ia] + i1[ib]);
          }
        }
        const double val = c0 + logG + om[ia] + om[ib] - H - rate;
        if (val > loc.val) loc = {val, j, ia, ib};
      }
    }
    best_r[j] = loc;
  }
  Best best;
  for (int j = 0; j < nr; ++j)
    if (best_r[j].val > best.val) best = best_r[j];

  auto eval = [&](double r, double ua, double ubv) {
    return psi_value(params, r, ua, ubv, nullptr);
  };
  double br = rs[best.jr], b1 = us[best.ia], b2 = us[best.ib];
  double bval = best.val;
  const double hr = (nr > 1) ? (r_hi - r_lo) / (nr - 1.0) : 0.0;
  const double hu = (nu > 1) ? (u_hi - u_lo) / (nu - 1.0) : 0.0;
  int budget = 2000;
  auto refine_coord = [&](double* coord, double lo, double hi, int which) {
    double a = std::max(lo, *coord - ((which == 0) ? hr : hu));
    double b = std::min(hi, *coord + ((which == 0) ? hr : hu));
    if (!(b > a)) return;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    auto at = [&](double t) {
      const double r = (which == 0) ? t : br;
      const double ua = (which == 1) ? t : b1;
      const double ubv = (which == 2) ? t : b2;
      --budget;
      return eval(r, ua, ubv);
    };
    double f1 = at(x1), f2 = at(x2);
    while (b - a > 1e-9 && budget > 0) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = at(x1);
      }
    }
    const double t = 0.5 * (a + b);
    const double ft = at(t);
    if (ft > bval) {
      bval = ft;
      *coord = t;
    }
  };
  for (int round = 0; round < 3 && budget > 0; ++round) {
    if (nr > 1) refine_coord(&br, r_lo, r_hi, 0);
    if (nu > 1) refine_coord(&b1, u_lo, u_hi, 1);
    if (nu > 1) refine_coord(&b2, u_lo, u_hi, 2);
  }
  PsiOpt out;
  out.r = br;
  out.u1 = b1;
  out.u2 = b2;
  out.value = bval;
  return out;
}

IdentityReport identity_suite(const ModelParams& params) {
  validate(params);
  const int p = params.p;
  const double g = gamma_p(p);
  const double e_inf = threshold_E_inf(p);
  const double e_ell = threshold_E_ell(params);
  IdentityReport rep;
  auto push = [&](const std::string& name, double resid, double tol) {
    rep.entries.push_back({name, resid, resid <= tol});
  };

  const int n = 80;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = -3.0 + ((-e_inf - 1e-3) - (-3.0)) * i / (n - 1.0);

  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0, r5 = 0.0;
  for (double u : grid) {
    const double psi0 = bounding_psi(params, 0.0, u, u).value;
    r1 = std::max(r1, std::abs(psi0 - 2.0 * sigma_ell(params, u)));

    const double psi1 = psi_diagonal_extended(params, 1.0, u).value;
    const double ub = g * std::abs(u);
    r2 = std::max(r2, std::abs((psi1 - psi0) -
                               (-sigma_ell(params, u) - rate_I1_closed(ub))));
    ModelParams up = params;
    up.ell += 1;
    r3 = std::max(r3, std::abs(psi1 - sigma_ell(up, u)));

    if (u <= -e_ell) {
      r4 = std::max(r4, psi0);
      r4 = std::max(r4, psi1);
    }

    const double v = v_map(std::max(ub, 2.0));
    const double s_star = 1.0 / (v * v);
    if (s_star > 0.0 && s_star < 1.0) {
      const double seam =
          std::abs(coupled_branch(s_star, ub, ub) - 2.0 * rate_I1_closed(ub));
      r5 = std::max(r5, seam);
    }
  }
  push("diagonal_matches_twice_complexity", r1, 1e-10);
  push("endpoint_difference", r2, 1e-10);
  push("endpoint_equals_shifted_complexity", r3, 1e-10);
  push("nonpositive_on_deep_energies", r4, 1e-10);
  push("branch_continuity_at_seam", r5, 1e-9);

  double r6 = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double u1 = grid[i * 4], u2 = grid[j * 4];
      const double ub1 = g * std::abs(u1), ub2 = g * std::abs(u2);
      double expect = 1.0 + std::log(p - 1.0) +
                      semicircle_log_potential(ub1) +
                      semicircle_log_potential(ub2) -
                      0.5 * (u1 * u1 + u2 * u2);
      if (params.ell >= 1)
        expect -= params.ell * (rate_I1_closed(ub1) + rate_I1_closed(ub2));
      r6 = std::max(r6,
                    std::abs(bounding_psi(params, 0.0, u1, u2).value - expect));
    }
  }
  push("decoupled_decomposition", r6, 1e-12);

  rep.all_pass = true;
  for (const auto& e : rep.entries) rep.all_pass = rep.all_pass && e.pass;
  return rep;
}

}  // namespace pspin
