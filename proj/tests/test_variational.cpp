#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "pspin/analytics.hpp"
#include "pspin/complexity.hpp"
#include "pspin/covariance.hpp"
#include "pspin/pair_rate.hpp"
#include "pspin/variational.hpp"

using namespace pspin;

TEST_CASE("identity suite passes for several (p, ell)") {
  for (const ModelParams mp : {ModelParams{3, 1}, ModelParams{3, 0},
                               ModelParams{4, 2}}) {
    const IdentityReport rep = identity_suite(mp);
    REQUIRE(rep.entries.size() == 6);
    CHECK(rep.entries[0].name == "diagonal_matches_twice_complexity");
    CHECK(rep.entries[1].name == "endpoint_difference");
    CHECK(rep.entries[2].name == "endpoint_equals_shifted_complexity");
    CHECK(rep.entries[3].name == "nonpositive_on_deep_energies");
    CHECK(rep.entries[4].name == "branch_continuity_at_seam");
    CHECK(rep.entries[5].name == "decoupled_decomposition");
    for (const auto& e : rep.entries) {
      INFO(e.name, " residual ", e.max_residual);
      CHECK(e.pass);
    }
    CHECK(rep.all_pass);
  }
}

TEST_CASE("zero-overlap diagonal equals twice the complexity") {
  for (int ell : {0, 1, 2}) {
    const ModelParams mp{3, ell};
    for (double u : {-1.64, -1.7, -2.0}) {
      if (u > -threshold_E_inf(3)) continue;
      const PsiEvaluation ev = bounding_psi(mp, 0.0, u, u);
      CHECK(ev.value ==
            doctest::Approx(2.0 * sigma_ell(mp, u)).epsilon(1e-10));
      CHECK(ev.branch == PsiBranch::Perp);
    }
  }
}

TEST_CASE("diagonal extension endpoints") {
  const ModelParams mp{3, 1};
  for (double u : {-1.64, -1.75, -2.2}) {
    const PsiEvaluation pe = psi_diagonal_extended(mp, 1.0, u);
    CHECK(pe.branch == PsiBranch::ExtensionEndpoint);
    // the fully aligned endpoint carries the complexity of the next index
    const ModelParams up{3, 2};
    CHECK(pe.value == doctest::Approx(sigma_ell(up, u)).epsilon(1e-10));
    // antipodal endpoint: same closed form
    const PsiEvaluation pm = psi_diagonal_extended(mp, -1.0, u);
    CHECK(pm.value == doctest::Approx(pe.value).epsilon(1e-14));
    // inside the interval the extension is just the diagonal section
    const PsiEvaluation in = psi_diagonal_extended(mp, 0.3, u);
    const PsiEvaluation bp = bounding_psi(mp, 0.3, u, u);
    CHECK(in.value == bp.value);
    CHECK(in.branch == bp.branch);
  }
}

TEST_CASE("branch labels follow the pair-rate regime") {
  const ModelParams mp{3, 1};
  const double u = -1.64;
  CHECK(bounding_psi(mp, 0.1, u, u).branch == PsiBranch::Perp);
  CHECK(bounding_psi(mp, 0.9, u, u).branch == PsiBranch::Parallel);
}

TEST_CASE("value assembly at an off-diagonal point") {
  const ModelParams mp{3, 1};
  const double r = 0.3, u1 = -1.66, u2 = -1.70;
  const double g = gamma_p(3);
  const double ub1 = g * std::abs(u1), ub2 = g * std::abs(u2);
  const QuadForms qf = quad_forms(3, r, u1, u2);
  double expect = 1.0 + std::log(2.0) +
                  0.5 * std::log((1.0 - r * r) / (1.0 - ipow(r, 4))) +
                  semicircle_log_potential(ub1) +
                  semicircle_log_potential(ub2) - qf.H -
                  pair_rate(3, r, 1, ub1, ub2).value.value;
  CHECK(bounding_psi(mp, r, u1, u2).value ==
        doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("optimizer finds the zero-overlap diagonal maximum") {
  const ModelParams mp{3, 1};
  const double u_star = -1.64;
  const double u_lo = -threshold_E_ell(mp) + 1e-3;
  const PsiOpt opt = optimize_psi(mp, -0.95, 0.95, u_lo, u_star);
  CHECK(std::abs(opt.value - 0.01862589259349018) <= 1e-9);
  CHECK(std::abs(opt.value - 2.0 * sigma_ell(mp, u_star)) <= 1e-9);
  // argmax at r = 0 within one grid cell, energies at the box top
  CHECK(std::abs(opt.r) <= 1.9 / 200.0);
  CHECK(std::abs(opt.u1 - u_star) <= 1e-6);
  CHECK(std::abs(opt.u2 - u_star) <= 1e-6);
}

TEST_CASE("domain guards") {
  const ModelParams mp{3, 1};
  CHECK_THROWS_AS(bounding_psi(mp, 1.0, -1.7, -1.7), domain_error);
  CHECK_THROWS_AS(bounding_psi(mp, 0.0, -1.5, -1.7), domain_error);
  CHECK_THROWS_AS(psi_diagonal_extended(mp, 1.5, -1.7), domain_error);
  CHECK_THROWS_AS(psi_diagonal_extended(mp, 0.0, -1.5), domain_error);
  CHECK_THROWS_AS(optimize_psi(mp, 0.5, -0.5, -1.65, -1.64), domain_error);
  CHECK_THROWS_AS(optimize_psi(mp, -0.95, 0.95, -1.68, -1.64), domain_error);
  CHECK_THROWS_AS(optimize_psi(mp, -0.95, 0.95, -1.65, -1.60), domain_error);
  CHECK_THROWS_AS(bounding_psi(ModelParams{2, 1}, 0.0, -1.7, -1.7),
                  domain_error);
}
