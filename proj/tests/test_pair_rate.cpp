#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pspin/analytics.hpp"
#include "pspin/numerics.hpp"
#include "pspin/pair_rate.hpp"

using namespace pspin;

namespace {

// coupled/uncoupled seam: y level at which v(x) v(y) = 1/s, when it exists
double boundary_level(double s, double x) {
  const double w = 1.0 / (s * v_map(x));
  if (w < 1.0) return std::nan("");
  return w + 1.0 / w;
}

}  // namespace

TEST_CASE("regime classification") {
  // deep in the uncoupled region at weak coupling
  CHECK(classify_regime(3, 0.1, 2.3, 2.3).regime == PairRegime::Uncoupled);
  // strong coupling pulls moderate levels into the coupled branch
  CHECK(classify_regime(3, 0.9, 2.3, 2.3).regime == PairRegime::Coupled);
  // below the bulk edge nothing is reachable
  CHECK(classify_regime(3, 0.5, 1.9, 2.5).regime == PairRegime::Infinite);

  // seam example with the arithmetic fixed: v(2.5)^2 = 4 forces s = 1/4,
  // which for p = 3 is r = 1/4
  const RegimeClass seam = classify_regime(3, 0.25, 2.5, 2.5);
  CHECK(seam.boundary);

  for (double x = 2.05; x <= 3.5; x += 0.15) {
    const double yb = boundary_level(0.5, x);
    if (!std::isfinite(yb) || yb - 1e-3 <= 2.0) continue;
    CHECK(classify_regime(3, 0.5, x, yb + 1e-3).regime ==
          PairRegime::Coupled);
    CHECK(classify_regime(3, 0.5, x, yb - 1e-3).regime ==
          PairRegime::Uncoupled);
  }
}

TEST_CASE("pair rate: frozen coupled value and uncoupled reduction") {
  const PairRateValue v = pair_rate(3, 0.5, 1, 2.5, 2.5);
  CHECK(v.regime == PairRegime::Coupled);
  REQUIRE(v.value.is_finite());
  CHECK(v.value.value ==
        doctest::Approx(0.41861256249341511).epsilon(1e-13));

  // independent reconstruction of the coupled branch from its pieces
  const double s = 0.5;
  const double direct = 0.5 * (oracle::rate_I1(2.5) + oracle::rate_I1(2.5)) +
                        0.5 * std::log(s) + coupling_quadratic(s, 2.5, 2.5);
  CHECK(v.value.value == doctest::Approx(direct).epsilon(1e-9));
  CHECK(coupled_branch(s, 2.5, 2.5) ==
        doctest::Approx(v.value.value).epsilon(1e-13));

  // zero overlap: sum of one-sided rates
  const PairRateValue u = pair_rate(3, 0.0, 1, 2.5, 2.1);
  REQUIRE(u.value.is_finite());
  CHECK(u.regime == PairRegime::Uncoupled);
  CHECK(u.value.value ==
        doctest::Approx(rate_I1_closed(2.5) + rate_I1_closed(2.1))
            .epsilon(1e-13));

  // the infinite tag, not IEEE inf
  const PairRateValue inf = pair_rate(3, 0.5, 1, 1.95, 2.5);
  CHECK(inf.regime == PairRegime::Infinite);
  CHECK_FALSE(inf.value.is_finite());
}

TEST_CASE("pair rate: ell scaling, symmetry, monotonicity") {
  for (double x : {2.2, 2.8}) {
    for (double y : {2.3, 3.1}) {
      for (double r : {0.2, 0.6}) {
        const double one = pair_rate(3, r, 1, x, y).value.value;
        CHECK(pair_rate(3, r, 2, x, y).value.value ==
              doctest::Approx(2.0 * one).epsilon(1e-13));
        CHECK(pair_rate(3, r, 1, y, x).value.value ==
              doctest::Approx(one).epsilon(1e-13));
      }
    }
  }
  double prev = 0.0;
  for (double x = 2.1; x <= 3.3; x += 0.2) {
    const double cur = pair_rate(3, 0.5, 1, x, 2.4).value.value;
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("branch continuity across the seam") {
  for (int p : {3, 4, 5}) {
    for (double r : {0.2, 0.5, 0.8}) {
      const double s = ipow(std::abs(r), p - 2);
      int tested = 0;
      for (double x = 2.02; x <= 4.0 && tested < 10; x += 0.21) {
        const double yb = boundary_level(s, x);
        if (!std::isfinite(yb) || yb < 2.0) continue;
        const double jc = coupled_branch(s, x, yb);
        const double ju = rate_I1_closed(x) + rate_I1_closed(yb);
        CHECK(std::abs(jc - ju) <= 1e-9);
        ++tested;
      }
      CHECK(tested > 0);
    }
  }
}

TEST_CASE("quadrant minimizer") {
  // frozen: levels (2.05, 3.0) at s = 0.5 pull the first coordinate up
  const RectMin rm = rect_min(3, 0.5, 1, 2.05, 3.0);
  CHECK(rm.arg1 == doctest::Approx(2.072949).epsilon(1e-5));
  CHECK(rm.arg2 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rm.value == doctest::Approx(0.71462733).epsilon(1e-7));
  CHECK(rm.regime == PairRegime::Coupled);

  // never exceeds the corner value, never moves below the corner
  for (double r : {0.3, 0.7}) {
    for (double x : {2.1, 2.6}) {
      for (double y : {2.2, 3.0}) {
        const RectMin m = rect_min(3, r, 1, x, y);
        CHECK(m.arg1 >= x - 1e-12);
        CHECK(m.arg2 >= y - 1e-12);
        CHECK(m.value <=
              pair_rate(3, r, 1, x, y).value.value + 1e-12);
        // grid scan of the quadrant as an oracle for the minimum
        double grid_min = 1e300;
        for (double a = x; a <= x + 1.0; a += 0.01) {
          for (double b = y; b <= y + 1.0; b += 0.01) {
            const PairRateValue pv = pair_rate(3, r, 1, a, b);
            if (pv.value.is_finite() && pv.value.value < grid_min)
              grid_min = pv.value.value;
          }
        }
        CHECK(m.value <= grid_min + 1e-9);
        CHECK(m.value >= grid_min - 5e-4);
      }
    }
  }
}

TEST_CASE("diagonal coupling gap") {
  // the gap peaks at exactly zero where s v(u)^2 = 1 and is negative on
  // both sides of that coupling
  CHECK(diag_gap(3, 0.25, 2.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(diag_gap(3, 0.5, 2.5) < 0.0);
  CHECK(diag_gap(3, 0.1, 2.5) < 0.0);
  for (double r = 0.05; r < 0.99; r += 0.05)
    CHECK(diag_gap(3, r, 2.5) <= 1e-12);
}

TEST_CASE("domain guards") {
  CHECK_THROWS_AS(pair_rate(2, 0.5, 1, 2.5, 2.5), domain_error);
  CHECK_THROWS_AS(pair_rate(3, 1.0, 1, 2.5, 2.5), domain_error);
  CHECK_THROWS_AS(pair_rate(3, 0.5, 0, 2.5, 2.5), domain_error);
  CHECK_THROWS_AS(rect_min(3, 0.5, 1, 1.9, 2.5), domain_error);
}
