#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pspin/analytics.hpp"
#include "pspin/dyson.hpp"
#include "pspin/ensemble.hpp"
#include "pspin/numerics.hpp"
#include "pspin/pair_rate.hpp"
#include "pspin/rng.hpp"

using namespace pspin;

namespace {

DiscretizedPath barrier_path(int knots) {
  DiscretizedPath p;
  for (int i = 0; i < knots; ++i) {
    const double t = i / (knots - 1.0);
    p.times.push_back(t);
    p.values.push_back(2.0 * std::sqrt(t));
  }
  return p;
}

}  // namespace

TEST_CASE("barrier segment") {
  const BarrierSegment seg = barrier_segment(0.25, 1.25);
  CHECK(seg.t_star == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(seg.rate == doctest::Approx(0.2443528194).epsilon(1e-9));
  CHECK(seg.rate == doctest::Approx(rate_I1_closed(2.5)).epsilon(1e-14));

  // independent quadrature of the tangent-line action
  CHECK(std::abs(seg.rate - oracle::barrier_action(0.25, 1.25)) <= 1e-8);
  CHECK(std::abs(rate_I1_closed(2.2) - oracle::barrier_action(0.16, 0.88)) <=
        1e-8);

  // the discretized path reproduces its own rate through the generic
  // action functional: barrier chords contribute exactly zero and the
  // tangent piece is represented exactly
  CHECK(seg.path.times.front() == 0.0);
  CHECK(seg.path.values.front() == 0.0);
  CHECK(seg.path.times.back() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(seg.path.values.back() == 1.25);
  const ExtReal pr = path_rate(seg.path, 1);
  REQUIRE(pr.is_finite());
  CHECK(pr.value == doctest::Approx(seg.rate).epsilon(1e-8));

  // endpoint on the barrier: pure barrier arc, (numerically) zero action
  const BarrierSegment flat = barrier_segment(0.25, 1.0);
  CHECK(flat.rate == 0.0);
  CHECK(flat.t_star == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(path_rate(flat.path, 1).value <= 1e-12);
}

TEST_CASE("segment classification") {
  // on the barrier: continue along it
  CHECK(classify_segment(2.5, 1.0, 0.25) == SegmentKind::BarrierTouch);
  // high intermediate level: straight line wins outright
  CHECK(classify_segment(2.5, 1.3, 0.25) == SegmentKind::Linear);
  // intermediate band: threshold at w + 1/w with w the larger chord root
  const double y = 1.1, q = 0.25;
  const double w = 0.5 * (y + std::sqrt(y * y - 4.0 * q));
  const double thr = w + 1.0 / w;
  CHECK(classify_segment(thr + 1e-6, y, q) == SegmentKind::Linear);
  CHECK(classify_segment(thr - 1e-6, y, q) == SegmentKind::BarrierTouch);

  CHECK_THROWS_AS(classify_segment(2.5, 0.9, 0.25), domain_error);
  CHECK_THROWS_AS(classify_segment(1.9, 1.25, 0.25), domain_error);
  CHECK_THROWS_AS(classify_segment(2.5, 1.25, 0.0), domain_error);
}

TEST_CASE("linear segment") {
  const LinearSegment seg = linear_segment(3.0, 1.5, 0.25);
  CHECK(seg.alpha == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(seg.beta == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(seg.rate_closed == doctest::Approx(0.40342641).epsilon(1e-8));
  CHECK(seg.rate_quad == doctest::Approx(seg.rate_closed).epsilon(1e-10));
  CHECK(std::abs(seg.rate_closed - oracle::linear_action(3.0, 1.5, 0.25)) <=
        1e-8);

  CHECK(seg.path.values.front() == 1.5);
  CHECK(seg.path.values.back() == 3.0);
  const ExtReal pr = path_rate(seg.path, 1);
  REQUIRE(pr.is_finite());
  CHECK(pr.value == doctest::Approx(seg.rate_closed).epsilon(1e-8));

  CHECK_THROWS_AS(linear_segment(2.0, 1.05, 0.25), domain_error);
}

TEST_CASE("contracted rate and the pair-rate bridge") {
  // two-stage value matches the coupled pair rate under the waypoint map
  // y -> s y, q = s^2 with s the coupling
  const ExtReal frozen = contracted_rate(2.5, 1.25, 0.25, 1);
  REQUIRE(frozen.is_finite());
  CHECK(frozen.value ==
        doctest::Approx(0.41861256249341511).epsilon(1e-12));

  for (int p : {3, 4}) {
    const double r = (p == 3) ? 0.5 : 0.8;
    const double s = ipow(r, p - 2);
    for (double x = 2.05; x <= 3.3; x += 0.25) {
      for (double yl = 2.05; yl <= 3.3; yl += 0.25) {
        const PairRateValue pv = pair_rate(p, r, 1, x, yl);
        const ExtReal cv = contracted_rate(x, s * yl, s * s, 1);
        REQUIRE(pv.value.is_finite());
        REQUIRE(cv.is_finite());
        CHECK(std::abs(pv.value.value - cv.value) <= 1e-8);
      }
    }
  }

  // ell multiplies the whole action
  const ExtReal two = contracted_rate(2.5, 1.25, 0.25, 2);
  CHECK(two.value == doctest::Approx(2.0 * frozen.value).epsilon(1e-14));

  // below the barrier or the bulk edge the rate is the tagged infinity
  CHECK_FALSE(contracted_rate(1.9, 1.25, 0.25, 1).is_finite());
  CHECK_FALSE(contracted_rate(2.5, 0.9, 0.25, 1).is_finite());
  CHECK(contracted_rate(2.5, 0.9, 0.25, 1).value == 0.0);

  CHECK_THROWS_AS(contracted_rate(2.5, 1.25, 0.25, 0), domain_error);
  CHECK_THROWS_AS(contracted_rate(2.5, 1.25, 1.5, 1), domain_error);
}

TEST_CASE("path action functional") {
  // the barrier itself costs nothing (up to interval-endpoint roundoff)
  const DiscretizedPath bp = barrier_path(40);
  CHECK(path_admissible(bp));
  const ExtReal zero = path_rate(bp, 1);
  REQUIRE(zero.is_finite());
  CHECK(zero.value >= 0.0);
  CHECK(zero.value <= 1e-12);

  // one knot below the barrier poisons the whole path
  DiscretizedPath bad = bp;
  bad.values[7] -= 0.01;
  CHECK_FALSE(path_admissible(bad));
  const ExtReal inf = path_rate(bad, 1);
  CHECK(inf.infinite);
  CHECK(inf.value == 0.0);
  CHECK_THROWS_AS(optimal_drift(bad), domain_error);

  // ell scales the action linearly
  DiscretizedPath line;
  line.times = {0.25, 0.5, 0.75, 1.0};
  line.values = {1.5, 2.0, 2.5, 3.0};
  const double one = path_rate(line, 1).value;
  CHECK(path_rate(line, 3).value == doctest::Approx(3.0 * one).epsilon(1e-14));

  // knot drifts agree with the envelope drift on each right interval
  const DiscretizedPath kd = optimal_drift(line);
  REQUIRE(kd.times.size() == line.times.size());
  for (std::size_t j = 0; j + 1 < line.times.size(); ++j)
    CHECK(kd.values[j] ==
          doctest::Approx(envelope_drift(line, line.times[j])).epsilon(1e-14));
  for (double v : optimal_drift(bp).values) CHECK(v == 0.0);

  // grid validation
  DiscretizedPath mism;
  mism.times = {0.0, 0.5};
  mism.values = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(path_rate(mism, 1), domain_error);
  DiscretizedPath dec;
  dec.times = {0.0, 0.6, 0.4};
  dec.values = {0.0, 1.8, 1.6};
  CHECK_THROWS_AS(path_rate(dec, 1), domain_error);
  DiscretizedPath seed;
  seed.times = {0.0, 0.5};
  seed.values = {0.3, 1.5};
  CHECK_THROWS_AS(path_rate(seed, 1), domain_error);
  CHECK_THROWS_AS(path_rate(line, 0), domain_error);
  CHECK_THROWS_AS(envelope_drift(line, 0.1), domain_error);
}

TEST_CASE("free knot minimization approaches the two-stage value") {
  // linear-regime triple
  {
    const double x = 3.0, y = 1.5, q = 0.25;
    const double target = contracted_rate(x, y, q, 1).value;
    const oracle::PathMin pm = oracle::minimize_path(x, y, q);
    CHECK(pm.value >= target - 1e-6);
    CHECK(pm.value <= target + 2e-2);
  }
  // barrier-touch triple
  {
    const double x = 2.1, y = 1.05, q = 0.25;
    REQUIRE(classify_segment(x, y, q) == SegmentKind::BarrierTouch);
    const double target = contracted_rate(x, y, q, 1).value;
    CHECK(target ==
          doctest::Approx(rate_I1_closed(2.1) + rate_I1_closed(2.1))
              .epsilon(1e-12));
    const oracle::PathMin pm = oracle::minimize_path(x, y, q);
    CHECK(pm.value >= target - 1e-6);
    CHECK(pm.value <= target + 2e-2);
  }
}

TEST_CASE("eigenvalue path simulation") {
  const int n = 10;
  const std::vector<double> grid = {0.1, 0.4, 0.7, 1.0};
  Rng rng(777, 0, 0);
  const auto rows = dyson_simulate(n, grid, rng);
  REQUIRE(rows.size() == grid.size());
  for (const auto& row : rows) {
    REQUIRE(row.size() == static_cast<std::size_t>(n));
    for (std::size_t i = 0; i + 1 < row.size(); ++i) CHECK(row[i] >= row[i + 1]);
  }
  // same seed, same paths
  Rng rng2(777, 0, 0);
  const auto rows2 = dyson_simulate(n, grid, rng2);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < n; ++i) CHECK(rows[k][i] == rows2[k][i]);

  Rng rng3(777, 0, 0);
  const std::vector<double> bad1 = {0.0, 0.5};
  CHECK_THROWS_AS(dyson_simulate(n, bad1, rng3), domain_error);
  const std::vector<double> bad2 = {0.5, 0.4};
  CHECK_THROWS_AS(dyson_simulate(n, bad2, rng3), domain_error);
}
