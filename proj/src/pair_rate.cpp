#include "pspin/pair_rate.hpp"

#include <algorithm>
#include <cmath>

#include "pspin/analytics.hpp"
#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kBoundaryTol = 1e-9;

double coupling_s(int p, double r) {
  require(p >= 3, "p must be >= 3");
  require(std::abs(r) < 1.0, "overlap r must satisfy |r| < 1");
  return ipow(std::abs(r), p - 2);
}

}  // namespace

double coupling_quadratic(double s, double x, double y) {
  require(s >= 0.0 && s < 1.0, "coupling s must lie in [0,1)");
  const double d = 1.0 - s * s;
  return (1.0 + s * s) * (x * x + y * y) / (8.0 * d) -
         s * x * y / (2.0 * d);
}

double coupled_branch(double s, double x, double y) {
  require(s > 0.0 && s < 1.0, "coupling s must lie in (0,1)");
  return 0.5 * (rate_I1_closed(x) + rate_I1_closed(y)) + 0.5 * std::log(s) +
         coupling_quadratic(s, x, y);
}

RegimeClass classify_regime(int p, double r, double x, double y) {
  const double s = coupling_s(p, r);
  if (x < 2.0 || y < 2.0) return {PairRegime::Infinite, false};
  if (x == 2.0 || y == 2.0 || s == 0.0)
    return {PairRegime::Uncoupled, false};
  const double crit = s * v_map(x) * v_map(y);
  if (std::abs(crit - 1.0) <= kBoundaryTol)
    return {PairRegime::Uncoupled, true};
  if (crit < 1.0) return {PairRegime::Uncoupled, false};
  return {PairRegime::Coupled, false};
}

PairRateValue pair_rate(int p, double r, int ell, double x, double y) {
  require(ell >= 1, "ell must be >= 1");
  const RegimeClass rc = classify_regime(p, r, x, y);
  PairRateValue out;
  out.regime = rc.regime;
  out.boundary = rc.boundary;
  if (rc.regime == PairRegime::Infinite) {
    out.value = ExtReal::inf();
    return out;
  }
  const double s = coupling_s(p, r);
  double base;
  if (rc.regime == PairRegime::Uncoupled)
    base = rate_I1_closed(x) + rate_I1_closed(y);
  else
    base = coupled_branch(s, x, y);
  out.value = ExtReal::finite(ell * base);
  return out;
}

RectMin rect_min(int p, double r, int ell, double u1, double u2) {
  require(ell >= 1, "ell must be >= 1");
  require(u1 > 2.0 && u2 > 2.0, "rect_min requires corner levels > 2");
  const double s = coupling_s(p, r);

  double a1 = u1, a2 = u2;
  if (u1 != u2 && s > 0.0) {
    // With the larger level fixed, the unconstrained stationary point of the
    // coupled branch in the smaller coordinate sits at v = s * v(larger).
    // When that lies below 1 no stationary point exists above the bulk edge
    // and the minimum stays at the corner.
    const bool swap = u1 > u2;
    const double lo = swap ? u2 : u1;
    const double hi = swap ? u1 : u2;
    const double w = s * v_map(hi);
    double opt = lo;
    if (w >= 1.0) {
      const double u_star = w + 1.0 / w;
      opt = std::max(u_star, lo);
    }
    a1 = swap ? hi : opt;
    a2 = swap ? opt : hi;
  }
  const PairRateValue v = pair_rate(p, r, ell, a1, a2);
  RectMin out;
  out.arg1 = a1;
  out.arg2 = a2;
  out.value = v.value.value;
  out.regime = v.regime;
  return out;
}

double diag_gap(int p, double r, double u) {
  require(u >= 2.0, "diag_gap requires u >= 2");
  const double s = coupling_s(p, r);
  require(s > 0.0 && s < 1.0, "diag_gap requires coupling s in (0,1)");
  return 0.5 * std::log(s) + (1.0 - s) / (4.0 * (1.0 + s)) * u * u -
         rate_I1_closed(u);
}

}  // namespace pspin
