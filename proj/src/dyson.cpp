#include "pspin/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pspin/analytics.hpp"
#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kTol = 1e-12;

void validate_path(const DiscretizedPath& path) {
  const auto& t = path.times;
  const auto& v = path.values;
  require(t.size() == v.size(), "path times/values size mismatch");
  require(t.size() >= 2, "path needs at least two knots");
  require(t.front() >= 0.0 && t.back() <= 1.0, "path grid must lie in [0,1]");
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    require(t[i + 1] > t[i], "path grid must be strictly increasing");
  if (t.front() == 0.0)
    require(std::abs(v.front()) <= kTol, "path starting at t=0 must start at 0");
}

double chord_drift(double a, double phi, double s) {
  const double rad = std::max(0.0, phi * phi - 4.0 * s);
  return a - 2.0 / (phi + std::sqrt(rad));
}

// Sub-barrier w-interval of the chord a*w^2 - 2w + b (w = sqrt(s)): the set
// where the chord lies strictly below 2 sqrt(s).
struct WInterval {
  double lo, hi;
  bool empty;
};

WInterval sub_barrier(double a, double b) {
  if (a == 0.0) {
    if (b <= 0.0) return {0.0, std::numeric_limits<double>::infinity(), false};
    return {0.5 * b, std::numeric_limits<double>::infinity(), false};
  }
  const double disc = 1.0 - a * b;
  if (a > 0.0) {
    if (disc <= 0.0) return {0.0, 0.0, true};
    const double sq = std::sqrt(disc);
    return {b / (1.0 + sq), (1.0 + sq) / a, false};
  }
  // a < 0: the chord eventually falls below the barrier on both sides of the
  // super-barrier stretch between the roots (if any).
  if (disc < 0.0) return {-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), false};
  const double sq = std::sqrt(disc);
  double r1 = (1.0 - sq) / a, r2 = (1.0 + sq) / a;
  if (r1 > r2) std::swap(r1, r2);
  // Super-barrier on [r1, r2]; callers intersect with the interval, so we
  // return the two-sided complement via a sentinel handled below.
  return {r1, r2, false};
}

// Integrate k(s)^2 over the super-barrier part of one chord interval
// [t0,t1]. Panels are Chebyshev-graded toward the piece endpoints, where the
// drift can have square-root kinks at barrier crossings.
double chord_action(double a, double b, double t0, double t1) {
  const double w0 = std::sqrt(t0), w1 = std::sqrt(t1);
  // Collect super-barrier pieces in w.
  double pieces[2][2];
  int n_pieces = 0;
  if (a < 0.0) {
    const double disc = 1.0 - a * b;
    if (disc < 0.0) return 0.0;  // fully sub-barrier
    const double sq = std::sqrt(disc);
    double r1 = (1.0 - sq) / a, r2 = (1.0 + sq) / a;
    if (r1 > r2) std::swap(r1, r2);
    const double lo = std::max(w0, r1), hi = std::min(w1, r2);
    if (hi > lo) {
      pieces[n_pieces][0] = lo;
      pieces[n_pieces][1] = hi;
      ++n_pieces;
    }
  } else {
    const WInterval sub = sub_barrier(a, b);
    if (sub.empty) {
      pieces[0][0] = w0;
      pieces[0][1] = w1;
      n_pieces = 1;
    } else {
      const double lo = std::max(w0, sub.lo), hi = std::min(w1, sub.hi);
      if (!(hi > lo)) {
        pieces[0][0] = w0;
        pieces[0][1] = w1;
        n_pieces = 1;
      } else {
        if (lo > w0) {
          pieces[n_pieces][0] = w0;
          pieces[n_pieces][1] = lo;
          ++n_pieces;
        }
        if (w1 > hi) {
          pieces[n_pieces][0] = hi;
          pieces[n_pieces][1] = w1;
          ++n_pieces;
        }
      }
    }
  }
  auto k2 = [&](double s) {
    const double k = chord_drift(a, a * s + b, s);
    return k * k;
  };
  constexpr int kPanels = 16;
  constexpr double kPiLocal = 3.14159265358979323846;
  double total = 0.0;
  for (int pc = 0; pc < n_pieces; ++pc) {
    const double sa = pieces[pc][0] * pieces[pc][0];
    const double sb = pieces[pc][1] * pieces[pc][1];
    if (!(sb > sa)) continue;
    double prev = sa;
    for (int j = 1; j <= kPanels; ++j) {
      const double theta = double(j) / kPanels;
      const double frac = 0.5 * (1.0 - std::cos(kPiLocal * theta));
      const double next = sa + (sb - sa) * frac;
      total += gauss5(k2, prev, next);
      prev = next;
    }
  }
  return total;
}

bool knot_admissible(double t, double v) {
  return v >= 2.0 * std::sqrt(t) - kTol;
}

}  // namespace

bool path_admissible(const DiscretizedPath& path) {
  validate_path(path);
  for (std::size_t i = 0; i < path.times.size(); ++i)
    if (!knot_admissible(path.times[i], path.values[i])) return false;
  return true;
}

double envelope_drift(const DiscretizedPath& path, double s) {
  validate_path(path);
  const auto& t = path.times;
  const auto& v = path.values;
  require(s >= t.front() && s <= t.back(), "time outside the path grid");
  std::size_t i =
      std::upper_bound(t.begin(), t.end(), s) - t.begin();
  if (i == 0) i = 1;
  if (i >= t.size()) i = t.size() - 1;
  const double a = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
  const double b = v[i - 1] - a * t[i - 1];
  const double phi = a * s + b;
  const double barrier = 2.0 * std::sqrt(s);
  if (phi <= barrier) return 0.0;
  return chord_drift(a, phi, s);
}

ExtReal path_rate(const DiscretizedPath& path, int ell) {
  require(ell >= 1, "ell must be >= 1");
  validate_path(path);
  const auto& t = path.times;
  const auto& v = path.values;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!knot_admissible(t[i], v[i])) return ExtReal::inf();
  double action = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    const double b = v[i] - a * t[i];
    action += chord_action(a, b, t[i], t[i + 1]);
  }
  return ExtReal::finite(0.25 * ell * action);
}

DiscretizedPath optimal_drift(const DiscretizedPath& path) {
  validate_path(path);
  require(path_admissible(path), "optimal_drift requires an admissible path");
  const auto& t = path.times;
  const auto& v = path.values;
  DiscretizedPath out;
  out.times = t;
  out.values.resize(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    const std::size_t i = (j + 1 < t.size()) ? j + 1 : t.size() - 1;
    const double a = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
    const double phi = v[j];
    const double barrier = 2.0 * std::sqrt(t[j]);
    out.values[j] =
        (phi <= barrier + kTol) ? 0.0 : chord_drift(a, phi, t[j]);
  }
  return out;
}

BarrierSegment barrier_segment(double q, double y, int knots) {
  require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
  require(knots >= 4, "need at least 4 knots");
  const double edge = 2.0 * std::sqrt(q);
  require(y >= edge - kTol, "endpoint below the barrier");
  if (y < edge) y = edge;
  BarrierSegment seg;
  seg.rate = rate_I1_closed(y / std::sqrt(q));
  const double root = 0.5 * (y - std::sqrt(std::max(0.0, y * y - 4.0 * q)));
  seg.t_star = root * root;

  auto& t = seg.path.times;
  auto& v = seg.path.values;
  if (seg.t_star >= q * (1.0 - 1e-14)) {
    // Pure barrier path.
    for (int i = 0; i < knots; ++i) {
      const double ti = q * i / (knots - 1.0);
      t.push_back(ti);
      v.push_back(2.0 * std::sqrt(ti));
    }
    v.back() = y;
    return seg;
  }
  int nb = std::max(2, int(std::lround(knots * seg.t_star / q)));
  nb = std::min(nb, knots - 2);
  const int nl = knots - nb;  // linear piece knots, t_star excluded here
  for (int i = 0; i < nb; ++i) {
    const double ti = seg.t_star * i / (nb - 1.0);
    t.push_back(ti);
    v.push_back(2.0 * std::sqrt(ti));
  }
  const double sq_star = std::sqrt(seg.t_star);
  for (int i = 1; i <= nl; ++i) {
    const double ti = seg.t_star + (q - seg.t_star) * i / double(nl);
    t.push_back(ti);
    v.push_back(ti / sq_star + sq_star);
  }
  v.back() = y;
  return seg;
}

SegmentKind classify_segment(double x, double y, double q) {
  require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
  require(x >= 2.0 - kTol, "classify_segment requires x >= 2");
  const double edge = 2.0 * std::sqrt(q);
  require(y >= edge - kTol, "endpoint below the barrier");
  if (y <= edge + kTol) return SegmentKind::BarrierTouch;
  if (y >= 1.0 + q) return SegmentKind::Linear;
  const double w = 0.5 * (y + std::sqrt(y * y - 4.0 * q));
  const double threshold = w + 1.0 / w;
  return (x > threshold + kTol) ? SegmentKind::Linear
                                : SegmentKind::BarrierTouch;
}

LinearSegment linear_segment(double x, double y, double q, int knots) {
  require(knots >= 2, "need at least 2 knots");
  require(classify_segment(x, y, q) == SegmentKind::Linear,
          "segment not in the linear regime");
  LinearSegment seg;
  seg.alpha = (x - y) / (1.0 - q);
  seg.beta = y - seg.alpha * q;
  for (int i = 0; i < knots; ++i) {
    const double ti = q + (1.0 - q) * i / (knots - 1.0);
    seg.path.times.push_back(ti);
    seg.path.values.push_back(seg.alpha * ti + seg.beta);
  }
  seg.path.values.front() = y;
  seg.path.values.back() = x;

  const double u_lo = y + std::sqrt(std::max(0.0, y * y - 4.0 * q));
  const double u_hi = x + std::sqrt(std::max(0.0, x * x - 4.0));
  auto anti = [&](double u) {
    return 0.25 * (0.5 * seg.alpha * u - 2.0 * std::log(u) -
                   2.0 * seg.beta / u);
  };
  seg.rate_closed = anti(u_hi) - anti(u_lo);

  const double alpha = seg.alpha, beta = seg.beta;
  auto k2 = [alpha, beta](double s) {
    const double g = alpha * s + beta;
    const double k =
        alpha - 2.0 / (g + std::sqrt(std::max(0.0, g * g - 4.0 * s)));
    return k * k;
  };
  seg.rate_quad = 0.25 * adaptive_simpson(k2, q, 1.0, 1e-12);
  return seg;
}

ExtReal contracted_rate(double x, double y, double q, int ell) {
  require(ell >= 1, "ell must be >= 1");
  require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
  const double edge = 2.0 * std::sqrt(q);
  if (x < 2.0 - kTol || y < edge - kTol) return ExtReal::inf();
  if (x < 2.0) x = 2.0;
  if (y < edge) y = edge;
  const double stage1 = rate_I1_closed(y / std::sqrt(q));
  double stage2;
  if (classify_segment(x, y, q) == SegmentKind::BarrierTouch) {
    stage2 = rate_I1_closed(x);
  } else {
    const double alpha = (x - y) / (1.0 - q);
    const double beta = y - alpha * q;
    const double u_lo = y + std::sqrt(std::max(0.0, y * y - 4.0 * q));
    const double u_hi = x + std::sqrt(std::max(0.0, x * x - 4.0));
    auto anti = [&](double u) {
      return 0.25 * (0.5 * alpha * u - 2.0 * std::log(u) - 2.0 * beta / u);
    };
    stage2 = anti(u_hi) - anti(u_lo);
  }
  return ExtReal::finite(ell * (stage1 + stage2));
}

}  // namespace pspin
