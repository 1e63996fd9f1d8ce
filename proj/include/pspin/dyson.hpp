#pragma once

#include <vector>

#include "pspin/common.hpp"

namespace pspin {

// Piecewise-linear path on a strictly increasing time grid in [0,1]. A grid
// starting at 0 must start at value 0.
struct DiscretizedPath {
  std::vector<double> times;
  std::vector<double> values;
};

// True iff every knot sits on or above the barrier 2 sqrt(t).
bool path_admissible(const DiscretizedPath& path);

// Drift k(s) of the admissible envelope max(chord, 2 sqrt(s)) at time s:
// zero on barrier arcs, chord slope minus 2/(phi + sqrt(phi^2-4s)) elsewhere.
double envelope_drift(const DiscretizedPath& path, double s);

// Kinetic action (ell/4) int k(s)^2 ds of the admissible envelope of the
// path. Infinite (tagged) when a knot lies below the barrier.
ExtReal path_rate(const DiscretizedPath& path, int ell);

// The drift k evaluated at the grid knots (right-interval value, left at the
// final knot). The path must be admissible.
DiscretizedPath optimal_drift(const DiscretizedPath& path);

// Cheapest admissible path on [0,q] from (0,0) to (q,y): barrier up to the
// departure time t_star, then the tangent line. Rate I_1(y/sqrt(q); 1).
struct BarrierSegment {
  double rate;
  double t_star;
  DiscretizedPath path;
};

BarrierSegment barrier_segment(double q, double y, int knots = 65);

// Shape of the optimal continuation on [q,1] from (q,y) to (1,x).
enum class SegmentKind { BarrierTouch, Linear };

SegmentKind classify_segment(double x, double y, double q);

// Straight-line continuation g(t) = alpha (t-q) + y on [q,1], valid in the
// Linear regime; closed-form action and an independent quadrature value.
struct LinearSegment {
  double alpha, beta;
  double rate_closed;
  double rate_quad;
  DiscretizedPath path;
};

LinearSegment linear_segment(double x, double y, double q, int knots = 65);

// Optimal two-stage action for reaching (q,y) and (1,x): infinite below the
// barrier, otherwise ell times the segment sum.
ExtReal contracted_rate(double x, double y, double q, int ell);

}  // namespace pspin
