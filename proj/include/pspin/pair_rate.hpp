#pragma once

#include "pspin/common.hpp"

namespace pspin {

// Joint large-deviation regime of a pair of top eigenvalues at levels (x, y)
// for two coupled ensembles with coupling s = |r|^{p-2}.
enum class PairRegime { Uncoupled, Coupled, Infinite };

struct RegimeClass {
  PairRegime regime;
  bool boundary;  // within tolerance of the regime boundary
};

RegimeClass classify_regime(int p, double r, double x, double y);

struct PairRateValue {
  PairRegime regime = PairRegime::Uncoupled;
  bool boundary = false;
  ExtReal value;  // meaningful only when regime != Infinite
};

// Joint rate for pushing the ell-th largest eigenvalues of the coupled pair
// to at least (x, y). Infinite below the bulk edge 2.
PairRateValue pair_rate(int p, double r, int ell, double x, double y);

// Minimizer of the pair rate over the quadrant [u1,inf) x [u2,inf),
// u1, u2 > 2.
struct RectMin {
  double arg1, arg2;
  double value;
  PairRegime regime;
};

RectMin rect_min(int p, double r, int ell, double u1, double u2);

// Coupled-minus-uncoupled diagonal gap D_u(s) at coupling s = |r|^{p-2};
// zero at s = 1/v(u)^2 and nonpositive beyond it.
double diag_gap(int p, double r, double u);

// Quadratic coupling term of the coupled branch:
// T_s(x,y) = (1+s^2)(x^2+y^2) / (8(1-s^2)) - s x y / (2(1-s^2)).
double coupling_quadratic(double s, double x, double y);

// Coupled-branch value at coupling s (x, y >= 2):
// (I_1(x)+I_1(y))/2 + log(s)/2 + T_s(x,y).
double coupled_branch(double s, double x, double y);

}  // namespace pspin
