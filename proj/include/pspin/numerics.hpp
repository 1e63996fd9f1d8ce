#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pspin/common.hpp"

namespace pspin {

// x^k for integer k >= 0, with ipow(0,0) = 1.
inline double ipow(double x, int k) {
  double acc = 1.0, base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return acc;
}

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-11,
                        int depth = 52) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, depth);
}

// 5-point Gauss-Legendre rule on [a,b].
template <class F>
double gauss5(F&& f, double a, double b) {
  static constexpr double xs[5] = {-0.9061798459386640, -0.5384693101056831,
                                   0.0, 0.5384693101056831,
                                   0.9061798459386640};
  static constexpr double ws[5] = {0.2369268850561891, 0.4786286704993665,
                                   0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += ws[i] * f(c + h * xs[i]);
  return s * h;
}

// Composite 5-point Gauss rule with `panels` uniform panels.
template <class F>
double gauss5_composite(F&& f, double a, double b, int panels) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) s += gauss5(f, a + k * h, a + (k + 1) * h);
  return s;
}

// 7-point Gauss-Legendre nodes/weights on [-1,1], used for tensor-product
// quadrature over energy boxes.
inline constexpr int kGauss7 = 7;
inline constexpr double kGauss7Nodes[kGauss7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr double kGauss7Weights[kGauss7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

// log(sum_i exp(v[i])) accumulated over a sorted copy, so the result does not
// depend on the order entries were produced in. Empty input maps to -inf.
inline double logsumexp_sorted(std::vector<double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  std::sort(v.begin(), v.end());
  const double m = v.back();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Bracketed root search: bisection to a coarse window, then Newton polished
// inside the bracket. f(lo) and f(hi) must differ in sign.
template <class F, class DF>
double root_bisect_newton(F&& f, DF&& df, double lo, double hi,
                          double step_tol = 1e-14) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0))
    throw numerical_error("root_bisect_newton: endpoints do not bracket");
  for (int i = 0; i < 80 && (hi - lo) > 1e-8; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const double fx = f(x);
    const double dfx = df(x);
    if (dfx == 0.0) break;
    double step = fx / dfx;
    double xn = x - step;
    if (xn <= lo || xn >= hi) {
      xn = 0.5 * (lo + hi);
      step = x - xn;
    }
    if (f(lo) * fx < 0.0)
      hi = x;
    else
      lo = x;
    x = xn;
    if (std::abs(step) <= step_tol * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace pspin
