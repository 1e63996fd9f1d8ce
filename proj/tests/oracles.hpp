#pragma once

// Independent reference implementations used only by the tests. Everything
// here deliberately avoids the library's own quadrature/rootfinding paths:
// composite Simpson with panel doubling instead of recursive adaptive
// subdivision, plain bisection instead of bracketed Newton, and a
// projected-gradient path minimizer as an upper-bound oracle for the
// variational closed forms.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pspin/dyson.hpp"

namespace oracle {

template <class F>
double simpson_panels(F& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// Composite Simpson, doubling panel counts until two refinements agree.
template <class F>
double quad(F&& f, double a, double b, double tol = 1e-11,
            int max_panels = 1 << 21) {
  if (a == b) return 0.0;
  double prev = simpson_panels(f, a, b, 16);
  for (int n = 32; n <= max_panels; n *= 2) {
    const double cur = simpson_panels(f, a, b, n);
    if (std::abs(cur - prev) <= tol) return cur + (cur - prev) / 15.0;
    prev = cur;
  }
  throw std::runtime_error("oracle quadrature did not converge");
}

// Integral against the semicircle density via lambda = 2 cos(theta), which
// removes the square-root endpoint singularities.
template <class F>
double semicircle_quad(F&& f, double tol = 1e-11) {
  auto g = [&](double th) {
    const double s = std::sin(th);
    return f(2.0 * std::cos(th)) * (2.0 / M_PI) * s * s;
  };
  return quad(g, 0.0, M_PI, tol);
}

// Plain bisection; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  if (!(flo * f(hi) < 0.0))
    throw std::runtime_error("oracle bisect: no sign change");
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double central_diff(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Top-eigenvalue rate by quadrature of its defining integrand, with the
// square-root edge removed by z = 2 cosh(t).
inline double rate_I1(double x, double tol = 1e-11) {
  const double T = std::acosh(0.5 * x);
  auto f = [](double t) {
    const double s = std::sinh(t);
    return 2.0 * s * s;
  };
  return quad(f, 0.0, T, tol);
}

// Semicircle log-potential by quadrature; for |x| < 2 the integrand has an
// integrable log singularity, absorbed by a quadratic substitution on each
// side of it.
inline double log_potential(double x, double tol = 1e-9) {
  auto g = [&](double th) {
    const double s = std::sin(th);
    return std::log(std::abs(x - 2.0 * std::cos(th))) * (2.0 / M_PI) * s * s;
  };
  if (std::abs(x) >= 2.0) return quad(g, 0.0, M_PI, tol);
  const double th0 = std::acos(0.5 * x);
  auto left = [&](double sig) {
    return sig == 0.0 ? 0.0 : g(th0 - sig * sig) * 2.0 * sig;
  };
  auto right = [&](double sig) {
    return sig == 0.0 ? 0.0 : g(th0 + sig * sig) * 2.0 * sig;
  };
  return quad(left, 0.0, std::sqrt(th0), tol, 1 << 23) +
         quad(right, 0.0, std::sqrt(M_PI - th0), tol, 1 << 23);
}

// Independent action quadratures for the two path segments. The barrier
// segment departs the barrier at t* = w^2 with w + q/w = y; past t* the
// drift is 1/w - w/s in closed form, which is integrated numerically here.
inline double barrier_action(double q, double y, double tol = 1e-11) {
  const double disc = y * y - 4.0 * q;
  if (disc < 0.0) throw std::runtime_error("barrier oracle: y below barrier");
  const double w = 0.5 * (y - std::sqrt(disc));
  auto f = [&](double s) {
    const double k = 1.0 / w - w / s;
    return 0.25 * k * k;
  };
  return quad(f, w * w, q, tol);
}

inline double linear_action(double x, double y, double q,
                            double tol = 1e-11) {
  const double alpha = (x - y) / (1.0 - q);
  auto f = [&](double s) {
    const double phi = alpha * (s - q) + y;
    const double k = alpha - 2.0 / (phi + std::sqrt(phi * phi - 4.0 * s));
    return 0.25 * k * k;
  };
  return quad(f, q, 1.0, tol);
}

// Discrete path-space minimizer: 50 knots pinned at (0,0), (q,y), (1,x),
// values projected onto the barrier after every step. Returns an upper bound
// on the two-stage variational value.
struct PathMin {
  double value;
  pspin::DiscretizedPath path;
};

inline PathMin minimize_path(double x, double y, double q, int iters = 400) {
  if (y < 2.0 * std::sqrt(q) || x < 2.0)
    throw std::runtime_error("path oracle: pinned point below barrier");
  const int m = 24, k = 25;
  pspin::DiscretizedPath path;
  for (int i = 0; i <= m; ++i) {
    const double f = double(i) / m;
    path.times.push_back(q * f * f);
  }
  for (int j = 1; j <= k; ++j) path.times.push_back(q + (1.0 - q) * j / k);
  const int n = int(path.times.size());
  path.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = path.times[i];
    const double chord =
        (t <= q) ? y * (q > 0 ? t / q : 0.0) : y + (x - y) * (t - q) / (1 - q);
    path.values[i] = std::max(chord, 2.0 * std::sqrt(t));
  }
  const int pin_a = 0, pin_b = m, pin_c = n - 1;
  path.values[pin_a] = 0.0;
  path.values[pin_b] = y;
  path.values[pin_c] = x;

  auto project = [&](std::vector<double>& v) {
    for (int i = 0; i < n; ++i)
      v[i] = std::max(v[i], 2.0 * std::sqrt(path.times[i]));
    v[pin_a] = 0.0;
    v[pin_b] = y;
    v[pin_c] = x;
  };
  auto objective = [&](std::vector<double> v) {
    project(v);
    pspin::DiscretizedPath trial{path.times, std::move(v)};
    return pspin::path_rate(trial, 1).value;
  };

  project(path.values);
  double best = objective(path.values);
  std::vector<double> v = path.values, grad(n, 0.0);
  double f0 = best;
  for (int it = 0; it < iters; ++it) {
    const double h = 1e-6;
    double gnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == pin_a || i == pin_b || i == pin_c) {
        grad[i] = 0.0;
        continue;
      }
      std::vector<double> vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      grad[i] = (objective(vp) - objective(vm)) / (2.0 * h);
      gnorm2 += grad[i] * grad[i];
    }
    if (gnorm2 < 1e-20) break;
    // projected gradient step with backtracking
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 45; ++ls) {
      std::vector<double> trial = v;
      for (int i = 0; i < n; ++i) trial[i] -= step * grad[i];
      project(trial);
      const double ft = objective(trial);
      if (ft <= f0 - 1e-4 * step * gnorm2) {
        v = std::move(trial);
        f0 = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (f0 < best) {
      best = f0;
      path.values = v;
    }
    if (!moved) break;
  }
  return {best, path};
}

}  // namespace oracle
