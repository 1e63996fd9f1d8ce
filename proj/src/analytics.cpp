#include "pspin/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEdgeSnap = 1e-12;

// Integrate f against the semicircle law via lambda = 2 sin(theta), which
// removes the square-root endpoint singularity. Interior knots are mapped to
// theta and each smooth piece is handled adaptively.
template <class F>
double sc_integral(F&& f, const std::vector<double>& lambda_knots,
                   double tol) {
  std::vector<double> thetas{-0.5 * kPi};
  for (double k : lambda_knots)
    if (k > -2.0 && k < 2.0) thetas.push_back(std::asin(0.5 * k));
  thetas.push_back(0.5 * kPi);
  std::sort(thetas.begin(), thetas.end());
  auto g = [&](double th) {
    const double c = std::cos(th);
    return f(2.0 * std::sin(th)) * (2.0 / kPi) * c * c;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < thetas.size(); ++i)
    if (thetas[i + 1] > thetas[i])
      total += adaptive_simpson(g, thetas[i], thetas[i + 1], tol);
  return total;
}

}  // namespace

double semicircle_density(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * kPi);
}

double v_map(double x) {
  if (x < 2.0) {
    if (x > 2.0 - kEdgeSnap) x = 2.0;
    else throw domain_error("v_map requires x >= 2");
  }
  return 0.5 * (x + std::sqrt(x * x - 4.0));
}

double stieltjes_m(double u) {
  require(u < -2.0, "stieltjes_m requires u < -2");
  return 0.5 * (-u - std::sqrt(u * u - 4.0));
}

double rate_I1_closed(double x) {
  if (x < 2.0) {
    if (x > 2.0 - kEdgeSnap) x = 2.0;
    else throw domain_error("rate_I1_closed requires x >= 2");
  }
  const double v = 0.5 * (x + std::sqrt(x * x - 4.0));
  return 0.25 * (v * v - 1.0 / (v * v)) - std::log(v);
}

double rate_I1_derivative(double x) {
  if (x < 2.0) {
    if (x > 2.0 - kEdgeSnap) x = 2.0;
    else throw domain_error("rate_I1_derivative requires x >= 2");
  }
  return 0.5 * std::sqrt(x * x - 4.0);
}

ExtReal rate_I1(double u, double theta) {
  require(theta > 0.0, "rate_I1 requires theta > 0");
  const double x = u / theta;
  if (x < 2.0 - kEdgeSnap) return ExtReal::inf();
  return ExtReal::finite(rate_I1_closed(x));
}

double rate_Iell(double u, int p, int ell) {
  require(p >= 3, "p must be >= 3");
  require(ell >= 1, "ell must be >= 1");
  require(u <= -threshold_E_inf(p) + kEdgeSnap,
          "rate_Iell requires u <= -E_inf(p)");
  return ell * rate_I1_closed(gamma_p(p) * std::abs(u));
}

double semicircle_log_potential(double x) {
  require(std::isfinite(x), "log potential requires finite x");
  const double a = std::abs(x);
  double val = 0.25 * x * x - 0.5;
  if (a > 2.0) val -= rate_I1_closed(a);
  return val;
}

double semicircle_log_potential(double x, const TruncationWindow& window) {
  require(std::isfinite(x), "log potential requires finite x");
  require(window.eps > 0.0, "truncation requires eps > 0");
  require(window.kappa > window.eps, "truncation requires kappa > eps");
  const double eps = window.eps, kappa = window.kappa;
  auto f = [&](double lam) {
    const double t = std::abs(lam - x);
    if (t > kappa) return 0.0;
    return std::log(std::max(t, eps));
  };
  const std::vector<double> knots{x - kappa, x - eps, x, x + eps, x + kappa};
  return sc_integral(f, knots, 1e-12);
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) +
         std::asin(0.5 * x) / kPi;
}

double semicircle_quantile(double q) {
  require(q > 0.0 && q < 1.0, "quantile requires q in (0,1)");
  double lo = -2.0, hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (semicircle_cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double semicircle_integral(const double* knots, int n_knots,
                           double (*f)(double, const void*), const void* ctx,
                           double tol) {
  std::vector<double> ks(knots, knots + n_knots);
  return sc_integral([&](double lam) { return f(lam, ctx); }, ks, tol);
}

}  // namespace pspin
