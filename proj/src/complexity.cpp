#include "pspin/complexity.hpp"

#include <cmath>

#include "pspin/analytics.hpp"
#include "pspin/numerics.hpp"

namespace pspin {

double sigma_ell(const ModelParams& params, double u) {
  validate(params);
  const int p = params.p;
  const double e_inf = threshold_E_inf(p);
  const double base = 0.5 * std::log(p - 1.0);
  if (u <= -e_inf) {
    return base - (p - 2.0) / (4.0 * (p - 1.0)) * u * u -
           (params.ell + 1.0) * rate_I1_closed(gamma_p(p) * std::abs(u));
  }
  return base - (p - 2.0) / p;
}

double sigma_total(int p, double u) {
  require(p >= 3, "p must be >= 3");
  const double e_inf = threshold_E_inf(p);
  const double base = 0.5 * std::log(p - 1.0);
  const double quad = (p - 2.0) / (4.0 * (p - 1.0)) * u * u;
  if (u <= -e_inf)
    return base - quad - rate_I1_closed(gamma_p(p) * std::abs(u));
  if (u <= 0.0) return base - quad;
  return base;
}

double linear_coefficient(const ModelParams& params) {
  validate(params);
  return (2.0 * (params.p - 1.0) + params.ell * params.p) /
         (2.0 * (params.p - 1.0));
}

double stieltjes_term(const ModelParams& params, double u) {
  validate(params);
  const double g = gamma_p(params.p);
  return g * (params.ell + 1.0) * stieltjes_m(g * u);
}

double sigma_derivative(const ModelParams& params, double u) {
  validate(params);
  require(u < -threshold_E_inf(params.p),
          "sigma_derivative requires u < -E_inf(p)");
  return -(stieltjes_term(params, u) + linear_coefficient(params) * u);
}

double threshold_E_ell(const ModelParams& params) {
  validate(params);
  const double e_inf = threshold_E_inf(params.p);
  auto f = [&](double e) { return sigma_ell(params, -e); };
  // The constant value at the left edge is positive for every p >= 3; the
  // right edge must be negative for the bracket to be valid.
  if (!(f(e_inf) > 0.0) || !(f(3.0) < 0.0))
    throw numerical_error("threshold_E_ell: zero not bracketed in (E_inf, 3]");
  auto df = [&](double e) { return -sigma_derivative(params, -e); };
  const double root =
      root_bisect_newton(f, df, e_inf + 1e-13, 3.0, 1e-15);
  if (std::abs(sigma_ell(params, -root)) > 1e-12)
    throw numerical_error("threshold_E_ell: residual above tolerance");
  return root;
}

}  // namespace pspin
