#pragma once

#include "pspin/common.hpp"

namespace pspin {

// Truncation window for the regularized log-potential: the integrand distance
// is clamped below at eps and capped above at kappa before taking logs.
struct TruncationWindow {
  double eps;
  double kappa;
};

// Semicircle density on [-2,2].
double semicircle_density(double x);

// v(x) = (x + sqrt(x^2-4))/2 for x >= 2; the larger root of v + 1/v = x.
double v_map(double x);

// Stieltjes transform m(u) = int (lambda-u)^{-1} dmu_sc(lambda) for u < -2.
// This is the branch that decays like -1/u; it takes values in (0,1).
double stieltjes_m(double u);

// Finite-branch top-eigenvalue rate I_1(x;1) for x >= 2 (slightly smaller
// arguments are snapped to 2 to absorb roundoff in scaled inputs).
double rate_I1_closed(double x);

// d/dx I_1(x;1) = sqrt(x^2-4)/2 on x >= 2.
double rate_I1_derivative(double x);

// Scaled rate I_1(u; theta): infinite below the bulk edge 2*theta, otherwise
// equal to I_1(u/theta; 1). theta must be positive.
ExtReal rate_I1(double u, double theta);

// Rate for pushing ell eigenvalues of a (p-1)-scaled Hessian above the bulk:
// ell * I_1(gamma_p |u|; 1), defined for u <= -E_inf(p).
double rate_Iell(double u, int p, int ell);

// Log-potential of the semicircle law, Omega(x) = int log|lambda-x| dmu_sc:
// closed form, and the eps/kappa-truncated variant by quadrature.
double semicircle_log_potential(double x);
double semicircle_log_potential(double x, const TruncationWindow& window);

// Semicircle CDF and its inverse (quantile), used by measure diagnostics.
double semicircle_cdf(double x);
double semicircle_quantile(double q);

// int f(lambda) dmu_sc(lambda) over [-2,2] by smooth-substitution quadrature,
// splitting at the given interior knots. Exposed for oracle-style checks.
double semicircle_integral(const double* knots, int n_knots,
                           double (*f)(double, const void*), const void* ctx,
                           double tol = 1e-12);

}  // namespace pspin
