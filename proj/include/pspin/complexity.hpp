#pragma once

#include "pspin/common.hpp"

namespace pspin {

// Exponential growth rate of the expected number of critical points of index
// ell with energy per site at most u. Constant above -E_inf(p).
double sigma_ell(const ModelParams& params, double u);

// Same growth rate counting critical points of every index.
double sigma_total(int p, double u);

// Energy threshold E_ell: the unique zero of u -> sigma_ell at u = -E in
// (E_inf(p), 3]. Index-ell critical points exist below -E_ell only at
// exponentially small rates.
double threshold_E_ell(const ModelParams& params);

// d/du sigma_ell(u) for u < -E_inf(p); positive there.
double sigma_derivative(const ModelParams& params, double u);

// Linear coefficient c_{ell,p} = (2(p-1) + ell*p) / (2(p-1)) appearing in the
// derivative decomposition sigma' = -(S_ell(u) + c_{ell,p} u).
double linear_coefficient(const ModelParams& params);

// S_ell(u) = gamma_p (ell+1) m(gamma_p u), the Stieltjes part of sigma'.
double stieltjes_term(const ModelParams& params, double u);

}  // namespace pspin
