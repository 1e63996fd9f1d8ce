#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pspin/common.hpp"
#include "pspin/pair_rate.hpp"
#include "pspin/rng.hpp"

namespace pspin {

// GOE matrix: symmetric, entry variances (1 + delta_ij) / n.
Eigen::MatrixXd sample_goe(int n, Rng& rng);

// Same law with the variance divisor decoupled from the dimension.
Eigen::MatrixXd sample_goe_scaled(int n, double divisor, Rng& rng);

// One draw of the conditional Hessian pair at overlap r, conditioned on
// critical points with energies per site (u1, u2). M1/M2 are the centered
// pair; shifted(which)/shifted_minor(which) with which in {1, 2} apply the
// conditional mean (scalar shift plus the corner mean). When built with
// coupled=true the sample also carries the three-matrix coupling
// decomposition M_i = X_i + T_i, bitwise.
struct HessianPairSample {
  int p = 3, N = 0;
  double r = 0.0, u1 = 0.0, u2 = 0.0;
  double u_bar1 = 0.0, u_bar2 = 0.0;    // scalar shifts
  double m_circ1 = 0.0, m_circ2 = 0.0;  // corner means
  Eigen::MatrixXd M1, M2;               // centered pair, (N-1) x (N-1)
  Eigen::VectorXd Z1, Z2;               // last-column blocks, length N-2
  double Q1 = 0.0, Q2 = 0.0;            // corner entries
  bool has_coupling = false;
  Eigen::MatrixXd X1, X2, T1, T2;

  Eigen::MatrixXd shifted(int which) const;
  Eigen::MatrixXd shifted_minor(int which) const;
};

HessianPairSample sample_hessian_pair(int p, double r, double u1, double u2,
                                      int N, Rng& rng, bool coupled = false);

// Exact finite-size index bookkeeping for one Hessian pair draw: indices of
// the shifted pair and shifted minors, eigenvalue interlacement, the corner
// Schur complement, the index-transfer identity, and the resolvent deviation
// of the normalized last column against the Stieltjes transform.
struct IndexReport {
  int ind_M[2];
  int ind_minor[2];
  bool interlaced[2];
  double schur[2];
  bool identity[2];
  double resolvent_dev[2];  // NaN when the shift is above the bulk edge
};

IndexReport index_diagnostics(const HessianPairSample& sample);

// Symmetric Brownian motion eigenvalue paths: one row of descending
// eigenvalues per grid time. The grid must be increasing inside (0,1].
std::vector<std::vector<double>> dyson_simulate(int n,
                                                const std::vector<double>& grid,
                                                Rng& rng);

// Lower-bound surrogate for the bounded-Lipschitz distance between the
// empirical measure of the atoms and the semicircle law: maximum mismatch
// over a fixed family of unit tents and clipped-identity functions.
double empirical_measure_distance(const std::vector<double>& atoms);

// Direct-counting estimate of the joint tail rate of the ell-th largest
// eigenvalues of a correlated GOE pair across a list of dimensions.
struct TailRow {
  int N;
  long events;
  long replicas;
  bool censored;
  double estimate;  // -log(freq)/N, NaN when censored
};

struct TailTable {
  std::vector<TailRow> rows;
  double target;  // quadrant-minimized pair rate
  double arg1, arg2;
  PairRegime regime;
};

TailTable tail_rate_estimate(int p, double r, int ell, double x, double y,
                             const std::vector<int>& N_list, long replicas,
                             const SeedSpec& seed);

// Monte Carlo / quadrature estimates of the first and second moments of the
// count of index-ell critical points with energy per site in B, at size N,
// reported as (1/N) log. The energy integrals are evaluated by tensor Gauss
// quadrature; the determinant and index factors by Monte Carlo over the
// conditional Hessian law.
struct KacRiceResult {
  double log_second_per_N;
  bool second_censored;
  double log_first_per_N;
  bool first_censored;
  double first_rel_std;
  double target_log_second;  // 2 sigma_ell(sup B)
  double target_log_first;   // sigma_0(sup B)
  std::vector<double> r_values;
  std::vector<double> r_profile;  // per-overlap log integrand
};

KacRiceResult kacrice_moment_estimate(const ModelParams& params, double B_lo,
                                      double B_hi, int N,
                                      const std::vector<double>& r_grid,
                                      long replicas, const SeedSpec& seed);

// Determinant-pair correlation check: g(rho) = E[det W1 det W2] at coupling
// rho must not exceed the chord between g(0) and g(1) = 0. The rho grid must
// contain 0 and 1; the endpoint rho = 1 is analytic (zero last row/column).
struct DetCorrRow {
  double rho;
  double g_value;
  double std_err;
  double bound_rhs;  // rho * (g(1) - g(0))
  double slack_sigma;  // (rhs - lhs) in combined-sigma units, +inf analytic
  bool ok;
  bool analytic;
};

std::vector<DetCorrRow> det_correlation_check(int p,
                                              const std::vector<double>& rho_grid,
                                              int n, long replicas,
                                              const SeedSpec& seed);

}  // namespace pspin
