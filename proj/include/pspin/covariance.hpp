#pragma once

#include "pspin/common.hpp"

namespace pspin {

// Symmetric 2x2 matrix with equal diagonal (all pair covariances here have
// exchange symmetry), eigenvectors (1,1) and (1,-1).
struct SymPair {
  double diag = 0.0;
  double off = 0.0;
  double eig_plus() const { return diag + off; }
  double eig_minus() const { return diag - off; }
};

// Scalar coefficients of the conditional covariance algebra at overlap r.
struct CoeffBundle {
  double a1, a2, a3, a4;
  double b1, b2, b3, b4;
};

CoeffBundle coeff_bundle(int p, double r);

// Full second-order data of the conditional Hessian pair at overlap r and
// conditioned energies (u1, u2): energy covariance Sigma_U with its
// eigenvalues sigma1/sigma2, row covariance Sigma_Z, corner covariance
// Sigma_Q, and the conditional corner means m1/m2 (linear in u1, u2).
struct CovarianceBundle {
  int p;
  double r;
  CoeffBundle coeff;
  SymPair sigma_U;
  double sigma1, sigma2;
  SymPair sigma_Z;
  SymPair sigma_Q;
  double m1, m2;
};

CovarianceBundle covariance_bundle(int p, double r, double u1, double u2);

// Volume and Jacobian factors of the two-point first-order expansion.
struct GeometryFactors {
  double G;            // overlap volume factor, G(0) = 1
  double F;            // gradient Jacobian factor, F(0) = 1
  double log_C_N;      // (N-1) log((N-1)(p-1)/(2 pi))
  double log_omega_N;  // log surface area of the unit (N-1)-sphere
};

GeometryFactors geometry_factors(int p, double r, int N);

// Quadratic forms of the energy pair: H = exponential decay rate of the joint
// energy deviation, H_diag its diagonal (u1 = u2) rational form, g(r) the
// relative gain over the decoupled rate, and r_star the overlap below which
// the diagonal pair decouples (NaN when gamma_p|u1| < 2).
struct QuadForms {
  double H;
  double H_diag;
  double g;
  double r_star;
};

QuadForms quad_forms(int p, double r, double u1, double u2);

}  // namespace pspin
