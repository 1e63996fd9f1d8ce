#pragma once

#include <string>
#include <vector>

#include "pspin/common.hpp"

namespace pspin {

// Branch of the two-point upper-bound exponent at the evaluation point.
enum class PsiBranch { Perp, Parallel, Boundary, ExtensionEndpoint };

struct PsiEvaluation {
  double r, u1, u2;
  double value;
  PsiBranch branch;
};

// Two-point exponent Psi(r, u1, u2) bounding the second moment of index-ell
// critical-point counts: volume and geometry terms plus log-potentials minus
// the eigenvalue pair rate and the energy quadratic form.
// Requires |r| < 1 and u1, u2 < -E_inf(p).
PsiEvaluation bounding_psi(const ModelParams& params, double r, double u1,
                           double u2);

// Diagonal section r -> Psi(r, u, u) extended continuously to r = +-1 by its
// closed endpoint form. Requires |r| <= 1 and u < -E_inf(p).
PsiEvaluation psi_diagonal_extended(const ModelParams& params, double r,
                                    double u);

struct PsiOpt {
  double r, u1, u2;
  double value;
};

// Global maximum of Psi over [r_lo, r_hi] x [u_lo, u_hi]^2, with the u-box
// inside (-E_ell, -E_inf). Dense grid scan followed by local refinement.
PsiOpt optimize_psi(const ModelParams& params, double r_lo, double r_hi,
                    double u_lo, double u_hi);

// Structural identities of Psi checked on dense grids: diagonal decoupled
// value vs twice the complexity, endpoint difference and endpoint value vs
// shifted complexity, nonpositivity on deep energies, branch continuity,
// and the decoupled decomposition at r = 0.
struct IdentityEntry {
  std::string name;
  double max_residual;
  bool pass;
};

struct IdentityReport {
  std::vector<IdentityEntry> entries;
  bool all_pass;
};

IdentityReport identity_suite(const ModelParams& params);

}  // namespace pspin
