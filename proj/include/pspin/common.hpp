#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pspin {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An algorithm failed to reach its accuracy or convergence target.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw domain_error(msg);
}

// Extended real used by rate functions: a finite value or a tagged +infinity.
// Keeping the tag explicit (instead of IEEE inf) forces call sites to branch
// deliberately on the infinite case.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static ExtReal finite(double v) { return {v, false}; }
  static ExtReal inf() { return {0.0, true}; }
  bool is_finite() const { return !infinite; }
};

struct ModelParams {
  int p = 3;
  int ell = 0;
};

inline void validate(const ModelParams& mp) {
  require(mp.p >= 3, "p must be >= 3");
  require(mp.ell >= 0, "ell must be >= 0");
}

// Ground-state-adjacent energy scale: E_inf(p) = 2 sqrt((p-1)/p). Hessian
// shifts are measured in units of 2/E_inf(p).
inline double threshold_E_inf(int p) {
  require(p >= 3, "p must be >= 3");
  return 2.0 * std::sqrt((p - 1.0) / p);
}

inline double gamma_p(int p) {
  require(p >= 3, "p must be >= 3");
  return std::sqrt(p / (p - 1.0));
}

}  // namespace pspin
