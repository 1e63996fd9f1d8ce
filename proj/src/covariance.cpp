#include "pspin/covariance.hpp"

#include <cmath>

#include "pspin/analytics.hpp"
#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Powers {
  double r2, rp, rpm1, rpm2, r2pm2, r2pm4;
  double D;  // p r^p - (p-1) r^{p-2}, also r^p - (p-1) r^{p-2}(1-r^2)
};

Powers powers(int p, double r) {
  Powers w;
  w.r2 = r * r;
  w.rp = ipow(r, p);
  w.rpm1 = ipow(r, p - 1);
  w.rpm2 = ipow(r, p - 2);
  w.r2pm2 = w.rp * w.rpm2;
  w.r2pm4 = w.rpm2 * w.rpm2;
  w.D = p * w.rp - (p - 1.0) * w.rpm2;
  return w;
}

void check_domain(int p, double r) {
  require(p >= 3, "p must be >= 3");
  require(std::abs(r) < 1.0, "overlap r must satisfy |r| < 1");
}

// Energy covariance eigenvalues in factored form. The raw numerators
// 1 +- tail - r^{2p-2} cancel catastrophically as |r| -> 1; they factor as
// (1 - r^2) * sum_k (r^k +- r^{p-2-k})^2 over pairs, and the denominators
// share the vanishing linear factor, so the ratios below stay accurate over
// the whole open interval.
struct SigmaPair {
  double sigma1, sigma2;
  double num1, num2;  // stable 1 + tail - r^{2p-2} and 1 - tail - r^{2p-2}
  double den1;        // stable 1 + tail - r^p
};

SigmaPair stable_sigmas(int p, double r) {
  double B1 = 0.0, B2 = 0.0;
  for (int k = 0; 2 * k < p - 2; ++k) {
    const double a = ipow(r, k), b = ipow(r, p - 2 - k);
    B1 += (a + b) * (a + b);
    B2 += (a - b) * (a - b);
  }
  if (p % 2 == 0) B1 += 2.0 * ipow(r, p - 2);
  const double one_m = (1.0 - r) * (1.0 + r);
  SigmaPair s;
  s.num1 = one_m * B1;
  s.num2 = one_m * B2;
  if (p % 2 == 1) {
    auto D1 = [&](double t) {
      double acc = 0.0;
      for (int j = 0; j < p; ++j) acc += ipow(t, j);
      return acc + (p - 1.0) * (ipow(t, p - 2) + ipow(t, p - 1));
    };
    s.den1 = (1.0 - r) * D1(r);
    s.sigma1 = (1.0 + r) * B1 / D1(r);
    s.sigma2 = (1.0 - r) * B2 / D1(-r);
  } else {
    double E1 = (p - 1.0) * ipow(r, p - 2);
    for (int j = 0; 2 * j < p; ++j) E1 += ipow(r, 2 * j);
    s.den1 = one_m * E1;
    s.sigma1 = B1 / E1;
    const double tail = (p - 1.0) * ipow(r, p - 2) * one_m;
    const double den2 = 1.0 + ipow(r, p) - tail;
    s.sigma2 = one_m * B2 / den2;
  }
  return s;
}

}  // namespace

CoeffBundle coeff_bundle(int p, double r) {
  check_domain(p, r);
  const Powers w = powers(p, r);
  const double one_m = 1.0 - w.r2;
  if (!(1.0 - w.r2pm2 > 0.0) || !(1.0 - w.D * w.D > 0.0))
    throw numerical_error("coeff_bundle: degenerate conditioning");
  CoeffBundle c;
  c.a1 = 1.0 / (p * (1.0 - w.r2pm2));
  c.a2 = 1.0 / (p * (1.0 - w.D * w.D));
  c.a3 = -w.rpm1 * c.a1;
  c.a4 = -w.D * c.a2;
  const double p3 = double(p) * p * p;
  c.b1 = -p + c.a2 * p3 * w.r2pm2 * one_m;
  c.b2 = -p * w.rp - c.a4 * p3 * w.r2pm2 * one_m;
  const double bend = p * p * (p - 1.0) * w.r2pm4 * one_m *
                      (-(p - 2.0) + p * w.r2);
  c.b3 = c.a2 * bend;
  c.b4 = p * (p - 1.0) * w.rpm2 * one_m - c.a4 * bend;
  return c;
}

CovarianceBundle covariance_bundle(int p, double r, double u1, double u2) {
  check_domain(p, r);
  CovarianceBundle b;
  b.p = p;
  b.r = r;
  b.coeff = coeff_bundle(p, r);
  const CoeffBundle& c = b.coeff;
  const Powers w = powers(p, r);
  const double one_m = 1.0 - w.r2;

  b.sigma_U = {-c.b1 / p, -c.b2 / p};
  const SigmaPair sp = stable_sigmas(p, r);
  b.sigma1 = sp.sigma1;
  b.sigma2 = sp.sigma2;
  if (!(b.sigma1 > 0.0) || !(b.sigma2 > 0.0))
    throw numerical_error("covariance_bundle: energy covariance not positive");

  const double pp1 = p * (p - 1.0);
  b.sigma_Z.diag = pp1 - c.a1 * p * p * (p - 1.0) * (p - 1.0) * w.r2pm4 * one_m;
  {
    const double rpm3 = ipow(r, p - 3);
    b.sigma_Z.off = pp1 * (p - 1.0) * w.rpm1 - pp1 * (p - 2.0) * rpm3 +
                    c.a3 * p * p * (p - 1.0) * (p - 1.0) * w.r2pm4 * one_m;
  }

  // Quadratic form x' Sigma_U^{-1} y in the (1,1)/(1,-1) eigenbasis.
  auto qform = [&](double x1, double x2, double y1, double y2) {
    return (x1 + x2) * (y1 + y2) / (2.0 * b.sigma1) +
           (x1 - x2) * (y1 - y2) / (2.0 * b.sigma2);
  };

  {
    const double rpm3 = ipow(r, p - 3);
    const double zrow = pp1 * rpm3 * (p * w.r2 - (p - 2.0));
    b.sigma_Q.diag = 2.0 * pp1 - c.a2 * one_m * zrow * zrow -
                     qform(c.b3, c.b4, c.b3, c.b4);
    double q12 = p * p * p * double(p) * w.rp -
                 2.0 * pp1 * (p * double(p) - 2.0 * p + 2.0) * w.rpm2;
    if (p > 3) q12 += pp1 * (p - 2.0) * (p - 3.0) * ipow(r, p - 4);
    const double r2pm6 = ipow(r, 2 * p - 6);
    const double core = p * p * w.r2 - (p - 1.0) * (p - 2.0);
    q12 += c.a4 * p * p * r2pm6 * one_m * core * core;
    q12 -= qform(c.b1 + c.b3, c.b2 + c.b4, c.b2 + c.b4, c.b1 + c.b3);
    b.sigma_Q.off = q12;
  }

  b.m1 = (c.b3 + c.b4) * (u1 + u2) / (2.0 * b.sigma1) +
         (c.b3 - c.b4) * (u1 - u2) / (2.0 * b.sigma2);
  b.m2 = (c.b3 + c.b4) * (u1 + u2) / (2.0 * b.sigma1) -
         (c.b3 - c.b4) * (u1 - u2) / (2.0 * b.sigma2);
  return b;
}

GeometryFactors geometry_factors(int p, double r, int N) {
  check_domain(p, r);
  require(N >= 3, "N must be >= 3");
  const Powers w = powers(p, r);
  GeometryFactors gf;
  gf.G = std::sqrt((1.0 - w.r2) / (1.0 - w.r2pm2));
  gf.F = (1.0 - w.r2pm2) /
         (gf.G * gf.G * gf.G * std::sqrt(1.0 - w.D * w.D));
  gf.log_C_N = (N - 1.0) * std::log((N - 1.0) * (p - 1.0) / (2.0 * kPi));
  gf.log_omega_N =
      std::log(2.0) + 0.5 * N * std::log(kPi) - std::lgamma(0.5 * N);
  return gf;
}

QuadForms quad_forms(int p, double r, double u1, double u2) {
  const CovarianceBundle b = covariance_bundle(p, r, u1, u2);
  const Powers w = powers(p, r);
  const SigmaPair sp = stable_sigmas(p, r);
  QuadForms q;
  q.H = (u1 + u2) * (u1 + u2) / (4.0 * b.sigma1) +
        (u1 - u2) * (u1 - u2) / (4.0 * b.sigma2);
  q.H_diag = u1 * u1 * sp.den1 / sp.num1;
  q.g = (w.rp - w.r2pm2) / sp.num1;
  const double x = gamma_p(p) * std::abs(u1);
  if (x >= 2.0 - 1e-12)
    q.r_star = std::exp(-2.0 / (p - 2.0) * std::log(v_map(x)));
  else
    q.r_star = std::nan("");
  return q;
}

}  // namespace pspin
