#include "pspin/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pspin/analytics.hpp"
#include "pspin/complexity.hpp"
#include "pspin/covariance.hpp"
#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Closed-form square root of a symmetric 2x2 covariance with equal diagonal.
// Eigenvalues in [-1e-12, 0) are clipped to zero (with a one-time warning);
// anything more negative is a hard failure.
struct PairSqrt {
  double a, b;  // [[a,b],[b,a]]
};

// Eigenvalues that are exact structural zeros (e.g. the plus-direction of
// the row covariance at p = 3) come out as rounding-level negatives; clip
// those, fail on anything genuinely negative.
PairSqrt sqrt_sym_pair(const SymPair& m) {
  double ep = m.eig_plus(), em = m.eig_minus();
  for (double* e : {&ep, &em}) {
    if (*e < 0.0) {
      if (*e < -1e-12) throw numerical_error("covariance not PSD");
      *e = 0.0;
    }
  }
  const double sp = std::sqrt(ep), sm = std::sqrt(em);
  return {0.5 * (sp + sm), 0.5 * (sp - sm)};
}

// Index and log|det| of M - ubar I + mc e e' from the spectrum {lam} of M
// and the squared last components {w} of its eigenvectors, via the rank-one
// determinant identity det = prod(lam - ubar) * (1 + mc * sum w/(lam-ubar)).
struct ShiftedDet {
  double logabsdet;
  int index;
};

ShiftedDet shifted_logdet_index(const std::vector<double>& lam,
                                const std::vector<double>& w, double ubar,
                                double mc) {
  const int n = int(lam.size());
  int c = int(std::lower_bound(lam.begin(), lam.end(), ubar) - lam.begin());
  double ld = 0.0, S = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = lam[k] - ubar;
    ld += std::log(std::abs(d));
    S += w[k] / d;
  }
  const double h0 = 1.0 + mc * S;
  int ind;
  if (mc > 0.0)
    ind = (h0 > 0.0) ? c : c - 1;
  else if (mc < 0.0)
    ind = (h0 < 0.0) ? c + 1 : c;
  else
    ind = c;
  if (ind < 0) ind = 0;
  ld += std::log(std::abs(h0));
  return {ld, ind};
}

std::vector<double> eigenvalues_of(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace

Eigen::MatrixXd sample_goe_scaled(int n, double divisor, Rng& rng) {
  require(n >= 1, "dimension must be >= 1");
  require(divisor > 0.0, "variance divisor must be positive");
  Eigen::MatrixXd A(n, n);
  const double off = std::sqrt(1.0 / divisor);
  const double diag = std::sqrt(2.0 / divisor);
  for (int i = 0; i < n; ++i) {
    A(i, i) = diag * rng.gaussian();
    for (int j = i + 1; j < n; ++j) {
      const double v = off * rng.gaussian();
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  return A;
}

Eigen::MatrixXd sample_goe(int n, Rng& rng) {
  return sample_goe_scaled(n, double(n), rng);
}

Eigen::MatrixXd HessianPairSample::shifted(int which) const {
  require(which == 1 || which == 2, "which must be 1 or 2");
  const Eigen::MatrixXd& M = (which == 1) ? M1 : M2;
  const double ub = (which == 1) ? u_bar1 : u_bar2;
  const double mc = (which == 1) ? m_circ1 : m_circ2;
  Eigen::MatrixXd A = M;
  A.diagonal().array() -= ub;
  A(N - 2, N - 2) += mc;
  return A;
}

Eigen::MatrixXd HessianPairSample::shifted_minor(int which) const {
  require(which == 1 || which == 2, "which must be 1 or 2");
  const Eigen::MatrixXd& M = (which == 1) ? M1 : M2;
  const double ub = (which == 1) ? u_bar1 : u_bar2;
  Eigen::MatrixXd A = M.topLeftCorner(N - 2, N - 2);
  A.diagonal().array() -= ub;
  return A;
}

HessianPairSample sample_hessian_pair(int p, double r, double u1, double u2,
                                      int N, Rng& rng, bool coupled) {
  require(p >= 3, "p must be >= 3");
  require(std::abs(r) < 1.0, "overlap r must satisfy |r| < 1");
  require(N >= 3, "N must be >= 3");
  const int n = N - 1, m = N - 2;
  const double rootN = std::sqrt(double(N));
  const CovarianceBundle cb =
      covariance_bundle(p, r, rootN * u1, rootN * u2);
  const double pp1 = double(p) * (p - 1.0);

  HessianPairSample s;
  s.p = p;
  s.N = N;
  s.r = r;
  s.u1 = u1;
  s.u2 = u2;
  const double shift_scale = gamma_p(p) * std::sqrt(double(N) / (N - 1.0));
  s.u_bar1 = shift_scale * u1;
  s.u_bar2 = shift_scale * u2;
  const double mc_scale = 1.0 / std::sqrt((N - 1.0) * pp1);
  s.m_circ1 = cb.m1 * mc_scale;
  s.m_circ2 = cb.m2 * mc_scale;

  const double st = ipow(std::abs(r), p - 2);
  const double cs = std::sqrt(1.0 - st), c0 = std::sqrt(st);
  const double sgn1 = (p % 2 == 0) ? 1.0 : sgn(r);

  if (coupled) {
    const Eigen::MatrixXd A0 = sample_goe(n, rng);
    const Eigen::MatrixXd A1 = sample_goe(n, rng);
    const Eigen::MatrixXd A2 = sample_goe(n, rng);
    s.X1 = cs * A1 + (sgn1 * c0) * A0;
    s.X2 = cs * A2 + c0 * A0;

    const double za = cb.sigma_Z.diag, zb = cb.sigma_Z.off;
    const double czi = std::sqrt(std::max(0.0, za - std::abs(zb)) / pp1);
    const double cz0 = std::sqrt(std::abs(zb) / pp1);
    const double sz = sgn(zb);
    const double qa = cb.sigma_Q.diag, qb = cb.sigma_Q.off;
    const double cqi = std::sqrt(std::max(0.0, qa - std::abs(qb)) / (2.0 * pp1));
    const double cq0 = std::sqrt(std::abs(qb) / (2.0 * pp1));
    const double sq = sgn(qb);

    s.T1 = Eigen::MatrixXd::Zero(n, n);
    s.T2 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < m; ++j) {
      const double z1 = czi * A1(j, n - 1) + sz * cz0 * A0(j, n - 1);
      const double z2 = czi * A2(j, n - 1) + cz0 * A0(j, n - 1);
      s.T1(j, n - 1) = z1 - s.X1(j, n - 1);
      s.T1(n - 1, j) = s.T1(j, n - 1);
      s.T2(j, n - 1) = z2 - s.X2(j, n - 1);
      s.T2(n - 1, j) = s.T2(j, n - 1);
    }
    const double q1 = cqi * A1(n - 1, n - 1) + sq * cq0 * A0(n - 1, n - 1);
    const double q2 = cqi * A2(n - 1, n - 1) + cq0 * A0(n - 1, n - 1);
    s.T1(n - 1, n - 1) = q1 - s.X1(n - 1, n - 1);
    s.T2(n - 1, n - 1) = q2 - s.X2(n - 1, n - 1);
    s.M1 = s.X1 + s.T1;
    s.M2 = s.X2 + s.T2;
    s.has_coupling = true;
  } else {
    const Eigen::MatrixXd B0 = sample_goe_scaled(m, N - 1.0, rng);
    const Eigen::MatrixXd B1 = sample_goe_scaled(m, N - 1.0, rng);
    const Eigen::MatrixXd B2 = sample_goe_scaled(m, N - 1.0, rng);
    const Eigen::MatrixXd G1 = cs * B1 + (sgn1 * c0) * B0;
    const Eigen::MatrixXd G2 = cs * B2 + c0 * B0;
    const PairSqrt sz = sqrt_sym_pair(cb.sigma_Z);
    const PairSqrt sq = sqrt_sym_pair(cb.sigma_Q);
    const double scale = mc_scale;  // 1/sqrt((N-1) p (p-1))
    s.M1 = Eigen::MatrixXd(n, n);
    s.M2 = Eigen::MatrixXd(n, n);
    s.M1.topLeftCorner(m, m) = G1;
    s.M2.topLeftCorner(m, m) = G2;
    for (int j = 0; j < m; ++j) {
      const double x1 = rng.gaussian(), x2 = rng.gaussian();
      const double z1 = (sz.a * x1 + sz.b * x2) * scale;
      const double z2 = (sz.b * x1 + sz.a * x2) * scale;
      s.M1(j, n - 1) = z1;
      s.M1(n - 1, j) = z1;
      s.M2(j, n - 1) = z2;
      s.M2(n - 1, j) = z2;
    }
    const double e1 = rng.gaussian(), e2 = rng.gaussian();
    s.M1(n - 1, n - 1) = (sq.a * e1 + sq.b * e2) * scale;
    s.M2(n - 1, n - 1) = (sq.b * e1 + sq.a * e2) * scale;
  }
  s.Z1 = s.M1.col(n - 1).head(m);
  s.Z2 = s.M2.col(n - 1).head(m);
  s.Q1 = s.M1(n - 1, n - 1);
  s.Q2 = s.M2(n - 1, n - 1);
  return s;
}

IndexReport index_diagnostics(const HessianPairSample& s) {
  IndexReport rep{};
  const int n = s.N - 1, m = s.N - 2;
  for (int which = 1; which <= 2; ++which) {
    const Eigen::MatrixXd Mb = s.shifted(which);
    const Eigen::MatrixXd Gb = s.shifted_minor(which);
    const std::vector<double> lm = eigenvalues_of(Mb);
    const std::vector<double> lg = eigenvalues_of(Gb);
    const double scale = std::max(std::abs(lm.front()), std::abs(lm.back()));
    if (std::abs(*std::min_element(
            lg.begin(), lg.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); })) <
        1e-12 * scale)
      throw numerical_error("singular shifted minor; resample");

    const int i = which - 1;
    rep.ind_M[i] = int(std::count_if(lm.begin(), lm.end(),
                                     [](double x) { return x < 0.0; }));
    rep.ind_minor[i] = int(std::count_if(lg.begin(), lg.end(),
                                         [](double x) { return x < 0.0; }));
    bool inter = true;
    const double tol = 1e-9 * std::max(1.0, scale);
    for (int j = 0; j < m; ++j)
      inter = inter && lm[j] <= lg[j] + tol && lg[j] <= lm[j + 1] + tol;
    rep.interlaced[i] = inter;

    const Eigen::VectorXd& Z = (which == 1) ? s.Z1 : s.Z2;
    const double ub = (which == 1) ? s.u_bar1 : s.u_bar2;
    const double mc = (which == 1) ? s.m_circ1 : s.m_circ2;
    const double Q = (which == 1) ? s.Q1 : s.Q2;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Gb);
    const Eigen::VectorXd sol = ldlt.solve(Z);
    rep.schur[i] = Q - ub + mc - Z.dot(sol);
    rep.identity[i] =
        rep.ind_M[i] == rep.ind_minor[i] + (rep.schur[i] < 0.0 ? 1 : 0);

    if (ub < -2.0 - 1e-9 && Z.norm() > 0.0) {
      const Eigen::VectorXd zn = Z / Z.norm();
      const Eigen::VectorXd rsol = ldlt.solve(zn);
      rep.resolvent_dev[i] = std::abs(zn.dot(rsol) - stieltjes_m(ub));
    } else {
      rep.resolvent_dev[i] = std::nan("");
    }
  }
  return rep;
}

std::vector<std::vector<double>> dyson_simulate(int n,
                                                const std::vector<double>& grid,
                                                Rng& rng) {
  require(n >= 1, "dimension must be >= 1");
  require(!grid.empty(), "time grid is empty");
  double prev = 0.0;
  for (double t : grid) {
    require(t > prev, "time grid must be increasing in (0,1]");
    prev = t;
  }
  require(grid.back() <= 1.0, "time grid must lie in (0,1]");

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<double>> out;
  out.reserve(grid.size());
  double tprev = 0.0;
  for (double t : grid) {
    const double dt = t - tprev;
    tprev = t;
    const double off = std::sqrt(dt / n), diag = std::sqrt(2.0 * dt / n);
    for (int i = 0; i < n; ++i) {
      H(i, i) += diag * rng.gaussian();
      for (int j = i + 1; j < n; ++j) {
        const double v = off * rng.gaussian();
        H(i, j) += v;
        H(j, i) += v;
      }
    }
    std::vector<double> ev = eigenvalues_of(H);
    std::sort(ev.rbegin(), ev.rend());
    out.push_back(std::move(ev));
  }
  return out;
}

namespace {

struct TestFunctionFamily {
  std::vector<double> centers;
  std::vector<double> tent_refs;
  double clip_ref;
};

double tent_integrand(double lam, const void* ctx) {
  const double c = *static_cast<const double*>(ctx);
  return std::max(0.0, 1.0 - std::abs(lam - c));
}

double clip_integrand(double lam, const void*) {
  return std::clamp(lam, -1.0, 1.0);
}

const TestFunctionFamily& test_family() {
  static const TestFunctionFamily fam = [] {
    TestFunctionFamily f;
    for (int j = 0; j <= 100; ++j) {
      const double c = -3.0 + 6.0 * j / 100.0;
      f.centers.push_back(c);
      const double knots[3] = {c - 1.0, c, c + 1.0};
      f.tent_refs.push_back(
          semicircle_integral(knots, 3, tent_integrand, &c, 1e-11));
    }
    const double knots[2] = {-1.0, 1.0};
    f.clip_ref = semicircle_integral(knots, 2, clip_integrand, nullptr, 1e-11);
    return f;
  }();
  return fam;
}

}  // namespace

double empirical_measure_distance(const std::vector<double>& atoms) {
  require(!atoms.empty(), "empirical measure needs at least one atom");
  const TestFunctionFamily& fam = test_family();
  const double inv = 1.0 / atoms.size();
  double dist = 0.0;
  for (std::size_t j = 0; j < fam.centers.size(); ++j) {
    const double c = fam.centers[j];
    double emp = 0.0;
    for (double x : atoms) emp += std::max(0.0, 1.0 - std::abs(x - c));
    dist = std::max(dist, std::abs(emp * inv - fam.tent_refs[j]));
  }
  double emp = 0.0;
  for (double x : atoms) emp += std::clamp(x, -1.0, 1.0);
  dist = std::max(dist, std::abs(emp * inv - fam.clip_ref));
  return dist;
}

TailTable tail_rate_estimate(int p, double r, int ell, double x, double y,
                             const std::vector<int>& N_list, long replicas,
                             const SeedSpec& seed) {
  require(p >= 3, "p must be >= 3");
  require(std::abs(r) < 1.0, "overlap r must satisfy |r| < 1");
  require(ell >= 1, "ell must be >= 1");
  require(x >= 2.0 - 1e-12 && y >= 2.0 - 1e-12,
          "tail levels must be >= 2");
  require(replicas >= 1, "replicas must be >= 1");
  require(!N_list.empty(), "N list is empty");
  for (int N : N_list) require(N > ell, "dimension must exceed ell");

  const double st = ipow(std::abs(r), p - 2);
  const double cs = std::sqrt(1.0 - st), c0 = std::sqrt(st);
  const double sgn1 = (p % 2 == 0) ? 1.0 : sgn(r);

  TailTable table;
  const RectMin rm = rect_min(p, r, ell, std::max(x, 2.0 + 1e-12),
                              std::max(y, 2.0 + 1e-12));
  table.target = rm.value;
  table.arg1 = rm.arg1;
  table.arg2 = rm.arg2;
  table.regime = rm.regime;

  for (std::size_t idx = 0; idx < N_list.size(); ++idx) {
    const int N = N_list[idx];
    long count = 0;
#ifdef PSPIN_OPENMP
#pragma omp parallel for reduction(+ : count) schedule(static)
#endif
    for (long k = 0; k < replicas; ++k) {
      Rng rg(seed.master_seed, std::uint64_t(k), 100 + idx);
      const Eigen::MatrixXd A0 = sample_goe(N, rg);
      const Eigen::MatrixXd A1 = sample_goe(N, rg);
      const Eigen::MatrixXd A2 = sample_goe(N, rg);
      const Eigen::MatrixXd G1 = cs * A1 + (sgn1 * c0) * A0;
      const Eigen::MatrixXd G2 = cs * A2 + c0 * A0;
      const std::vector<double> e1 = eigenvalues_of(G1);
      const std::vector<double> e2 = eigenvalues_of(G2);
      if (e1[N - ell] >= x && e2[N - ell] >= y) ++count;
    }
    TailRow row;
    row.N = N;
    row.events = count;
    row.replicas = replicas;
    row.censored = (count == 0);
    row.estimate = row.censored
                       ? std::nan("")
                       : -std::log(double(count) / replicas) / N;
    table.rows.push_back(row);
  }
  return table;
}

KacRiceResult kacrice_moment_estimate(const ModelParams& params, double B_lo,
                                      double B_hi, int N,
                                      const std::vector<double>& r_grid,
                                      long replicas, const SeedSpec& seed) {
  validate(params);
  const int p = params.p, ell = params.ell;
  require(N >= 6, "N must be >= 6");
  require(B_lo < B_hi, "energy box is empty");
  const double e_inf = threshold_E_inf(p);
  const double e_ell = threshold_E_ell(params);
  require(B_lo > -e_ell && B_hi < -e_inf,
          "energy box must lie inside (-E_ell, -E_inf)");
  require(replicas >= 2, "replicas must be >= 2");
  require(r_grid.size() >= 3 && r_grid.size() % 2 == 1,
          "overlap grid must have odd size >= 3");
  const double hr = r_grid[1] - r_grid[0];
  for (std::size_t j = 0; j + 1 < r_grid.size(); ++j)
    require(std::abs(r_grid[j + 1] - r_grid[j] - hr) < 1e-9,
            "overlap grid must be uniform");
  for (double r : r_grid)
    require(std::abs(r) < 1.0, "overlap grid must lie inside (-1,1)");

  const int n = N - 1;
  const double g = gamma_p(p);
  const double shift_scale = g * std::sqrt(double(N) / (N - 1.0));
  const double pp1 = double(p) * (p - 1.0);
  const double mc_scale = 1.0 / std::sqrt((N - 1.0) * pp1);
  const double rootN = std::sqrt(double(N));
  const GeometryFactors gf0 = geometry_factors(p, 0.0, N);

  const double mid = 0.5 * (B_lo + B_hi), half = 0.5 * (B_hi - B_lo);
  double xs[kGauss7], lw[kGauss7];
  for (int a = 0; a < kGauss7; ++a) {
    xs[a] = mid + half * kGauss7Nodes[a];
    lw[a] = std::log(kGauss7Weights[a] * half);
  }
  constexpr int kNodes = kGauss7 * kGauss7;

  KacRiceResult res;
  res.r_values = r_grid;
  res.r_profile.assign(r_grid.size(), kNegInf);

  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    const double r = r_grid[j];
    const CovarianceBundle cb = covariance_bundle(p, r, 0.0, 0.0);
    const GeometryFactors gf = geometry_factors(p, r, N);
    const double Ap = (cb.coeff.b3 + cb.coeff.b4) / (2.0 * cb.sigma1);
    const double Am = (cb.coeff.b3 - cb.coeff.b4) / (2.0 * cb.sigma2);

    double node_ubar1[kNodes], node_ubar2[kNodes];
    double node_mc1[kNodes], node_mc2[kNodes], node_logw[kNodes];
    for (int a = 0; a < kGauss7; ++a) {
      for (int b = 0; b < kGauss7; ++b) {
        const int t = a * kGauss7 + b;
        const double x1 = xs[a], x2 = xs[b];
        node_ubar1[t] = shift_scale * x1;
        node_ubar2[t] = shift_scale * x2;
        const double U1 = rootN * x1, U2 = rootN * x2;
        node_mc1[t] = (Ap * (U1 + U2) + Am * (U1 - U2)) * mc_scale;
        node_mc2[t] = (Ap * (U1 + U2) - Am * (U1 - U2)) * mc_scale;
        const double sum = x1 + x2, dif = x1 - x2;
        const double H = sum * sum / (4.0 * cb.sigma1) +
                         dif * dif / (4.0 * cb.sigma2);
        node_logw[t] = lw[a] + lw[b] - N * H;
      }
    }

    std::vector<std::vector<double>> slots(kNodes,
                                           std::vector<double>(replicas));
#ifdef PSPIN_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long k = 0; k < replicas; ++k) {
      Rng rg(seed.master_seed, std::uint64_t(k), 2000 + j);
      const HessianPairSample sp =
          sample_hessian_pair(p, r, 0.0, 0.0, N, rg, false);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(sp.M1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sp.M2);
      std::vector<double> lam1(es1.eigenvalues().data(),
                               es1.eigenvalues().data() + n);
      std::vector<double> lam2(es2.eigenvalues().data(),
                               es2.eigenvalues().data() + n);
      std::vector<double> w1(n), w2(n);
      for (int kk = 0; kk < n; ++kk) {
        const double a1 = es1.eigenvectors()(n - 1, kk);
        const double a2 = es2.eigenvectors()(n - 1, kk);
        w1[kk] = a1 * a1;
        w2[kk] = a2 * a2;
      }
      for (int t = 0; t < kNodes; ++t) {
        const ShiftedDet d1 =
            shifted_logdet_index(lam1, w1, node_ubar1[t], node_mc1[t]);
        const ShiftedDet d2 =
            shifted_logdet_index(lam2, w2, node_ubar2[t], node_mc2[t]);
        slots[t][k] = (d1.index == ell && d2.index == ell)
                          ? d1.logabsdet + d2.logabsdet
                          : kNegInf;
      }
    }

    std::vector<double> node_terms(kNodes);
    bool any = false;
    for (int t = 0; t < kNodes; ++t) {
      const double mean_log =
          logsumexp_sorted(slots[t]) - std::log(double(replicas));
      node_terms[t] = node_logw[t] + mean_log;
      any = any || std::isfinite(node_terms[t]);
    }
    if (!any) continue;
    const double logE =
        std::log(N / (2.0 * kPi * std::sqrt(cb.sigma1 * cb.sigma2))) +
        logsumexp_sorted(node_terms);
    res.r_profile[j] = N * std::log(gf.G) + std::log(gf.F) + logE;
  }

  // Simpson weights over the uniform overlap grid.
  double prof_max = kNegInf;
  for (double v : res.r_profile) prof_max = std::max(prof_max, v);
  res.second_censored = !std::isfinite(prof_max);
  if (res.second_censored) {
    res.log_second_per_N = std::nan("");
  } else {
    double acc = 0.0;
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      const double c =
          (j == 0 || j + 1 == r_grid.size()) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      if (std::isfinite(res.r_profile[j]))
        acc += c * std::exp(res.r_profile[j] - prof_max);
    }
    const double logI = prof_max + std::log(acc * hr / 3.0);
    res.log_second_per_N =
        (2.0 * gf0.log_omega_N + gf0.log_C_N + logI) / N;
  }

  // First moment at the top of the box.
  const double b = B_hi;
  const double sbar = shift_scale * b;
  std::vector<double> lds(replicas);
  std::vector<int> signs(replicas);
#ifdef PSPIN_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long k = 0; k < replicas; ++k) {
    Rng rg(seed.master_seed, std::uint64_t(k), 1);
    const Eigen::MatrixXd X = sample_goe(n, rg);
    const std::vector<double> ev = eigenvalues_of(X);
    double ld = 0.0;
    int neg = 0;
    for (double lam : ev) {
      ld += std::log(std::abs(lam - sbar));
      if (lam < sbar) ++neg;
    }
    lds[k] = ld;
    signs[k] = neg & 1;
  }
  std::vector<double> pos, negv, sq;
  for (long k = 0; k < replicas; ++k) {
    (signs[k] ? negv : pos).push_back(lds[k]);
    sq.push_back(2.0 * lds[k]);
  }
  const double lse_pos = logsumexp_sorted(pos);
  const double lse_neg = logsumexp_sorted(negv);
  res.first_censored = !(lse_pos > lse_neg);
  if (res.first_censored) {
    res.log_first_per_N = std::nan("");
    res.first_rel_std = std::nan("");
  } else {
    const double log_edet = lse_pos +
                            std::log1p(-std::exp(lse_neg - lse_pos)) -
                            std::log(double(replicas));
    const double log_edet2 =
        logsumexp_sorted(sq) - std::log(double(replicas));
    const double relvar = std::exp(log_edet2 - 2.0 * log_edet) - 1.0;
    res.first_rel_std = std::sqrt(std::max(0.0, relvar) / replicas);
    const double logc = gf0.log_omega_N + 0.5 * gf0.log_C_N +
                        0.5 * std::log(N / (2.0 * kPi)) -
                        0.5 * N * b * b + log_edet;
    const double d = -sigma_derivative(params, b);
    const double logbox = std::log1p(-std::exp(N * d * (B_hi - B_lo))) -
                          std::log(-N * d);
    res.log_first_per_N = (logc + logbox) / N;
  }

  res.target_log_second = 2.0 * sigma_ell(params, B_hi);
  res.target_log_first = sigma_ell({p, 0}, B_hi);
  return res;
}

std::vector<DetCorrRow> det_correlation_check(int p,
                                              const std::vector<double>& rho_grid,
                                              int n, long replicas,
                                              const SeedSpec& seed) {
  require(p >= 3, "p must be >= 3");
  require(n >= 2 && n <= 12, "n must lie in [2,12]");
  require(replicas >= 2, "replicas must be >= 2");
  bool has0 = false, has1 = false;
  for (double rho : rho_grid) {
    require(rho >= 0.0 && rho <= 1.0, "rho grid must lie in [0,1]");
    has0 = has0 || rho == 0.0;
    has1 = has1 || rho == 1.0;
  }
  require(has0 && has1, "rho grid must contain 0 and 1");

  const int N = n + 1;
  const double detscale = std::pow(N - 1.0, n);
  std::vector<double> means(rho_grid.size(), 0.0), ses(rho_grid.size(), 0.0);
  std::vector<bool> analytic(rho_grid.size(), false);

  for (std::size_t idx = 0; idx < rho_grid.size(); ++idx) {
    const double rho = rho_grid[idx];
    if (rho == 1.0) {
      analytic[idx] = true;  // zero last row/column, determinants vanish
      continue;
    }
    const double r = (rho == 0.0) ? 0.0 : std::pow(rho, 2.0 / (p - 2.0));
    std::vector<double> prods(replicas);
#ifdef PSPIN_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long k = 0; k < replicas; ++k) {
      Rng rg(seed.master_seed, std::uint64_t(k), 3000 + idx);
      const HessianPairSample sp =
          sample_hessian_pair(p, r, 0.0, 0.0, N, rg, false);
      prods[k] = detscale * sp.M1.determinant() * sp.M2.determinant();
    }
    double mean = 0.0;
    for (double v : prods) mean += v;
    mean /= replicas;
    double var = 0.0;
    for (double v : prods) var += (v - mean) * (v - mean);
    var /= (replicas - 1.0);
    means[idx] = mean;
    ses[idx] = std::sqrt(var / replicas);
  }

  std::size_t i0 = 0;
  for (std::size_t idx = 0; idx < rho_grid.size(); ++idx)
    if (rho_grid[idx] == 0.0) i0 = idx;
  const double g0 = means[i0], se0 = ses[i0];

  std::vector<DetCorrRow> rows;
  for (std::size_t idx = 0; idx < rho_grid.size(); ++idx) {
    DetCorrRow row;
    row.rho = rho_grid[idx];
    row.analytic = analytic[idx];
    row.g_value = analytic[idx] ? 0.0 : means[idx];
    row.std_err = analytic[idx] ? 0.0 : ses[idx];
    row.bound_rhs = row.rho * (0.0 - g0);
    if (idx == i0) {
      row.slack_sigma = 0.0;
      row.ok = true;
    } else {
      const double lhs = row.g_value - g0;
      const double sigma =
          std::sqrt(row.std_err * row.std_err +
                    (1.0 - row.rho) * (1.0 - row.rho) * se0 * se0);
      const double slack = row.bound_rhs - lhs;
      row.slack_sigma = (sigma > 0.0) ? slack / sigma : 0.0;
      row.ok = slack >= -3.0 * sigma;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pspin
