// pspin: tables and curve data for the p-spin saddle-count library.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#ifdef PSPIN_OPENMP
#include <omp.h>
#endif

#include "pspin/analytics.hpp"
#include "pspin/complexity.hpp"
#include "pspin/numerics.hpp"
#include "pspin/covariance.hpp"
#include "pspin/dyson.hpp"
#include "pspin/ensemble.hpp"
#include "pspin/pair_rate.hpp"
#include "pspin/variational.hpp"

namespace {

using nlohmann::ordered_json;
using namespace pspin;

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

const char* regime_name(PairRegime r) {
  switch (r) {
    case PairRegime::Uncoupled: return "uncoupled";
    case PairRegime::Coupled: return "coupled";
    default: return "infinite";
  }
}

const char* branch_name(PsiBranch b) {
  switch (b) {
    case PsiBranch::Perp: return "perp";
    case PsiBranch::Parallel: return "parallel";
    case PsiBranch::Boundary: return "boundary";
    default: return "extension_endpoint";
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  Table table;
  ordered_json data;
};

struct Opts {
  int p = 3;
  int ell = 0;
  int ell_max = 5;
  int N = 60;
  int n = 8;
  int points = 101;
  int threads = 0;
  long replicas = 1000;
  double u1 = 0.0, u2 = 0.0;
  double u_min = 0.0, u_max = 0.0;
  bool have_u_min = false, have_u_max = false;
  double r = 0.0, r_max = 0.6;
  double x = 0.0, y = 0.0;
  bool have_y = false;
  bool coupled = false;
  std::uint64_t seed = 12345;
  std::vector<int> N_list;
  std::string out;
  std::string format = "csv";
};

void write_output(const Opts& o, const std::string& command,
                  const ordered_json& config, const Output& result) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    require(file.good(), "cannot open output file");
    os = &file;
  }
  if (o.format == "json") {
    ordered_json doc;
    doc["meta"] = {{"version", kVersion},
                   {"command", command},
                   {"config", config},
                   {"seed", o.seed}};
    doc["data"] = result.data;
    *os << doc.dump(2) << '\n';
  } else {
    const Table& t = result.table;
    for (std::size_t i = 0; i < t.header.size(); ++i)
      *os << (i ? "," : "") << t.header[i];
    *os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        *os << (i ? "," : "") << row[i];
      *os << '\n';
    }
  }
  os->flush();
  require(os->good(), "write failed");
}

Output cmd_thresholds(const Opts& o) {
  Output out;
  out.table.header = {"ell", "E_ell"};
  ordered_json list = ordered_json::array();
  for (int ell = 0; ell <= o.ell_max; ++ell) {
    const double e = threshold_E_ell({o.p, ell});
    out.table.rows.push_back({fmt(ell), fmt(e)});
    list.push_back({{"ell", ell}, {"E_ell", e}});
  }
  const double e_inf = threshold_E_inf(o.p);
  out.table.rows.push_back({"inf", fmt(e_inf)});
  out.data = {{"thresholds", list}, {"E_inf", e_inf}};
  return out;
}

Output cmd_complexity(const Opts& o) {
  const ModelParams params{o.p, o.ell};
  validate(params);
  require(o.points >= 2, "points must be >= 2");
  const double lo = o.have_u_min ? o.u_min : -2.0;
  const double hi = o.have_u_max ? o.u_max : -threshold_E_inf(o.p);
  require(lo < hi, "u range is empty");
  Output out;
  out.table.header = {"u", "sigma_ell", "sigma_total", "sigma_derivative"};
  ordered_json list = ordered_json::array();
  for (int i = 0; i < o.points; ++i) {
    const double u = lo + (hi - lo) * i / (o.points - 1);
    const double s = sigma_ell(params, u);
    const double st = sigma_total(o.p, u);
    const double sd = sigma_derivative(params, u);
    out.table.rows.push_back({fmt(u), fmt(s), fmt(st), fmt(sd)});
    list.push_back({{"u", u},
                    {"sigma_ell", s},
                    {"sigma_total", st},
                    {"sigma_derivative", sd}});
  }
  out.data = {{"rows", list}};
  return out;
}

Output cmd_rate_pair(const Opts& o) {
  require(o.ell >= 1, "ell must be >= 1");
  const double y = o.have_y ? o.y : o.x;
  const PairRateValue v = pair_rate(o.p, o.r, o.ell, o.x, y);
  Output out;
  out.table.header = {"x",          "y",         "regime",   "boundary",
                      "pair_rate",  "rect_arg1", "rect_arg2", "rect_value"};
  if (v.regime == PairRegime::Infinite) {
    out.table.rows.push_back({fmt(o.x), fmt(y), regime_name(v.regime),
                              fmt(v.boundary), "inf", "", "", ""});
    out.data = {{"x", o.x},       {"y", y},
                {"regime", regime_name(v.regime)}, {"boundary", v.boundary},
                {"pair_rate", nullptr}};
    return out;
  }
  const RectMin rm = rect_min(o.p, o.r, o.ell, std::max(o.x, 2.0 + 1e-12),
                              std::max(y, 2.0 + 1e-12));
  out.table.rows.push_back({fmt(o.x), fmt(y), regime_name(v.regime),
                            fmt(v.boundary), fmt(v.value.value), fmt(rm.arg1),
                            fmt(rm.arg2), fmt(rm.value)});
  out.data = {{"x", o.x},
              {"y", y},
              {"regime", regime_name(v.regime)},
              {"boundary", v.boundary},
              {"pair_rate", v.value.value},
              {"rect_arg1", rm.arg1},
              {"rect_arg2", rm.arg2},
              {"rect_value", rm.value}};
  return out;
}

Output cmd_psi(const Opts& o) {
  const ModelParams params{o.p, o.ell};
  validate(params);
  Output out;
  out.table.header = {"r", "u1", "u2", "value", "branch"};
  ordered_json list = ordered_json::array();
  const int pts = o.points >= 2 ? o.points : 1;
  const double lo = pts > 1 ? -o.r_max : o.r;
  const double hi = pts > 1 ? o.r_max : o.r;
  for (int i = 0; i < pts; ++i) {
    const double r = pts > 1 ? lo + (hi - lo) * i / (pts - 1) : lo;
    const PsiEvaluation e = bounding_psi(params, r, o.u1, o.u2);
    out.table.rows.push_back(
        {fmt(r), fmt(o.u1), fmt(o.u2), fmt(e.value), branch_name(e.branch)});
    list.push_back({{"r", r},
                    {"u1", o.u1},
                    {"u2", o.u2},
                    {"value", e.value},
                    {"branch", branch_name(e.branch)}});
  }
  out.data = {{"rows", list}};
  return out;
}

Output cmd_psi_opt(const Opts& o) {
  const ModelParams params{o.p, o.ell};
  validate(params);
  require(o.have_u_max, "--u-max is required");
  const double u_lo =
      o.have_u_min ? o.u_min : -threshold_E_ell(params) + 1e-3;
  const PsiOpt opt = optimize_psi(params, -o.r_max, o.r_max, u_lo, o.u_max);
  const double expected = 2.0 * sigma_ell(params, o.u_max);
  Output out;
  out.table.header = {"r", "u1", "u2", "value", "expected"};
  out.table.rows.push_back(
      {fmt(opt.r), fmt(opt.u1), fmt(opt.u2), fmt(opt.value), fmt(expected)});
  out.data = {{"argmax", {{"r", opt.r}, {"u1", opt.u1}, {"u2", opt.u2}}},
              {"value", opt.value},
              {"expected", expected}};
  return out;
}

Output cmd_dyson(const Opts& o) {
  require(o.n >= 1, "n must be >= 1");
  require(o.points >= 1, "points must be >= 1");
  std::vector<double> grid(o.points);
  for (int i = 0; i < o.points; ++i) grid[i] = double(i + 1) / o.points;
  Rng rng(o.seed);
  const auto paths = dyson_simulate(o.n, grid, rng);
  Output out;
  out.table.header = {"t"};
  for (int j = 1; j <= o.n; ++j)
    out.table.header.push_back("lambda" + std::to_string(j));
  ordered_json list = ordered_json::array();
  for (int i = 0; i < o.points; ++i) {
    std::vector<std::string> row{fmt(grid[i])};
    for (double v : paths[i]) row.push_back(fmt(v));
    out.table.rows.push_back(row);
    list.push_back({{"t", grid[i]}, {"eigenvalues", paths[i]}});
  }
  out.data = {{"rows", list}};
  return out;
}

Output cmd_sample_hessian(const Opts& o) {
  Rng rng(o.seed);
  const HessianPairSample s =
      sample_hessian_pair(o.p, o.r, o.u1, o.u2, o.N, rng, o.coupled);
  const Eigen::MatrixXd S1 = s.shifted(1), S2 = s.shifted(2);
  Output out;
  out.table.header = {"i", "j", "M1", "M2", "M1_shifted", "M2_shifted"};
  for (int i = 0; i < s.M1.rows(); ++i)
    for (int j = 0; j < s.M1.cols(); ++j)
      out.table.rows.push_back({fmt(i), fmt(j), fmt(s.M1(i, j)),
                                fmt(s.M2(i, j)), fmt(S1(i, j)),
                                fmt(S2(i, j))});
  ordered_json m1 = ordered_json::array(), m2 = ordered_json::array();
  for (int i = 0; i < s.M1.rows(); ++i) {
    ordered_json r1 = ordered_json::array(), r2 = ordered_json::array();
    for (int j = 0; j < s.M1.cols(); ++j) {
      r1.push_back(s.M1(i, j));
      r2.push_back(s.M2(i, j));
    }
    m1.push_back(r1);
    m2.push_back(r2);
  }
  out.data = {{"u_bar", {s.u_bar1, s.u_bar2}},
              {"m_circ", {s.m_circ1, s.m_circ2}},
              {"coupled", s.has_coupling},
              {"M1", m1},
              {"M2", m2}};
  return out;
}

Output cmd_index_check(const Opts& o) {
  require(o.replicas >= 1, "replicas must be >= 1");
  Output out;
  out.table.header = {"replica",    "ind_M1",     "ind_G1", "identity1",
                      "interlaced1", "ind_M2",    "ind_G2", "identity2",
                      "interlaced2", "transfer1", "transfer2"};
  std::vector<IndexReport> reports(o.replicas);
#ifdef PSPIN_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long k = 0; k < o.replicas; ++k) {
    Rng rng(o.seed, std::uint64_t(k), 0);
    const HessianPairSample s =
        sample_hessian_pair(o.p, o.r, o.u1, o.u2, o.N, rng, false);
    reports[k] = index_diagnostics(s);
  }
  long transfer = 0, identity = 0;
  ordered_json list = ordered_json::array();
  for (long k = 0; k < o.replicas; ++k) {
    const IndexReport& rep = reports[k];
    const bool t1 = rep.ind_M[0] == rep.ind_minor[0];
    const bool t2 = rep.ind_M[1] == rep.ind_minor[1];
    transfer += int(t1) + int(t2);
    identity += int(rep.identity[0]) + int(rep.identity[1]);
    out.table.rows.push_back(
        {fmt(k), fmt(rep.ind_M[0]), fmt(rep.ind_minor[0]),
         fmt(rep.identity[0]), fmt(rep.interlaced[0]), fmt(rep.ind_M[1]),
         fmt(rep.ind_minor[1]), fmt(rep.identity[1]), fmt(rep.interlaced[1]),
         fmt(t1), fmt(t2)});
    list.push_back({{"replica", k},
                    {"ind_M", {rep.ind_M[0], rep.ind_M[1]}},
                    {"ind_G", {rep.ind_minor[0], rep.ind_minor[1]}},
                    {"identity", {rep.identity[0], rep.identity[1]}},
                    {"interlaced", {rep.interlaced[0], rep.interlaced[1]}}});
  }
  out.data = {{"rows", list},
              {"transfer_fraction", double(transfer) / (2.0 * o.replicas)},
              {"identity_fraction", double(identity) / (2.0 * o.replicas)}};
  return out;
}

std::vector<double> symmetric_grid(double half, int points) {
  require(points >= 3 && points % 2 == 1,
          "points must be odd and >= 3 for the overlap grid");
  require(half > 0.0 && half < 1.0, "overlap half-width must lie in (0,1)");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = -half + 2.0 * half * i / (points - 1);
  g[points / 2] = 0.0;
  return g;
}

Output cmd_kac_rice(const Opts& o) {
  const ModelParams params{o.p, o.ell};
  validate(params);
  require(o.have_u_min && o.have_u_max, "--u-min and --u-max are required");
  const std::vector<double> grid = symmetric_grid(o.r_max, o.points);
  const SeedSpec seed{o.seed, std::uint64_t(o.replicas)};
  const KacRiceResult res = kacrice_moment_estimate(params, o.u_min, o.u_max,
                                                    o.N, grid, o.replicas,
                                                    seed);
  Output out;
  out.table.header = {"r",
                      "log_integrand_per_N",
                      "log_second_per_N",
                      "second_censored",
                      "log_first_per_N",
                      "first_censored",
                      "first_rel_std",
                      "target_log_second",
                      "target_log_first"};
  for (std::size_t i = 0; i < res.r_values.size(); ++i)
    out.table.rows.push_back(
        {fmt(res.r_values[i]), fmt(res.r_profile[i]),
         fmt(res.log_second_per_N), fmt(res.second_censored),
         fmt(res.log_first_per_N), fmt(res.first_censored),
         fmt(res.first_rel_std), fmt(res.target_log_second),
         fmt(res.target_log_first)});
  ordered_json profile = ordered_json::array();
  for (std::size_t i = 0; i < res.r_values.size(); ++i)
    profile.push_back({{"r", res.r_values[i]}, {"log_integrand_per_N", res.r_profile[i]}});
  out.data = {{"log_second_per_N",
               res.second_censored ? ordered_json(nullptr)
                                   : ordered_json(res.log_second_per_N)},
              {"second_censored", res.second_censored},
              {"log_first_per_N",
               res.first_censored ? ordered_json(nullptr)
                                  : ordered_json(res.log_first_per_N)},
              {"first_censored", res.first_censored},
              {"first_rel_std", res.first_rel_std},
              {"target_log_second", res.target_log_second},
              {"target_log_first", res.target_log_first},
              {"profile", profile}};
  return out;
}

Output cmd_ldp_tail(const Opts& o) {
  require(o.ell >= 1, "ell must be >= 1");
  std::vector<int> Ns = o.N_list.empty() ? std::vector<int>{o.N} : o.N_list;
  const double y = o.have_y ? o.y : o.x;
  const SeedSpec seed{o.seed, std::uint64_t(o.replicas)};
  const TailTable t =
      tail_rate_estimate(o.p, o.r, o.ell, o.x, y, Ns, o.replicas, seed);
  Output out;
  out.table.header = {"N",      "events",  "replicas", "censored",
                      "estimate", "target", "arg1",     "arg2",
                      "regime"};
  ordered_json list = ordered_json::array();
  for (const auto& row : t.rows) {
    out.table.rows.push_back({fmt(row.N), fmt(row.events), fmt(row.replicas),
                              fmt(row.censored), fmt(row.estimate),
                              fmt(t.target), fmt(t.arg1), fmt(t.arg2),
                              regime_name(t.regime)});
    list.push_back({{"N", row.N},
                    {"events", row.events},
                    {"replicas", row.replicas},
                    {"censored", row.censored},
                    {"estimate", row.censored ? ordered_json(nullptr)
                                              : ordered_json(row.estimate)}});
  }
  out.data = {{"rows", list},
              {"target", t.target},
              {"arg1", t.arg1},
              {"arg2", t.arg2},
              {"regime", regime_name(t.regime)}};
  return out;
}

Output cmd_det_corr(const Opts& o) {
  require(o.points >= 2, "points must be >= 2");
  std::vector<double> grid(o.points);
  for (int i = 0; i < o.points; ++i) grid[i] = double(i) / (o.points - 1);
  grid.front() = 0.0;
  grid.back() = 1.0;
  const SeedSpec seed{o.seed, std::uint64_t(o.replicas)};
  const auto rows = det_correlation_check(o.p, grid, o.n, o.replicas, seed);
  Output out;
  out.table.header = {"rho",        "g",  "std_err", "bound_rhs",
                      "slack_sigma", "ok", "analytic"};
  ordered_json list = ordered_json::array();
  for (const auto& row : rows) {
    out.table.rows.push_back({fmt(row.rho), fmt(row.g_value),
                              fmt(row.std_err), fmt(row.bound_rhs),
                              fmt(row.slack_sigma), fmt(row.ok),
                              fmt(row.analytic)});
    list.push_back({{"rho", row.rho},
                    {"g", row.g_value},
                    {"std_err", row.std_err},
                    {"bound_rhs", row.bound_rhs},
                    {"slack_sigma", row.slack_sigma},
                    {"ok", row.ok},
                    {"analytic", row.analytic}});
  }
  out.data = {{"rows", list}};
  return out;
}

// Boundary of the coupled region at fixed x: the y making s v(x) v(y) = 1,
// which exists when 1/(s v(x)) >= 1.
bool boundary_level(int p, double r, double x, double* y) {
  const double s = ipow(std::abs(r), p - 2);
  if (s <= 0.0) return false;
  const double w = 1.0 / (s * v_map(x));
  if (w < 1.0) return false;
  *y = w + 1.0 / w;
  return true;
}

Output cmd_verify(const Opts& o, bool* all_pass) {
  const ModelParams params{o.p, o.ell};
  validate(params);
  Output out;
  out.table.header = {"check", "residual", "pass"};
  ordered_json list = ordered_json::array();
  auto add = [&](const std::string& name, double residual, bool pass) {
    out.table.rows.push_back({name, fmt(residual), fmt(pass)});
    list.push_back({{"check", name}, {"residual", residual}, {"pass", pass}});
    *all_pass = *all_pass && pass;
  };
  *all_pass = true;

  const IdentityReport rep = identity_suite(params);
  for (const auto& e : rep.entries) add(e.name, e.max_residual, e.pass);

  const int ell = std::max(o.ell, 1);
  double cont = 0.0;
  for (double r : {0.2, 0.5, 0.8}) {
    for (int i = 0; i < 100; ++i) {
      const double x = 2.05 + (3.0 - 2.05) * i / 99.0;
      double y;
      if (!boundary_level(o.p, r, x, &y)) continue;
      const double s = ipow(r, o.p - 2);
      const double coupled = ell * coupled_branch(s, x, y);
      const double split = ell * (rate_I1_closed(x) + rate_I1_closed(y));
      cont = std::max(cont, std::abs(coupled - split));
    }
  }
  add("pair_rate_continuity", cont, cont <= 1e-9);

  double contr = 0.0;
  for (double r : {0.2, 0.5, 0.8}) {
    const double s = ipow(r, o.p - 2);
    const double q = s * s;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        const double x = 2.05 + (3.0 - 2.05) * i / 11.0;
        const double y = 2.05 + (3.0 - 2.05) * j / 11.0;
        const ExtReal c = contracted_rate(x, s * y, q, ell);
        const PairRateValue v = pair_rate(o.p, r, ell, x, y);
        if (c.is_finite() != v.value.is_finite()) {
          contr = INFINITY;
          continue;
        }
        if (c.is_finite())
          contr = std::max(contr, std::abs(c.value - v.value.value));
      }
  }
  add("dyson_contraction", contr, contr <= 1e-8);

  double seg = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = 2.1 + 0.09 * i;
    const LinearSegment ls = linear_segment(x, x + 0.5, 0.25);
    seg = std::max(seg, std::abs(ls.rate_closed - ls.rate_quad));
  }
  add("segment_quadrature", seg, seg <= 1e-8);

  out.data = {{"checks", list}, {"all_pass", *all_pass}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical p-spin saddle statistics"};
  app.require_subcommand(1);
  Opts o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker thread count");
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* thresholds = app.add_subcommand("thresholds", "energy thresholds");
  thresholds->add_option("--p", o.p, "degree");
  thresholds->add_option("--ell-max", o.ell_max, "largest index");
  add_common(thresholds);

  CLI::App* complexity = app.add_subcommand("complexity", "complexity curves");
  complexity->add_option("--p", o.p, "degree");
  complexity->add_option("--ell", o.ell, "index");
  complexity->add_option("--u-min", o.u_min, "energy lower end")
      ->each([&](const std::string&) { o.have_u_min = true; });
  complexity->add_option("--u-max", o.u_max, "energy upper end")
      ->each([&](const std::string&) { o.have_u_max = true; });
  complexity->add_option("--points", o.points, "grid size");
  add_common(complexity);

  CLI::App* rate_pair = app.add_subcommand("rate-pair", "eigenvalue pair rate");
  rate_pair->add_option("--p", o.p, "degree");
  rate_pair->add_option("--ell", o.ell, "eigenvalue rank")->default_val(1);
  rate_pair->add_option("--r", o.r, "overlap");
  rate_pair->add_option("--x", o.x, "first level")->required();
  rate_pair->add_option("--y", o.y, "second level")
      ->each([&](const std::string&) { o.have_y = true; });
  add_common(rate_pair);

  CLI::App* psi = app.add_subcommand("psi", "two-point exponent");
  psi->add_option("--p", o.p, "degree");
  psi->add_option("--ell", o.ell, "index");
  psi->add_option("--r", o.r, "overlap");
  psi->add_option("--u1", o.u1, "first energy")->required();
  psi->add_option("--u2", o.u2, "second energy")->required();
  psi->add_option("--points", o.points, "overlap grid size (1 = single r)")
      ->default_val(1);
  psi->add_option("--r-max", o.r_max, "overlap grid half-width")
      ->default_val(0.95);
  add_common(psi);

  CLI::App* psi_opt = app.add_subcommand("psi-opt", "two-point maximizer");
  psi_opt->add_option("--p", o.p, "degree");
  psi_opt->add_option("--ell", o.ell, "index");
  psi_opt->add_option("--u-min", o.u_min, "energy box lower end")
      ->each([&](const std::string&) { o.have_u_min = true; });
  psi_opt->add_option("--u-max", o.u_max, "energy box upper end")
      ->each([&](const std::string&) { o.have_u_max = true; });
  psi_opt->add_option("--r-max", o.r_max, "overlap half-width")
      ->default_val(0.95);
  add_common(psi_opt);

  CLI::App* dyson = app.add_subcommand("dyson", "eigenvalue motion paths");
  dyson->add_option("--n", o.n, "matrix dimension");
  dyson->add_option("--points", o.points, "time grid size")->default_val(100);
  add_common(dyson);

  CLI::App* sample = app.add_subcommand("sample-hessian", "one Hessian pair");
  sample->add_option("--p", o.p, "degree");
  sample->add_option("--r", o.r, "overlap");
  sample->add_option("--u1", o.u1, "first energy");
  sample->add_option("--u2", o.u2, "second energy");
  sample->add_option("--N", o.N, "ambient dimension");
  sample->add_flag("--coupled", o.coupled, "shared-factor construction");
  add_common(sample);

  CLI::App* index = app.add_subcommand("index-check", "index diagnostics");
  index->add_option("--p", o.p, "degree");
  index->add_option("--r", o.r, "overlap");
  index->add_option("--u1", o.u1, "first energy")->required();
  index->add_option("--u2", o.u2, "second energy")->required();
  index->add_option("--N", o.N, "ambient dimension");
  index->add_option("--replicas", o.replicas, "sample count");
  add_common(index);

  CLI::App* kac = app.add_subcommand("kac-rice", "moment estimates");
  kac->add_option("--p", o.p, "degree");
  kac->add_option("--ell", o.ell, "index");
  kac->add_option("--u-min", o.u_min, "energy box lower end")
      ->each([&](const std::string&) { o.have_u_min = true; });
  kac->add_option("--u-max", o.u_max, "energy box upper end")
      ->each([&](const std::string&) { o.have_u_max = true; });
  kac->add_option("--N", o.N, "ambient dimension");
  kac->add_option("--points", o.points, "overlap grid size")->default_val(25);
  kac->add_option("--r-max", o.r_max, "overlap grid half-width")
      ->default_val(0.6);
  kac->add_option("--replicas", o.replicas, "replica count");
  add_common(kac);

  CLI::App* tail = app.add_subcommand("ldp-tail", "pair tail estimates");
  tail->add_option("--p", o.p, "degree");
  tail->add_option("--r", o.r, "overlap");
  tail->add_option("--ell", o.ell, "eigenvalue rank")->default_val(1);
  tail->add_option("--x", o.x, "first level")->required();
  tail->add_option("--y", o.y, "second level")
      ->each([&](const std::string&) { o.have_y = true; });
  tail->add_option("--N", o.N_list, "dimensions (repeatable)");
  tail->add_option("--replicas", o.replicas, "replica count");
  add_common(tail);

  CLI::App* det = app.add_subcommand("det-corr", "determinant correlation");
  det->add_option("--p", o.p, "degree");
  det->add_option("--n", o.n, "matrix dimension");
  det->add_option("--points", o.points, "rho grid size")->default_val(5);
  det->add_option("--replicas", o.replicas, "replica count");
  add_common(det);

  CLI::App* verify = app.add_subcommand("verify", "closed-form cross-checks");
  verify->add_option("--p", o.p, "degree");
  verify->add_option("--ell", o.ell, "index");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    require(o.p >= 3, "p must be >= 3");
#ifdef PSPIN_OPENMP
    if (o.threads > 0) omp_set_num_threads(o.threads);
#endif
    ordered_json config = {{"p", o.p}};
    Output result;
    std::string name;
    bool verify_pass = true;
    if (thresholds->parsed()) {
      name = "thresholds";
      config["ell_max"] = o.ell_max;
      result = cmd_thresholds(o);
    } else if (complexity->parsed()) {
      name = "complexity";
      config["ell"] = o.ell;
      config["points"] = o.points;
      result = cmd_complexity(o);
    } else if (rate_pair->parsed()) {
      name = "rate-pair";
      config["ell"] = o.ell;
      config["r"] = o.r;
      config["x"] = o.x;
      result = cmd_rate_pair(o);
    } else if (psi->parsed()) {
      name = "psi";
      config["ell"] = o.ell;
      config["u1"] = o.u1;
      config["u2"] = o.u2;
      result = cmd_psi(o);
    } else if (psi_opt->parsed()) {
      name = "psi-opt";
      config["ell"] = o.ell;
      config["u_max"] = o.u_max;
      result = cmd_psi_opt(o);
    } else if (dyson->parsed()) {
      name = "dyson";
      config["n"] = o.n;
      config["points"] = o.points;
      result = cmd_dyson(o);
    } else if (sample->parsed()) {
      name = "sample-hessian";
      config["r"] = o.r;
      config["N"] = o.N;
      config["coupled"] = o.coupled;
      result = cmd_sample_hessian(o);
    } else if (index->parsed()) {
      name = "index-check";
      config["r"] = o.r;
      config["N"] = o.N;
      config["replicas"] = o.replicas;
      result = cmd_index_check(o);
    } else if (kac->parsed()) {
      name = "kac-rice";
      config["ell"] = o.ell;
      config["N"] = o.N;
      config["replicas"] = o.replicas;
      config["points"] = o.points;
      result = cmd_kac_rice(o);
    } else if (tail->parsed()) {
      name = "ldp-tail";
      config["ell"] = o.ell;
      config["r"] = o.r;
      config["x"] = o.x;
      config["replicas"] = o.replicas;
      result = cmd_ldp_tail(o);
    } else if (det->parsed()) {
      name = "det-corr";
      config["n"] = o.n;
      config["replicas"] = o.replicas;
      config["points"] = o.points;
      result = cmd_det_corr(o);
    } else if (verify->parsed()) {
      name = "verify";
      config["ell"] = o.ell;
      result = cmd_verify(o, &verify_pass);
    }
    write_output(o, name, config, result);
    if (!verify_pass) return 3;
    return 0;
  } catch (const pspin::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const pspin::numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
