// End-to-end acceptance suite: one pass/fail line per criterion, nonzero exit
// if any criterion fails. All runs are deterministic given the fixed seeds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "fou2/gaussian.hpp"
#include "fou2/io.hpp"
#include "fou2/mc.hpp"
#include "fou2/pathwise.hpp"
#include "fou2/qv.hpp"

using namespace fou2;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_start;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
  std::printf("[%s] %2d %-28s (%.1fs) %s\n", ok ? "PASS" : "FAIL", idx, name.c_str(), secs,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
  g_start = std::chrono::steady_clock::now();
}

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// --- 1: small-time variogram limit -----------------------------------------
void criterion_variogram_limit() {
  bool ok = true;
  std::string detail;
  for (double H : {0.55, 0.6, 0.7, 0.8, 0.9}) {
    const HurstParam h(H);
    const double ratio = variogram(h, 1e-4) / std::pow(1e-4, 2.0 * H);
    if (!(ratio > 0.45 && ratio < 0.55)) ok = false;
    double prev_dev = 1e300;
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double dev = std::abs(variogram(h, t) / std::pow(t, 2.0 * H) - 0.5);
      if (!(dev < prev_dev)) ok = false;
      prev_dev = dev;
    }
    if (H == 0.7) detail = "v/t^2H(1e-4) = " + std::to_string(ratio) + " at H=0.7";
  }
  report(1, "variogram limit", ok, detail);
}

// --- 2: quadrature vs brute force ------------------------------------------
void criterion_kernel_bruteforce() {
  bool ok = true;
  double worst = 0.0;
  for (double H : {0.55, 0.6, 0.7, 0.8, 0.9}) {
    const HurstParam h(H);
    for (double t : {1e-3, 1e-2, 0.1}) {
      const double quad = variogram(h, t);
      const double brute = variogram_bruteforce(h, t, 4096);
      const double rel = std::abs(quad - brute) / quad;
      worst = std::max(worst, rel);
      if (!(rel < 1e-3)) ok = false;
    }
  }
  report(2, "kernel vs brute force", ok, "worst rel err " + std::to_string(worst));
}

// --- 3: sampler exactness ---------------------------------------------------
void criterion_sampler_exactness() {
  bool ok = true;
  std::string detail;
  const int N = 10000;
  const TimeGrid grid = TimeGrid::make_uniform(1.0, 15);  // 16 sample points
  const long m = static_cast<long>(grid.size());

  for (double H : {0.3, 0.5, 0.75}) {
    const HurstParam h(H);
    CovMatrix cov = build_cov_matrix(ProcessTag::FBM, h, grid);
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> chol_terminal, circ_terminal;
    chol_terminal.reserve(N);
    circ_terminal.reserve(N);
    for (int rep = 0; rep < N; ++rep) {
      GaussianPath p = sample_cholesky(cov, SeedSpec{300, static_cast<std::uint64_t>(rep)});
      Eigen::Map<const Eigen::VectorXd> v(p.values.data(), m);
      emp += v * v.transpose();
      chol_terminal.push_back(p.values.back());
      GaussianPath q =
          sample_fbm_circulant(h, grid, SeedSpec{301, static_cast<std::uint64_t>(rep)});
      circ_terminal.push_back(q.values.back());
    }
    emp /= static_cast<double>(N);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) {
        // Var(XY) = Cii Cjj + Cij^2 for a joint Gaussian pair
        const double se = std::sqrt(
            (cov.levels(i, i) * cov.levels(j, j) + cov.levels(i, j) * cov.levels(i, j)) / N);
        if (std::abs(emp(i, j) - cov.levels(i, j)) > 5.0 * se + 1e-14) ok = false;
      }
    KsResult ks = ks_two_sample(chol_terminal, circ_terminal);
    if (!(ks.p_value > 0.01)) ok = false;
    if (H == 0.75) detail = "KS p (circulant vs Cholesky, H=0.75) = " + std::to_string(ks.p_value);
  }
  report(3, "sampler exactness", ok, detail);
}

// --- 4: uniform consistency -------------------------------------------------
void criterion_consistency() {
  bool ok = true;
  std::string detail;
  for (double H : {0.6, 0.7}) {
    ConsistencyConfig config;
    config.h = H;
    config.theta = 0.0;
    config.sigma = VolatilityFn::constant(1.0);
    config.n_ladder = {1 << 10, 1 << 12, 1 << 14};
    config.replications = 100;
    config.base_seed = 400;
    config.threads = worker_threads();
    ExperimentReport rep = run_consistency(config);
    if (!rep.pass) ok = false;
    // single-path check at the largest n: the first replication's sup error
    double single = 1e300;
    for (const auto& row : rep.samples.rows)
      if (row[0] == static_cast<double>(1 << 14) && row[1] == 0.0) single = row[2];
    if (!(single < 0.1)) ok = false;
    const double med_small = rep.summary["per_n"][0]["median_sup_error"].get<double>();
    const double med_large = rep.summary["per_n"][2]["median_sup_error"].get<double>();
    if (H == 0.6)
      detail = "H=0.6 medians " + std::to_string(med_small) + " -> " + std::to_string(med_large);
  }
  report(4, "uniform consistency", ok, detail);
}

// --- 5: integrated volatility -----------------------------------------------
void criterion_integrated_vol() {
  ConsistencyConfig config;
  config.h = 0.7;
  config.theta = 1.0;
  config.x0 = 0.0;
  config.sigma = VolatilityFn::linear(1.0, 0.5);
  config.T = 1.0;
  config.n_ladder = {1 << 13};
  config.replications = 100;
  config.base_seed = 500;
  config.threads = worker_threads();
  ExperimentReport rep = run_consistency(config);
  const double med = rep.summary["per_n"][0]["median_sup_error"].get<double>();
  report(5, "integrated volatility", med < 0.05, "median sup error " + std::to_string(med));
}

// --- 6: drift negligibility -------------------------------------------------
void criterion_drift_negligibility() {
  bool ok = true;
  double worst_ratio = 0.0;
  const VolatilityFn zero = VolatilityFn::constant(0.0);
  for (double H : {0.6, 0.7}) {
    const HurstParam h(H);
    const TimeGrid grid = TimeGrid::make_uniform(1.0, 1024);
    for (int rep = 0; rep < 20; ++rep) {
      GaussianPath y =
          sample_y1(h, grid, SeedSpec{600, static_cast<std::uint64_t>(rep)}, Y1Route::Circulant);
      const double theta = 0.5 + 0.1 * rep;
      const double x0 = 1.0 + 0.05 * rep;
      Fou2Solution sol = solve_fou2(theta, zero, x0, y);
      double supx = 0.0;
      for (double v : sol.x.values) supx = std::max(supx, std::abs(v));
      const double qv = scaled_qv(sol.x.grid, sol.x.values, h, 1.0);
      const double bound = theta * theta * supx * supx * std::pow(1024.0, 2.0 * H - 2.0);
      worst_ratio = std::max(worst_ratio, qv / bound);
      if (!(qv <= bound)) ok = false;
    }
  }
  report(6, "drift negligibility", ok, "worst QV/bound " + std::to_string(worst_ratio));
}

// --- 7: stable CLT ----------------------------------------------------------
void criterion_stable_clt() {
  CltConfig config;
  config.h = 0.6;
  config.n = 1 << 12;
  config.replications = 500;
  config.base_seed = 700;
  config.threads = worker_threads();
  ExperimentReport rep = run_clt(config);
  bool ok = rep.pass;
  const double p = rep.summary["ks_p_value"].get<double>();

  bool refused = false;
  try {
    CltConfig bad = config;
    bad.h = 0.8;
    static_cast<void>(run_clt(bad));
  } catch (const std::domain_error&) {
    refused = true;
  }
  if (!refused) ok = false;
  report(7, "stable CLT", ok,
         "KS p = " + std::to_string(p) + ", H=0.8 " + (refused ? "refused" : "NOT refused"));
}

// --- 8: Brownian end-to-end oracle ------------------------------------------
void criterion_brownian_oracle() {
  CltConfig config;
  config.h = 0.5;
  config.n = 1 << 10;
  config.replications = 500;
  config.base_seed = 800;
  config.threads = worker_threads();
  ExperimentReport rep = run_clt(config);
  const double raw_var = rep.summary["raw_variance"].get<double>();
  const double p = rep.summary["ks_p_value"].get<double>();
  // classical chi-squared limit: Var sqrt(n)(V_n - T) -> 2T with T = 1
  const bool ok = std::abs(raw_var - 2.0) / 2.0 < 0.15 && p > 0.01;
  report(8, "Brownian oracle", ok,
         "raw variance " + std::to_string(raw_var) + ", KS p = " + std::to_string(p));
}

// --- 9: p-variation dynamic program vs exhaustive ---------------------------
void criterion_p_variation_oracle() {
  bool ok = true;
  NormalRng rng(SeedSpec{900, 0});
  const double ps[] = {1.0, 1.5, 2.0, 2.5, 3.0};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 10;  // 3..12 points
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.normal();
    const double p = ps[trial % 5];
    double best = 0.0;
    const int interior = n - 2;
    for (int mask = 0; mask < (1 << interior); ++mask) {
      std::vector<std::size_t> part = {0};
      for (int b = 0; b < interior; ++b)
        if (mask & (1 << b)) part.push_back(static_cast<std::size_t>(b + 1));
      part.push_back(static_cast<std::size_t>(n - 1));
      double s = 0.0;
      for (std::size_t k = 1; k < part.size(); ++k)
        s += std::pow(std::abs(v[part[k]] - v[part[k - 1]]), p);
      best = std::max(best, s);
    }
    const double dp = p_variation(v, p).value;
    if (std::abs(dp - std::pow(best, 1.0 / p)) > 1e-10) ok = false;
  }
  report(9, "p-variation oracle", ok, "200 paths, exhaustive enumeration");
}

// --- 10: Young-Loeve inequality ---------------------------------------------
void criterion_young_bound() {
  bool ok = true;
  double worst = 0.0;
  const HurstParam h(0.7);
  const TimeGrid fine = TimeGrid::make_uniform(1.0, 512);
  // u is smooth (Hoelder order 1) so p = 1; take q = 1/(H - eps) with eps = 0.1
  const double p = 1.0, q = 1.0 / 0.6;
  for (int trial = 0; trial < 100; ++trial) {
    NormalRng coeff(SeedSpec{1000, static_cast<std::uint64_t>(trial)});
    VolatilityFn u = VolatilityFn::sine(1.0 + coeff.normal(), 0.5 * coeff.normal(),
                                        2.0 + coeff.normal());
    GaussianPath y = sample_y1(h, fine, SeedSpec{1001, static_cast<std::uint64_t>(trial)},
                               Y1Route::Circulant);
    ProcessPath z = young_integral(u, y);
    std::vector<double> u_vals;
    u_vals.reserve(fine.size());
    for (double t : fine.points) u_vals.push_back(u(t));
    const double lhs = std::abs(z.values.back() - u(0.0) * (y.values.back() - y.values.front()));
    const double rhs = young_error_bound(p, q, p_variation(u_vals, p).value,
                                         p_variation(y.values, q).value);
    worst = std::max(worst, lhs / rhs);
    if (!(lhs <= rhs)) ok = false;
  }
  report(10, "Young bound", ok, "worst lhs/rhs " + std::to_string(worst));
}

// --- 11: byte-identical reproducibility -------------------------------------
void criterion_reproducibility() {
  bool ok = true;

  ConsistencyConfig cc;
  cc.h = 0.65;
  cc.n_ladder = {256, 1024};
  cc.replications = 20;
  cc.base_seed = 1100;
  cc.threads = worker_threads();
  ExperimentReport a = run_consistency(cc);
  ExperimentReport b = run_consistency(cc);
  if (a.summary.dump() != b.summary.dump()) ok = false;
  if (samples_to_csv(a.samples) != samples_to_csv(b.samples)) ok = false;

  CltConfig kc;
  kc.h = 0.6;
  kc.n = 256;
  kc.replications = 300;
  kc.variance_replications = 300;
  kc.base_seed = 1101;
  kc.threads = worker_threads();
  ExperimentReport c = run_clt(kc);
  ExperimentReport d = run_clt(kc);
  if (c.summary.dump() != d.summary.dump()) ok = false;
  if (samples_to_csv(c.samples) != samples_to_csv(d.samples)) ok = false;

  ExperimentReport e = run_variance_constant(HurstParam(0.6), 256, 200, 1102, cc.threads);
  ExperimentReport f = run_variance_constant(HurstParam(0.6), 256, 200, 1102, 1);
  if (e.summary.dump() != f.summary.dump()) ok = false;

  report(11, "reproducibility", ok, "reports byte-identical across reruns and thread counts");
}

}  // namespace

int main() {
  g_start = std::chrono::steady_clock::now();
  criterion_variogram_limit();
  criterion_kernel_bruteforce();
  criterion_sampler_exactness();
  criterion_consistency();
  criterion_integrated_vol();
  criterion_drift_negligibility();
  criterion_stable_clt();
  criterion_brownian_oracle();
  criterion_p_variation_oracle();
  criterion_young_bound();
  criterion_reproducibility();
  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
