#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fou2/gaussian.hpp"
#include "fou2/qv.hpp"
#include "fou2/types.hpp"

namespace fou2 {

struct KsResult {
  double distance = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov statistic against the standard normal, with
/// the asymptotic p-value from the Kolmogorov series.
KsResult ks_distance(std::vector<double> sample);

/// Two-sample KS statistic with asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// fBm increment correlation rho_H(r) = (|r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}) / 2.
double rho_fbm(const HurstParam& h, long r);

/// 2 sum_{r in Z} rho_H(r)^2, summed to tail tolerance 1e-10. Finite for H < 3/4.
double fbm_variance_benchmark(const HurstParam& h);

/// Raw replication samples, one row per replication, fixed column set.
struct SampleTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  nlohmann::ordered_json summary;
  SampleTable samples;
  bool pass = false;
};

struct ConsistencyConfig {
  double h = 0.7;
  double theta = 0.0;
  double x0 = 0.0;
  VolatilityFn sigma = VolatilityFn::constant(1.0);
  double T = 1.0;
  std::vector<long> n_ladder = {1 << 10, 1 << 12, 1 << 14};
  int replications = 100;
  std::uint64_t base_seed = 0;
  int threads = 1;
  Y1Route route = Y1Route::Circulant;
};

/// Per n in the ladder: median and 90th percentile of sup_t |QV_n - target|
/// over the replications. Verdict: the median at the largest n is below half
/// its value at the smallest n.
ExperimentReport run_consistency(const ConsistencyConfig& config);

struct CltConfig {
  double h = 0.6;
  double theta = 0.0;
  double x0 = 0.0;
  std::vector<VolatilityFn> sigmas = {VolatilityFn::constant(1.0)};
  double T = 1.0;
  long n = 1 << 12;
  int replications = 500;
  std::uint64_t base_seed = 0;
  int threads = 1;
  double ks_level = 0.01;
  int variance_replications = 2000;  // for the empirical constant c_H
};

/// Standardized CLT samples at t = T, one-sample KS against the standard
/// normal, the two-time covariance ratio at (T/2, T), and (when several sigmas
/// are configured) the regression of mean squared raw statistics on
/// \int sigma^4. Refuses H >= 3/4 (theorem hypothesis).
ExperimentReport run_clt(const CltConfig& config);

struct VarianceConstantResult {
  double c_hat = 0.0;       // empirical variance of sqrt(n)(QV_n(Y)_1 - 1)
  double benchmark = 0.0;   // fBm benchmark 2 sum rho_H(r)^2
  double standard_error = 0.0;
};

/// Empirical variance constant from R replications with sigma == 1, T = 1.
VarianceConstantResult estimate_variance_constant(const HurstParam& h, long n, int R,
                                                  std::uint64_t base_seed,
                                                  int threads = 1);

ExperimentReport run_variance_constant(const HurstParam& h, long n, int R,
                                       std::uint64_t base_seed, int threads = 1);

/// Runs fn(rep) for rep in [0, count) on the given number of workers; results
/// are aggregated by replication index so execution order never matters.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace fou2
