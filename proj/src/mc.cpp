#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fou2/mc.hpp"
#include "fou2/pathwise.hpp"

namespace fou2 {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}
double kolmogorov_pvalue(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += (k % 2 == 1) ? term : -term;
    if (k >= 20 && term < 1e-16) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

double ks_lambda(double n_effective, double d) {
  const double rt = std::sqrt(n_effective);
  return (rt + 0.12 + 0.11 / rt) * d;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("median of empty set");
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile90(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::size_t idx = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
  if (idx > 0) --idx;
  return v[idx];
}

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / (n - 1.0);
}

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / (n - 1.0);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t label) {
  return SeedSpec{base, label}.effective();
}

/// Precomputed Y1 driver spec so replications share one autocovariance table.
struct DriverSpec {
  HurstParam h;
  TimeGrid grid;
  Y1Route route = Y1Route::Circulant;
  std::vector<double> gamma;  // circulant route only
  int refine = 16;
};

DriverSpec make_driver(const HurstParam& h, double T, long n, Y1Route route, int refine = 16) {
  DriverSpec d{h, TimeGrid::make_uniform(T, n), route, {}, refine};
  if (route == Y1Route::Circulant)
    d.gamma = y1_increment_autocov(h, T / static_cast<double>(n), n);
  return d;
}

GaussianPath sample_driver(const DriverSpec& spec, const SeedSpec& seed) {
  if (spec.route == Y1Route::Circulant) {
    NormalRng rng(seed);
    bool fallback = false;
    auto inc = sample_stationary(spec.gamma, spec.grid.n, rng, &fallback);
    GaussianPath p;
    p.grid = spec.grid;
    p.tag = ProcessTag::Y1;
    p.h = spec.h.value();
    p.method = fallback ? SampleMethod::Cholesky : SampleMethod::Circulant;
    p.seed = seed;
    p.values.assign(inc.size() + 1, 0.0);
    for (std::size_t i = 0; i < inc.size(); ++i) p.values[i + 1] = p.values[i] + inc[i];
    return p;
  }
  return sample_y1(spec.h, spec.grid, seed, spec.route, spec.refine);
}

nlohmann::ordered_json sigma_json(const VolatilityFn& sigma) {
  return sigma.describe();
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);  // all-or-nothing: no partial reports
}

KsResult ks_distance(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, kolmogorov_pvalue(ks_lambda(n, d))};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    // step past all copies of the smaller value so ties never register a gap
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_pvalue(ks_lambda(ne, d))};
}

double rho_fbm(const HurstParam& h, long r) {
  const double twoH = 2.0 * h.value();
  const double x = static_cast<double>(std::labs(r));
  return 0.5 * (std::pow(x + 1.0, twoH) + std::pow(std::abs(x - 1.0), twoH) -
                2.0 * std::pow(x, twoH));
}

double fbm_variance_benchmark(const HurstParam& h) {
  if (h.value() >= 0.75)
    throw std::domain_error("fbm_variance_benchmark: series diverges for H >= 3/4");
  const double rho0 = rho_fbm(h, 0);  // = 1
  double acc = rho0 * rho0;
  const double decay = 4.0 * h.value() - 4.0;  // rho(r)^2 ~ C r^{4H-4}
  for (long r = 1; r <= 100000000L; ++r) {
    const double rho = rho_fbm(h, r);
    acc += 2.0 * rho * rho;
    // integral tail bound for the remaining sum
    const double tail = 2.0 * rho * rho * static_cast<double>(r) / (-decay - 1.0);
    if (r > 8 && tail < 1e-10) break;
  }
  return 2.0 * acc;
}

ExperimentReport run_consistency(const ConsistencyConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("run_consistency: replication count must be >= 1");
  if (config.n_ladder.empty())
    throw std::invalid_argument("run_consistency: empty n ladder");
  HurstParam h(config.h);
  config.sigma.require_young_regularity(h);

  ExperimentReport report;
  report.samples.columns = {"n", "replication", "sup_error"};
  nlohmann::ordered_json per_n = nlohmann::ordered_json::array();

  std::vector<double> medians;
  for (std::size_t ni = 0; ni < config.n_ladder.size(); ++ni) {
    const long n = config.n_ladder[ni];
    DriverSpec driver = make_driver(h, config.T, n, config.route);
    std::vector<double> errors(static_cast<std::size_t>(config.replications), 0.0);
    const std::uint64_t stream = stream_seed(config.base_seed, 1000 + ni);
    parallel_for(config.replications, config.threads, [&](int rep) {
      GaussianPath y = sample_driver(driver, SeedSpec{stream, static_cast<std::uint64_t>(rep)});
      Fou2Solution sol = solve_fou2(config.theta, config.sigma, config.x0, y);
      QVSeries est = qv_estimator(sol.x, h);
      IVTarget target = make_iv_target(config.sigma, est.eval);
      errors[static_cast<std::size_t>(rep)] = sup_error(est, target);
    });
    for (int rep = 0; rep < config.replications; ++rep)
      report.samples.rows.push_back({static_cast<double>(n), static_cast<double>(rep),
                                     errors[static_cast<std::size_t>(rep)]});
    const double med = median(errors);
    medians.push_back(med);
    per_n.push_back({{"n", n},
                     {"median_sup_error", med},
                     {"q90_sup_error", quantile90(errors)}});
  }
  const bool monotone_verdict =
      config.n_ladder.size() < 2 || medians.back() < 0.5 * medians.front();

  report.summary = {{"experiment", "consistency"},
                    {"h", config.h},
                    {"theta", config.theta},
                    {"x0", config.x0},
                    {"sigma", sigma_json(config.sigma)},
                    {"T", config.T},
                    {"n_ladder", config.n_ladder},
                    {"replications", config.replications},
                    {"base_seed", config.base_seed},
                    {"route", config.route == Y1Route::Circulant    ? "circulant"
                              : config.route == Y1Route::ExactCov   ? "exact-cov"
                                                                    : "timechange"},
                    {"per_n", per_n},
                    {"median_halved_across_ladder", monotone_verdict}};
  report.pass = monotone_verdict;
  report.summary["pass"] = report.pass;
  return report;
}

VarianceConstantResult estimate_variance_constant(const HurstParam& h, long n, int R,
                                                  std::uint64_t base_seed, int threads) {
  if (R < 2) throw std::invalid_argument("estimate_variance_constant: R must be >= 2");
  DriverSpec driver = make_driver(h, 1.0, n, Y1Route::Circulant);
  std::vector<double> stats(static_cast<std::size_t>(R), 0.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  parallel_for(R, threads, [&](int rep) {
    GaussianPath y =
        sample_driver(driver, SeedSpec{base_seed, static_cast<std::uint64_t>(rep)});
    const double qv = scaled_qv(y.grid, y.values, h, 1.0);
    stats[static_cast<std::size_t>(rep)] = root_n * (qv - 1.0);
  });
  VarianceConstantResult r;
  r.c_hat = sample_variance(stats);
  r.benchmark = h.value() < 0.75 ? fbm_variance_benchmark(h) : 0.0;
  r.standard_error = r.c_hat * std::sqrt(2.0 / (static_cast<double>(R) - 1.0));
  return r;
}

ExperimentReport run_variance_constant(const HurstParam& h, long n, int R,
                                       std::uint64_t base_seed, int threads) {
  VarianceConstantResult r = estimate_variance_constant(h, n, R, base_seed, threads);
  ExperimentReport report;
  report.samples.columns = {"replication", "raw", "standardized"};
  const double rel = std::abs(r.c_hat / r.benchmark - 1.0);
  report.pass = rel < 0.15;
  report.summary = {{"experiment", "variance-constant"},
                    {"h", h.value()},
                    {"n", n},
                    {"replications", R},
                    {"base_seed", base_seed},
                    {"c_hat", r.c_hat},
                    {"fbm_benchmark", r.benchmark},
                    {"relative_deviation", rel},
                    {"standard_error", r.standard_error},
                    {"pass", report.pass}};
  return report;
}

ExperimentReport run_clt(const CltConfig& config) {
  HurstParam h(config.h);
  if (h.value() >= 0.75)
    throw std::domain_error(
        "run_clt: the stable CLT requires 0 < H < 3/4; refusing to run outside the "
        "theorem's hypothesis");
  if (config.replications < 300)
    throw std::invalid_argument("run_clt: at least 300 replications required");
  if (config.sigmas.empty()) throw std::invalid_argument("run_clt: no sigma configured");
  for (const auto& s : config.sigmas) s.require_clt_regularity(h);

  const double freq = static_cast<double>(config.n) / config.T;
  const double root_freq = std::sqrt(freq);

  VarianceConstantResult vc = estimate_variance_constant(
      h, config.n, config.variance_replications, stream_seed(config.base_seed, 7), config.threads);

  DriverSpec driver = make_driver(h, config.T, config.n, Y1Route::Circulant);

  ExperimentReport report;
  report.samples.columns = {"replication", "raw", "standardized"};

  nlohmann::ordered_json sigma_results = nlohmann::ordered_json::array();
  std::vector<double> regression_x, regression_y;
  KsResult primary_ks{};
  double primary_raw_variance = 0.0, two_time_ratio = 0.0;

  for (std::size_t si = 0; si < config.sigmas.size(); ++si) {
    const VolatilityFn& sigma = config.sigmas[si];
    const double iv_T = sigma.integral_sq(config.T);
    const double iv_half = sigma.integral_sq(config.T / 2.0);
    const double q4_T = sigma.integral_p4(config.T);
    const double cond_scale = std::sqrt(vc.c_hat * q4_T);

    const int R = config.replications;
    std::vector<double> raw(static_cast<std::size_t>(R), 0.0);
    std::vector<double> raw_half(static_cast<std::size_t>(R), 0.0);
    const std::uint64_t stream = stream_seed(config.base_seed, 100 + si);
    parallel_for(R, config.threads, [&](int rep) {
      GaussianPath y =
          sample_driver(driver, SeedSpec{stream, static_cast<std::uint64_t>(rep)});
      Fou2Solution sol = solve_fou2(config.theta, sigma, config.x0, y);
      const double qv_T = scaled_qv(sol.x.grid, sol.x.values, h, config.T);
      const double qv_half = scaled_qv(sol.x.grid, sol.x.values, h, config.T / 2.0);
      raw[static_cast<std::size_t>(rep)] = root_freq * (qv_T - iv_T);
      raw_half[static_cast<std::size_t>(rep)] = root_freq * (qv_half - iv_half);
    });

    std::vector<double> standardized(raw.size());
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      standardized[i] = raw[i] / cond_scale;
      mean_sq += raw[i] * raw[i];
    }
    mean_sq /= static_cast<double>(raw.size());
    regression_x.push_back(q4_T);
    regression_y.push_back(mean_sq);

    KsResult ks = ks_distance(standardized);
    const double raw_var = sample_variance(raw);
    const double ratio = covariance(raw, raw_half) / sample_variance(raw_half);
    sigma_results.push_back({{"sigma", sigma_json(sigma)},
                             {"integral_sigma2", iv_T},
                             {"integral_sigma4", q4_T},
                             {"ks_distance", ks.distance},
                             {"ks_p_value", ks.p_value},
                             {"raw_variance", raw_var},
                             {"mean_squared_raw", mean_sq},
                             {"two_time_cov_ratio", ratio}});
    if (si == 0) {
      primary_ks = ks;
      primary_raw_variance = raw_var;
      two_time_ratio = ratio;
      for (std::size_t i = 0; i < raw.size(); ++i)
        report.samples.rows.push_back({static_cast<double>(i), raw[i], standardized[i]});
    }
  }

  // mixed-normal check: E[raw^2] should be proportional to \int sigma^4
  double slope = 0.0;
  if (regression_x.size() > 1) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < regression_x.size(); ++i) {
      sxy += regression_x[i] * regression_y[i];
      sxx += regression_x[i] * regression_x[i];
    }
    slope = sxy / sxx;
  }

  report.pass = primary_ks.p_value > config.ks_level;
  report.summary = {{"experiment", "clt"},
                    {"h", config.h},
                    {"theta", config.theta},
                    {"x0", config.x0},
                    {"T", config.T},
                    {"n", config.n},
                    {"replications", config.replications},
                    {"base_seed", config.base_seed},
                    {"ks_level", config.ks_level},
                    {"c_hat", vc.c_hat},
                    {"c_hat_fbm_benchmark", vc.benchmark},
                    {"ks_distance", primary_ks.distance},
                    {"ks_p_value", primary_ks.p_value},
                    {"raw_variance", primary_raw_variance},
                    {"two_time_cov_ratio", two_time_ratio},
                    {"per_sigma", sigma_results},
                    {"pass", report.pass}};
  if (regression_x.size() > 1) report.summary["mixed_normal_slope"] = slope;
  return report;
}

}  // namespace fou2
