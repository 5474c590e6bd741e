#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fou2/io.hpp"
#include "fou2/mc.hpp"
#include "fou2/pathwise.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// exit codes: 0 pass, 1 internal error, 2 config error, 3 input-data error
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fou2::VolatilityFn parse_sigma(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      std::size_t next = rest.find(',', pos);
      if (next == std::string::npos) next = rest.size();
      try {
        args.push_back(std::stod(rest.substr(pos, next - pos)));
      } catch (const std::exception&) {
        throw ConfigError("sigma: cannot parse number in '" + spec + "'");
      }
      pos = next + 1;
    }
  }
  if (kind == "constant" && args.size() == 1) return fou2::VolatilityFn::constant(args[0]);
  if (kind == "linear" && args.size() == 2) return fou2::VolatilityFn::linear(args[0], args[1]);
  if (kind == "sine" && args.size() == 3)
    return fou2::VolatilityFn::sine(args[0], args[1], args[2]);
  throw ConfigError("sigma: expected constant:c, linear:a,b or sine:a,b,omega, got '" + spec +
                    "'");
}

fou2::Y1Route parse_route(const std::string& r) {
  if (r == "circulant") return fou2::Y1Route::Circulant;
  if (r == "exact-cov") return fou2::Y1Route::ExactCov;
  if (r == "timechange") return fou2::Y1Route::TimeChange;
  throw ConfigError("route must be one of circulant, exact-cov, timechange");
}

std::string json_value_to_arg(const ordered_json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ",";
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    return joined;
  }
  return value.dump();
}

/// Flat JSON config whose keys match long option names of the active
/// subcommand; explicitly passed flags win over file values. Returns extra
/// argv tokens to splice in after the subcommand name.
std::vector<std::string> config_file_args(CLI::App& subcommand, const std::string& path,
                                          const std::vector<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> extra;
  for (auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (key == "config") continue;
    if (!subcommand.get_option_no_throw(flag))
      throw ConfigError("config key '" + key + "' is not an option of this command");
    if (std::find(given.begin(), given.end(), flag) != given.end()) continue;
    extra.push_back(flag);
    extra.push_back(json_value_to_arg(value));
  }
  return extra;
}

ordered_json make_manifest(const std::string& command, const ordered_json& config,
                           const std::vector<std::string>& files) {
  return ordered_json{{"tool", "fou2"},
                      {"version", kToolVersion},
                      {"command", command},
                      {"config", config},
                      {"files", files}};
}

struct CommonOpts {
  std::string config_file;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file; explicit flags win");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--threads", threads, "worker threads for replications");
  }
};

int run_simulate(const CommonOpts& common, const std::string& process, double hval, long n,
                 double T, const std::string& route_str, int refine, double theta,
                 const std::string& sigma_str, double x0) {
  fou2::HurstParam h(hval);
  fou2::TimeGrid grid = fou2::TimeGrid::make_uniform(T, n);
  fou2::SeedSpec seed{common.seed, 0};

  ordered_json config{{"process", process}, {"h", hval},     {"n", n},
                      {"t", T},             {"route", route_str}, {"refine", refine},
                      {"seed", common.seed}};
  std::vector<std::string> files;
  fs::path out(common.out);

  if (process == "fbm") {
    fou2::GaussianPath p = route_str == "cholesky"
                               ? fou2::sample_cholesky(
                                     fou2::build_cov_matrix(fou2::ProcessTag::FBM, h, grid), seed)
                               : fou2::sample_fbm_circulant(h, grid, seed);
    fou2::write_path_csv(out / "path.csv", p);
    files.push_back("path.csv");
    config["method"] = p.method == fou2::SampleMethod::Circulant ? "circulant" : "cholesky";
  } else if (process == "y1") {
    fou2::GaussianPath p = fou2::sample_y1(h, grid, seed, parse_route(route_str), refine);
    fou2::write_path_csv(out / "path.csv", p);
    files.push_back("path.csv");
  } else if (process == "x") {
    fou2::VolatilityFn sigma = parse_sigma(sigma_str);
    fou2::GaussianPath y = fou2::sample_y1(h, grid, seed, parse_route(route_str), refine);
    fou2::Fou2Solution sol = fou2::solve_fou2(theta, sigma, x0, y);
    fou2::write_path_csv(out / "path.csv", sol.x);
    fou2::write_path_csv(out / "driver.csv", y);
    files = {"path.csv", "driver.csv"};
    config["theta"] = theta;
    config["sigma"] = sigma.describe();
    config["x0"] = x0;
  } else {
    throw ConfigError("simulate: --process must be fbm, y1 or x");
  }
  files.push_back("manifest.json");
  fou2::write_json(out / "manifest.json", make_manifest("simulate", config, files));
  return 0;
}

int run_variogram(const CommonOpts& common, const std::vector<double>& hs,
                  const std::vector<double>& ts) {
  if (hs.empty() || ts.empty()) throw ConfigError("variogram: need --h and --t lists");
  std::vector<double> hs_sorted = hs, ts_sorted = ts;
  std::sort(hs_sorted.begin(), hs_sorted.end());
  std::sort(ts_sorted.begin(), ts_sorted.end());
  std::ostringstream csv;
  csv << "h,t,v,v_over_t2h\n";
  std::vector<double> fallback_h;
  for (double hval : hs_sorted) {
    fou2::HurstParam h(hval);
    if (hval < 0.5) fallback_h.push_back(hval);
    for (double t : ts_sorted) {
      if (t <= 0.0) continue;  // t = 0 rows excluded
      const double v = fou2::variogram(h, t);
      csv << fou2::format_double(hval) << "," << fou2::format_double(t) << ","
          << fou2::format_double(v) << ","
          << fou2::format_double(v / std::pow(t, 2.0 * hval)) << "\n";
    }
  }
  fs::path out(common.out);
  fou2::atomic_write(out / "variogram.csv", csv.str());
  ordered_json config{{"h", hs}, {"t", ts}};
  ordered_json manifest =
      make_manifest("variogram", config, {"variogram.csv", "manifest.json"});
  if (!fallback_h.empty())
    manifest["notes"] = ordered_json{
        {"bruteforce_fallback_h", fallback_h},
        {"reason", "kernel quadrature requires H > 1/2; brute-force route used"}};
  fou2::write_json(out / "manifest.json", manifest);
  return 0;
}

int run_estimate(const CommonOpts& common, const std::string& input, double hval, double theta,
                 const std::string& sigma_str) {
  const auto t0 = std::chrono::steady_clock::now();
  fou2::HurstParam h(hval);
  fou2::ProcessPath path;
  try {
    auto [grid, values] = fou2::read_path_csv(input);
    path.grid = std::move(grid);
    path.values = std::move(values);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (!path.grid.uniform)
    throw InputError("estimate: input CSV grid is not uniform");

  fou2::QVSeries est = fou2::qv_estimator(path, h);
  const bool have_target = !sigma_str.empty();
  fou2::IVTarget target;
  if (have_target) {
    target = fou2::make_iv_target(parse_sigma(sigma_str), est.eval);
  } else {
    target.eval = est.eval;
    target.values.assign(est.values.size(), 0.0);
  }
  fs::path out(common.out);
  fou2::write_qv_csv(out / "qv.csv", est, target);
  const auto t1 = std::chrono::steady_clock::now();
  ordered_json summary{
      {"n", est.n},
      {"H", hval},
      {"theta", theta},
      {"scale_exponent", est.scale_exponent},
      {"runtime_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
  if (have_target) summary["sup_error"] = fou2::sup_error(est, target);
  fou2::write_json(out / "summary.json", summary);
  ordered_json config{{"input", input}, {"h", hval}, {"theta", theta}, {"sigma", sigma_str}};
  fou2::write_json(out / "manifest.json",
                   make_manifest("estimate", config, {"qv.csv", "summary.json", "manifest.json"}));
  return 0;
}

int run_experiment(const CommonOpts& common, const std::string& kind, double hval, double theta,
                   double x0, const std::string& sigma_str, double T,
                   const std::vector<long>& n_ladder, long n, int replications) {
  fou2::ExperimentReport report;
  ordered_json config{{"kind", kind},   {"h", hval},       {"theta", theta},
                      {"x0", x0},       {"sigma", sigma_str}, {"T", T},
                      {"n", n},         {"n_ladder", n_ladder}, {"replications", replications},
                      {"seed", common.seed}, {"threads", common.threads}};
  if (kind == "consistency") {
    fou2::ConsistencyConfig c;
    c.h = hval;
    c.theta = theta;
    c.x0 = x0;
    c.sigma = parse_sigma(sigma_str);
    c.T = T;
    if (!n_ladder.empty()) c.n_ladder = n_ladder;
    c.replications = replications;
    c.base_seed = common.seed;
    c.threads = common.threads;
    report = fou2::run_consistency(c);
  } else if (kind == "clt") {
    fou2::CltConfig c;
    c.h = hval;
    c.theta = theta;
    c.x0 = x0;
    c.sigmas = {parse_sigma(sigma_str)};
    c.T = T;
    c.n = n;
    c.replications = replications;
    c.base_seed = common.seed;
    c.threads = common.threads;
    report = fou2::run_clt(c);
  } else if (kind == "variance-constant") {
    report = fou2::run_variance_constant(fou2::HurstParam(hval), n, replications, common.seed,
                                         common.threads);
  } else {
    throw ConfigError("experiment: --kind must be consistency, clt or variance-constant");
  }
  fs::path out(common.out);
  fou2::write_json(out / "report.json", report.summary);
  fou2::write_samples_csv(out / "samples.csv", report.samples);
  fou2::write_json(out / "manifest.json",
                   make_manifest("experiment", config,
                                 {"report.json", "samples.csv", "manifest.json"}));
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and realized-quadratic-variation toolkit for the fractional "
               "Ornstein-Uhlenbeck driver of the second kind"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // leave --h free for the Hurst parameter

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample fBm, Y1 or the SDE solution X");
  sim->set_help_flag("--help", "print help");
  CommonOpts sim_common;
  sim_common.attach(sim);
  std::string sim_process = "y1", sim_route = "circulant", sim_sigma = "constant:1";
  double sim_h = 0.7, sim_T = 1.0, sim_theta = 0.0, sim_x0 = 0.0;
  long sim_n = 1024;
  int sim_refine = 16;
  sim->add_option("--process", sim_process, "fbm, y1 or x");
  sim->add_option("--h", sim_h, "Hurst parameter");
  sim->add_option("--n", sim_n, "subintervals");
  sim->add_option("--t", sim_T, "horizon T");
  sim->add_option("--route", sim_route, "circulant, exact-cov, timechange (y1/x); cholesky/circulant (fbm)");
  sim->add_option("--refine", sim_refine, "timechange sub-steps per grid step");
  sim->add_option("--theta", sim_theta, "mean reversion (process x)");
  sim->add_option("--sigma", sim_sigma, "volatility descriptor (process x)");
  sim->add_option("--x0", sim_x0, "initial value (process x)");

  // variogram
  auto* vgram = app.add_subcommand("variogram", "tabulate v(t) and v(t)/t^{2H}");
  CommonOpts vg_common;
  vg_common.attach(vgram);
  std::vector<double> vg_h{0.7}, vg_t{1e-4, 1e-3, 1e-2, 1e-1};
  vgram->add_option("--h", vg_h, "Hurst parameters")->delimiter(',');
  vgram->add_option("--t", vg_t, "evaluation times")->delimiter(',');

  // estimate
  auto* est = app.add_subcommand("estimate", "realized QV estimator from a path CSV");
  est->set_help_flag("--help", "print help");
  CommonOpts est_common;
  est_common.attach(est);
  std::string est_input, est_sigma;
  double est_h = 0.7, est_theta = 0.0;
  est->add_option("--input", est_input, "input path CSV (t,value)")->required();
  est->add_option("--h", est_h, "Hurst parameter");
  est->add_option("--theta", est_theta, "mean reversion (echoed in summary)");
  est->add_option("--sigma", est_sigma, "volatility descriptor for the target (optional)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiments");
  exp->set_help_flag("--help", "print help");
  CommonOpts exp_common;
  exp_common.attach(exp);
  std::string exp_kind = "consistency", exp_sigma = "constant:1";
  double exp_h = 0.6, exp_theta = 0.0, exp_x0 = 0.0, exp_T = 1.0;
  std::vector<long> exp_ladder;
  long exp_n = 1 << 12;
  int exp_R = 100;
  exp->add_option("--kind", exp_kind, "consistency, clt or variance-constant");
  exp->add_option("--h", exp_h, "Hurst parameter");
  exp->add_option("--theta", exp_theta, "mean reversion");
  exp->add_option("--x0", exp_x0, "initial value");
  exp->add_option("--sigma", exp_sigma, "volatility descriptor");
  exp->add_option("--t", exp_T, "horizon T");
  exp->add_option("--n-ladder", exp_ladder, "frequencies for the consistency ladder")
      ->delimiter(',');
  exp->add_option("--n", exp_n, "frequency (clt / variance-constant)");
  exp->add_option("--r", exp_R, "replications");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // pre-scan for --config so file values become defaults before validation
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") config_path = args[i + 1];
    if (!config_path.empty()) {
      if (args.empty() || args[0].empty() || args[0][0] == '-')
        throw ConfigError("--config requires a subcommand");
      CLI::App* sub = app.get_subcommand_no_throw(args[0]);
      if (!sub) throw ConfigError("unknown subcommand '" + args[0] + "'");
      auto extra = config_file_args(*sub, config_path, args);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
    {
      // CLI::App::parse(vector) expects reverse order
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    }
    CLI::App* active = app.get_subcommands().front();

    if (active == sim)
      return run_simulate(sim_common, sim_process, sim_h, sim_n, sim_T, sim_route, sim_refine,
                          sim_theta, sim_sigma, sim_x0);
    if (active == vgram) return run_variogram(vg_common, vg_h, vg_t);
    if (active == est)
      return run_estimate(est_common, est_input, est_h, est_theta, est_sigma);
    if (active == exp)
      return run_experiment(exp_common, exp_kind, exp_h, exp_theta, exp_x0, exp_sigma, exp_T,
                            exp_ladder, exp_n, exp_R);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
