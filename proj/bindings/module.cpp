#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fou2/gaussian.hpp"
#include "fou2/io.hpp"
#include "fou2/mc.hpp"
#include "fou2/pathwise.hpp"
#include "fou2/qv.hpp"

namespace py = pybind11;
using namespace fou2;

namespace {

Y1Route route_from_string(const std::string& r) {
  if (r == "circulant") return Y1Route::Circulant;
  if (r == "exact-cov") return Y1Route::ExactCov;
  if (r == "timechange") return Y1Route::TimeChange;
  throw std::invalid_argument("route must be circulant, exact-cov or timechange");
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style>& a) {
  return {a.data(), a.data() + a.size()};
}

VolatilityFn sigma_from_dict(const py::dict& d) {
  const std::string kind = d["kind"].cast<std::string>();
  if (kind == "constant") return VolatilityFn::constant(d["c"].cast<double>());
  if (kind == "linear")
    return VolatilityFn::linear(d["a"].cast<double>(), d["b"].cast<double>());
  if (kind == "sine")
    return VolatilityFn::sine(d["a"].cast<double>(), d["b"].cast<double>(),
                              d["omega"].cast<double>());
  if (kind == "tabulated")
    return VolatilityFn::tabulated(d["times"].cast<std::vector<double>>(),
                                   d["values"].cast<std::vector<double>>(),
                                   d["holder_order"].cast<double>());
  throw std::invalid_argument("sigma kind must be constant, linear, sine or tabulated");
}

py::tuple path_to_tuple(const GaussianPath& p) {
  return py::make_tuple(to_array(p.grid.points), to_array(p.values));
}

}  // namespace

PYBIND11_MODULE(_fou2, m) {
  m.doc() = "simulation and realized-volatility toolkit for the second-kind "
            "fractional Ornstein-Uhlenbeck driver";

  m.def("time_change", [](double h, double t) { return time_change(HurstParam(h), t); },
        py::arg("h"), py::arg("t"), "a_t = H exp(t/H)");
  m.def("inverse_time_change",
        [](double h, double v) { return inverse_time_change(HurstParam(h), v); },
        py::arg("h"), py::arg("v"));

  m.def("fbm_cov", [](double h, double s, double t) { return fbm_cov(HurstParam(h), s, t); },
        py::arg("h"), py::arg("s"), py::arg("t"));
  m.def("kernel_k", [](double h, double x) { return kernel_k(HurstParam(h), x); },
        py::arg("h"), py::arg("x"), "moving-average kernel, H > 1/2");
  m.def("variogram", [](double h, double t) { return variogram(HurstParam(h), t); },
        py::arg("h"), py::arg("t"));
  m.def("variogram_bruteforce",
        [](double h, double t, int subdiv) {
          return variogram_bruteforce(HurstParam(h), t, subdiv);
        },
        py::arg("h"), py::arg("t"), py::arg("subdiv") = 1024);

  m.def("sample_fbm",
        [](double h, long n, double T, std::uint64_t seed, std::uint64_t replication) {
          return path_to_tuple(sample_fbm_circulant(
              HurstParam(h), TimeGrid::make_uniform(T, n), SeedSpec{seed, replication}));
        },
        py::arg("h"), py::arg("n"), py::arg("T") = 1.0, py::arg("seed") = 0,
        py::arg("replication") = 0, "returns (t, values) arrays");
  m.def("sample_y1",
        [](double h, long n, double T, std::uint64_t seed, std::uint64_t replication,
           const std::string& route, int refine) {
          return path_to_tuple(sample_y1(HurstParam(h), TimeGrid::make_uniform(T, n),
                                         SeedSpec{seed, replication},
                                         route_from_string(route), refine));
        },
        py::arg("h"), py::arg("n"), py::arg("T") = 1.0, py::arg("seed") = 0,
        py::arg("replication") = 0, py::arg("route") = "circulant", py::arg("refine") = 16,
        "returns (t, values) arrays");

  m.def("young_integral",
        [](const py::dict& sigma, py::array_t<double, py::array::c_style> t,
           py::array_t<double, py::array::c_style> y, double h) {
          GaussianPath path;
          path.grid = TimeGrid::from_points(to_vector(t));
          path.values = to_vector(y);
          path.h = h;  // drives the Young regularity check beta + H > 1
          ProcessPath z = young_integral(sigma_from_dict(sigma), path);
          return to_array(z.values);
        },
        py::arg("sigma"), py::arg("t"), py::arg("y"), py::arg("h") = 0.5);

  m.def("solve_fou2",
        [](double theta, const py::dict& sigma, double x0,
           py::array_t<double, py::array::c_style> t,
           py::array_t<double, py::array::c_style> y, double h) {
          GaussianPath path;
          path.grid = TimeGrid::from_points(to_vector(t));
          path.values = to_vector(y);
          path.h = h;
          Fou2Solution sol = solve_fou2(theta, sigma_from_dict(sigma), x0, path);
          return py::make_tuple(to_array(sol.x.values), to_array(sol.drift.values));
        },
        py::arg("theta"), py::arg("sigma"), py::arg("x0"), py::arg("t"), py::arg("y"),
        py::arg("h") = 0.5, "returns (x, drift) arrays on the driver's grid");

  m.def("p_variation",
        [](py::array_t<double, py::array::c_style> values, double p) {
          VariationResult r = p_variation(to_vector(values), p);
          return py::make_tuple(r.value, r.partition);
        },
        py::arg("values"), py::arg("p"), "returns (value, maximizing indices)");
  m.def("holder_seminorm",
        [](py::array_t<double, py::array::c_style> t,
           py::array_t<double, py::array::c_style> values, double alpha) {
          return holder_seminorm(TimeGrid::from_points(to_vector(t)), to_vector(values),
                                 alpha);
        },
        py::arg("t"), py::arg("values"), py::arg("alpha"));

  m.def("v_n",
        [](py::array_t<double, py::array::c_style> t,
           py::array_t<double, py::array::c_style> values, double at) {
          return v_n(TimeGrid::from_points(to_vector(t)), to_vector(values), at);
        },
        py::arg("t"), py::arg("values"), py::arg("at"));
  m.def("scaled_qv",
        [](py::array_t<double, py::array::c_style> t,
           py::array_t<double, py::array::c_style> values, double h, double at) {
          return scaled_qv(TimeGrid::from_points(to_vector(t)), to_vector(values),
                           HurstParam(h), at);
        },
        py::arg("t"), py::arg("values"), py::arg("h"), py::arg("at"),
        "(n/T)^{2H-1} V_n up to time at");

  m.def("ks_distance",
        [](py::array_t<double, py::array::c_style> sample) {
          KsResult r = ks_distance(to_vector(sample));
          return py::make_tuple(r.distance, r.p_value);
        },
        py::arg("sample"), "one-sample KS vs the standard normal: (distance, p)");
  m.def("fbm_variance_benchmark",
        [](double h) { return fbm_variance_benchmark(HurstParam(h)); }, py::arg("h"));

  m.def("run_consistency",
        [](double h, double theta, double x0, const py::dict& sigma, double T,
           std::vector<long> n_ladder, int replications, std::uint64_t seed, int threads) {
          ConsistencyConfig config;
          config.h = h;
          config.theta = theta;
          config.x0 = x0;
          config.sigma = sigma_from_dict(sigma);
          config.T = T;
          config.n_ladder = std::move(n_ladder);
          config.replications = replications;
          config.base_seed = seed;
          config.threads = threads;
          return run_consistency(config).summary.dump();
        },
        py::arg("h"), py::arg("theta") = 0.0, py::arg("x0") = 0.0,
        py::arg("sigma") = py::dict(py::arg("kind") = "constant", py::arg("c") = 1.0),
        py::arg("T") = 1.0, py::arg("n_ladder") = std::vector<long>{1024, 4096},
        py::arg("replications") = 50, py::arg("seed") = 0, py::arg("threads") = 1,
        "returns the report summary as a JSON string");

  m.def("run_clt",
        [](double h, long n, int replications, std::uint64_t seed, int threads) {
          CltConfig config;
          config.h = h;
          config.n = n;
          config.replications = replications;
          config.base_seed = seed;
          config.threads = threads;
          return run_clt(config).summary.dump();
        },
        py::arg("h"), py::arg("n") = 4096, py::arg("replications") = 500,
        py::arg("seed") = 0, py::arg("threads") = 1,
        "returns the report summary as a JSON string");

  m.def("run_variance_constant",
        [](double h, long n, int replications, std::uint64_t seed, int threads) {
          return run_variance_constant(HurstParam(h), n, replications, seed, threads)
              .summary.dump();
        },
        py::arg("h"), py::arg("n") = 1024, py::arg("replications") = 500,
        py::arg("seed") = 0, py::arg("threads") = 1);
}
