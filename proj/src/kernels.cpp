#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fou2/gaussian.hpp"

namespace fou2 {

namespace {

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

double kernel_amplitude(double H) { return H * (2.0 * H - 1.0) * std::pow(H, 2.0 * H - 2.0); }

// smooth part of the kernel: k_H(x) = A x^{2H-2} g(x) e^{-(1-H)x/H}
// with g(x) = ((1 - e^{-x/H}) / x)^{2H-2}, g(0) = H^{2-2H}.
double kernel_smooth_g(double H, double x) {
  if (x <= 0.0) return std::pow(H, 2.0 - 2.0 * H);
  const double ratio = -std::expm1(-x / H) / x;
  return std::pow(ratio, 2.0 * H - 2.0);
}

struct QuadParams {
  double H;
  double t;      // outer limit / tent apex, meaning depends on the integrand
  double delta;  // tent half-width (autocovariance integrals)
};

// v(t) integrand after the substitution y = x^{2H-1}:
// F(y) = A/(2H-1) * (t - x) e^{-(1-H)x/H} g(x), x = y^{1/(2H-1)}
double variogram_integrand(double y, void* raw) {
  const auto* p = static_cast<const QuadParams*>(raw);
  const double H = p->H;
  const double alpha = 2.0 * H - 1.0;
  const double x = (y <= 0.0) ? 0.0 : std::pow(y, 1.0 / alpha);
  const double A = kernel_amplitude(H);
  return A / alpha * (p->t - x) * std::exp(-(1.0 - H) / H * x) * kernel_smooth_g(H, x);
}

// \int_0^delta x k_H(x) dx after the substitution y = x^{2H}:
// x k_H(x) dx = A/(2H) e^{-(1-H)x/H} g(x) dy, x = y^{1/(2H)}
double tent_left_integrand(double y, void* raw) {
  const auto* p = static_cast<const QuadParams*>(raw);
  const double H = p->H;
  const double x = (y <= 0.0) ? 0.0 : std::pow(y, 1.0 / (2.0 * H));
  const double A = kernel_amplitude(H);
  return A / (2.0 * H) * std::exp(-(1.0 - H) / H * x) * kernel_smooth_g(H, x);
}

// plain tent-weighted kernel, away from the singularity
double tent_integrand(double x, void* raw) {
  const auto* p = static_cast<const QuadParams*>(raw);
  const double H = p->H;
  const double weight = p->delta - std::abs(x - p->t);
  const double A = kernel_amplitude(H);
  return A * weight * std::pow(x, 2.0 * H - 2.0) * std::exp(-(1.0 - H) / H * x) *
         kernel_smooth_g(H, x);
}

double qag(double (*f)(double, void*), QuadParams& params, double a, double b,
           double epsabs, double epsrel) {
  disable_gsl_abort();
  gsl_function fn;
  fn.function = f;
  fn.params = &params;
  constexpr std::size_t limit = 1000;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)>
      ws(gsl_integration_workspace_alloc(limit), gsl_integration_workspace_free);
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qag(&fn, a, b, epsabs, epsrel, limit,
                                         GSL_INTEG_GAUSS31, ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    throw std::runtime_error("quadrature failed: " + std::string(gsl_strerror(status)));
  return result;
}

}  // namespace

double fbm_cov(const HurstParam& h, double s, double t) {
  if (!std::isfinite(s) || !std::isfinite(t) || s < 0.0 || t < 0.0)
    throw std::invalid_argument("fbm_cov: s, t must be finite and nonnegative");
  const double twoH = 2.0 * h.value();
  return 0.5 * (std::pow(s, twoH) + std::pow(t, twoH) - std::pow(std::abs(t - s), twoH));
}

double kernel_k(const HurstParam& h, double x) {
  if (!h.kernel_regime_valid())
    throw std::domain_error("kernel_k: the kernel representation requires H > 1/2");
  if (!(x > 0.0)) throw std::invalid_argument("kernel_k: x must be positive");
  const double H = h.value();
  return kernel_amplitude(H) * std::exp(-(1.0 - H) / H * x) *
         std::pow(-std::expm1(-x / H), 2.0 * H - 2.0);
}

double kernel_r(const HurstParam& h, double u, double v) {
  if (u == v) throw std::domain_error("kernel_r: singular on the diagonal u == v");
  return kernel_k(h, std::abs(u - v));
}

double variogram_bruteforce(const HurstParam& h, double t, int subdiv) {
  if (subdiv < 2) throw std::invalid_argument("variogram_bruteforce: subdiv must be >= 2");
  if (!(t >= 0.0)) throw std::invalid_argument("variogram_bruteforce: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double H = h.value();
  const int M = subdiv;
  // Y_t ~ sum_i e^{-s_{i-1}} (B_{a_{s_i}} - B_{a_{s_{i-1}}})
  //     = sum_p d_p B_{tau_p},  d_p = w_p - w_{p+1} (Abel summation, sum d_p = 0),
  // so E Y_t^2 = -(1/2) sum_{p,q} d_p d_q |tau_p - tau_q|^{2H}.
  std::vector<double> tau(static_cast<std::size_t>(M) + 1), d(static_cast<std::size_t>(M) + 1);
  for (int p = 0; p <= M; ++p) tau[static_cast<std::size_t>(p)] = time_change(h, t * p / M);
  d[0] = -1.0;  // w_1 = e^0
  for (int p = 1; p < M; ++p)
    d[static_cast<std::size_t>(p)] =
        std::exp(-t * (p - 1) / M) - std::exp(-t * p / M);
  d[static_cast<std::size_t>(M)] = std::exp(-t * (M - 1) / M);
  const double twoH = 2.0 * H;
  double acc = 0.0;
  for (int p = 0; p <= M; ++p)
    for (int q = p + 1; q <= M; ++q)
      acc += d[static_cast<std::size_t>(p)] * d[static_cast<std::size_t>(q)] *
             std::pow(tau[static_cast<std::size_t>(q)] - tau[static_cast<std::size_t>(p)], twoH);
  // v(t) = E Y_t^2 / 2 = -(1/2) * acc
  return -0.5 * acc;
}

double variogram(const HurstParam& h, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("variogram: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double H = h.value();
  if (std::abs(H - 0.5) < 1e-12) return 0.5 * t;  // Y^{(1)} is Brownian at H = 1/2
  if (H < 0.5) return variogram_bruteforce(h, t, 1024);
  QuadParams p{H, t, 0.0};
  const double ymax = std::pow(t, 2.0 * H - 1.0);
  return qag(variogram_integrand, p, 0.0, ymax, 1e-300, 1e-10);
}

std::vector<double> y1_increment_autocov(const HurstParam& h, double delta, long nlags) {
  if (!(delta > 0.0)) throw std::invalid_argument("y1_increment_autocov: delta must be > 0");
  if (nlags < 0) throw std::invalid_argument("y1_increment_autocov: nlags must be >= 0");
  const double H = h.value();
  std::vector<double> gamma(static_cast<std::size_t>(nlags) + 1, 0.0);
  if (std::abs(H - 0.5) < 1e-12) {
    gamma[0] = delta;  // independent Brownian increments
    return gamma;
  }
  if (H < 0.5) {
    if (nlags > 1024)
      throw std::invalid_argument(
          "y1_increment_autocov: brute-force route for H < 1/2 is limited to 1024 lags");
    // E[(Y_delta - Y_0)(Y_{(k+1)delta} - Y_{k delta})] by the bilinear route;
    // second difference of the brute-force variogram, evaluated once per span.
    const int subdiv = 512;
    std::vector<double> v(static_cast<std::size_t>(nlags) + 2);
    for (long k = 0; k <= nlags + 1; ++k)
      v[static_cast<std::size_t>(k)] = variogram_bruteforce(h, delta * k, subdiv);
    gamma[0] = 2.0 * v[1];
    for (long k = 1; k <= nlags; ++k)
      gamma[static_cast<std::size_t>(k)] =
          v[static_cast<std::size_t>(k + 1)] + v[static_cast<std::size_t>(k - 1)] -
          2.0 * v[static_cast<std::size_t>(k)];
    return gamma;
  }
  // H > 1/2: gamma(k) = \int tent_k(x) k_H(x) dx, each lag integrated on its
  // own so no cancellation between large variogram values enters.
  gamma[0] = 2.0 * variogram(h, delta);
  const double epsabs = 1e-14 * std::pow(delta, 2.0 * H);
  if (nlags >= 1) {
    QuadParams left{H, delta, delta};
    const double ymax = std::pow(delta, 2.0 * H);
    const double part_a = qag(tent_left_integrand, left, 0.0, ymax, epsabs, 1e-10);
    QuadParams right{H, delta, delta};
    const double part_b = qag(tent_integrand, right, delta, 2.0 * delta, epsabs, 1e-10);
    gamma[1] = part_a + part_b;
  }
  for (long k = 2; k <= nlags; ++k) {
    QuadParams p{H, delta * k, delta};
    gamma[static_cast<std::size_t>(k)] =
        qag(tent_integrand, p, delta * (k - 1), delta * (k + 1), epsabs, 1e-10);
  }
  return gamma;
}

}  // namespace fou2
