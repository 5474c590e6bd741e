#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fou2/pathwise.hpp"

namespace fou2 {

namespace {

ProcessPath left_point_sums(std::span<const double> u_at_left, const GaussianPath& y) {
  ProcessPath z;
  z.grid = y.grid;
  z.kind = ProcessKind::ZIntegral;
  z.values.assign(y.values.size(), 0.0);
  for (std::size_t i = 1; i < y.values.size(); ++i)
    z.values[i] = z.values[i - 1] + u_at_left[i - 1] * (y.values[i] - y.values[i - 1]);
  return z;
}

}  // namespace

ProcessPath young_integral(const VolatilityFn& u, const GaussianPath& y) {
  u.require_young_regularity(HurstParam(y.h));
  std::vector<double> left(y.values.size() - 1);
  for (std::size_t i = 0; i + 1 < y.values.size(); ++i) left[i] = u(y.grid.points[i]);
  return left_point_sums(left, y);
}

ProcessPath young_integral(std::span<const double> u_values, const GaussianPath& y) {
  if (u_values.size() != y.values.size())
    throw std::invalid_argument("young_integral: integrand must be aligned to the driver grid");
  return left_point_sums(u_values, y);
}

double zeta_series(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta_series: s must exceed 1");
  // direct series to N plus the Euler-Maclaurin tail
  //   N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12,
  // whose remainder is below s(s+1)(s+2) N^{-s-3}/720 <= 1e-12 at N = 1e4
  const double N = 1e4;
  double acc = 0.0;
  for (double n = 1.0; n <= N; n += 1.0) acc += std::pow(n, -s);
  acc += std::pow(N, 1.0 - s) / (s - 1.0);
  acc -= 0.5 * std::pow(N, -s);
  acc += s * std::pow(N, -s - 1.0) / 12.0;
  return acc;
}

double young_error_bound(double p, double q, double varp, double varq) {
  const double s = 1.0 / p + 1.0 / q;
  if (!(s > 1.0))
    throw std::domain_error("young_error_bound: requires 1/p + 1/q > 1");
  return zeta_series(s) * varp * varq;
}

VariationResult p_variation(std::span<const double> values, double p) {
  if (p < 1.0) throw std::invalid_argument("p_variation: p must be >= 1");
  if (values.size() < 2)
    throw std::invalid_argument("p_variation: need at least 2 sample points");
  const std::size_t n = values.size();
  // best[i]: max sum of |increment|^p over subsequences 0 = j_0 < ... < j_k = i
  std::vector<double> best(n, 0.0);
  std::vector<std::size_t> prev(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    double b = -1.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const double cand = best[j] + std::pow(std::abs(values[i] - values[j]), p);
      if (cand > b) {
        b = cand;
        arg = j;
      }
    }
    best[i] = b;
    prev[i] = arg;
  }
  VariationResult r;
  r.p = p;
  r.value = std::pow(best[n - 1], 1.0 / p);
  std::size_t i = n - 1;
  r.partition.push_back(i);
  while (i != 0) {
    i = prev[i];
    r.partition.push_back(i);
  }
  std::reverse(r.partition.begin(), r.partition.end());
  return r;
}

double holder_seminorm(const TimeGrid& grid, std::span<const double> values, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("holder_seminorm: alpha must be in (0, 1]");
  if (values.size() != grid.size() || values.size() < 2)
    throw std::invalid_argument("holder_seminorm: need >= 2 aligned points");
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double dt = grid.points[j] - grid.points[i];
      best = std::max(best, std::abs(values[j] - values[i]) / std::pow(dt, alpha));
    }
  return best;
}

Fou2Solution solve_fou2(double theta, const VolatilityFn& sigma, double x0,
                        const GaussianPath& y) {
  if (theta < 0.0) throw std::invalid_argument("solve_fou2: theta must be >= 0");
  Fou2Solution sol;
  sol.x.grid = y.grid;
  sol.x.kind = ProcessKind::XSde;
  sol.x.values.assign(y.values.size(), 0.0);
  sol.x.values[0] = x0;
  sol.drift.grid = y.grid;
  sol.drift.kind = ProcessKind::Drift;
  sol.drift.values.assign(y.values.size(), 0.0);
  double stoch_acc = 0.0;
  for (std::size_t i = 1; i < y.values.size(); ++i) {
    const double dt = y.grid.points[i] - y.grid.points[i - 1];
    const double dy = y.values[i] - y.values[i - 1];
    const double s = sigma(y.grid.points[i - 1]);
    sol.x.values[i] = std::exp(-theta * dt) * sol.x.values[i - 1] + s * dy;
    stoch_acc += s * dy;
    sol.drift.values[i] = sol.x.values[i] - x0 - stoch_acc;
  }
  return sol;
}

}  // namespace fou2
