#pragma once

#include <span>
#include <vector>

#include "fou2/gaussian.hpp"
#include "fou2/types.hpp"

namespace fou2 {

enum class ProcessKind { ZIntegral, XSde, Drift };

/// Realization of a derived process aligned to its driver's grid.
struct ProcessPath {
  TimeGrid grid;
  std::vector<double> values;
  ProcessKind kind = ProcessKind::ZIntegral;
};

/// Left-point Riemann-Stieltjes sums Z_t = sum u_{t_{i-1}} (y_{t_i} - y_{t_{i-1}}).
/// Requires beta + H > 1 (Young regularity, checked with eps = min(beta,H)/4).
ProcessPath young_integral(const VolatilityFn& u, const GaussianPath& y);
ProcessPath young_integral(std::span<const double> u_values, const GaussianPath& y);

/// Riemann zeta by direct series with integral tail bound <= 1e-12; s > 1.
double zeta_series(double s);

/// Young bound zeta(1/p + 1/q) * var_p * var_q; requires 1/p + 1/q > 1.
double young_error_bound(double p, double q, double varp, double varq);

struct VariationResult {
  double p = 1.0;
  double value = 0.0;                   // p-th root of the maximized sum
  std::vector<std::size_t> partition;   // maximizing sample-point indices
};

/// p-variation over sample-point partitions (a lower bound for the continuum
/// supremum). Dynamic program over subsequences, O(n^2).
VariationResult p_variation(std::span<const double> values, double p);

/// max over grid pairs of |f(t)-f(s)| / |t-s|^alpha, O(n^2).
double holder_seminorm(const TimeGrid& grid, std::span<const double> values, double alpha);

/// Exponential-Euler solution of dX = -theta X dt + sigma_t dY^{(1)}_t:
/// X_{t_i} = e^{-theta dt} X_{t_{i-1}} + sigma_{t_{i-1}} (Y_{t_i} - Y_{t_{i-1}}).
/// drift holds D_t = X_t - x0 - sum sigma dY for diagnostics.
struct Fou2Solution {
  ProcessPath x;
  ProcessPath drift;
};
Fou2Solution solve_fou2(double theta, const VolatilityFn& sigma, double x0,
                        const GaussianPath& y);

}  // namespace fou2
