#pragma once

#include <span>
#include <vector>

#include "fou2/pathwise.hpp"
#include "fou2/types.hpp"

namespace fou2 {

/// Step function of scaled quadratic variation over evaluation times.
struct QVSeries {
  TimeGrid eval;              // evaluation times t
  std::vector<double> values; // scaled QV per t
  long n = 0;                 // sampling frequency
  double scale_exponent = 0.0;
};

/// Target integrated volatility \int_0^t sigma^2 per evaluation time.
struct IVTarget {
  TimeGrid eval;
  std::vector<double> values;
};

/// V_n(Z)_t = sum_{i=1}^{[nt]} |Z_{i/n} - Z_{(i-1)/n}|^2, floor semantics with
/// t = i/n inclusive. Rejects non-uniform grids.
double v_n(const TimeGrid& grid, std::span<const double> values, double t);

/// n^{2H-1} V_n(path)_t.
double scaled_qv(const TimeGrid& grid, std::span<const double> values,
                 const HurstParam& h, double t);

/// QV_n(X)_t over the given evaluation times (defaults to the estimator's own
/// jump times {i/n} plus T when eval is empty).
QVSeries qv_estimator(const ProcessPath& x, const HurstParam& h,
                      const TimeGrid& eval_times);
QVSeries qv_estimator(const ProcessPath& x, const HurstParam& h);

IVTarget make_iv_target(const VolatilityFn& sigma, const TimeGrid& eval);

/// sup over evaluation times of |est - target|; grids must match.
double sup_error(const QVSeries& est, const IVTarget& target);

}  // namespace fou2
