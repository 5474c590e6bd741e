#include <cmath>
#include <stdexcept>

#include "fou2/qv.hpp"

namespace fou2 {

namespace {

long floor_index(double t, long n, double T) {
  // [nt] with t = i/n inclusive; tolerate one ulp of grid arithmetic
  const double scaled = t / T * static_cast<double>(n);
  const double nudged = scaled * (1.0 + 4.0 * 1e-16);
  long idx = static_cast<long>(std::floor(nudged));
  if (idx > n) idx = n;
  if (idx < 0) idx = 0;
  return idx;
}

void require_uniform(const TimeGrid& grid) {
  if (!grid.uniform)
    throw std::invalid_argument("quadratic variation requires a uniform sampling grid");
}

}  // namespace

double v_n(const TimeGrid& grid, std::span<const double> values, double t) {
  require_uniform(grid);
  if (values.size() != grid.size())
    throw std::invalid_argument("v_n: values must be aligned to the grid");
  if (t < 0.0 || t > grid.horizon * (1.0 + 1e-12))
    throw std::invalid_argument("v_n: t must lie in [0, T]");
  const long upto = floor_index(t, grid.n, grid.horizon);
  double acc = 0.0;
  for (long i = 1; i <= upto; ++i) {
    const double d = values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(i - 1)];
    acc += d * d;
  }
  return acc;
}

double scaled_qv(const TimeGrid& grid, std::span<const double> values,
                 const HurstParam& h, double t) {
  const double scale = std::pow(static_cast<double>(grid.n) / grid.horizon,
                                2.0 * h.value() - 1.0);
  return scale * v_n(grid, values, t);
}

QVSeries qv_estimator(const ProcessPath& x, const HurstParam& h,
                      const TimeGrid& eval_times) {
  require_uniform(x.grid);
  QVSeries qv;
  qv.eval = eval_times;
  qv.n = x.grid.n;
  qv.scale_exponent = 2.0 * h.value() - 1.0;
  qv.values.reserve(eval_times.size());
  // running sums over the estimator's own jump times keep this linear
  const double scale = std::pow(static_cast<double>(x.grid.n) / x.grid.horizon,
                                qv.scale_exponent);
  std::vector<double> prefix(x.values.size(), 0.0);
  for (std::size_t i = 1; i < x.values.size(); ++i) {
    const double d = x.values[i] - x.values[i - 1];
    prefix[i] = prefix[i - 1] + d * d;
  }
  for (double t : eval_times.points) {
    const long idx = floor_index(t, x.grid.n, x.grid.horizon);
    qv.values.push_back(scale * prefix[static_cast<std::size_t>(idx)]);
  }
  return qv;
}

QVSeries qv_estimator(const ProcessPath& x, const HurstParam& h) {
  return qv_estimator(x, h, x.grid);  // jump times {i/n} plus T
}

IVTarget make_iv_target(const VolatilityFn& sigma, const TimeGrid& eval) {
  IVTarget target;
  target.eval = eval;
  target.values.reserve(eval.size());
  for (double t : eval.points) target.values.push_back(sigma.integral_sq(t));
  return target;
}

double sup_error(const QVSeries& est, const IVTarget& target) {
  if (est.eval.points != target.eval.points)
    throw std::invalid_argument("sup_error: evaluation grids must match");
  double sup = 0.0;
  for (std::size_t i = 0; i < est.values.size(); ++i) {
    // the estimator is a step function: check both one-sided limits of the
    // continuous target at each jump time
    sup = std::max(sup, std::abs(est.values[i] - target.values[i]));
    if (i + 1 < est.values.size())
      sup = std::max(sup, std::abs(est.values[i] - target.values[i + 1]));
  }
  return sup;
}

}  // namespace fou2
