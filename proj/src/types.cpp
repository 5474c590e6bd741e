#include "fou2/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fou2 {

TimeGrid TimeGrid::make_uniform(double T, long n) {
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon T must be positive");
  if (n < 1) throw std::invalid_argument("TimeGrid: n must be >= 1");
  TimeGrid g;
  g.horizon = T;
  g.uniform = true;
  g.n = n;
  g.points.resize(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i)
    g.points[static_cast<std::size_t>(i)] = static_cast<double>(i) * T / static_cast<double>(n);
  g.points.back() = T;
  return g;
}

TimeGrid TimeGrid::from_points(std::vector<double> pts) {
  if (pts.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
  if (pts.front() != 0.0) throw std::invalid_argument("TimeGrid: first point must be 0");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i] > pts[i - 1]))
      throw std::invalid_argument("TimeGrid: points must be strictly increasing");
  TimeGrid g;
  g.horizon = pts.back();
  g.n = static_cast<long>(pts.size()) - 1;
  g.points = std::move(pts);
  // detect uniformity up to one ulp per point
  g.uniform = true;
  const double step = g.horizon / static_cast<double>(g.n);
  for (long i = 0; i <= g.n; ++i) {
    const double expect = static_cast<double>(i) * step;
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(expect));
    if (std::abs(g.points[static_cast<std::size_t>(i)] - expect) > tol) {
      g.uniform = false;
      break;
    }
  }
  return g;
}

double TimeGrid::mesh() const {
  double m = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) m = std::max(m, points[i] - points[i - 1]);
  return m;
}

namespace {
// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t SeedSpec::effective() const {
  return mix64(mix64(base_seed) ^ mix64(replication_index * 0xD1342543DE82EF95ULL + 1));
}

double time_change(const HurstParam& h, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time_change: t must be >= 0");
  const double H = h.value();
  const double expo = t / H;
  // hard error rather than saturation: a saturated a_t silently corrupts covariances
  if (expo > 700.0)
    throw std::overflow_error("time_change: t/H exceeds the representable exponent range");
  return H * std::exp(expo);
}

double inverse_time_change(const HurstParam& h, double v) {
  const double H = h.value();
  if (!(v >= H))
    throw std::domain_error("inverse_time_change: v must be >= H");
  return H * std::log(v / H);
}

VolatilityFn VolatilityFn::constant(double c) {
  VolatilityFn f;
  f.kind_ = Kind::Constant;
  f.a_ = c;
  f.beta_ = 1.0;
  return f;
}

VolatilityFn VolatilityFn::linear(double a, double b) {
  VolatilityFn f;
  f.kind_ = Kind::Linear;
  f.a_ = a;
  f.b_ = b;
  f.beta_ = 1.0;
  return f;
}

VolatilityFn VolatilityFn::sine(double a, double b, double omega) {
  VolatilityFn f;
  f.kind_ = Kind::Sine;
  f.a_ = a;
  f.b_ = b;
  f.omega_ = omega;
  f.beta_ = 1.0;
  return f;
}

VolatilityFn VolatilityFn::tabulated(std::vector<double> times, std::vector<double> values,
                                     double holder_order) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("VolatilityFn: tabulated grid/value size mismatch");
  if (!(holder_order > 0.0 && holder_order <= 1.0))
    throw std::invalid_argument("VolatilityFn: declared Hoelder order must be in (0,1]");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("VolatilityFn: tabulated times must increase");
  VolatilityFn f;
  f.kind_ = Kind::Tabulated;
  f.beta_ = holder_order;
  f.tab_times_ = std::move(times);
  f.tab_values_ = std::move(values);
  return f;
}

double VolatilityFn::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Linear: return a_ + b_ * t;
    case Kind::Sine: return a_ + b_ * std::sin(omega_ * t);
    case Kind::Tabulated: {
      // linear interpolation, clamped at the ends
      if (t <= tab_times_.front()) return tab_values_.front();
      if (t >= tab_times_.back()) return tab_values_.back();
      auto it = std::upper_bound(tab_times_.begin(), tab_times_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - tab_times_.begin());
      const double w = (t - tab_times_[i - 1]) / (tab_times_[i] - tab_times_[i - 1]);
      return tab_values_[i - 1] + w * (tab_values_[i] - tab_values_[i - 1]);
    }
  }
  return 0.0;
}

namespace {
// composite Simpson fallback for kinds without a closed form
double simpson_pow(const VolatilityFn& f, double t, int power) {
  if (t <= 0.0) return 0.0;
  const int m = 2048;
  const double dx = t / m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x0 = i * dx, x1 = x0 + dx, xm = x0 + 0.5 * dx;
    const double f0 = std::pow(f(x0), power);
    const double f1 = std::pow(f(x1), power);
    const double fm = std::pow(f(xm), power);
    acc += dx / 6.0 * (f0 + 4.0 * fm + f1);
  }
  return acc;
}
}  // namespace

double VolatilityFn::integral_sq(double t) const {
  switch (kind_) {
    case Kind::Constant: return a_ * a_ * t;
    case Kind::Linear:
      return a_ * a_ * t + a_ * b_ * t * t + b_ * b_ * t * t * t / 3.0;
    default: return simpson_pow(*this, t, 2);
  }
}

double VolatilityFn::integral_p4(double t) const {
  switch (kind_) {
    case Kind::Constant: return a_ * a_ * a_ * a_ * t;
    case Kind::Linear: {
      // \int (a+bt)^4 = ((a+bt)^5 - a^5) / (5b)
      if (b_ == 0.0) return a_ * a_ * a_ * a_ * t;
      const double u = a_ + b_ * t;
      return (std::pow(u, 5) - std::pow(a_, 5)) / (5.0 * b_);
    }
    default: return simpson_pow(*this, t, 4);
  }
}

void VolatilityFn::require_clt_regularity(const HurstParam& h) const {
  const double needed = std::max(1.0 - h.value(), 0.5);
  if (!(beta_ > needed)) {
    std::ostringstream os;
    os << "VolatilityFn: CLT requires Hoelder order beta > max(1-H, 1/2) = " << needed
       << ", declared beta = " << beta_;
    throw std::invalid_argument(os.str());
  }
}

void VolatilityFn::require_young_regularity(const HurstParam& h) const {
  if (!(beta_ + h.value() > 1.0)) {
    std::ostringstream os;
    os << "VolatilityFn: Young integration requires beta + H > 1, got beta = " << beta_
       << ", H = " << h.value();
    throw std::invalid_argument(os.str());
  }
}

std::string VolatilityFn::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "constant(" << a_ << ")"; break;
    case Kind::Linear: os << "linear(" << a_ << "," << b_ << ")"; break;
    case Kind::Sine: os << "sine(" << a_ << "," << b_ << "," << omega_ << ")"; break;
    case Kind::Tabulated:
      os << "tabulated(" << tab_times_.size() << " pts, beta=" << beta_ << ")";
      break;
  }
  return os.str();
}

}  // namespace fou2
