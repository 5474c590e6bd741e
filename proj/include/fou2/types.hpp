#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fou2 {

/// Validated Hurst exponent. Accepts H in [0.01, 0.99]; the kernel
/// representation and the time change both degenerate at the boundary.
class HurstParam {
 public:
  explicit HurstParam(double h) : h_(h) {
    if (!(h >= 0.01 && h <= 0.99))
      throw std::invalid_argument("HurstParam: H must lie in [0.01, 0.99], got " +
                                  std::to_string(h));
  }

  double value() const { return h_; }
  bool long_memory() const { return h_ > 0.5; }
  // The k_H / r_H kernels carry a factor (2H-1) and exponent 2H-2; they are
  // only evaluable for H > 1/2.
  bool kernel_regime_valid() const { return h_ > 0.5; }

 private:
  double h_;
};

/// Ordered sample times on [0, T]. Uniform grids store the subinterval count
/// and are built so that points[i] == i*T/n exactly.
struct TimeGrid {
  std::vector<double> points;
  double horizon = 0.0;
  bool uniform = false;
  long n = 0;  // subinterval count when uniform

  static TimeGrid make_uniform(double T, long n);
  static TimeGrid from_points(std::vector<double> pts);

  std::size_t size() const { return points.size(); }
  double mesh() const;
};

/// Identity of one random stream: (base_seed, replication_index).
/// Distinct replication indices give independent streams; the same pair
/// always reproduces the same draws bit for bit.
struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t replication_index = 0;

  std::uint64_t effective() const;
};

/// Descriptor of the integrand / volatility function u (or sigma).
/// Carries a declared Hoelder order beta used by the regularity checks.
class VolatilityFn {
 public:
  enum class Kind { Constant, Linear, Sine, Tabulated };

  static VolatilityFn constant(double c);
  static VolatilityFn linear(double a, double b);           // a + b t
  static VolatilityFn sine(double a, double b, double omega);  // a + b sin(omega t)
  static VolatilityFn tabulated(std::vector<double> times, std::vector<double> values,
                                double holder_order);

  double operator()(double t) const;
  double integral_sq(double t) const;  // \int_0^t sigma(s)^2 ds
  double integral_p4(double t) const;  // \int_0^t sigma(s)^4 ds

  Kind kind() const { return kind_; }
  double holder_order() const { return beta_; }

  /// The CLT theorems need beta > max(1-H, 1/2); checked at configuration time.
  void require_clt_regularity(const HurstParam& h) const;
  /// Consistency needs beta + H > 1.
  void require_young_regularity(const HurstParam& h) const;

  std::string describe() const;

 private:
  VolatilityFn() = default;
  Kind kind_ = Kind::Constant;
  double a_ = 0.0, b_ = 0.0, omega_ = 0.0;
  double beta_ = 1.0;
  std::vector<double> tab_times_, tab_values_;
};

// a_t = H e^{t/H}
double time_change(const HurstParam& h, double t);
// inverse: H ln(v/H), defined for v >= H
double inverse_time_change(const HurstParam& h, double v);

}  // namespace fou2
