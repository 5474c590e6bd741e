#pragma once

#include <cstdint>
#include <random>

#include "fou2/types.hpp"

namespace fou2 {

/// Normal generator with a platform-independent output sequence.
/// std::normal_distribution is implementation-defined, so we draw uniforms
/// from mt19937_64 and apply Box-Muller explicitly.
class NormalRng {
 public:
  explicit NormalRng(const SeedSpec& seed) : engine_(seed.effective()) {}
  explicit NormalRng(std::uint64_t raw_seed) : engine_(raw_seed) {}

  double uniform() {
    // 53-bit mantissa uniform in (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fou2
