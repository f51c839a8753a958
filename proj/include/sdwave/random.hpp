#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "sdwave/spectral.hpp"

namespace sdwave {

/// Seeded generator for random initial data. The stream is fully specified
/// (64-bit Mersenne Twister, top 53 bits scaled to [0, 1)) so ensembles are
/// reproducible across platforms and standard libraries.
class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64, (x >> 11) * 2^-53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Coefficients uniform in [-amplitude, amplitude], damped by
  /// (j^2 + k^2)^(-decay/2).
  SpectralField field(int modes, double amplitude, double decay) {
    SpectralField f(modes);
    for (int j = 1; j <= modes; ++j) {
      for (int k = 1; k <= modes; ++k) {
        f(j, k) = uniform(-amplitude, amplitude) * std::pow(j * j + k * k, -0.5 * decay);
      }
    }
    return f;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdwave
