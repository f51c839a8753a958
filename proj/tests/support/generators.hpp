#pragma once

#include <cmath>
#include <random>

#include "sdwave/spectral.hpp"

namespace sdwave::testing {

/// Seeded source of test inputs. Same seed, same sequence on every platform.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Coefficients uniform in [-amp, amp], damped by (j^2 + k^2)^(-decay/2).
  SpectralField field(int modes, double amp = 1.0, double decay = 0.0) {
    SpectralField f(modes);
    for (int j = 1; j <= modes; ++j) {
      for (int k = 1; k <= modes; ++k) {
        f(j, k) = uniform(-amp, amp) * std::pow(j * j + k * k, -0.5 * decay);
      }
    }
    return f;
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace sdwave::testing
