#pragma once

#include <array>
#include <cmath>

namespace sdwave::testing {

using Mat2 = std::array<double, 4>;

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// exp(M) by scaling and squaring with a 20-term Taylor series. Independent
/// of the closed forms under test.
inline Mat2 expm(Mat2 m) {
  const double norm = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.5) ++squarings;
  for (double& v : m) v = std::ldexp(v, -squarings);
  Mat2 term{1.0, 0.0, 0.0, 1.0};
  Mat2 sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = mul(term, m);
    for (double& v : term) v /= k;
    for (int i = 0; i < 4; ++i) sum[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) sum = mul(sum, sum);
  return sum;
}

}  // namespace sdwave::testing
