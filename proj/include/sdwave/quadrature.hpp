#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sdwave::quad {

/// Adaptive Gauss-Kronrod (15 points) on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 20) {
  if (a == b) return 0.0;
  // integrate on [-1, 1]: the error control misbehaves on very narrow intervals
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto g = [&](double x) { return f(mid + half * x); };
  return half * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, max_depth, tol);
}

struct TailOptions {
  /// A piece below this magnitude counts as Cauchy-converged.
  double cauchy_abs = 1e-8;
  /// ...or below this fraction of the running sum.
  double cauchy_rel = 0.0;
  /// Add a geometric estimate of the remainder once the pieces decay.
  bool geometric_remainder = false;
  int max_pieces = 1000;
};

struct TailResult {
  double value = 0.0;
  bool converged = false;
  int pieces = 0;
  double last_piece = 0.0;
};

/// Integral of f over [a, inf), a > 0, through u = 1/t. The u-interval
/// (0, 1/a] is split into dyadic pieces (equivalently doubling intervals in t)
/// which are summed until a piece drops below the Cauchy tolerance.
/// Non-finite or runaway pieces report converged = false.
template <class F>
TailResult integrate_tail(F&& f, double a, const TailOptions& opt = {}) {
  TailResult out;
  const auto g = [&](double u) {
    const double t = 1.0 / u;
    return f(t) * t * t;
  };
  double hi = 1.0 / a;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < opt.max_pieces; ++k) {
    const double lo = 0.5 * hi;
    if (!(lo > std::numeric_limits<double>::min())) break;
    const double piece = integrate(g, lo, hi, 1e-12, 15);
    out.pieces = k + 1;
    out.last_piece = piece;
    if (!std::isfinite(piece)) return out;
    out.value += piece;
    if (!std::isfinite(out.value)) return out;
    const double mag = std::abs(piece);
    if (mag < opt.cauchy_abs || (opt.cauchy_rel > 0.0 && mag <= opt.cauchy_rel * std::abs(out.value))) {
      if (opt.geometric_remainder && std::isfinite(previous) && previous != 0.0) {
        const double ratio = piece / previous;
        if (ratio > 0.0 && ratio < 1.0) out.value += piece * ratio / (1.0 - ratio);
      }
      out.converged = true;
      return out;
    }
    previous = piece;
    hi = lo;
  }
  return out;
}

}  // namespace sdwave::quad
