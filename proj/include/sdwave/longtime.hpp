#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdwave/dynamics.hpp"

namespace sdwave {

struct NewtonOptions {
  double tol = 1e-10;  // on ||-Laplace w + g(w) - h||_{L2}
  int max_iters = 50;
  int max_inner = 400;
  int max_halvings = 30;
};

struct Equilibrium {
  SpectralField w_star;
  double residual = 0.0;
  int newton_iters = 0;
  int inner_iters = 0;  // total over the Newton steps
  bool converged = false;
  double lyapunov = 0.0;  // L(w*, 0)
  std::string diagnostic;
};

/// R(w) = Lambda w + P g(w) - h, the stationary Galerkin equation.
SpectralField stationary_residual(const GalerkinSystem& system, const SpectralField& w);

/// Newton iteration on R(w) = 0. The Jacobian Lambda + P[g'(w) .] is
/// symmetric but indefinite when g' < -lambda1 somewhere; it is applied
/// matrix-free and inverted by preconditioned MINRES with Lambda^{-1} as
/// preconditioner. Inner solves run to 0.1 * tol, so a linear problem is
/// solved in one step. Steps are halved until ||R|| decreases.
/// Never throws on non-convergence: the report carries the final residual.
Equilibrium find_equilibrium(const GalerkinSystem& system, const SpectralField& initial_guess,
                             const NewtonOptions& options = {});

struct MultistartOptions {
  int starts = 5;             // the zero guess plus starts - 1 random ones
  double amplitude = 1.0;
  double decay = 2.0;
  double merge_distance = 1e-6;  // H1 distance below which two roots coincide
  std::uint64_t seed = 1;
  unsigned threads = 1;
  NewtonOptions newton;
};

/// Converged, distinct equilibria ordered by Lyapunov value, then H1 norm.
std::vector<Equilibrium> find_equilibria(const GalerkinSystem& system,
                                         const MultistartOptions& options = {});

enum class SweepVerdict { dissipative, not_dissipative, inconclusive };
std::string_view to_string(SweepVerdict v);

struct SweepMember {
  std::size_t index = 0;
  RunStatus status = RunStatus::completed;
  std::string diagnostic;
  double sup_h1_w = 0.0;
  double sup_l2_wt = 0.0;
  double sup_linf_w = 0.0;
  std::vector<double> linf_at_integer;  // ||w(n)||_inf, n = 0, 1, ...
};

struct SweepReport {
  std::vector<SweepMember> members;
  double c_h1 = 0.0;  // ensemble maxima of the sup-norms
  double c_l2_wt = 0.0;
  double c_linf = 0.0;
  /// Least-squares fit ||w(n+1)|| ~ a ||w(n)|| + b over all members, and
  /// the smallest b_envelope making it an upper bound.
  double a = 0.0;
  double b = 0.0;
  double b_envelope = 0.0;
  double fit_rms = 0.0;
  std::size_t fit_pairs = 0;
  SweepVerdict verdict = SweepVerdict::dissipative;
  std::vector<std::size_t> inconclusive_members;
};

/// Runs every member of `ball` to controls.horizon in unit-time segments so
/// that ||w||_inf is sampled at integer times.
SweepReport dissipativity_sweep(const GalerkinSystem& system, std::span<const PhaseState> ball,
                                const IntegratorControls& controls, unsigned threads = 1);

struct AttractorOptions {
  double tail_fraction = 0.2;
  double tol = 1e-4;
  /// A tail whose distance drops by less than this fraction is reported as a
  /// plateau.
  double plateau_drop = 0.01;
};

struct AttractorReport {
  std::vector<double> times;
  std::vector<double> distance;  // min_e ||w - w*_e||_{H1} + ||w_t||
  std::vector<double> wt_l2;
  std::vector<std::size_t> nearest;
  std::size_t tail_start = 0;
  double final_distance = 0.0;
  double min_tail_wt = 0.0;
  /// -d log(distance)/dt fitted over the tail (0 when the tail hits zero).
  double decay_rate = 0.0;
  double lyapunov_gap = 0.0;  // L(final) - L(nearest equilibrium)
  bool converged = false;     // final_distance < tol
  bool wt_small = false;      // min_tail_wt < 10 tol
  bool plateau = false;
};

/// Throws ConfigError when `equilibria` is empty.
AttractorReport attractor_distance(const Trajectory& run, std::span<const Equilibrium> equilibria,
                                   const GalerkinSystem& system,
                                   const AttractorOptions& options = {});

}  // namespace sdwave
