#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sdwave/diagnostics.hpp"
#include "sdwave/system.hpp"

namespace sdwave {

/// Exact flow of the single-mode linear system
///   (c, c')' = A (c, c') + (0, r),   A = [[0, 1], [-lambda, -lambda]]
/// over one step dt, with r held constant.
struct ModePropagator {
  double lambda = 0.0;
  double dt = 0.0;
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};  // exp(A dt), row-major
  std::array<double, 2> forced{0.0, 0.0};            // int_0^dt exp(A(dt-s)) (0,1) ds

  std::array<double, 2> apply(std::array<double, 2> y, double r) const noexcept {
    return {matrix[0] * y[0] + matrix[1] * y[1] + forced[0] * r,
            matrix[2] * y[0] + matrix[3] * y[1] + forced[1] * r};
  }
  double determinant() const noexcept { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }
};

/// Closed-form propagator. The characteristic roots of r^2 + lambda r + lambda
/// are complex for lambda < 4, real for lambda > 4, and coincide at 4 where
/// the Jordan form is used (|lambda - 4| <= 1e-9).
ModePropagator mode_propagator(double lambda, double dt);

enum class Scheme {
  exponential_midpoint,  // second order, default
  exponential_euler,     // first order, for debugging
};

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/// Exponential integrator for the Galerkin system: every mode's linear part is
/// propagated exactly, f and g enter explicitly through the forced-response
/// vectors, and the constant forcing h is folded into the same vectors so
/// equilibria are exact fixed points of the discrete map.
///
/// The midpoint scheme takes an exponential-Euler predictor to t + dt/2,
/// evaluates the nonlinear forcing there and applies it over the full step.
///
/// Single-owner: keeps per-dt propagator caches.
class Stepper {
 public:
  Stepper(const GalerkinSystem& system, Scheme scheme = Scheme::exponential_midpoint);

  /// Throws SaturationError from the nonlinearity evaluation.
  PhaseState step(const PhaseState& state, double dt);

  const GalerkinSystem& system() const noexcept { return *system_; }
  Scheme scheme() const noexcept { return scheme_; }

 private:
  struct Cache {
    double dt = -1.0;
    std::vector<ModePropagator> modes;
  };
  const std::vector<ModePropagator>& propagators(double dt);
  PhaseState flight(const PhaseState& state, const SpectralField& forcing, double dt);

  const GalerkinSystem* system_;
  Scheme scheme_;
  std::array<Cache, 4> caches_;
  std::size_t next_slot_ = 0;
};

enum class RunStatus { completed, saturated, diverged };
std::string_view to_string(RunStatus status);

struct IntegratorControls {
  double dt = 1e-3;
  double horizon = 1.0;
  int output_stride = 1;  // record every k-th step (fixed step mode)
  Scheme scheme = Scheme::exponential_midpoint;

  // Optional step control on the per-step energy-balance defect.
  bool adaptive = false;
  double balance_tol = 1e-6;  // accept when |defect| <= balance_tol * dt
  double dt_min = 1e-7;
  double dt_max = 1e-1;
  double output_interval = 0.0;  // adaptive mode: sample spacing (0 = dt * stride)
};

struct Trajectory {
  std::vector<PhaseState> samples;
  std::vector<EnergyLedger> ledger;
  RunStatus status = RunStatus::completed;
  std::string diagnostic;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrates from `initial` to initial.t + controls.horizon.
Trajectory simulate(const GalerkinSystem& system, const PhaseState& initial,
                    const IntegratorControls& controls);

}  // namespace sdwave
