#pragma once

#include <span>
#include <vector>

#include "sdwave/system.hpp"

namespace sdwave {

/// Instantaneous integrands of the cumulative dissipation terms.
struct DissipationRates {
  double viscous = 0.0;  // ||grad w_t||^2
  double damping = 0.0;  // <f(w_t), w_t>
  double shifted = 0.0;  // <f1(w_t), w_t>
  double kinetic_l2 = 0.0;  // ||w_t||^2
};

DissipationRates dissipation_rates(const PhaseState& state, const GalerkinSystem& system);

/// Trapezoid accumulation of the dissipation integrals along the step
/// schedule.
class DissipationAccumulator {
 public:
  explicit DissipationAccumulator(DissipationRates initial) : last_(initial) {}

  void advance(double dt, const DissipationRates& next);

  double viscous() const noexcept { return visc_; }
  double damping() const noexcept { return damp_; }
  double shifted() const noexcept { return shifted_; }
  double kinetic_l2() const noexcept { return kin_; }

 private:
  DissipationRates last_;
  double visc_ = 0.0;
  double damp_ = 0.0;
  double shifted_ = 0.0;
  double kin_ = 0.0;
};

/// One row of the energy ledger.
struct EnergyLedger {
  double t = 0.0;
  double kinetic = 0.0;           // 1/2 ||w_t||^2
  double potential = 0.0;         // 1/2 ||grad w||^2
  double source_potential = 0.0;  // <G(w), 1>
  double forcing = 0.0;           // <h, w>
  double lyapunov = 0.0;          // kinetic + potential + source_potential - forcing
  double visc_cum = 0.0;          // int ||grad w_t||^2
  double damping_cum = 0.0;       // int <f(w_t), w_t>
  double shifted_cum = 0.0;       // int <f1(w_t), w_t>
  double wt_l2_cum = 0.0;         // int ||w_t||^2
  double balance_residual = 0.0;
  double l2_w = 0.0;
  double h1_w = 0.0;
  double l2_wt = 0.0;
  double linf_w = 0.0;

  double energy() const noexcept { return kinetic + potential + source_potential; }
};

/// Instantaneous ledger fields for `state`. Cumulative terms are copied from
/// `acc` (pass nullptr for a fresh state); the balance residual is measured
/// against `initial` when given.
EnergyLedger energy_report(const PhaseState& state, const GalerkinSystem& system,
                           const DissipationAccumulator* acc = nullptr,
                           const EnergyLedger* initial = nullptr);

struct ResidualPoint {
  double t = 0.0;
  double raw = 0.0;
  double relative = 0.0;  // raw / (E(0) + 1)
};

/// [E(t) + visc_cum + damping_cum] - [E(0) + <h, w(t) - w(0)>]
std::vector<ResidualPoint> balance_residual(std::span<const EnergyLedger> ledger);
double max_abs_residual(std::span<const ResidualPoint> residual);

struct LyapunovSlack {
  double abs = 1e-8;
  double rel = 1e-6;
};

struct LyapunovReport {
  std::vector<double> times;
  std::vector<double> values;
  bool monotone = true;
  std::size_t violations = 0;
  double worst_increase = 0.0;  // max of L(t_{k+1}) - L(t_k) - slack
  /// max over steps of |dL + d visc + d damping|; the forcing work is already
  /// inside L.
  double identity_defect = 0.0;
};

LyapunovReport lyapunov_series(std::span<const EnergyLedger> ledger, LyapunovSlack slack = {});

/// damping_cum - (shifted_cum - lambda1 * int ||w_t||^2), max over the ledger.
double shifted_damping_identity_defect(std::span<const EnergyLedger> ledger, double lambda1);

}  // namespace sdwave
