#include "sdwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace sdwave {

DissipationRates dissipation_rates(const PhaseState& state, const GalerkinSystem& system) {
  const Basis& basis = system.basis();
  DissipationRates r;
  const auto lambda = basis.eigenvalues();
  const auto wt = state.wt.data();
  for (std::size_t i = 0; i < wt.size(); ++i) {
    r.viscous += lambda[i] * wt[i] * wt[i];
    r.kinetic_l2 += wt[i] * wt[i];
  }
  // <f(w_t), w_t> by grid quadrature; equals the Galerkin pairing exactly
  // since w_t has no modes above N
  const GridField grid = basis.to_grid(state.wt);
  double pairing = 0.0;
  for (double v : grid.data()) pairing += system.damping().value(v) * v;
  r.damping = pairing * basis.hx() * basis.hy();
  r.shifted = r.damping + system.lambda1() * r.kinetic_l2;
  return r;
}

void DissipationAccumulator::advance(double dt, const DissipationRates& next) {
  visc_ += 0.5 * dt * (last_.viscous + next.viscous);
  damp_ += 0.5 * dt * (last_.damping + next.damping);
  shifted_ += 0.5 * dt * (last_.shifted + next.shifted);
  kin_ += 0.5 * dt * (last_.kinetic_l2 + next.kinetic_l2);
  last_ = next;
}

EnergyLedger energy_report(const PhaseState& state, const GalerkinSystem& system,
                           const DissipationAccumulator* acc, const EnergyLedger* initial) {
  const Basis& basis = system.basis();
  EnergyLedger e;
  e.t = state.t;
  const double l2_wt = basis.sobolev_norm(state.wt, 0.0);
  const double h1_w = basis.sobolev_norm(state.w, 1.0);
  e.kinetic = 0.5 * l2_wt * l2_wt;
  e.potential = 0.5 * h1_w * h1_w;

  const GridField w = basis.to_grid(state.w);
  double g_sum = 0.0;
  for (double v : w.data()) g_sum += system.source().antiderivative(v);
  e.source_potential = g_sum * basis.hx() * basis.hy();
  e.forcing = system.forcing().dot(state.w);
  e.lyapunov = e.kinetic + e.potential + e.source_potential - e.forcing;

  if (acc != nullptr) {
    e.visc_cum = acc->viscous();
    e.damping_cum = acc->damping();
    e.shifted_cum = acc->shifted();
    e.wt_l2_cum = acc->kinetic_l2();
  }
  if (initial != nullptr) {
    e.balance_residual = (e.energy() + e.visc_cum + e.damping_cum) -
                         (initial->energy() + e.forcing - initial->forcing);
  }
  e.l2_w = basis.sobolev_norm(state.w, 0.0);
  e.h1_w = h1_w;
  e.l2_wt = l2_wt;
  e.linf_w = basis.linf_norm(state.w);
  return e;
}

std::vector<ResidualPoint> balance_residual(std::span<const EnergyLedger> ledger) {
  std::vector<ResidualPoint> out;
  if (ledger.empty()) return out;
  const EnergyLedger& first = ledger.front();
  const double scale = first.energy() + 1.0;
  out.reserve(ledger.size());
  for (const EnergyLedger& e : ledger) {
    const double raw = (e.energy() + (e.visc_cum - first.visc_cum) +
                        (e.damping_cum - first.damping_cum)) -
                       (first.energy() + e.forcing - first.forcing);
    out.push_back({e.t, raw, raw / scale});
  }
  return out;
}

double max_abs_residual(std::span<const ResidualPoint> residual) {
  double worst = 0.0;
  for (const auto& p : residual) worst = std::max(worst, std::abs(p.raw));
  return worst;
}

LyapunovReport lyapunov_series(std::span<const EnergyLedger> ledger, LyapunovSlack slack) {
  LyapunovReport r;
  r.times.reserve(ledger.size());
  r.values.reserve(ledger.size());
  for (const auto& e : ledger) {
    r.times.push_back(e.t);
    r.values.push_back(e.lyapunov);
  }
  for (std::size_t k = 1; k < ledger.size(); ++k) {
    const double prev = ledger[k - 1].lyapunov;
    const double allowed = slack.abs + slack.rel * std::abs(prev);
    const double increase = ledger[k].lyapunov - prev;
    if (increase > allowed) {
      r.monotone = false;
      ++r.violations;
    }
    r.worst_increase = std::max(r.worst_increase, increase - allowed);
    const double defect = increase + (ledger[k].visc_cum - ledger[k - 1].visc_cum) +
                          (ledger[k].damping_cum - ledger[k - 1].damping_cum);
    r.identity_defect = std::max(r.identity_defect, std::abs(defect));
  }
  return r;
}

double shifted_damping_identity_defect(std::span<const EnergyLedger> ledger, double lambda1) {
  double worst = 0.0;
  for (const auto& e : ledger) {
    worst = std::max(worst, std::abs(e.damping_cum - (e.shifted_cum - lambda1 * e.wt_l2_cum)));
  }
  return worst;
}

}  // namespace sdwave
