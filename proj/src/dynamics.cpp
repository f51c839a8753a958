#include "sdwave/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sdwave/errors.hpp"

namespace sdwave {

ModePropagator mode_propagator(double lambda, double dt) {
  if (!(lambda > 0.0)) throw ConfigError("mode propagator needs a positive eigenvalue");
  ModePropagator p;
  p.lambda = lambda;
  p.dt = dt;
  auto& m = p.matrix;
  if (std::abs(lambda - 4.0) <= 1e-9) {
    // double root -2: exp(-2t) [I + t (A + 2I)]
    const double e = std::exp(-2.0 * dt);
    m = {e * (1.0 + 2.0 * dt), e * dt, -4.0 * e * dt, e * (1.0 - 2.0 * dt)};
  } else if (lambda < 4.0) {
    const double mu = -0.5 * lambda;
    const double omega = std::sqrt(lambda - 0.25 * lambda * lambda);
    const double e = std::exp(mu * dt);
    const double c = std::cos(omega * dt);
    const double s = std::sin(omega * dt) / omega;
    m = {e * (c + 0.5 * lambda * s), e * s, -lambda * e * s, e * (c - 0.5 * lambda * s)};
  } else {
    const double root = std::sqrt(lambda * lambda - 4.0 * lambda);
    const double slow = -2.0 * lambda / (lambda + root);  // avoids -lambda/2 + root/2
    const double fast = lambda / slow;
    const double gap = slow - fast;
    if (gap * dt < 30.0) {
      const double e = std::exp(fast * dt);
      const double q = std::expm1(gap * dt) / gap;
      m = {e * (1.0 - fast * q), e * q, -lambda * e * q, e * (1.0 + slow * q)};
    } else {
      const double es = std::exp(slow * dt);
      const double ef = std::exp(fast * dt);
      const double q = (es - ef) / gap;
      m = {(slow * ef - fast * es) / gap, q, -lambda * q, (slow * es - fast * ef) / gap};
    }
  }
  p.forced = {(1.0 - m[0]) / lambda, m[1]};
  return p;
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::exponential_midpoint:
      return "exponential_midpoint";
    case Scheme::exponential_euler:
      return "exponential_euler";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "exponential_midpoint" || name == "midpoint") return Scheme::exponential_midpoint;
  if (name == "exponential_euler" || name == "euler") return Scheme::exponential_euler;
  throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::saturated:
      return "saturated";
    case RunStatus::diverged:
      return "diverged";
  }
  return "?";
}

Stepper::Stepper(const GalerkinSystem& system, Scheme scheme) : system_(&system), scheme_(scheme) {}

const std::vector<ModePropagator>& Stepper::propagators(double dt) {
  for (const Cache& c : caches_) {
    if (c.dt == dt) return c.modes;
  }
  Cache& slot = caches_[next_slot_];
  next_slot_ = (next_slot_ + 1) % caches_.size();
  const auto lambda = system_->basis().eigenvalues();
  slot.modes.clear();
  slot.modes.reserve(lambda.size());
  for (double l : lambda) slot.modes.push_back(mode_propagator(l, dt));
  slot.dt = dt;
  return slot.modes;
}

PhaseState Stepper::flight(const PhaseState& state, const SpectralField& forcing, double dt) {
  const auto& props = propagators(dt);
  PhaseState out{state.w, state.wt, state.t + dt};
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto y = props[i].apply({state.w[i], state.wt[i]}, forcing[i]);
    out.w[i] = y[0];
    out.wt[i] = y[1];
  }
  return out;
}

PhaseState Stepper::step(const PhaseState& state, double dt) {
  SpectralField r = system_->nonlinear_forcing(state);
  r += system_->forcing();
  if (scheme_ == Scheme::exponential_euler) return flight(state, r, dt);
  const PhaseState half = flight(state, r, 0.5 * dt);
  SpectralField r_mid = system_->nonlinear_forcing(half);
  r_mid += system_->forcing();
  return flight(state, r_mid, dt);
}

namespace {

// E - <h, w>, without the sup-norm sampling of energy_report
double lyapunov_value(const PhaseState& s, const GalerkinSystem& system) {
  const Basis& basis = system.basis();
  const double kin = basis.sobolev_norm(s.wt, 0.0);
  const double grad = basis.sobolev_norm(s.w, 1.0);
  const GridField w = basis.to_grid(s.w);
  double g_sum = 0.0;
  for (double v : w.data()) g_sum += system.source().antiderivative(v);
  return 0.5 * kin * kin + 0.5 * grad * grad + g_sum * basis.hx() * basis.hy() -
         system.forcing().dot(s.w);
}

class Recorder {
 public:
  Recorder(const GalerkinSystem& system, const PhaseState& initial, Trajectory& out)
      : system_(system), out_(out), acc_(dissipation_rates(initial, system)) {
    initial_ = energy_report(initial, system, &acc_, nullptr);
    out_.samples.push_back(initial);
    out_.ledger.push_back(initial_);
  }

  void advance(double dt, const DissipationRates& rates) { acc_.advance(dt, rates); }
  void record(const PhaseState& s) {
    out_.samples.push_back(s);
    out_.ledger.push_back(energy_report(s, system_, &acc_, &initial_));
  }
  const DissipationAccumulator& accumulator() const { return acc_; }

 private:
  const GalerkinSystem& system_;
  Trajectory& out_;
  DissipationAccumulator acc_;
  EnergyLedger initial_;
};

void mark_saturated(Trajectory& out, const SaturationError& e, double t) {
  out.status = RunStatus::saturated;
  out.diagnostic = fmt::format("nonlinearity saturated at t = {} (argument {}): {}", t,
                               e.argument(), e.what());
}

void mark_diverged(Trajectory& out, double t) {
  out.status = RunStatus::diverged;
  out.diagnostic = fmt::format("non-finite state at t = {}", t);
}

Trajectory simulate_fixed(const GalerkinSystem& system, const PhaseState& initial,
                          const IntegratorControls& c) {
  Trajectory out;
  Recorder rec(system, initial, out);
  Stepper stepper(system, c.scheme);
  const auto n_steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(c.horizon / c.dt - 1e-9)));
  const auto stride = static_cast<std::size_t>(std::max(1, c.output_stride));
  PhaseState state = initial;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double t_next = n == n_steps ? initial.t + c.horizon : initial.t + n * c.dt;
    const double dt = t_next - state.t;
    try {
      state = stepper.step(state, dt);
    } catch (const SaturationError& e) {
      mark_saturated(out, e, state.t);
      return out;
    }
    state.t = t_next;
    out.steps = n;
    if (!state.all_finite()) {
      mark_diverged(out, state.t);
      return out;
    }
    try {
      rec.advance(dt, dissipation_rates(state, system));
      if (n % stride == 0 || n == n_steps) rec.record(state);
    } catch (const SaturationError& e) {
      mark_saturated(out, e, state.t);
      return out;
    }
  }
  return out;
}

// Step control on the per-step energy-balance defect
//   |dL + d visc + d damping| <= balance_tol * dt,
// where the dissipation increments use the trapezoid rule on the step. The
// midpoint scheme has a local defect of order dt^3.
Trajectory simulate_adaptive(const GalerkinSystem& system, const PhaseState& initial,
                             const IntegratorControls& c) {
  Trajectory out;
  Recorder rec(system, initial, out);
  Stepper stepper(system, c.scheme);
  const double spacing =
      c.output_interval > 0.0 ? c.output_interval : c.dt * std::max(1, c.output_stride);
  const double t_end = initial.t + c.horizon;
  const double order = c.scheme == Scheme::exponential_midpoint ? 3.0 : 2.0;

  PhaseState state = initial;
  DissipationRates rates = dissipation_rates(state, system);
  double lyap = 0.0;
  try {
    lyap = lyapunov_value(state, system);
  } catch (const SaturationError& e) {
    mark_saturated(out, e, state.t);
    return out;
  }
  double dt = std::clamp(c.dt, c.dt_min, c.dt_max);
  std::size_t sample_index = 1;
  double next_sample = std::min(t_end, initial.t + spacing);

  while (state.t < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) {
    const double trial_dt = std::min(dt, next_sample - state.t);
    PhaseState trial;
    DissipationRates trial_rates;
    double trial_lyap = 0.0;
    try {
      trial = stepper.step(state, trial_dt);
      if (!trial.all_finite()) {
        mark_diverged(out, state.t + trial_dt);
        return out;
      }
      trial_rates = dissipation_rates(trial, system);
      trial_lyap = lyapunov_value(trial, system);
    } catch (const SaturationError& e) {
      if (trial_dt > c.dt_min) {
        dt = std::max(c.dt_min, 0.5 * trial_dt);
        ++out.rejected;
        continue;
      }
      mark_saturated(out, e, state.t);
      return out;
    }
    const double defect = (trial_lyap - lyap) +
                          0.5 * trial_dt * (rates.viscous + trial_rates.viscous) +
                          0.5 * trial_dt * (rates.damping + trial_rates.damping);
    const double allowed = c.balance_tol * trial_dt;
    const double ratio = std::abs(defect) / allowed;
    const double factor =
        ratio == 0.0 ? 2.0 : std::clamp(0.9 * std::pow(ratio, -1.0 / order), 0.2, 2.0);
    if (ratio > 1.0 && trial_dt > c.dt_min) {
      dt = std::max(c.dt_min, trial_dt * factor);
      ++out.rejected;
      continue;
    }
    rec.advance(trial_dt, trial_rates);
    state = trial;
    rates = trial_rates;
    lyap = trial_lyap;
    ++out.steps;
    const double proposed = std::clamp(trial_dt * factor, c.dt_min, c.dt_max);
    // a step clipped to a sample time says little about the next one
    dt = trial_dt < dt ? std::max(dt, proposed) : proposed;
    if (std::abs(state.t - next_sample) <= 1e-12 * std::max(1.0, std::abs(next_sample))) {
      state.t = next_sample;
      try {
        rec.record(state);
      } catch (const SaturationError& e) {
        mark_saturated(out, e, state.t);
        return out;
      }
      ++sample_index;
      next_sample = std::min(t_end, initial.t + static_cast<double>(sample_index) * spacing);
    }
  }
  return out;
}

}  // namespace

Trajectory simulate(const GalerkinSystem& system, const PhaseState& initial,
                    const IntegratorControls& controls) {
  if (!(controls.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(controls.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (controls.output_stride < 1) throw ConfigError("output stride must be at least 1");
  if (controls.adaptive) {
    if (!(controls.balance_tol > 0.0) || !(controls.dt_min > 0.0) ||
        controls.dt_max < controls.dt_min) {
      throw ConfigError("invalid adaptive step controls");
    }
  }
  try {
    return controls.adaptive ? simulate_adaptive(system, initial, controls)
                             : simulate_fixed(system, initial, controls);
  } catch (const SaturationError& e) {
    // the initial data itself is out of range
    Trajectory out;
    out.samples.push_back(initial);
    mark_saturated(out, e, initial.t);
    return out;
  }
}

}  // namespace sdwave
