#include "sdwave/longtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sdwave/errors.hpp"
#include "sdwave/parallel.hpp"
#include "sdwave/random.hpp"

namespace sdwave {

namespace {

double l2(const SpectralField& f) { return std::sqrt(f.dot(f)); }

class Jacobian {
 public:
  Jacobian(const GalerkinSystem& system, const SpectralField& w)
      : basis_(system.basis()), slope_(basis_.to_grid(w)) {
    for (double& v : slope_.data()) v = system.source().derivative(v);
  }

  SpectralField apply(const SpectralField& v) const {
    GridField g = basis_.to_grid(v);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= slope_[i];
    SpectralField out = basis_.to_spectral(g);
    const auto lambda = basis_.eigenvalues();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += lambda[i] * v[i];
    return out;
  }

  SpectralField precondition(const SpectralField& r) const {
    SpectralField z = r;
    const auto lambda = basis_.eigenvalues();
    for (std::size_t i = 0; i < z.size(); ++i) z[i] /= lambda[i];
    return z;
  }

 private:
  const Basis& basis_;
  GridField slope_;
};

struct InnerResult {
  SpectralField x;
  int iterations = 0;
};

// Preconditioned MINRES on the symmetric, possibly indefinite J x = b
// (Paige-Saunders recurrences with the SPD preconditioner Lambda^{-1}).
// Stops when the true residual ||b - J x|| drops to tol.
InnerResult minres(const Jacobian& jac, const SpectralField& b, double tol, int max_iters) {
  const int modes = b.modes();
  InnerResult out{SpectralField(modes), 0};
  SpectralField r1 = b;
  SpectralField y = jac.precondition(r1);
  const double beta1 = std::sqrt(std::max(0.0, r1.dot(y)));
  if (!(beta1 > 0.0)) return out;
  SpectralField r2 = r1;
  SpectralField w(modes);
  SpectralField w2(modes);
  double oldb = 0.0;
  double beta = beta1;
  double dbar = 0.0;
  double epsln = 0.0;
  double phibar = beta1;
  double cs = -1.0;
  double sn = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const SpectralField v = (1.0 / beta) * y;
    y = jac.apply(v);
    if (it >= 2) y.axpy(-beta / oldb, r1);
    const double alfa = v.dot(y);
    y.axpy(-alfa / beta, r2);
    r1 = r2;
    r2 = y;
    y = jac.precondition(r2);
    oldb = beta;
    beta = std::sqrt(std::max(0.0, r2.dot(y)));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const SpectralField w1 = w2;
    w2 = w;
    w = v;
    w.axpy(-oldeps, w1);
    w.axpy(-delta, w2);
    w *= 1.0 / gamma;
    out.x.axpy(phi, w);
    out.iterations = it;

    SpectralField residual = b - jac.apply(out.x);
    if (l2(residual) <= tol || !(beta > 0.0)) break;
  }
  return out;
}

double residual_norm_or_inf(const GalerkinSystem& system, const SpectralField& w) {
  try {
    const double n = l2(stationary_residual(system, w));
    return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
  } catch (const SaturationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

double equilibrium_lyapunov(const GalerkinSystem& system, const SpectralField& w) {
  const Basis& basis = system.basis();
  return energy_report({w, basis.zero_field(), 0.0}, system).lyapunov;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

SpectralField stationary_residual(const GalerkinSystem& system, const SpectralField& w) {
  const Basis& basis = system.basis();
  GridField g = basis.to_grid(w);
  for (double& v : g.data()) v = system.source().value(v);
  SpectralField r = basis.to_spectral(g);
  const auto lambda = basis.eigenvalues();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += lambda[i] * w[i];
  r -= system.forcing();
  return r;
}

Equilibrium find_equilibrium(const GalerkinSystem& system, const SpectralField& initial_guess,
                             const NewtonOptions& options) {
  Equilibrium e;
  e.w_star = initial_guess;
  double norm = residual_norm_or_inf(system, e.w_star);
  e.residual = norm;
  if (!std::isfinite(norm)) {
    e.diagnostic = "residual not finite at the initial guess";
    return e;
  }
  while (true) {
    if (norm <= options.tol) {
      e.converged = true;
      break;
    }
    if (e.newton_iters >= options.max_iters) {
      e.diagnostic = fmt::format("no convergence in {} Newton steps, residual {:.3e}",
                                 options.max_iters, norm);
      break;
    }
    const SpectralField residual = stationary_residual(system, e.w_star);
    const Jacobian jac(system, e.w_star);
    const double inner_tol = 0.1 * options.tol;
    const InnerResult step = minres(jac, -1.0 * residual, inner_tol, options.max_inner);
    e.inner_iters += step.iterations;

    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      SpectralField trial = e.w_star;
      trial.axpy(scale, step.x);
      const double trial_norm = residual_norm_or_inf(system, trial);
      if (trial_norm < norm) {
        e.w_star = std::move(trial);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    ++e.newton_iters;
    e.residual = norm;
    if (!accepted) {
      e.diagnostic = fmt::format("line search failed after {} halvings, residual {:.3e}",
                                 options.max_halvings, norm);
      break;
    }
  }
  e.lyapunov = equilibrium_lyapunov(system, e.w_star);
  return e;
}

std::vector<Equilibrium> find_equilibria(const GalerkinSystem& system,
                                         const MultistartOptions& options) {
  const Basis& basis = system.basis();
  const auto starts = static_cast<std::size_t>(std::max(1, options.starts));
  std::vector<SpectralField> guesses{basis.zero_field()};
  Rng rng(options.seed);
  while (guesses.size() < starts) {
    guesses.push_back(rng.field(basis.modes(), options.amplitude, options.decay));
  }
  std::vector<Equilibrium> found(starts);
  parallel_for(starts, options.threads, [&](std::size_t i) {
    found[i] = find_equilibrium(system, guesses[i], options.newton);
  });

  std::vector<Equilibrium> distinct;
  for (auto& e : found) {
    if (!e.converged) continue;
    const bool duplicate = std::any_of(distinct.begin(), distinct.end(), [&](const Equilibrium& d) {
      return basis.sobolev_norm(e.w_star - d.w_star, 1.0) < options.merge_distance;
    });
    if (!duplicate) distinct.push_back(std::move(e));
  }
  std::stable_sort(distinct.begin(), distinct.end(), [&](const Equilibrium& a, const Equilibrium& b) {
    if (a.lyapunov != b.lyapunov) return a.lyapunov < b.lyapunov;
    return basis.sobolev_norm(a.w_star, 1.0) < basis.sobolev_norm(b.w_star, 1.0);
  });
  return distinct;
}

std::string_view to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::dissipative:
      return "dissipative";
    case SweepVerdict::not_dissipative:
      return "not dissipative";
    case SweepVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

SweepReport dissipativity_sweep(const GalerkinSystem& system, std::span<const PhaseState> ball,
                                const IntegratorControls& controls, unsigned threads) {
  if (!(controls.horizon > 0.0)) throw ConfigError("sweep horizon must be positive");
  const Basis& basis = system.basis();
  SweepReport report;
  report.members.resize(ball.size());

  parallel_for(ball.size(), threads, [&](std::size_t i) {
    SweepMember& m = report.members[i];
    m.index = i;
    PhaseState state = ball[i];
    m.sup_h1_w = basis.sobolev_norm(state.w, 1.0);
    m.sup_l2_wt = basis.sobolev_norm(state.wt, 0.0);
    m.sup_linf_w = basis.linf_norm(state.w);
    m.linf_at_integer.push_back(m.sup_linf_w);

    const auto whole = static_cast<int>(std::floor(controls.horizon + 1e-12));
    const double rest = controls.horizon - whole;
    const int segments = whole + (rest > 1e-12 ? 1 : 0);
    for (int n = 0; n < segments; ++n) {
      IntegratorControls c = controls;
      c.horizon = n < whole ? 1.0 : rest;
      const Trajectory tr = simulate(system, state, c);
      for (const auto& row : tr.ledger) {
        m.sup_h1_w = std::max(m.sup_h1_w, row.h1_w);
        m.sup_l2_wt = std::max(m.sup_l2_wt, row.l2_wt);
        m.sup_linf_w = std::max(m.sup_linf_w, row.linf_w);
      }
      if (tr.status != RunStatus::completed) {
        m.status = tr.status;
        m.diagnostic = tr.diagnostic;
        return;
      }
      state = tr.samples.back();
      if (n < whole) m.linf_at_integer.push_back(tr.ledger.back().linf_w);
    }
  });

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& m : report.members) {
    if (m.status != RunStatus::completed) {
      report.inconclusive_members.push_back(m.index);
      continue;
    }
    report.c_h1 = std::max(report.c_h1, m.sup_h1_w);
    report.c_l2_wt = std::max(report.c_l2_wt, m.sup_l2_wt);
    report.c_linf = std::max(report.c_linf, m.sup_linf_w);
    for (std::size_t n = 0; n + 1 < m.linf_at_integer.size(); ++n) {
      xs.push_back(m.linf_at_integer[n]);
      ys.push_back(m.linf_at_integer[n + 1]);
    }
  }
  report.fit_pairs = xs.size();
  if (!xs.empty()) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    report.a = fit_slope(xs, ys);
    report.b = my - report.a * mx;
    double worst = -std::numeric_limits<double>::infinity();
    double sq = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (report.a * xs[i] + report.b);
      worst = std::max(worst, r);
      sq += r * r;
    }
    report.b_envelope = report.b + std::max(0.0, worst);
    report.fit_rms = std::sqrt(sq / static_cast<double>(xs.size()));
  }
  if (!report.inconclusive_members.empty()) {
    report.verdict = SweepVerdict::inconclusive;
  } else {
    report.verdict = report.a < 1.0 ? SweepVerdict::dissipative : SweepVerdict::not_dissipative;
  }
  return report;
}

AttractorReport attractor_distance(const Trajectory& run, std::span<const Equilibrium> equilibria,
                                   const GalerkinSystem& system, const AttractorOptions& options) {
  if (equilibria.empty()) throw ConfigError("attractor distance needs at least one equilibrium");
  if (run.samples.empty()) throw ConfigError("attractor distance needs a non-empty trajectory");
  const Basis& basis = system.basis();
  AttractorReport r;
  for (const auto& s : run.samples) {
    const double wt = basis.sobolev_norm(s.wt, 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t e = 0; e < equilibria.size(); ++e) {
      const double d = basis.sobolev_norm(s.w - equilibria[e].w_star, 1.0) + wt;
      if (d < best) {
        best = d;
        nearest = e;
      }
    }
    r.times.push_back(s.t);
    r.distance.push_back(best);
    r.wt_l2.push_back(wt);
    r.nearest.push_back(nearest);
  }

  const double t0 = r.times.front();
  const double t_end = r.times.back();
  const double tail_from = t_end - options.tail_fraction * (t_end - t0);
  r.tail_start = static_cast<std::size_t>(
      std::lower_bound(r.times.begin(), r.times.end(), tail_from - 1e-12) - r.times.begin());
  r.tail_start = std::min(r.tail_start, r.times.size() - 1);
  r.final_distance = r.distance.back();
  r.min_tail_wt = *std::min_element(r.wt_l2.begin() + static_cast<std::ptrdiff_t>(r.tail_start),
                                    r.wt_l2.end());

  std::vector<double> ts;
  std::vector<double> logs;
  bool hits_zero = false;
  for (std::size_t k = r.tail_start; k < r.times.size(); ++k) {
    if (!(r.distance[k] > 0.0)) {
      hits_zero = true;
      break;
    }
    ts.push_back(r.times[k]);
    logs.push_back(std::log(r.distance[k]));
  }
  if (!hits_zero && ts.size() >= 2) r.decay_rate = -fit_slope(ts, logs);

  if (!run.ledger.empty()) {
    r.lyapunov_gap = run.ledger.back().lyapunov - equilibria[r.nearest.back()].lyapunov;
  }
  r.converged = r.final_distance < options.tol;
  r.wt_small = r.min_tail_wt < 10.0 * options.tol;
  const double tail_first = r.distance[r.tail_start];
  r.plateau = !r.converged && tail_first > 0.0 &&
              r.final_distance >= (1.0 - options.plateau_drop) * tail_first;
  return r;
}

}  // namespace sdwave
