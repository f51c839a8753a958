#include "sdwave/decomposition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "sdwave/errors.hpp"
#include "sdwave/parallel.hpp"
#include "sdwave/quadrature.hpp"

namespace sdwave {

namespace {

using std::numbers::pi;

// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2
struct PhiPair {
  double p1;
  double p2;
};

PhiPair phi_functions(double z) {
  if (std::abs(z) < 0.5) {
    double p1 = 0.0;
    double p2 = 0.0;
    double term = 1.0;  // z^k / k!
    for (int k = 0; k < 20; ++k) {
      p1 += term / (k + 1);
      p2 += term / ((k + 1) * (k + 2));
      term *= z / (k + 1);
    }
    return {p1, p2};
  }
  const double em1 = std::expm1(z);
  return {em1 / z, (em1 - z) / (z * z)};
}

std::vector<double> sample_times(const Trajectory& run) {
  std::vector<double> t;
  t.reserve(run.samples.size());
  for (const auto& s : run.samples) t.push_back(s.t);
  return t;
}

void require_run(const Trajectory& run) {
  if (run.samples.size() < 2) throw ConfigError("decomposition needs at least two samples");
}

SpectralField projected(const Basis& basis, const SpectralField& field,
                        const Nonlinearity& n) {
  GridField grid = basis.to_grid(field);
  for (double& v : grid.data()) v = n.value(v);
  return basis.to_spectral(grid);
}

std::vector<double> unit_rates(std::size_t count) { return std::vector<double>(count, 1.0); }

// half-width weights of the Gaussian over grid cells centred on the nodes
void cell_weights(double centre, double spacing, int points, double tau, std::vector<double>& out) {
  const double scale = 1.0 / (2.0 * std::sqrt(tau));
  out.resize(static_cast<std::size_t>(points));
  for (int i = 1; i <= points; ++i) {
    const double a = ((i - 0.5) * spacing - centre) * scale;
    const double b = ((i + 0.5) * spacing - centre) * scale;
    double w;
    if (a > 0.0) {
      w = 0.5 * (std::erfc(a) - std::erfc(b));
    } else if (b < 0.0) {
      w = 0.5 * (std::erfc(-b) - std::erfc(-a));
    } else {
      w = 0.5 * (std::erf(b) - std::erf(a));
    }
    out[static_cast<std::size_t>(i - 1)] = w;
  }
}

// sum_il S_il ex_i ey_l
double contract(const GridField& s, const std::vector<double>& ex, const std::vector<double>& ey) {
  const int m = s.points();
  double total = 0.0;
  for (int i = 1; i <= m; ++i) {
    const double wx = ex[static_cast<std::size_t>(i - 1)];
    if (wx == 0.0) continue;
    double row = 0.0;
    for (int l = 1; l <= m; ++l) row += s(i, l) * ey[static_cast<std::size_t>(l - 1)];
    total += wx * row;
  }
  return total;
}

GridSource damping_source(const Trajectory& base, const GalerkinSystem& system,
                          const Basis& basis) {
  GridSource src;
  for (const auto& s : base.samples) {
    GridField g = basis.to_grid(s.wt);
    for (double& v : g.data()) v = std::abs(shifted_damping(system.damping(), system.lambda1(), v));
    src.times.push_back(s.t);
    src.values.push_back(std::move(g));
  }
  return src;
}

std::vector<std::array<double, 2>> sample_points(const Basis& basis, int per_axis) {
  std::vector<std::array<double, 2>> pts;
  const auto& d = basis.domain();
  for (int i = 1; i <= per_axis; ++i) {
    for (int l = 1; l <= per_axis; ++l) {
      pts.push_back({d.lx * i / (per_axis + 1), d.ly * l / (per_axis + 1)});
    }
  }
  return pts;
}

std::size_t nearest_index(std::span<const double> times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

// the source grid: the basis grid refined `factor` times per axis
Basis source_grid(const Basis& basis, int factor) {
  if (factor < 1) throw ConfigError("kernel check: refinement must be at least 1");
  return Basis(basis.domain(), basis.modes(), factor * (basis.grid_points() + 1) - 1, 1);
}

void summarise(KernelReport& r, double tolerance) {
  r.max_rhs = 0.0;
  r.min_margin = std::numeric_limits<double>::infinity();
  r.flagged = 0;
  for (const auto& p : r.points) {
    r.max_rhs = std::max(r.max_rhs, p.rhs);
    r.min_margin = std::min(r.min_margin, p.margin);
    if (p.flagged) ++r.flagged;
  }
  if (r.points.empty()) r.min_margin = 0.0;
  r.holds = r.min_margin >= -tolerance * r.max_rhs && std::abs(r.kernel_mass - 1.0) <= 1e-8;
}

}  // namespace

SampledSeries relax_piecewise_linear(std::span<const double> rates, std::span<const double> times,
                                     std::span<const SpectralField> forcing,
                                     const SpectralField& initial) {
  if (times.size() != forcing.size() || times.empty()) {
    throw ConfigError("relax: times and forcing must be aligned and non-empty");
  }
  if (rates.size() != initial.size()) throw ConfigError("relax: rate count mismatch");
  SampledSeries out;
  out.times.assign(times.begin(), times.end());
  out.values.reserve(times.size());
  out.values.push_back(initial);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double h = times[k] - times[k - 1];
    const SpectralField& r0 = forcing[k - 1];
    const SpectralField& r1 = forcing[k];
    SpectralField y = out.values.back();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double z = -rates[i] * h;
      const PhiPair p = phi_functions(z);
      y[i] = std::exp(z) * y[i] + h * (p.p1 * r0[i] + p.p2 * (r1[i] - r0[i]));
    }
    out.values.push_back(std::move(y));
  }
  return out;
}

SampledSeries solve_phi(const Trajectory& run, const GalerkinSystem& system) {
  require_run(run);
  const Basis& basis = system.basis();
  std::vector<SpectralField> forcing;
  forcing.reserve(run.samples.size());
  for (const auto& s : run.samples) {
    SpectralField r = (1.0 + system.lambda1()) * s.wt;
    r -= projected(basis, s.w, system.source());
    r += system.forcing();
    forcing.push_back(std::move(r));
  }
  const PhaseState& first = run.samples.front();
  const auto times = sample_times(run);
  return relax_piecewise_linear(basis.eigenvalues(), times, forcing, first.w + first.wt);
}

SampledSeries recover_v(const SampledSeries& phi, const SpectralField& v0) {
  return relax_piecewise_linear(unit_rates(v0.size()), phi.times, phi.values, v0);
}

SampledSeries solve_damping_part(const Trajectory& run, const GalerkinSystem& system) {
  require_run(run);
  const Basis& basis = system.basis();
  std::vector<SpectralField> forcing;
  forcing.reserve(run.samples.size());
  for (const auto& s : run.samples) {
    SpectralField r = -system.lambda1() * s.wt;
    r -= projected(basis, s.wt, system.damping());
    forcing.push_back(std::move(r));
  }
  const auto times = sample_times(run);
  return relax_piecewise_linear(basis.eigenvalues(), times, forcing, basis.zero_field());
}

SampledSeries recover_u(const SampledSeries& damping_part) {
  const SpectralField zero(damping_part.values.front().modes());
  return relax_piecewise_linear(unit_rates(zero.size()), damping_part.times, damping_part.values,
                                zero);
}

DriftReport drift_norms(const SampledSeries& v, const Trajectory& run,
                        const GalerkinSystem& system, std::span<const double> exponents) {
  const Basis& basis = system.basis();
  DriftReport r;
  r.exponents.assign(exponents.begin(), exponents.end());
  const SpectralField& w0 = run.samples.front().w;
  const double t0 = v.times.front();
  r.drift.assign(exponents.size(), std::vector<double>(v.values.size(), 0.0));
  r.max_drift.assign(exponents.size(), 0.0);
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    SpectralField d = v.values[k];
    d.axpy(-std::exp(-(v.times[k] - t0)), w0);
    for (std::size_t e = 0; e < exponents.size(); ++e) {
      const double n = basis.sobolev_norm(d, exponents[e]);
      r.drift[e][k] = n;
      r.max_drift[e] = std::max(r.max_drift[e], n);
    }
  }
  for (const auto& s : run.samples) {
    GridField g = basis.to_grid(s.w);
    for (double& x : g.data()) x = system.source().value(x);
    r.max_g_l2 = std::max(r.max_g_l2, basis.quadrature_l2(g));
    r.max_wt_l2 = std::max(r.max_wt_l2, basis.sobolev_norm(s.wt, 0.0));
  }
  const double data = 1.0 + r.max_g_l2 + r.max_wt_l2;
  for (std::size_t e = 0; e < exponents.size(); ++e) {
    r.fitted_constant = std::max(r.fitted_constant, r.max_drift[e] * (2.0 - exponents[e]) / data);
  }

  // least squares of log D against log 1/(2 - s)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t e = 0; e < exponents.size(); ++e) {
    if (!(r.max_drift[e] > 0.0) || !(exponents[e] < 2.0)) continue;
    const double x = -std::log(2.0 - exponents[e]);
    const double y = std::log(r.max_drift[e]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 2) {
    const double n = static_cast<double>(used);
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) r.growth_slope = (n * sxy - sx * sy) / denom;
  }
  return r;
}

DecompositionRun decompose(const Trajectory& run, const GalerkinSystem& system,
                           const DecompositionOptions& options) {
  require_run(run);
  const Basis& basis = system.basis();
  DecompositionRun d;
  d.times = sample_times(run);
  d.phi = solve_phi(run, system);
  d.v = recover_v(d.phi, run.samples.front().w);
  d.damping_part = solve_damping_part(run, system);
  d.u = recover_u(d.damping_part);
  d.initial_data_l2 = basis.sobolev_norm(run.samples.front().w + run.samples.front().wt, 0.0);

  const std::size_t n = d.times.size();
  d.reconstruction.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    SpectralField gap = run.samples[k].w - d.v.values[k];
    gap -= d.u.values[k];
    d.reconstruction[k] =
        basis.sobolev_norm(gap, 0.0) / (1.0 + basis.sobolev_norm(run.samples[k].w, 0.0));
    d.max_reconstruction = std::max(d.max_reconstruction, d.reconstruction[k]);
  }

  const auto lambda = basis.eigenvalues();
  d.residual_u.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = d.times[k] - d.times[k - 1];
    const double h2 = d.times[k + 1] - d.times[k];
    const SpectralField& um = d.u.values[k - 1];
    const SpectralField& u0 = d.u.values[k];
    const SpectralField& up = d.u.values[k + 1];
    SpectralField source = system.lambda1() * run.samples[k].wt;
    source += projected(basis, run.samples[k].wt, system.damping());
    double defect = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double d1 = (-h2 / (h1 * (h1 + h2))) * um[i] + ((h2 - h1) / (h1 * h2)) * u0[i] +
                        (h1 / (h2 * (h1 + h2))) * up[i];
      const double d2 =
          2.0 * (um[i] / (h1 * (h1 + h2)) - u0[i] / (h1 * h2) + up[i] / (h2 * (h1 + h2)));
      const double r = d2 + (lambda[i] + 1.0) * d1 + lambda[i] * u0[i] + source[i];
      defect += r * r;
    }
    d.residual_u[k] = std::sqrt(defect) / (1.0 + basis.sobolev_norm(source, 0.0));
  }

  d.drift = drift_norms(d.v, run, system, options.drift_exponents);
  return d;
}

SmoothingConstant smoothing_constant(const Basis& basis, double s, double t) {
  if (!(s >= 0.0 && s < 2.0)) throw ConfigError("smoothing exponent must lie in [0, 2)");
  if (!(t > 0.0)) throw ConfigError("smoothing time must be positive");
  SmoothingConstant c;
  for (double l : basis.eigenvalues()) {
    c.discrete = std::max(c.discrete, std::pow(l, 0.5 * s) * std::exp(-l * t));
  }
  c.ceiling = s == 0.0 ? 1.0 : std::pow(s / (2.0 * std::numbers::e * t), 0.5 * s);
  return c;
}

double kernel_mass(double t) {
  if (!(t > 0.0)) throw ConfigError("kernel mass needs t > 0");
  const double width = 40.0 * std::sqrt(t);
  const auto gauss = [t](double r) { return std::exp(-r * r / (4.0 * t)) / std::sqrt(4.0 * pi * t); };
  const double line = 2.0 * quad::integrate(gauss, 0.0, width, 1e-15);
  return line * line;
}

KernelPoint free_space_bound(const Basis& basis, const GridSource& source, double t, double x,
                             double y, const KernelOptions& options) {
  KernelPoint p;
  p.t = t;
  p.x = x;
  p.y = y;
  if (source.times.empty() || !(t > source.times.front())) return p;
  const int m = basis.grid_points();
  std::vector<double> ex;
  std::vector<double> ey;

  // S(s) between samples, linear in s
  const auto kernel_at = [&](double s) {
    const double tau = t - s;
    cell_weights(x, basis.hx(), m, tau, ex);
    cell_weights(y, basis.hy(), m, tau, ey);
    if (source.times.size() == 1) return contract(source.values[0], ex, ey);
    const auto it = std::upper_bound(source.times.begin(), source.times.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - source.times.begin());
    hi = std::clamp<std::size_t>(hi, 1, source.times.size() - 1);
    const double a = source.times[hi - 1];
    const double b = source.times[hi];
    const double theta = std::clamp((s - a) / (b - a), 0.0, 1.0);
    const double lo_part = theta < 1.0 ? contract(source.values[hi - 1], ex, ey) : 0.0;
    const double hi_part = theta > 0.0 ? contract(source.values[hi], ex, ey) : 0.0;
    return (1.0 - theta) * lo_part + theta * hi_part;
  };

  // s = t - sigma^2, ds = 2 sigma dsigma; the (t - s)^{-1} factor is absorbed
  // by the normalised cell weights. Panels end at the sample times, where the
  // interpolated source has kinks.
  std::vector<double> breaks{0.0};
  for (auto it = source.times.rbegin(); it != source.times.rend(); ++it) {
    if (*it < t) breaks.push_back(std::sqrt(t - *it));
  }
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
  const auto composite = [&](int split) {
    double total = 0.0;
    for (std::size_t b = 1; b < breaks.size(); ++b) {
      const double width = (breaks[b] - breaks[b - 1]) / split;
      for (int q = 0; q < split; ++q) {
        const double mid = breaks[b - 1] + (q + 0.5) * width;
        double sum = 0.0;
        for (std::size_t g = 0; g < nodes.size(); ++g) {
          const double sigma = mid + 0.5 * width * nodes[g];
          sum += weights[g] * 2.0 * sigma * kernel_at(t - sigma * sigma);
        }
        total += 0.5 * width * sum;
      }
    }
    return total;
  };

  int split = 1;
  double previous = composite(split);
  p.flagged = true;
  for (int level = 1; level <= options.max_levels; ++level) {
    split *= 2;
    const double current = composite(split);
    p.levels = level;
    const double change = std::abs(current - previous);
    previous = current;
    if (change <= options.quad_rel_tol * std::abs(current) + 1e-15) {
      p.flagged = false;
      break;
    }
  }
  p.rhs = previous;
  return p;
}

KernelReport kernel_bound_check(const DecompositionRun& run, const Trajectory& base,
                                const GalerkinSystem& system, const KernelOptions& options) {
  const Basis& basis = system.basis();
  const Basis fine = source_grid(basis, options.refinement);
  const GridSource src = damping_source(base, system, fine);
  const auto pts = sample_points(basis, options.points_per_axis);
  const double t0 = run.times.front();
  const double span = run.times.back() - t0;

  std::vector<std::size_t> indices;
  for (int k = 1; k <= options.time_count; ++k) {
    indices.push_back(nearest_index(run.times, t0 + span * k / options.time_count));
  }

  KernelReport r;
  r.points.resize(indices.size() * pts.size());
  parallel_for(r.points.size(), options.threads, [&](std::size_t q) {
    const std::size_t k = indices[q / pts.size()];
    const auto& xy = pts[q % pts.size()];
    KernelPoint p = free_space_bound(fine, src, run.times[k], xy[0], xy[1], options);
    p.lhs = std::abs(basis.evaluate(run.damping_part.values[k], xy[0], xy[1]));
    p.margin = p.rhs - p.lhs;
    r.points[q] = p;
  });
  r.kernel_mass = kernel_mass(std::max(span, 1e-12));
  summarise(r, options.tolerance);
  return r;
}

KernelReport maximum_principle_check(const Basis& basis, double horizon,
                                     const KernelOptions& options) {
  if (!(horizon > 0.0)) throw ConfigError("maximum principle check needs a positive horizon");
  const Basis fine = source_grid(basis, options.refinement);
  GridSource src;
  const GridField bump = fine.sample([&](double x, double y) { return fine.eigenfunction(1, 1, x, y); });
  src.times = {0.0, horizon};
  src.values = {bump, bump};
  const auto pts = sample_points(basis, options.points_per_axis);
  const double l1 = basis.lambda1();

  KernelReport r;
  r.points.resize(static_cast<std::size_t>(options.time_count) * pts.size());
  parallel_for(r.points.size(), options.threads, [&](std::size_t q) {
    const double t = horizon * static_cast<double>(q / pts.size() + 1) / options.time_count;
    const auto& xy = pts[q % pts.size()];
    KernelPoint p = free_space_bound(fine, src, t, xy[0], xy[1], options);
    // phi_11 is an eigenfunction, so the Dirichlet solution is exact
    p.lhs = -std::expm1(-l1 * t) / l1 * basis.eigenfunction(1, 1, xy[0], xy[1]);
    p.margin = p.rhs - p.lhs;
    r.points[q] = p;
  });
  r.kernel_mass = kernel_mass(horizon);
  summarise(r, 0.0);
  return r;
}

double linf_bound(const Nonlinearity& damping, double lambda1, double epsilon, double alpha,
                  double horizon, double shifted_cum) {
  const double k = kappa_constant(damping, lambda1, epsilon, horizon, alpha);
  return 2.0 * epsilon / ((2.0 - alpha) * (1.0 - alpha)) * std::pow(horizon, 3.0 - alpha) +
         horizon * k / (4.0 * pi) * shifted_cum;
}

LinfReport linf_bound_check(const DecompositionRun& run, const Trajectory& base,
                            const GalerkinSystem& system, double alpha, double epsilon) {
  LinfReport r;
  r.alpha = alpha;
  r.horizon = run.times.back() - run.times.front();
  r.shifted_cum = base.ledger.empty() ? 0.0 : base.ledger.back().shifted_cum;
  const auto bound_at = [&](double eps) {
    return linf_bound(system.damping(), system.lambda1(), eps, alpha, r.horizon, r.shifted_cum);
  };

  if (epsilon > 0.0) {
    r.epsilon = epsilon;
  } else {
    // golden section in log(eps)
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(1e-6);
    double b = std::log(10.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = bound_at(std::exp(c));
    double fd = bound_at(std::exp(d));
    for (int it = 0; it < 80 && b - a > 1e-3; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = bound_at(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = bound_at(std::exp(d));
      }
    }
    r.epsilon = std::exp(0.5 * (a + b));
    if (r.epsilon > 0.99 * 10.0 || r.epsilon < 1.01e-6) r.note = "epsilon search hit the interval end";
  }
  r.kappa = kappa_constant(system.damping(), system.lambda1(), r.epsilon, r.horizon, alpha);
  r.bound = bound_at(r.epsilon);

  const Basis& basis = system.basis();
  r.holds = true;
  r.samples.reserve(run.times.size());
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    LinfSample s;
    s.t = run.times[k];
    s.measured = basis.linf_norm(run.u.values[k]);
    s.holds = s.measured <= r.bound;
    r.holds = r.holds && s.holds;
    r.max_measured = std::max(r.max_measured, s.measured);
    r.samples.push_back(s);
  }
  if (r.note.empty()) {
    r.note = fmt::format("max ||u||_inf = {:.6g}, bound = {:.6g}", r.max_measured, r.bound);
  }
  return r;
}

}  // namespace sdwave
