#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sdwave/decomposition.hpp"
#include "sdwave/errors.hpp"
#include "support/generators.hpp"

using namespace sdwave;
using Catch::Approx;
using std::numbers::pi;

namespace {

Basis square(int n) { return Basis(Domain(pi, pi), n, 2 * n); }

GalerkinSystem make(const Basis& b, Nonlinearity f, Nonlinearity g, SpectralField h = {}) {
  if (h.modes() == 0) h = b.zero_field();
  return GalerkinSystem(b, std::move(f), std::move(g), std::move(h));
}

Trajectory run(const GalerkinSystem& system, const PhaseState& start, double dt, double horizon,
               int stride = 1) {
  IntegratorControls c;
  c.dt = dt;
  c.horizon = horizon;
  c.output_stride = stride;
  return simulate(system, start, c);
}

PhaseState fixture_state(const Basis& b) {
  PhaseState s{b.zero_field(), b.zero_field(), 0.0};
  s.w(1, 1) = 1.0;
  s.w(2, 1) = -0.5;
  s.w(1, 2) = 0.3;
  s.wt(1, 1) = 1.0;
  s.wt(3, 3) = 0.5;
  return s;
}

}  // namespace

TEST_CASE("piecewise-linear relaxation is exact on linear forcing", "[decomposition]") {
  // y' + 3 y = 1 + 2 t, y(0) = 0.5
  const auto exact = [](double t) {
    return (1.0 / 3.0 - 2.0 / 9.0) + (2.0 / 3.0) * t + (0.5 - 1.0 / 9.0) * std::exp(-3.0 * t);
  };
  std::vector<double> times;
  std::vector<SpectralField> forcing;
  for (int k = 0; k <= 7; ++k) {
    const double t = 0.37 * k * k / 7.0;  // uneven spacing
    times.push_back(t);
    SpectralField r(1);
    r[0] = 1.0 + 2.0 * t;
    forcing.push_back(r);
  }
  SpectralField y0(1);
  y0[0] = 0.5;
  const std::vector<double> rates{3.0};
  const auto out = relax_piecewise_linear(rates, times, forcing, y0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(out.values[k][0] == Approx(exact(times[k])).epsilon(1e-13));
  }
}

TEST_CASE("phi from a constant forcing", "[decomposition]") {
  // w = 0, h = phi_11, lambda = 2: phi_11(t) = (1 - e^{-2t}) / 2
  const Basis b = square(4);
  SpectralField h = b.zero_field();
  h(1, 1) = 1.0;
  const auto system = make(b, Nonlinearity::linear(0.0, Role::damping),
                           Nonlinearity::linear(0.0, Role::source), h);
  Trajectory tr;
  for (int k = 0; k <= 20; ++k) tr.samples.push_back({b.zero_field(), b.zero_field(), 0.1 * k});
  const auto phi = solve_phi(tr, system);
  for (std::size_t k = 0; k < phi.times.size(); ++k) {
    const double t = phi.times[k];
    CHECK(phi.values[k](1, 1) == Approx(0.5 * (1.0 - std::exp(-2.0 * t))).epsilon(1e-13));
    CHECK(phi.values[k](2, 1) == 0.0);
  }
}

TEST_CASE("phi decays like the heat semigroup without forcing", "[decomposition]") {
  const Basis b = square(4);
  const auto system = make(b, Nonlinearity::linear(0.0, Role::damping),
                           Nonlinearity::linear(0.0, Role::source));
  Trajectory tr;
  // w = 0 except w_t at t = 0, so phi(0) = phi_11 and the forcing is a
  // ramp of (1 + lambda1) w_t down to zero over the first interval
  PhaseState first{b.zero_field(), b.zero_field(), 0.0};
  first.w(1, 1) = 1.0;
  tr.samples.push_back(first);
  for (int k = 1; k <= 10; ++k) tr.samples.push_back({b.zero_field(), b.zero_field(), 0.2 * k});
  const auto phi = solve_phi(tr, system);
  for (std::size_t k = 0; k < phi.times.size(); ++k) {
    CHECK(phi.values[k](1, 1) == Approx(std::exp(-2.0 * phi.times[k])).epsilon(1e-13));
  }
}

TEST_CASE("v from a constant phi", "[decomposition]") {
  SampledSeries phi;
  SpectralField bar(2);
  bar[0] = 0.7;
  bar[3] = -1.2;
  for (int k = 0; k <= 10; ++k) {
    phi.times.push_back(0.3 * k);
    phi.values.push_back(bar);
  }
  SpectralField w0(2);
  w0[0] = 2.0;
  w0[1] = 1.0;
  const auto v = recover_v(phi, w0);
  for (std::size_t k = 0; k < v.times.size(); ++k) {
    const double decay = std::exp(-v.times[k]);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(v.values[k][i] == Approx(bar[i] + decay * (w0[i] - bar[i])).margin(1e-14));
    }
  }

  SampledSeries none = phi;
  for (auto& f : none.values) f = SpectralField(2);
  const auto free = recover_v(none, w0);
  for (std::size_t k = 0; k < free.times.size(); ++k) {
    SpectralField d = free.values[k];
    d.axpy(-std::exp(-free.times[k]), w0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(d[i]) < 1e-15);
  }
}

TEST_CASE("w = v + u on a nonlinear run", "[decomposition]") {
  const Basis b = square(16);
  const auto system = make(b, Nonlinearity::exp_power(0.5), Nonlinearity::exp_source(1.0));
  const Trajectory tr = run(system, fixture_state(b), 1e-3, 1.0);
  REQUIRE(tr.status == RunStatus::completed);
  const DecompositionRun d = decompose(tr, system);
  INFO("max reconstruction " << d.max_reconstruction);
  CHECK(d.max_reconstruction < 1e-6);
  CHECK(d.reconstruction.front() == 0.0);

  double worst = 0.0;
  for (double r : d.residual_u) worst = std::max(worst, r);
  INFO("u residual " << worst);
  CHECK(worst < 1e-3);

  // reconstruction error of the piecewise-linear quadrature is second order
  // in the sample spacing
  const DecompositionRun coarse = decompose(run(system, fixture_state(b), 1e-3, 1.0, 4), system);
  const DecompositionRun mid = decompose(run(system, fixture_state(b), 1e-3, 1.0, 2), system);
  CHECK(std::log2(coarse.max_reconstruction / mid.max_reconstruction) == Approx(2.0).margin(0.3));
}

TEST_CASE("smoothing constant of the truncated heat semigroup", "[decomposition]") {
  const Basis b = square(16);
  for (double t : {0.01, 0.1, 1.0}) {
    const auto c = smoothing_constant(b, 0.0, t);
    CHECK(c.discrete == Approx(std::exp(-2.0 * t)));
    CHECK(c.ceiling == 1.0);
  }
  // (1/(2e))^{1/2}
  CHECK(smoothing_constant(b, 1.0, 1.0).ceiling == Approx(0.4288819424803534).epsilon(1e-14));

  testing::Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    const double s = gen.uniform(0.0, 1.999);
    const double t = std::exp(gen.uniform(std::log(1e-4), std::log(10.0)));
    const auto c = smoothing_constant(b, s, t);
    CHECK(c.discrete <= c.ceiling * (1.0 + 1e-14));
    CHECK(c.discrete * std::pow(t, 0.5 * s) <= std::pow(s / (2.0 * std::numbers::e), 0.5 * s) + 1e-14);
  }
  CHECK_THROWS_AS(smoothing_constant(b, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(smoothing_constant(b, 1.0, 0.0), ConfigError);
}

TEST_CASE("heat kernel mass", "[decomposition]") {
  for (double t : {1e-4, 0.1, 1.0, 10.0}) CHECK(std::abs(kernel_mass(t) - 1.0) < 1e-8);
}

TEST_CASE("zero source gives zero on both sides", "[decomposition]") {
  const Basis b = square(8);
  GridSource src;
  src.times = {0.0, 1.0};
  src.values = {b.zero_grid(), b.zero_grid()};
  const auto p = free_space_bound(b, src, 1.0, 1.0, 1.0);
  CHECK(p.rhs == 0.0);
  CHECK_FALSE(p.flagged);
}

TEST_CASE("constant interior source reproduces t away from the boundary", "[decomposition]") {
  // S = 1 on every cell: the free-space convolution at the centre is
  // int_0^t (mass of the Gaussian inside the cell block) ds, close to t for
  // short times
  const Basis b = square(16);
  GridSource src;
  GridField one = b.zero_grid();
  for (double& v : one.data()) v = 1.0;
  src.times = {0.0, 0.05};
  src.values = {one, one};
  const auto p = free_space_bound(b, src, 0.05, pi / 2, pi / 2);
  CHECK(p.rhs == Approx(0.05).epsilon(1e-6));
}

TEST_CASE("Dirichlet solution is dominated by the free-space convolution", "[decomposition]") {
  const Basis b = square(12);
  const KernelReport r = maximum_principle_check(b, 1.0);
  CHECK(r.points.size() == 45);
  CHECK(r.flagged == 0);
  for (const auto& p : r.points) {
    INFO("t = " << p.t << " x = " << p.x << " y = " << p.y);
    CHECK(p.lhs > 0.0);
    CHECK(p.margin >= 0.0);
  }
  CHECK(r.holds);
}

TEST_CASE("kernel bound on a nonlinear run", "[decomposition]") {
  const Basis b = square(12);
  const auto system = make(b, Nonlinearity::exp_power(0.5), Nonlinearity::exp_source(1.0));
  const Trajectory tr = run(system, fixture_state(b), 2e-3, 0.5, 5);
  REQUIRE(tr.status == RunStatus::completed);
  const DecompositionRun d = decompose(tr, system);
  KernelOptions opt;
  opt.threads = 2;
  const KernelReport r = kernel_bound_check(d, tr, system, opt);
  CHECK(r.points.size() == 45);
  CHECK(r.max_rhs > 0.0);
  CHECK(r.holds);

  // thread count does not change the result
  opt.threads = 1;
  const KernelReport serial = kernel_bound_check(d, tr, system, opt);
  for (std::size_t i = 0; i < r.points.size(); ++i) CHECK(serial.points[i].rhs == r.points[i].rhs);
}

TEST_CASE("L-infinity bound", "[decomposition]") {
  const Basis b = square(12);
  const auto f = Nonlinearity::exp_power(0.5);

  // nonincreasing in eps through kappa, increasing through the first term
  std::vector<double> values;
  for (double eps : {1e-3, 1e-2, 0.1, 1.0, 10.0}) values.push_back(linf_bound(f, 2.0, eps, 0.5, 1.0, 3.0));
  const double first = 2.0 / (1.5 * 0.5);
  CHECK(values.back() > first * 10.0);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    CHECK(values[i] - first * std::pow(10.0, static_cast<double>(i) - 3.0) >=
          values[i + 1] - first * std::pow(10.0, static_cast<double>(i) - 2.0) - 1e-12);
  }

  const auto system = make(b, f, Nonlinearity::exp_source(1.0));
  const Trajectory tr = run(system, fixture_state(b), 2e-3, 1.0, 5);
  const DecompositionRun d = decompose(tr, system);
  const LinfReport r = linf_bound_check(d, tr, system);
  CHECK(r.shifted_cum > 0.0);
  CHECK(r.epsilon > 1e-6);
  CHECK(r.epsilon < 10.0);
  CHECK(std::isfinite(r.kappa));
  CHECK(r.holds);
  CHECK(r.max_measured > 0.0);
  // the searched eps is a local minimum of the bound
  CHECK(r.bound <= linf_bound(f, 2.0, 0.9 * r.epsilon, 0.5, r.horizon, r.shifted_cum) + 1e-12);
  CHECK(r.bound <= linf_bound(f, 2.0, 1.1 * r.epsilon, 0.5, r.horizon, r.shifted_cum) + 1e-12);

  // zero run: u = 0 and the bound is nonnegative
  const Trajectory rest = run(system, {b.zero_field(), b.zero_field(), 0.0}, 1e-2, 1.0, 10);
  const LinfReport z = linf_bound_check(decompose(rest, system), rest, system, 0.5, 1.0);
  CHECK(z.max_measured == 0.0);
  CHECK(z.bound >= 0.0);
  CHECK(z.holds);
}

TEST_CASE("drift norms of v", "[decomposition]") {
  const Basis b = square(16);
  const auto system = make(b, Nonlinearity::exp_power(0.5), Nonlinearity::exp_source(1.0));
  const Trajectory tr = run(system, fixture_state(b), 2e-3, 1.0, 5);
  const DecompositionRun d = decompose(tr, system);
  const auto& r = d.drift;
  REQUIRE(r.max_drift.size() == 4);
  CHECK(r.drift[0][0] == 0.0);
  for (std::size_t e = 1; e < r.max_drift.size(); ++e) CHECK(r.max_drift[e] >= r.max_drift[e - 1] * 0.999);
  CHECK(r.fitted_constant > 0.0);
  CHECK(r.max_wt_l2 > 0.0);
  CHECK(std::isfinite(r.growth_slope));
}
