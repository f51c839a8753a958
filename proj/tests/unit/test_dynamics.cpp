#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sdwave/dynamics.hpp"
#include "sdwave/errors.hpp"
#include "support/expm2.hpp"
#include "support/generators.hpp"

using namespace sdwave;
using Catch::Approx;
using std::numbers::pi;

namespace {

GalerkinSystem linear_system(int n = 4, double g_slope = 0.0, SpectralField h = {}) {
  Basis basis(Domain(pi, pi), n, 2 * n);
  if (h.modes() == 0) h = basis.zero_field();
  return GalerkinSystem(basis, Nonlinearity::linear(0.0, Role::damping),
                        Nonlinearity::linear(g_slope, Role::source), h);
}

GalerkinSystem nonlinear_system(int n = 16) {
  Basis basis(Domain(pi, pi), n, 2 * n);
  SpectralField h = basis.zero_field();
  return GalerkinSystem(basis, Nonlinearity::exp_power(0.5), Nonlinearity::exp_source(1.0), h);
}

PhaseState smooth_data(const Basis& basis) {
  PhaseState s{basis.zero_field(), basis.zero_field(), 0.0};
  s.w(1, 1) = 1.0;
  s.w(2, 1) = -0.4;
  s.w(1, 3) = 0.2;
  s.wt(1, 1) = 0.5;
  s.wt(2, 2) = -0.3;
  return s;
}

}  // namespace

TEST_CASE("propagator reproduces e^-t cos t for lambda = 2", "[dynamics]") {
  const auto p = mode_propagator(2.0, 0.1);
  const auto y = p.apply({1.0, -1.0}, 0.0);
  CHECK(y[0] == Approx(0.900316999845194).epsilon(1e-12));
  CHECK(y[1] == Approx(-0.9906500107976182).epsilon(1e-12));
  CHECK(y[0] == Approx(std::exp(-0.1) * std::cos(0.1)).epsilon(1e-13));
}

TEST_CASE("propagator at dt = 0 is the identity", "[dynamics]") {
  for (double lambda : {0.5, 2.0, 4.0, 100.0}) {
    const auto p = mode_propagator(lambda, 0.0);
    CHECK(p.matrix[0] == 1.0);
    CHECK(p.matrix[1] == 0.0);
    CHECK(p.matrix[2] == 0.0);
    CHECK(p.matrix[3] == 1.0);
    CHECK(p.forced[0] == 0.0);
    CHECK(p.forced[1] == 0.0);
  }
  CHECK_THROWS_AS(mode_propagator(0.0, 0.1), ConfigError);
}

TEST_CASE("Liouville identity for the propagator determinant", "[dynamics][property]") {
  const std::vector<double> lambdas{0.5, 2.0, 4.0, 4.0 - 1e-7, 4.0 + 1e-7, 100.0, 1e4};
  for (double lambda : lambdas) {
    for (double dt : {1e-4, 1e-3}) {
      const auto p = mode_propagator(lambda, dt);
      INFO("lambda = " << lambda << " dt = " << dt);
      CHECK(testing::rel_diff(p.determinant(), std::exp(-lambda * dt)) < 1e-12);
    }
    // for lambda dt >> 1 the determinant sits below the rounding level of
    // the O(1) entries, so only an absolute statement is meaningful
    for (double dt : {0.1, 0.5}) {
      const auto p = mode_propagator(lambda, dt);
      const auto& m = p.matrix;
      const double scale = std::abs(m[0] * m[3]) + std::abs(m[1] * m[2]);
      CHECK(std::abs(p.determinant() - std::exp(-lambda * dt)) <= 1e-14 * scale + 1e-300);
    }
  }
}

TEST_CASE("propagator matches a scaling-and-squaring exponential", "[dynamics][property]") {
  testing::Gen gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = std::exp(gen.uniform(std::log(0.1), std::log(1e3)));
    const double dt = gen.uniform(1e-4, 0.3);
    const auto p = mode_propagator(lambda, dt);
    const auto ref = testing::expm({0.0, dt, -lambda * dt, -lambda * dt});
    for (int i = 0; i < 4; ++i) CHECK(p.matrix[i] == Approx(ref[i]).margin(1e-12).epsilon(1e-10));
    // forced vector: A^{-1} (exp(A dt) - I) (0, 1)
    CHECK(p.forced[0] == Approx(-ref[1] - (ref[3] - 1.0) / lambda).margin(1e-13).epsilon(1e-8));
    CHECK(p.forced[1] == Approx(ref[1]).margin(1e-13).epsilon(1e-10));
  }
}

TEST_CASE("propagator is continuous across the double root", "[dynamics]") {
  for (double dt : {1e-3, 0.1, 1.0}) {
    const auto centre = mode_propagator(4.0, dt);
    const auto oracle = testing::expm({0.0, dt, -4.0 * dt, -4.0 * dt});
    for (int i = 0; i < 4; ++i) CHECK(centre.matrix[i] == Approx(oracle[i]).margin(1e-13));
    for (int k = 5; k <= 9; ++k) {
      for (double sign : {-1.0, 1.0}) {
        const auto near = mode_propagator(4.0 + sign * std::pow(10.0, -k), dt);
        for (int i = 0; i < 4; ++i) CHECK(near.matrix[i] == Approx(centre.matrix[i]).margin(1e-6));
        for (int i = 0; i < 2; ++i) CHECK(near.forced[i] == Approx(centre.forced[i]).margin(1e-6));
      }
    }
    const auto below = mode_propagator(4.0 - 1e-7, dt);
    const auto above = mode_propagator(4.0 + 1e-7, dt);
    for (int i = 0; i < 4; ++i) CHECK(below.matrix[i] == Approx(above.matrix[i]).margin(1e-6));
  }
}

TEST_CASE("scheme names round trip", "[dynamics]") {
  CHECK(scheme_from_string(to_string(Scheme::exponential_euler)) == Scheme::exponential_euler);
  CHECK(scheme_from_string("midpoint") == Scheme::exponential_midpoint);
  CHECK_THROWS_AS(scheme_from_string("rk4"), ConfigError);
}

TEST_CASE("linear flight matches the single-mode closed form", "[dynamics]") {
  const auto system = linear_system();
  PhaseState s{system.basis().zero_field(), system.basis().zero_field(), 0.0};
  s.w(1, 1) = 1.0;
  s.wt(1, 1) = -1.0;
  Stepper stepper(system);
  const PhaseState next = stepper.step(s, 0.1);
  CHECK(next.w(1, 1) == Approx(0.900316999845194).epsilon(1e-12));
  CHECK(next.wt(1, 1) == Approx(-0.9906500107976182).epsilon(1e-12));
  CHECK(next.t == Approx(0.1));
}

TEST_CASE("equilibria are fixed points of the step", "[dynamics]") {
  // g(s) = s, h = phi11 on (0,pi)^2: w* = phi11 / 3
  Basis basis(Domain(pi, pi), 4, 8);
  SpectralField h = basis.zero_field();
  h(1, 1) = 1.0;
  const auto system = linear_system(4, 1.0, h);
  PhaseState s{basis.zero_field(), basis.zero_field(), 0.0};
  s.w(1, 1) = 1.0 / 3.0;
  for (Scheme scheme : {Scheme::exponential_midpoint, Scheme::exponential_euler}) {
    Stepper stepper(system, scheme);
    PhaseState x = s;
    for (int i = 0; i < 100; ++i) x = stepper.step(x, 0.05);
    CHECK(basis.sobolev_norm(x.w - s.w, 1.0) < 1e-8);
    CHECK(basis.sobolev_norm(x.wt, 0.0) < 1e-8);
  }
}

TEST_CASE("midpoint scheme converges at second order", "[dynamics]") {
  const auto system = nonlinear_system(8);
  const PhaseState start = smooth_data(system.basis());
  const double horizon = 0.5;
  const auto terminal = [&](double dt, Scheme scheme) {
    IntegratorControls c;
    c.dt = dt;
    c.horizon = horizon;
    c.output_stride = 1 << 20;
    c.scheme = scheme;
    const Trajectory tr = simulate(system, start, c);
    REQUIRE(tr.status == RunStatus::completed);
    return tr.samples.back();
  };
  const auto distance = [&](const PhaseState& a, const PhaseState& b) {
    return system.basis().sobolev_norm(a.w - b.w, 1.0) + system.basis().sobolev_norm(a.wt - b.wt, 0.0);
  };
  const PhaseState ref = terminal(0.01 / 4.0, Scheme::exponential_midpoint);
  const double e1 = distance(terminal(0.02, Scheme::exponential_midpoint), ref);
  const double e2 = distance(terminal(0.01, Scheme::exponential_midpoint), ref);
  CHECK(std::log2(e1 / e2) == Approx(2.0).margin(0.35));

  const PhaseState ref_euler = terminal(0.01 / 4.0, Scheme::exponential_euler);
  const double f1 = distance(terminal(0.02, Scheme::exponential_euler), ref_euler);
  const double f2 = distance(terminal(0.01, Scheme::exponential_euler), ref_euler);
  CHECK(std::log2(f1 / f2) == Approx(1.0).margin(0.35));
}

TEST_CASE("zero data stays zero", "[dynamics]") {
  const auto system = nonlinear_system(8);
  PhaseState zero{system.basis().zero_field(), system.basis().zero_field(), 0.0};
  IntegratorControls c;
  c.dt = 0.01;
  c.horizon = 1.0;
  c.output_stride = 10;
  const Trajectory tr = simulate(system, zero, c);
  CHECK(tr.status == RunStatus::completed);
  CHECK(tr.samples.size() == 11);
  for (const auto& e : tr.ledger) {
    CHECK(e.kinetic == 0.0);
    CHECK(e.potential == 0.0);
    CHECK(e.lyapunov == 0.0);
    CHECK(e.visc_cum == 0.0);
    CHECK(e.balance_residual == 0.0);
  }
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
}

TEST_CASE("restarting reproduces the flow", "[dynamics]") {
  const auto system = nonlinear_system(8);
  const PhaseState start = smooth_data(system.basis());
  IntegratorControls c;
  c.dt = 1e-2;
  c.horizon = 2.0;
  c.output_stride = 100;
  const Trajectory straight = simulate(system, start, c);
  c.horizon = 1.0;
  const Trajectory first = simulate(system, start, c);
  const Trajectory second = simulate(system, first.samples.back(), c);
  REQUIRE(straight.samples.size() == 3);
  const double d = system.basis().sobolev_norm(second.samples.back().w - straight.samples.back().w, 1.0);
  CHECK(d < 1e-8);
  CHECK(second.samples.back().t == Approx(2.0));
}

TEST_CASE("identical runs are bit identical", "[dynamics]") {
  const auto system = nonlinear_system(8);
  const PhaseState start = smooth_data(system.basis());
  IntegratorControls c;
  c.dt = 1e-2;
  c.horizon = 0.5;
  const Trajectory a = simulate(system, start, c);
  const Trajectory b = simulate(system, start, c);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    for (std::size_t m = 0; m < a.samples[i].w.size(); ++m) {
      CHECK(a.samples[i].w[m] == b.samples[i].w[m]);
      CHECK(a.samples[i].wt[m] == b.samples[i].wt[m]);
    }
    CHECK(a.ledger[i].lyapunov == b.ledger[i].lyapunov);
  }
}

TEST_CASE("single-mode decay follows the slow characteristic root", "[dynamics]") {
  // unit square, lambda = 2 pi^2 > 4: real roots, slow root
  // r = -lambda/2 + sqrt(lambda^2/4 - lambda)
  Basis basis(Domain(1.0, 1.0), 2, 4);
  GalerkinSystem system(basis, Nonlinearity::linear(0.0, Role::damping),
                        Nonlinearity::linear(0.0, Role::source), basis.zero_field());
  PhaseState s{basis.zero_field(), basis.zero_field(), 0.0};
  s.w(1, 1) = 1.0;
  IntegratorControls c;
  c.dt = 1e-2;
  c.horizon = 6.0;
  c.output_stride = 100;
  const Trajectory tr = simulate(system, s, c);
  const double lambda = 2.0 * pi * pi;
  const double slow = -lambda / 2.0 + std::sqrt(lambda * lambda / 4.0 - lambda);
  CHECK(slow == Approx(-1.0565526).epsilon(1e-6));
  const double slope = std::log(std::abs(tr.samples[6].w(1, 1)) / std::abs(tr.samples[2].w(1, 1))) / 4.0;
  CHECK(slope == Approx(slow).epsilon(0.01));
}

TEST_CASE("saturation halts the run with a diagnostic", "[dynamics]") {
  Basis basis(Domain(pi, pi), 4, 8);
  GalerkinSystem system(basis, Nonlinearity::exp_power(0.5), Nonlinearity::exp_source(1.9),
                        basis.zero_field());
  PhaseState s{basis.zero_field(), basis.zero_field(), 0.0};
  s.w(1, 1) = -400.0;
  IntegratorControls c;
  c.dt = 0.1;
  c.horizon = 1.0;
  const Trajectory tr = simulate(system, s, c);
  CHECK(tr.status == RunStatus::saturated);
  CHECK_FALSE(tr.diagnostic.empty());
  CHECK(tr.samples.size() >= 1);
}

TEST_CASE("adaptive step control keeps the balance defect small", "[dynamics]") {
  const auto system = nonlinear_system(8);
  const PhaseState start = smooth_data(system.basis());
  IntegratorControls c;
  c.adaptive = true;
  c.dt = 0.05;
  c.horizon = 1.0;
  c.balance_tol = 1e-5;
  c.output_interval = 0.25;
  const Trajectory tr = simulate(system, start, c);
  REQUIRE(tr.status == RunStatus::completed);
  REQUIRE(tr.samples.size() == 5);
  CHECK(tr.samples.back().t == Approx(1.0));
  CHECK(std::abs(tr.ledger.back().balance_residual) < 1e-5);
  CHECK_THROWS_AS(simulate(system, start, IntegratorControls{.dt = -1.0}), ConfigError);
}
