#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sdwave/dynamics.hpp"

namespace sdwave {

struct ModeCoefficient {
  int j = 1;
  int k = 1;
  double value = 0.0;
};

enum class InitialProfile { coefficients, random };

struct InitialSpec {
  InitialProfile profile = InitialProfile::coefficients;
  std::vector<ModeCoefficient> w0;
  std::vector<ModeCoefficient> w1;
  // random profile: coefficients uniform in [-amplitude, amplitude] damped
  // by (j^2 + k^2)^(-decay/2), one draw per ensemble member
  double amplitude = 0.5;
  double decay = 2.0;
  int members = 1;
};

struct NonlinearitySpec {
  Family family = Family::linear;
  std::vector<double> params;
};

struct Tolerances {
  double balance = 1e-5;         // max |balance residual| / (E(0) + 1)
  double lyapunov_abs = 1e-8;
  double lyapunov_rel = 1e-6;
  double reconstruction = 1e-6;  // ||w - v - u|| / (1 + ||w||)
  double kernel = 1e-3;          // margin >= -kernel * max rhs
  double attractor = 1e-4;
  double newton = 1e-10;
  double fixed_point = 1e-8;
};

struct RunConfig {
  std::string tag = "run";
  std::uint64_t seed = 1;

  Domain domain;
  int modes = 16;
  int grid_factor = 2;  // M = grid_factor * modes
  int linf_factor = 4;

  NonlinearitySpec damping;
  NonlinearitySpec source;
  std::vector<ModeCoefficient> forcing;
  InitialSpec initial;
  IntegratorControls time;
  Tolerances tol;

  // [equilibrium]
  int starts = 5;
  double start_amplitude = 1.0;
  double start_decay = 2.0;

  // [decompose]
  double linf_alpha = 0.5;
  double linf_epsilon = 0.0;  // 0 = search
  std::vector<double> drift_exponents{1.0, 1.5, 1.9, 1.99};

  // [kernel]
  int kernel_times = 5;
  int kernel_points = 3;
  int kernel_refinement = 4;

  // [sweep]
  bool compare_double_horizon = true;
  double sweep_stability = 0.01;  // |c_B(2T) / c_B(T) - 1|

  // [attractor]
  double tail_fraction = 0.2;
};

enum class ParseMode {
  strict,   // admissible parameter ranges enforced
  lenient,  // shapes only, for examining inadmissible nonlinearities
};

/// Parses the sectioned key = value format documented in docs/formats.md.
/// Unknown sections or keys, missing required keys and out-of-range values
/// throw ConfigError naming the key.
RunConfig parse_config(std::string_view text, ParseMode mode = ParseMode::strict);
RunConfig load_config(const std::filesystem::path& path, ParseMode mode = ParseMode::strict);

Basis make_basis(const RunConfig& config);
Nonlinearity make_damping(const RunConfig& config);
Nonlinearity make_source(const RunConfig& config);
GalerkinSystem make_system(const RunConfig& config);

/// Initial states: one for the coefficient profile, `members` seeded draws
/// for the random profile.
std::vector<PhaseState> initial_states(const RunConfig& config, const Basis& basis);

}  // namespace sdwave
