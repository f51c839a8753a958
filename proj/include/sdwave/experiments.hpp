#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sdwave/config.hpp"

namespace sdwave {

enum class Subcommand {
  simulate,
  check_hypotheses,
  decompose,
  kernel_check,
  equilibrium,
  sweep,
  attractor,
};

std::string_view to_string(Subcommand command);
/// Throws ConfigError for unknown names.
Subcommand subcommand_from_string(std::string_view name);

/// check-hypotheses reads configs leniently so inadmissible nonlinearities
/// reach the checker; every other subcommand is strict.
ParseMode parse_mode_for(Subcommand command);

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int usage = 1;
inline constexpr int fail = 2;
inline constexpr int inconclusive = 3;
}  // namespace exit_code

enum class Outcome { pass, fail, inconclusive, info };
std::string_view to_string(Outcome outcome);

struct VerdictLine {
  std::string name;
  Outcome outcome = Outcome::info;
  std::string detail;
};

struct ExperimentOptions {
  unsigned threads = 1;
  bool skip_hypothesis_check = false;
};

struct ExperimentResult {
  int exit_code = exit_code::pass;
  std::vector<VerdictLine> verdicts;
  std::vector<std::string> artifacts;  // file names written under the output dir
};

/// Runs one subcommand, writing its CSV artifacts and report.txt into
/// `out_dir` (created if missing). Any inconclusive verdict gives exit 3,
/// otherwise any failure gives 2. Throws ConfigError for configurations that
/// are valid text but unusable for the subcommand.
ExperimentResult run_experiment(Subcommand command, const RunConfig& config,
                                const std::filesystem::path& out_dir,
                                const ExperimentOptions& options = {});

/// CSV headers, pinned by the golden tests.
namespace schema {
inline constexpr std::array<std::string_view, 14> ledger{
    "t",           "kinetic",     "potential",    "source_potential", "forcing",
    "lyapunov",    "visc_cum",    "damping_cum",  "shifted_cum",      "balance_residual",
    "l2_w",        "h1_w",        "l2_wt",        "linf_w"};
inline constexpr std::array<std::string_view, 4> hypotheses{"condition", "verdict", "estimate",
                                                            "detail"};
inline constexpr std::array<std::string_view, 8> decomposition{
    "t", "reconstruction", "residual_u", "l2_w", "l2_phi", "l2_v", "l2_u", "linf_u"};
inline constexpr std::array<std::string_view, 3> drift{"s", "t", "drift"};
inline constexpr std::array<std::string_view, 4> smoothing{"s", "t", "discrete", "ceiling"};
inline constexpr std::array<std::string_view, 4> linf{"t", "measured", "bound", "holds"};
inline constexpr std::array<std::string_view, 9> kernel{
    "check", "t", "x", "y", "lhs", "rhs", "margin", "levels", "flagged"};
inline constexpr std::array<std::string_view, 9> equilibrium{
    "index",  "residual", "newton_iters", "inner_iters",      "lyapunov",
    "l2_norm", "h1_norm", "linf_norm",    "fixed_point_drift"};
inline constexpr std::array<std::string_view, 4> equilibrium_modes{"index", "j", "k", "value"};
inline constexpr std::array<std::string_view, 6> sweep_members{
    "horizon", "member", "status", "sup_h1_w", "sup_l2_wt", "sup_linf_w"};
inline constexpr std::array<std::string_view, 4> sweep_linf{"horizon", "member", "n", "linf_w"};
inline constexpr std::array<std::string_view, 4> attractor{"t", "distance", "l2_wt", "nearest"};
}  // namespace schema

}  // namespace sdwave
