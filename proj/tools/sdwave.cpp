#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sdwave/config.hpp"
#include "sdwave/errors.hpp"
#include "sdwave/experiments.hpp"

namespace {

struct Arguments {
  std::string config;
  std::string out;
  unsigned threads = 1;
  bool skip_hypothesis_check = false;
};

constexpr sdwave::Subcommand kCommands[] = {
    sdwave::Subcommand::simulate,    sdwave::Subcommand::check_hypotheses,
    sdwave::Subcommand::decompose,   sdwave::Subcommand::kernel_check,
    sdwave::Subcommand::equilibrium, sdwave::Subcommand::sweep,
    sdwave::Subcommand::attractor,
};

std::string_view summary(sdwave::Subcommand c) {
  using sdwave::Subcommand;
  switch (c) {
    case Subcommand::simulate: return "integrate and write the energy ledger";
    case Subcommand::check_hypotheses: return "check the damping and source hypotheses";
    case Subcommand::decompose: return "split w = v + u and check the bounds on each part";
    case Subcommand::kernel_check: return "heat-kernel domination and maximum principle";
    case Subcommand::equilibrium: return "find stationary solutions by multistart Newton";
    case Subcommand::sweep: return "dissipativity sweep over an ensemble of initial data";
    case Subcommand::attractor: return "distance of a trajectory to the equilibrium set";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments for a strongly damped wave equation", "sdwave"};
  app.require_subcommand(1);

  Arguments args;
  for (auto command : kCommands) {
    auto* sub = app.add_subcommand(std::string(sdwave::to_string(command)),
                                   std::string(summary(command)));
    sub->add_option("--config", args.config, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->required();
    sub->add_option("--threads", args.threads, "worker threads (0 = hardware concurrency)")
        ->envname("SDWAVE_THREADS");
    sub->add_flag("--skip-hypothesis-check", args.skip_hypothesis_check,
                  "run even if the hypothesis check fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sdwave::exit_code::usage;
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    const auto command = sdwave::subcommand_from_string(chosen->get_name());
    const auto config = sdwave::load_config(args.config, sdwave::parse_mode_for(command));
    sdwave::ExperimentOptions options;
    options.threads = args.threads;
    options.skip_hypothesis_check = args.skip_hypothesis_check;
    const auto result = sdwave::run_experiment(command, config, args.out, options);
    for (const auto& v : result.verdicts) {
      std::cout << fmt::format("{:<12} {}\n", sdwave::to_string(v.outcome), v.name);
    }
    std::cout << fmt::format("report: {}/report.txt\n", args.out);
    return result.exit_code;
  } catch (const sdwave::ConfigError& e) {
    std::cerr << "sdwave: configuration error: " << e.what() << "\n";
    return sdwave::exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "sdwave: error: " << e.what() << "\n";
    return sdwave::exit_code::usage;
  }
}
