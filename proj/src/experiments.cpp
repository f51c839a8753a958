#include "sdwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>

#include "sdwave/csv.hpp"
#include "sdwave/decomposition.hpp"
#include "sdwave/errors.hpp"
#include "sdwave/longtime.hpp"
#include "sdwave/random.hpp"

namespace sdwave {

namespace fs = std::filesystem;

std::string_view to_string(Subcommand command) {
  switch (command) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::check_hypotheses: return "check-hypotheses";
    case Subcommand::decompose: return "decompose";
    case Subcommand::kernel_check: return "kernel-check";
    case Subcommand::equilibrium: return "equilibrium";
    case Subcommand::sweep: return "sweep";
    case Subcommand::attractor: return "attractor";
  }
  return "unknown";
}

Subcommand subcommand_from_string(std::string_view name) {
  for (auto c : {Subcommand::simulate, Subcommand::check_hypotheses, Subcommand::decompose,
                 Subcommand::kernel_check, Subcommand::equilibrium, Subcommand::sweep,
                 Subcommand::attractor}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError(fmt::format("unknown subcommand \"{}\"", name));
}

ParseMode parse_mode_for(Subcommand command) {
  return command == Subcommand::check_hypotheses ? ParseMode::lenient : ParseMode::strict;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::pass: return "PASS";
    case Outcome::fail: return "FAIL";
    case Outcome::inconclusive: return "INCONCLUSIVE";
    case Outcome::info: return "INFO";
  }
  return "?";
}

namespace {

std::string num(double v) { return format_double(v); }

Outcome pass_if(bool ok) { return ok ? Outcome::pass : Outcome::fail; }

class Context {
 public:
  Context(Subcommand command, const RunConfig& config, fs::path out,
          const ExperimentOptions& options)
      : command(command),
        config(config),
        options(options),
        system(make_system(config)),
        out_(std::move(out)) {}

  const Subcommand command;
  const RunConfig& config;
  const ExperimentOptions& options;
  const GalerkinSystem system;

  const Basis& basis() const { return system.basis(); }

  CsvWriter csv(std::string_view name, std::span<const std::string_view> header) {
    result_.artifacts.emplace_back(name);
    return CsvWriter(out_ / name, header);
  }

  void verdict(std::string name, Outcome outcome, std::string detail) {
    result_.verdicts.push_back({std::move(name), outcome, std::move(detail)});
  }
  void measure(std::string_view name, std::string value) {
    measurements_.push_back(fmt::format("{}: {}", name, value));
  }
  void measure(std::string_view name, double value) { measure(name, num(value)); }
  void note(std::string text) { notes_.push_back(std::move(text)); }

  bool any(Outcome o) const {
    return std::ranges::any_of(result_.verdicts, [&](const auto& v) { return v.outcome == o; });
  }

  ExperimentResult finish() {
    if (any(Outcome::inconclusive)) {
      result_.exit_code = exit_code::inconclusive;
    } else if (any(Outcome::fail)) {
      result_.exit_code = exit_code::fail;
    } else {
      result_.exit_code = exit_code::pass;
    }
    write_report();
    return result_;
  }

 private:
  void write_report() {
    std::ofstream out(out_ / "report.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write {}", (out_ / "report.txt").string()));
    const auto& c = config;
    const auto& ctl = c.time;
    out << "sdwave " << to_string(command) << "\n";
    out << "tag: " << c.tag << "\n";
    out << "seed: " << c.seed << "\n";
    out << "rng: " << Rng::algorithm << "\n";
    out << "domain: (0, " << num(c.domain.lx) << ") x (0, " << num(c.domain.ly) << ")\n";
    out << "modes: " << c.modes << ", grid points: " << basis().grid_points()
        << ", linf factor: " << c.linf_factor << "\n";
    out << "lambda1: " << num(system.lambda1()) << "\n";
    out << "damping: " << system.damping().describe() << "\n";
    out << "source: " << system.source().describe() << "\n";
    out << "time: dt " << num(ctl.dt) << ", horizon " << num(ctl.horizon) << ", stride "
        << ctl.output_stride << ", scheme " << to_string(ctl.scheme)
        << (ctl.adaptive ? ", adaptive" : "") << "\n";
    out << "threads: " << options.threads << "\n";
    if (options.skip_hypothesis_check && command != Subcommand::check_hypotheses) {
      out << "hypothesis check: skipped\n";
    }

    if (!measurements_.empty()) {
      out << "\nmeasurements\n";
      for (const auto& m : measurements_) out << "  " << m << "\n";
    }
    if (!notes_.empty()) {
      out << "\nnotes\n";
      for (const auto& n : notes_) out << "  " << n << "\n";
    }
    out << "\nverdicts\n";
    for (const auto& v : result_.verdicts) {
      out << "  " << to_string(v.outcome) << " " << v.name;
      if (!v.detail.empty()) out << ": " << v.detail;
      out << "\n";
    }
    out << "\nartifacts:";
    for (const auto& a : result_.artifacts) out << " " << a;
    out << "\nexit: " << result_.exit_code << "\n";
  }

  fs::path out_;
  ExperimentResult result_;
  std::vector<std::string> measurements_;
  std::vector<std::string> notes_;
};

// ---------------------------------------------------------------- hypotheses

bool hypotheses(Context& ctx) {
  const auto r = check_hypotheses(ctx.system.damping(), ctx.system.source(), ctx.system.lambda1());
  auto csv = ctx.csv("hypotheses.csv", schema::hypotheses);
  const auto row = [&](std::string_view name, Verdict v, CsvWriter::Cell estimate,
                       const std::string& detail) {
    csv.row({name, to_string(v), estimate, std::string_view(detail)});
    ctx.verdict(fmt::format("hypothesis {}", name), pass_if(v == Verdict::pass), detail);
  };
  row("damping_monotone", r.damping_monotone, r.inf_fprime_estimate,
      fmt::format("inf f' ~ {:.6g} against -lambda1 = {:.6g}", r.inf_fprime_estimate,
                  -r.lambda1));
  row("source_growth", r.source_growth, r.gamma_estimate,
      fmt::format("gamma ~ {:.6g}, c ~ {:.6g}, liminf g(s)/s ~ {:.6g}", r.gamma_estimate,
                  r.growth_constant, r.liminf_ratio));
  row("damping_integrability", r.damping_integral_verdict, r.damping_integral,
      std::isfinite(r.damping_integral)
          ? fmt::format("int |f'| / (s f1(s) + 1) ds ~ {:.6g}", r.damping_integral)
          : std::string("int |f'| / (s f1(s) + 1) ds diverges"));
  row("damping_symmetry", r.damping_symmetry, r.symmetry_constant,
      fmt::format("|f(-s)| <= c (1 + |f(s)|) with c ~ {:.6g}", r.symmetry_constant));
  row("damping_c1", r.f_c1, std::string_view{}, "f' against centred differences of f");
  row("source_c1", r.g_c1, std::string_view{}, "g' against centred differences of g");
  for (const auto& n : r.notes) ctx.note(n);
  return r.all_pass();
}

// ------------------------------------------------------------------ simulate

void write_ledger(Context& ctx, std::string_view name, std::span<const EnergyLedger> ledger) {
  auto csv = ctx.csv(name, schema::ledger);
  for (const auto& e : ledger) {
    csv.row({e.t, e.kinetic, e.potential, e.source_potential, e.forcing, e.lyapunov, e.visc_cum,
             e.damping_cum, e.shifted_cum, e.balance_residual, e.l2_w, e.h1_w, e.l2_wt,
             e.linf_w});
  }
}

// Status verdict; false when the run broke down.
bool run_status(Context& ctx, const Trajectory& run, std::string_view what) {
  if (run.status == RunStatus::completed) {
    ctx.verdict(fmt::format("{} run", what), Outcome::pass,
                fmt::format("completed in {} steps", run.steps));
    return true;
  }
  ctx.verdict(fmt::format("{} run", what), Outcome::inconclusive,
              fmt::format("{}: {}", to_string(run.status), run.diagnostic));
  return false;
}

Trajectory base_run(Context& ctx) {
  const auto states = initial_states(ctx.config, ctx.basis());
  if (states.size() > 1) ctx.note("random profile: member 0 of the ensemble is simulated");
  return simulate(ctx.system, states.front(), ctx.config.time);
}

void simulate_cmd(Context& ctx) {
  const auto run = base_run(ctx);
  write_ledger(ctx, "ledger.csv", run.ledger);
  ctx.measure("samples", std::to_string(run.ledger.size()));
  ctx.measure("rejected steps", std::to_string(run.rejected));
  const bool completed = run_status(ctx, run, "simulation");

  double worst = 0.0;
  for (const auto& p : balance_residual(run.ledger)) worst = std::max(worst, std::abs(p.relative));
  ctx.measure("max relative balance residual", worst);
  const auto ly = lyapunov_series(run.ledger, {ctx.config.tol.lyapunov_abs,
                                               ctx.config.tol.lyapunov_rel});
  ctx.measure("lyapunov identity defect", ly.identity_defect);
  ctx.measure("shifted damping identity defect",
              shifted_damping_identity_defect(run.ledger, ctx.system.lambda1()));
  if (!completed) return;

  ctx.verdict("energy balance", pass_if(worst <= ctx.config.tol.balance),
              fmt::format("max |residual| / (E(0) + 1) = {:.3e}, tol {:.3e}", worst,
                          ctx.config.tol.balance));
  ctx.verdict("lyapunov monotone", pass_if(ly.monotone),
              ly.monotone ? std::string("nonincreasing within slack")
                          : fmt::format("{} increases, worst {:.3e}", ly.violations,
                                        ly.worst_increase));
}

// ----------------------------------------------------------------- decompose

std::optional<DecompositionRun> decomposition(Context& ctx, Trajectory& run) {
  run = base_run(ctx);
  if (!run_status(ctx, run, "simulation")) return std::nullopt;
  if (run.samples.size() < 2) {
    throw ConfigError("decomposition needs at least two output samples (reduce [time] stride)");
  }
  DecompositionOptions opts;
  opts.drift_exponents = ctx.config.drift_exponents;
  return decompose(run, ctx.system, opts);
}

void decompose_cmd(Context& ctx) {
  Trajectory run;
  const auto dec = decomposition(ctx, run);
  if (!dec) return;
  const auto& b = ctx.basis();
  const auto& cfg = ctx.config;

  {
    auto csv = ctx.csv("decomposition.csv", schema::decomposition);
    for (std::size_t i = 0; i < dec->times.size(); ++i) {
      csv.row({dec->times[i], dec->reconstruction[i], dec->residual_u[i],
               b.sobolev_norm(run.samples[i].w, 0.0), b.sobolev_norm(dec->phi.values[i], 0.0),
               b.sobolev_norm(dec->v.values[i], 0.0), b.sobolev_norm(dec->u.values[i], 0.0),
               b.linf_norm(dec->u.values[i])});
    }
  }
  {
    auto csv = ctx.csv("drift.csv", schema::drift);
    const auto& d = dec->drift;
    for (std::size_t s = 0; s < d.exponents.size(); ++s) {
      for (std::size_t i = 0; i < dec->times.size(); ++i) {
        csv.row({d.exponents[s], dec->times[i], d.drift[s][i]});
      }
    }
  }
  ctx.verdict("reconstruction", pass_if(dec->max_reconstruction <= cfg.tol.reconstruction),
              fmt::format("max ||w - v - u|| / (1 + ||w||) = {:.3e}, tol {:.3e}",
                          dec->max_reconstruction, cfg.tol.reconstruction));
  ctx.measure("max u residual",
              *std::ranges::max_element(dec->residual_u));
  ctx.measure("drift growth slope", dec->drift.growth_slope);
  ctx.measure("drift fitted constant", dec->drift.fitted_constant);
  ctx.measure("initial data ||w0 + w1||", dec->initial_data_l2);

  {
    auto csv = ctx.csv("smoothing.csv", schema::smoothing);
    std::vector<double> exponents{0.0};
    exponents.insert(exponents.end(), cfg.drift_exponents.begin(), cfg.drift_exponents.end());
    bool bounded = true;
    double worst = 0.0;
    for (double s : exponents) {
      for (int k = 1; k <= cfg.kernel_times; ++k) {
        const double t = cfg.time.horizon * k / cfg.kernel_times;
        const auto sc = smoothing_constant(b, s, t);
        csv.row({s, t, sc.discrete, sc.ceiling});
        bounded = bounded && sc.discrete <= sc.ceiling * (1.0 + 1e-12);
        worst = std::max(worst, sc.discrete / sc.ceiling);
      }
    }
    ctx.verdict("smoothing constants", pass_if(bounded),
                fmt::format("max discrete / ceiling = {:.6g}", worst));
  }

  try {
    const auto linf = linf_bound_check(*dec, run, ctx.system, cfg.linf_alpha, cfg.linf_epsilon);
    auto csv = ctx.csv("linf.csv", schema::linf);
    for (const auto& s : linf.samples) {
      csv.row({s.t, s.measured, linf.bound, std::int64_t{s.holds ? 1 : 0}});
    }
    ctx.measure("linf epsilon", linf.epsilon);
    ctx.measure("linf kappa", linf.kappa);
    ctx.measure("linf bound", linf.bound);
    ctx.measure("shifted dissipation", linf.shifted_cum);
    if (!linf.note.empty()) ctx.note(linf.note);
    ctx.verdict("linf bound", pass_if(linf.holds),
                fmt::format("max ||u||_inf = {:.6g} against bound {:.6g}", linf.max_measured,
                            linf.bound));
  } catch (const DivergenceError& e) {
    ctx.verdict("linf bound", Outcome::fail, fmt::format("constant diverges: {}", e.what()));
  }
}

// -------------------------------------------------------------- kernel-check

void write_kernel(CsvWriter& csv, std::string_view check, const KernelReport& r) {
  for (const auto& p : r.points) {
    csv.row({check, p.t, p.x, p.y, p.lhs, p.rhs, p.margin, std::int64_t{p.levels},
             std::int64_t{p.flagged ? 1 : 0}});
  }
}

void kernel_cmd(Context& ctx) {
  const auto& cfg = ctx.config;
  KernelOptions opts;
  opts.time_count = cfg.kernel_times;
  opts.points_per_axis = cfg.kernel_points;
  opts.tolerance = cfg.tol.kernel;
  opts.refinement = cfg.kernel_refinement;
  opts.threads = ctx.options.threads;

  const double mass = kernel_mass(1.0);
  ctx.verdict("kernel mass", pass_if(std::abs(mass - 1.0) <= 1e-8),
              fmt::format("|mass - 1| = {:.3e}", std::abs(mass - 1.0)));

  Trajectory run;
  const auto dec = decomposition(ctx, run);
  auto csv = ctx.csv("kernel.csv", schema::kernel);
  const auto summarise = [&](std::string_view name, const KernelReport& r) {
    ctx.measure(fmt::format("{} max rhs", name), r.max_rhs);
    ctx.measure(fmt::format("{} min margin", name), r.min_margin);
    ctx.measure(fmt::format("{} flagged points", name), std::to_string(r.flagged));
  };

  const auto mp = maximum_principle_check(ctx.basis(), cfg.time.horizon, opts);
  write_kernel(csv, "maximum_principle", mp);
  summarise("maximum principle", mp);
  ctx.verdict("maximum principle", pass_if(mp.holds),
              fmt::format("{} points, min margin {:.3e}", mp.points.size(), mp.min_margin));

  if (!dec) return;
  const auto kr = kernel_bound_check(*dec, run, ctx.system, opts);
  write_kernel(csv, "damping_part", kr);
  summarise("damping part", kr);
  ctx.verdict("kernel domination", pass_if(kr.holds),
              fmt::format("{} points, min margin {:.3e} against -{:.3e}", kr.points.size(),
                          kr.min_margin, cfg.tol.kernel * kr.max_rhs));
}

// --------------------------------------------------------------- equilibrium

std::vector<Equilibrium> equilibria(Context& ctx) {
  MultistartOptions opts;
  opts.starts = ctx.config.starts;
  opts.amplitude = ctx.config.start_amplitude;
  opts.decay = ctx.config.start_decay;
  opts.seed = ctx.config.seed;
  opts.threads = ctx.options.threads;
  opts.newton.tol = ctx.config.tol.newton;
  auto found = find_equilibria(ctx.system, opts);
  ctx.measure("equilibria found", std::to_string(found.size()));
  return found;
}

void equilibrium_cmd(Context& ctx) {
  const auto& b = ctx.basis();
  const auto found = equilibria(ctx);
  if (found.empty()) {
    ctx.verdict("equilibrium found", Outcome::fail,
                fmt::format("no start converged to tol {:.3e}", ctx.config.tol.newton));
  }
  auto table = ctx.csv("equilibrium.csv", schema::equilibrium);
  auto modes = ctx.csv("equilibrium_modes.csv", schema::equilibrium_modes);
  for (std::size_t e = 0; e < found.size(); ++e) {
    const auto& eq = found[e];
    PhaseState rest{eq.w_star, b.zero_field(), 0.0};
    const auto run = simulate(ctx.system, rest, ctx.config.time);
    double drift = 0.0;
    for (const auto& s : run.samples) {
      drift = std::max(drift, b.sobolev_norm(s.w - eq.w_star, 1.0) + b.sobolev_norm(s.wt, 0.0));
    }
    table.row({std::uint64_t{e}, eq.residual, std::int64_t{eq.newton_iters},
               std::int64_t{eq.inner_iters}, eq.lyapunov, b.sobolev_norm(eq.w_star, 0.0),
               b.sobolev_norm(eq.w_star, 1.0), b.linf_norm(eq.w_star), drift});
    for (int j = 1; j <= b.modes(); ++j) {
      for (int k = 1; k <= b.modes(); ++k) {
        modes.row({std::uint64_t{e}, std::int64_t{j}, std::int64_t{k}, eq.w_star(j, k)});
      }
    }
    const auto label = fmt::format("equilibrium {}", e);
    ctx.verdict(label + " residual", pass_if(eq.residual <= ctx.config.tol.newton),
                fmt::format("||R|| = {:.3e} after {} Newton steps", eq.residual, eq.newton_iters));
    if (run.status != RunStatus::completed) {
      ctx.verdict(label + " fixed point", Outcome::inconclusive,
                  fmt::format("{}: {}", to_string(run.status), run.diagnostic));
    } else {
      ctx.verdict(label + " fixed point", pass_if(drift <= ctx.config.tol.fixed_point),
                  fmt::format("max ||w - w*||_H1 + ||w_t|| over the horizon = {:.3e}", drift));
    }
  }
}

// --------------------------------------------------------------------- sweep

SweepReport sweep_at(Context& ctx, std::span<const PhaseState> ball, double horizon,
                     CsvWriter& members, CsvWriter& linf) {
  IntegratorControls controls = ctx.config.time;
  controls.horizon = horizon;
  auto r = dissipativity_sweep(ctx.system, ball, controls, ctx.options.threads);
  for (const auto& m : r.members) {
    members.row({horizon, std::uint64_t{m.index}, to_string(m.status), m.sup_h1_w, m.sup_l2_wt,
                 m.sup_linf_w});
    for (std::size_t n = 0; n < m.linf_at_integer.size(); ++n) {
      linf.row({horizon, std::uint64_t{m.index}, std::uint64_t{n}, m.linf_at_integer[n]});
    }
    if (m.status != RunStatus::completed) {
      ctx.note(fmt::format("T = {}: member {} {}: {}", num(horizon), m.index, to_string(m.status),
                           m.diagnostic));
    }
  }
  return r;
}

void sweep_cmd(Context& ctx) {
  const auto ball = initial_states(ctx.config, ctx.basis());
  const double horizon = ctx.config.time.horizon;
  auto members = ctx.csv("sweep_members.csv", schema::sweep_members);
  auto linf = ctx.csv("sweep_linf.csv", schema::sweep_linf);

  const auto r = sweep_at(ctx, ball, horizon, members, linf);
  ctx.measure("members", std::to_string(ball.size()));
  ctx.measure("c_h1", r.c_h1);
  ctx.measure("c_l2_wt", r.c_l2_wt);
  ctx.measure("c_linf", r.c_linf);
  ctx.measure("contraction a", r.a);
  ctx.measure("offset b", r.b);
  ctx.measure("envelope b", r.b_envelope);
  ctx.measure("fit rms", r.fit_rms);
  ctx.measure("fit pairs", std::to_string(r.fit_pairs));

  const Outcome outcome = r.verdict == SweepVerdict::dissipative       ? Outcome::pass
                          : r.verdict == SweepVerdict::not_dissipative ? Outcome::fail
                                                                       : Outcome::inconclusive;
  ctx.verdict("dissipativity", outcome,
              fmt::format("{}, a = {:.6g}, b = {:.6g}, {} inconclusive members",
                          to_string(r.verdict), r.a, r.b, r.inconclusive_members.size()));

  if (!ctx.config.compare_double_horizon || r.verdict == SweepVerdict::inconclusive) return;
  const auto longer = sweep_at(ctx, ball, 2.0 * horizon, members, linf);
  if (longer.verdict == SweepVerdict::inconclusive) {
    ctx.verdict("bound stability", Outcome::inconclusive, "a member broke down on [0, 2T]");
    return;
  }
  const auto change = [](double a, double b) {
    return a == b ? 0.0 : std::abs(b / a - 1.0);
  };
  const double worst = std::max({change(r.c_h1, longer.c_h1), change(r.c_l2_wt, longer.c_l2_wt),
                                 change(r.c_linf, longer.c_linf)});
  ctx.measure("c_h1 at 2T", longer.c_h1);
  ctx.measure("c_l2_wt at 2T", longer.c_l2_wt);
  ctx.measure("c_linf at 2T", longer.c_linf);
  ctx.verdict("bound stability", pass_if(worst <= ctx.config.sweep_stability),
              fmt::format("max relative change of the bounds from T to 2T = {:.3e}, tol {:.3e}",
                          worst, ctx.config.sweep_stability));
}

// ----------------------------------------------------------------- attractor

void attractor_cmd(Context& ctx) {
  const auto found = equilibria(ctx);
  if (found.empty()) {
    ctx.verdict("equilibrium found", Outcome::fail, "no equilibrium to measure against");
    return;
  }
  const auto run = base_run(ctx);
  const bool completed = run_status(ctx, run, "simulation");

  AttractorOptions opts;
  opts.tail_fraction = ctx.config.tail_fraction;
  opts.tol = ctx.config.tol.attractor;
  const auto r = attractor_distance(run, found, ctx.system, opts);
  {
    auto csv = ctx.csv("attractor.csv", schema::attractor);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      csv.row({r.times[i], r.distance[i], r.wt_l2[i], std::uint64_t{r.nearest[i]}});
    }
  }
  ctx.measure("final distance", r.final_distance);
  ctx.measure("tail min ||w_t||", r.min_tail_wt);
  ctx.measure("tail decay rate", r.decay_rate);
  ctx.measure("lyapunov gap", r.lyapunov_gap);
  if (!completed) return;

  if (r.converged) {
    ctx.verdict("attraction", Outcome::pass,
                fmt::format("final distance {:.3e} < {:.3e}", r.final_distance, opts.tol));
  } else if (r.plateau) {
    ctx.verdict("attraction", Outcome::inconclusive,
                fmt::format("distance plateaus at {:.3e} over the tail", r.final_distance));
  } else {
    ctx.verdict("attraction", Outcome::fail,
                fmt::format("final distance {:.3e} >= {:.3e}", r.final_distance, opts.tol));
  }
  ctx.verdict("velocity decay", pass_if(r.wt_small),
              fmt::format("tail min ||w_t|| = {:.3e} against {:.3e}", r.min_tail_wt,
                          10.0 * opts.tol));
}

}  // namespace

ExperimentResult run_experiment(Subcommand command, const RunConfig& config,
                                const fs::path& out_dir, const ExperimentOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  Context ctx(command, config, out_dir, options);
  const bool gate = command != Subcommand::check_hypotheses && !options.skip_hypothesis_check;
  if (command == Subcommand::check_hypotheses || gate) {
    if (!hypotheses(ctx) && gate) {
      ctx.note("hypotheses failed; rerun with --skip-hypothesis-check to proceed anyway");
      return ctx.finish();
    }
  }

  try {
    switch (command) {
      case Subcommand::simulate: simulate_cmd(ctx); break;
      case Subcommand::check_hypotheses: break;
      case Subcommand::decompose: decompose_cmd(ctx); break;
      case Subcommand::kernel_check: kernel_cmd(ctx); break;
      case Subcommand::equilibrium: equilibrium_cmd(ctx); break;
      case Subcommand::sweep: sweep_cmd(ctx); break;
      case Subcommand::attractor: attractor_cmd(ctx); break;
    }
  } catch (const SaturationError& e) {
    ctx.verdict("evaluation", Outcome::inconclusive, e.what());
  } catch (const DivergenceError& e) {
    ctx.verdict("evaluation", Outcome::inconclusive, e.what());
  }
  return ctx.finish();
}

}  // namespace sdwave
