#include "sdwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "sdwave/errors.hpp"
#include "sdwave/random.hpp"

namespace sdwave {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>, std::less<>>& schema() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys{
      {"experiment", {"tag", "seed"}},
      {"domain", {"lx", "ly"}},
      {"discretization", {"modes", "grid_factor", "linf_factor"}},
      {"damping", {"family", "params"}},
      {"source", {"family", "params"}},
      {"forcing", {"coefficients"}},
      {"initial", {"profile", "w0", "w1", "amplitude", "decay", "members"}},
      {"time",
       {"dt", "horizon", "stride", "scheme", "adaptive", "balance_tol", "dt_min", "dt_max",
        "output_interval"}},
      {"tolerances",
       {"balance", "lyapunov_abs", "lyapunov_rel", "reconstruction", "kernel", "attractor",
        "newton", "fixed_point"}},
      {"equilibrium", {"starts", "amplitude", "decay"}},
      {"decompose", {"alpha", "epsilon", "drift_exponents"}},
      {"kernel", {"times", "points", "refinement"}},
      {"sweep", {"compare_double_horizon", "stability"}},
      {"attractor", {"tail_fraction"}},
  };
  return keys;
}

constexpr std::string_view kRequired[] = {"domain", "discretization", "damping", "source",
                                          "initial", "time"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops an inline '#' comment and surrounding quotes.
std::string_view clean(std::string_view raw) {
  bool quoted = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '"') quoted = !quoted;
    if (raw[i] == '#' && !quoted) {
      raw = raw.substr(0, i);
      break;
    }
  }
  raw = trim(raw);
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    raw = trim(raw.substr(1, raw.size() - 2));
  }
  return raw;
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }
  bool has(std::string_view key) const {
    return tree_ != nullptr && tree_->find(std::string(key)) != tree_->not_found();
  }

  std::string label(std::string_view key) const { return fmt::format("[{}] {}", name_, key); }

  std::string_view raw(std::string_view key) const {
    if (!has(key)) throw ConfigError(fmt::format("missing required key {}", label(key)));
    return clean(tree_->find(std::string(key))->second.data());
  }

  double number(std::string_view key) const { return parse_number(raw(key), label(key)); }
  double number(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long integer(std::string_view key) const {
    const auto text = raw(key);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError(fmt::format("{} must be an integer, got \"{}\"", label(key), text));
    }
    return v;
  }
  long integer(std::string_view key, long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto text = raw(key);
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(fmt::format("{} must be true or false, got \"{}\"", label(key), text));
  }

  std::string text(std::string_view key, std::string_view fallback) const {
    return has(key) ? std::string(raw(key)) : std::string(fallback);
  }

  std::vector<double> numbers(std::string_view key) const {
    auto body = raw(key);
    if (!body.empty() && body.front() == '[') {
      if (body.back() != ']') throw ConfigError(fmt::format("{}: unbalanced '['", label(key)));
      body = trim(body.substr(1, body.size() - 2));
    }
    std::vector<double> out;
    if (body.empty()) return out;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto item = trim(body.substr(start, comma - start));
      out.push_back(parse_number(item, label(key)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  // [[j, k, value], ...]; an empty list or [] is allowed.
  std::vector<ModeCoefficient> coefficients(std::string_view key) const {
    auto body = raw(key);
    if (body.empty()) return {};
    if (body.front() != '[' || body.back() != ']') {
      throw ConfigError(fmt::format("{} must be a list of [j, k, value] triples", label(key)));
    }
    body = trim(body.substr(1, body.size() - 2));
    std::vector<ModeCoefficient> out;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto open = body.find('[', pos);
      if (open == std::string_view::npos) {
        if (!trim(body.substr(pos)).empty()) {
          throw ConfigError(fmt::format("{}: unexpected \"{}\"", label(key), trim(body.substr(pos))));
        }
        break;
      }
      const auto between = trim(body.substr(pos, open - pos));
      if (!between.empty() && between != ",") {
        throw ConfigError(fmt::format("{}: unexpected \"{}\"", label(key), between));
      }
      const auto close = body.find(']', open);
      if (close == std::string_view::npos) {
        throw ConfigError(fmt::format("{}: unbalanced '['", label(key)));
      }
      const auto inner = body.substr(open + 1, close - open - 1);
      std::vector<double> parts;
      std::size_t start = 0;
      while (true) {
        const auto comma = inner.find(',', start);
        parts.push_back(parse_number(trim(inner.substr(start, comma - start)), label(key)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (parts.size() != 3 || parts[0] != std::floor(parts[0]) ||
          parts[1] != std::floor(parts[1])) {
        throw ConfigError(
            fmt::format("{}: each entry must be [j, k, value] with integer j, k", label(key)));
      }
      out.push_back({static_cast<int>(parts[0]), static_cast<int>(parts[1]), parts[2]});
      pos = close + 1;
    }
    return out;
  }

  void reject_unknown() const {
    if (tree_ == nullptr) return;
    const auto& allowed = schema().find(name_)->second;
    for (const auto& [key, child] : *tree_) {
      if (!allowed.contains(key)) {
        throw ConfigError(fmt::format("unknown key [{}] {}", name_, key));
      }
    }
  }

  // number | pi | <number>*pi | pi/<number>
  static double parse_number(std::string_view text, const std::string& where) {
    text = trim(text);
    const auto scalar = [&](std::string_view s) {
      s = trim(s);
      if (s == "pi") return std::numbers::pi;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(fmt::format("{} must be a finite number, got \"{}\"", where, text));
      }
      return v;
    };
    if (const auto star = text.find('*'); star != std::string_view::npos) {
      return scalar(text.substr(0, star)) * scalar(text.substr(star + 1));
    }
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
      return scalar(text.substr(0, slash)) / scalar(text.substr(slash + 1));
    }
    return scalar(text);
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

NonlinearitySpec parse_nonlinearity(const Section& s, Role role, ParseMode mode) {
  NonlinearitySpec spec;
  spec.family = family_from_string(s.raw("family"));
  if (s.has("params")) spec.params = s.numbers("params");
  // Shape validation lives in the factory.
  (void)Nonlinearity::make(spec.family, spec.params, role);
  if (mode == ParseMode::strict) {
    if (role == Role::damping && spec.family == Family::exp_power) {
      const double alpha = spec.params.at(0);
      require(alpha >= 0.0 && alpha < 1.0,
              fmt::format("{}: alpha must lie in [0,1), got {}", s.label("params"), alpha));
    }
    if (role == Role::source && spec.family == Family::exp_source) {
      const double gamma = spec.params.at(0);
      require(gamma >= 1.0 && gamma < 2.0,
              fmt::format("{}: gamma must lie in [1,2), got {}", s.label("params"), gamma));
    }
  }
  return spec;
}

void check_modes(const std::vector<ModeCoefficient>& list, int modes, const std::string& where) {
  for (const auto& c : list) {
    require(c.j >= 1 && c.k >= 1 && c.j <= modes && c.k <= modes,
            fmt::format("{}: mode ({}, {}) outside 1..{}", where, c.j, c.k, modes));
    require(std::isfinite(c.value), fmt::format("{}: coefficient must be finite", where));
  }
}

SpectralField to_field(const std::vector<ModeCoefficient>& list, int modes) {
  SpectralField f(modes);
  for (const auto& c : list) f(c.j, c.k) += c.value;
  return f;
}

}  // namespace

RunConfig parse_config(std::string_view text, ParseMode mode) {
  pt::ptree tree;
  {
    std::istringstream in{std::string(text)};
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
    }
  }

  for (const auto& [name, child] : tree) {
    if (!schema().contains(name)) {
      throw ConfigError(child.empty() && !child.data().empty()
                            ? fmt::format("key \"{}\" outside any section", name)
                            : fmt::format("unknown section [{}]", name));
    }
  }
  const auto section = [&](std::string_view name) {
    const auto it = tree.find(std::string(name));
    Section s(std::string(name), it == tree.not_found() ? nullptr : &it->second);
    s.reject_unknown();
    return s;
  };
  for (auto name : kRequired) {
    require(tree.find(std::string(name)) != tree.not_found(),
            fmt::format("missing required section [{}]", name));
  }

  RunConfig c;

  const auto experiment = section("experiment");
  c.tag = experiment.text("tag", c.tag);
  if (experiment.has("seed")) {
    const long seed = experiment.integer("seed");
    require(seed >= 0, "[experiment] seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
  }

  const auto domain = section("domain");
  const double lx = domain.number("lx");
  const double ly = domain.number("ly");
  require(lx > 0.0 && ly > 0.0, "[domain] lx and ly must be positive");
  c.domain = Domain(lx, ly);

  const auto disc = section("discretization");
  c.modes = static_cast<int>(disc.integer("modes"));
  c.grid_factor = static_cast<int>(disc.integer("grid_factor", c.grid_factor));
  c.linf_factor = static_cast<int>(disc.integer("linf_factor", c.linf_factor));
  require(c.modes >= 1 && c.modes <= 512, "[discretization] modes must lie in 1..512");
  require(c.grid_factor >= 2 && c.grid_factor <= 8,
          "[discretization] grid_factor must lie in 2..8");
  require(c.linf_factor >= 1 && c.linf_factor <= 16,
          "[discretization] linf_factor must lie in 1..16");

  c.damping = parse_nonlinearity(section("damping"), Role::damping, mode);
  c.source = parse_nonlinearity(section("source"), Role::source, mode);

  const auto forcing = section("forcing");
  if (forcing.has("coefficients")) c.forcing = forcing.coefficients("coefficients");
  check_modes(c.forcing, c.modes, "[forcing] coefficients");

  const auto initial = section("initial");
  const auto profile = initial.text("profile", "coefficients");
  if (profile == "coefficients") {
    c.initial.profile = InitialProfile::coefficients;
    for (auto key : {"amplitude", "decay", "members"}) {
      require(!initial.has(key),
              fmt::format("{} only applies to profile = random", initial.label(key)));
    }
    if (initial.has("w0")) c.initial.w0 = initial.coefficients("w0");
    if (initial.has("w1")) c.initial.w1 = initial.coefficients("w1");
    check_modes(c.initial.w0, c.modes, "[initial] w0");
    check_modes(c.initial.w1, c.modes, "[initial] w1");
  } else if (profile == "random") {
    c.initial.profile = InitialProfile::random;
    for (auto key : {"w0", "w1"}) {
      require(!initial.has(key),
              fmt::format("{} only applies to profile = coefficients", initial.label(key)));
    }
    c.initial.amplitude = initial.number("amplitude", c.initial.amplitude);
    c.initial.decay = initial.number("decay", c.initial.decay);
    c.initial.members = static_cast<int>(initial.integer("members", c.initial.members));
    require(c.initial.amplitude >= 0.0, "[initial] amplitude must be >= 0");
    require(c.initial.members >= 1 && c.initial.members <= 100000,
            "[initial] members must lie in 1..100000");
  } else {
    throw ConfigError(fmt::format(
        "[initial] profile must be coefficients or random, got \"{}\"", profile));
  }

  const auto time = section("time");
  auto& ctl = c.time;
  ctl.dt = time.number("dt");
  ctl.horizon = time.number("horizon");
  ctl.output_stride = static_cast<int>(time.integer("stride", ctl.output_stride));
  ctl.scheme = scheme_from_string(time.text("scheme", to_string(ctl.scheme)));
  ctl.adaptive = time.boolean("adaptive", ctl.adaptive);
  ctl.balance_tol = time.number("balance_tol", ctl.balance_tol);
  ctl.dt_min = time.number("dt_min", ctl.dt_min);
  ctl.dt_max = time.number("dt_max", ctl.dt_max);
  ctl.output_interval = time.number("output_interval", ctl.output_interval);
  require(ctl.horizon > 0.0, "[time] horizon must be > 0");
  require(ctl.dt > 0.0 && ctl.dt < ctl.horizon, "[time] dt must satisfy 0 < dt < horizon");
  require(ctl.output_stride >= 1, "[time] stride must be >= 1");
  require(ctl.balance_tol > 0.0, "[time] balance_tol must be > 0");
  require(ctl.dt_min > 0.0 && ctl.dt_min <= ctl.dt_max,
          "[time] dt_min and dt_max must satisfy 0 < dt_min <= dt_max");
  require(ctl.output_interval >= 0.0, "[time] output_interval must be >= 0");

  const auto tol = section("tolerances");
  auto& t = c.tol;
  t.balance = tol.number("balance", t.balance);
  t.lyapunov_abs = tol.number("lyapunov_abs", t.lyapunov_abs);
  t.lyapunov_rel = tol.number("lyapunov_rel", t.lyapunov_rel);
  t.reconstruction = tol.number("reconstruction", t.reconstruction);
  t.kernel = tol.number("kernel", t.kernel);
  t.attractor = tol.number("attractor", t.attractor);
  t.newton = tol.number("newton", t.newton);
  t.fixed_point = tol.number("fixed_point", t.fixed_point);
  for (double v : {t.balance, t.lyapunov_abs, t.lyapunov_rel, t.reconstruction, t.kernel,
                   t.attractor, t.newton, t.fixed_point}) {
    require(v > 0.0, "[tolerances] all tolerances must be > 0");
  }

  const auto eq = section("equilibrium");
  c.starts = static_cast<int>(eq.integer("starts", c.starts));
  c.start_amplitude = eq.number("amplitude", c.start_amplitude);
  c.start_decay = eq.number("decay", c.start_decay);
  require(c.starts >= 1 && c.starts <= 10000, "[equilibrium] starts must lie in 1..10000");
  require(c.start_amplitude >= 0.0, "[equilibrium] amplitude must be >= 0");

  const auto dec = section("decompose");
  c.linf_alpha = dec.number("alpha", c.linf_alpha);
  c.linf_epsilon = dec.number("epsilon", c.linf_epsilon);
  if (dec.has("drift_exponents")) c.drift_exponents = dec.numbers("drift_exponents");
  require(c.linf_alpha > 0.0 && c.linf_alpha < 1.0, "[decompose] alpha must lie in (0,1)");
  require(c.linf_epsilon >= 0.0, "[decompose] epsilon must be >= 0 (0 selects the search)");
  for (double s : c.drift_exponents) {
    require(s >= 0.0 && s < 2.0, "[decompose] drift_exponents must lie in [0,2)");
  }

  const auto kernel = section("kernel");
  c.kernel_times = static_cast<int>(kernel.integer("times", c.kernel_times));
  c.kernel_points = static_cast<int>(kernel.integer("points", c.kernel_points));
  c.kernel_refinement = static_cast<int>(kernel.integer("refinement", c.kernel_refinement));
  require(c.kernel_times >= 1, "[kernel] times must be >= 1");
  require(c.kernel_points >= 1, "[kernel] points must be >= 1");
  require(c.kernel_refinement >= 1 && c.kernel_refinement <= 16,
          "[kernel] refinement must lie in 1..16");

  const auto sweep = section("sweep");
  c.compare_double_horizon = sweep.boolean("compare_double_horizon", c.compare_double_horizon);
  c.sweep_stability = sweep.number("stability", c.sweep_stability);
  require(c.sweep_stability > 0.0, "[sweep] stability must be > 0");

  c.tail_fraction = section("attractor").number("tail_fraction", c.tail_fraction);
  require(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0,
          "[attractor] tail_fraction must lie in (0,1]");

  return c;
}

RunConfig load_config(const std::filesystem::path& path, ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), mode);
}

Basis make_basis(const RunConfig& config) {
  return build_basis(config.domain, config.modes, config.grid_factor * config.modes,
                     config.linf_factor);
}

Nonlinearity make_damping(const RunConfig& config) {
  return Nonlinearity::make(config.damping.family, config.damping.params, Role::damping);
}

Nonlinearity make_source(const RunConfig& config) {
  return Nonlinearity::make(config.source.family, config.source.params, Role::source);
}

GalerkinSystem make_system(const RunConfig& config) {
  return GalerkinSystem(make_basis(config), make_damping(config), make_source(config),
                        to_field(config.forcing, config.modes));
}

std::vector<PhaseState> initial_states(const RunConfig& config, const Basis& basis) {
  const int n = basis.modes();
  if (config.initial.profile == InitialProfile::coefficients) {
    return {project_initial_data(to_field(config.initial.w0, n), to_field(config.initial.w1, n),
                                 basis)
                .state};
  }
  Rng rng(config.seed);
  std::vector<PhaseState> out;
  out.reserve(static_cast<std::size_t>(config.initial.members));
  for (int m = 0; m < config.initial.members; ++m) {
    auto w0 = rng.field(n, config.initial.amplitude, config.initial.decay);
    auto w1 = rng.field(n, config.initial.amplitude, config.initial.decay);
    out.push_back(project_initial_data(w0, w1, basis).state);
  }
  return out;
}

}  // namespace sdwave
