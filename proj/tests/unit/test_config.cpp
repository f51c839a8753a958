#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "sdwave/config.hpp"
#include "sdwave/csv.hpp"
#include "sdwave/errors.hpp"
#include "support/generators.hpp"

using namespace sdwave;
using Catch::Matchers::ContainsSubstring;

namespace {

const std::string kBase = R"(
[domain]
lx = pi
ly = pi

[discretization]
modes = 16

[damping]
family = "exp_power"
params = [0.5]

[source]
family = "linear"

[initial]
w0 = [[1, 1, 1.0]]

[time]
dt = 1e-3
horizon = 2
)";

// Replaces `from` (which must occur) by `to`.
std::string with(std::string text, std::string_view from, std::string_view to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::string fixture(std::string_view name) {
  return std::string(SDWAVE_FIXTURE_DIR) + "/" + std::string(name);
}

}  // namespace

TEST_CASE("minimal fixture parses with documented defaults", "[config]") {
  const auto c = load_config(fixture("minimal.ini"));
  CHECK(c.tag == "minimal");
  CHECK(c.domain.lx == std::numbers::pi);
  CHECK(c.domain.ly == std::numbers::pi);
  CHECK(c.modes == 16);
  CHECK(c.grid_factor == 2);
  CHECK(c.linf_factor == 4);
  CHECK(c.damping.family == Family::exp_power);
  REQUIRE(c.damping.params.size() == 1);
  CHECK(c.damping.params[0] == 0.5);
  CHECK(c.source.family == Family::linear);
  CHECK(c.forcing.empty());
  REQUIRE(c.initial.w0.size() == 1);
  CHECK(c.initial.w0[0].j == 1);
  CHECK(c.initial.w0[0].k == 1);
  CHECK(c.initial.w0[0].value == 1.0);
  CHECK(c.time.dt == 1e-3);
  CHECK(c.time.horizon == 2.0);
  CHECK(c.time.scheme == Scheme::exponential_midpoint);
  CHECK(c.tol.newton == 1e-10);
  CHECK(c.tol.kernel == 1e-3);

  const auto system = make_system(c);
  CHECK(system.basis().grid_points() == 32);
  const auto r = check_hypotheses(system.damping(), system.source(), system.lambda1());
  CHECK(r.all_pass());
  const auto states = initial_states(c, system.basis());
  REQUIRE(states.size() == 1);
  CHECK(states[0].w(1, 1) == 1.0);
  CHECK(states[0].wt(1, 1) == 0.0);
}

TEST_CASE("every fixture parses", "[config]") {
  for (auto name : {"minimal.ini", "nonlinear.ini", "linear.ini", "ensemble.ini", "attractor.ini",
                    "saturating.ini"}) {
    INFO(name);
    CHECK_NOTHROW(load_config(fixture(name)));
  }
  CHECK_THROWS_AS(load_config(fixture("superexp_damping.ini")), ConfigError);
  CHECK_NOTHROW(load_config(fixture("superexp_damping.ini"), ParseMode::lenient));
}

TEST_CASE("admissible exponent ranges are enforced in strict mode", "[config]") {
  const auto alpha = with(kBase, "params = [0.5]", "params = [1.5]");
  CHECK_THROWS_WITH(parse_config(alpha), ContainsSubstring("alpha must lie in [0,1)"));
  CHECK_NOTHROW(parse_config(alpha, ParseMode::lenient));
  CHECK_NOTHROW(parse_config(with(kBase, "params = [0.5]", "params = [0]")));

  const auto gamma = with(kBase, "family = \"linear\"", "family = \"exp_source\"\nparams = [2.0]");
  CHECK_THROWS_WITH(parse_config(gamma), ContainsSubstring("gamma must lie in [1,2)"));
  CHECK_NOTHROW(parse_config(gamma, ParseMode::lenient));
  CHECK_NOTHROW(
      parse_config(with(kBase, "family = \"linear\"", "family = \"exp_source\"\nparams = [1.0]")));
}

TEST_CASE("typos and structural errors name the offending key", "[config]") {
  CHECK_THROWS_WITH(parse_config(with(kBase, "horizon = 2", "horizon = 2\nhorizn = 3")),
                    ContainsSubstring("unknown key [time] horizn"));
  CHECK_THROWS_WITH(parse_config(kBase + "\n[output]\ndir = x\n"),
                    ContainsSubstring("unknown section [output]"));
  CHECK_THROWS_WITH(parse_config(with(kBase, "horizon = 2\n", "")),
                    ContainsSubstring("missing required key [time] horizon"));
  CHECK_THROWS_WITH(parse_config(with(kBase, "[initial]\nw0 = [[1, 1, 1.0]]\n", "")),
                    ContainsSubstring("missing required section [initial]"));
  CHECK_THROWS_AS(parse_config(with(kBase, "horizon = 2", "horizon = 2\nhorizon = 3")),
                  ConfigError);
  CHECK_THROWS_WITH(parse_config(with(kBase, "\"exp_power\"", "\"exp_powr\"")),
                    ContainsSubstring("unknown nonlinearity family"));
  CHECK_THROWS_WITH(parse_config(with(kBase, "modes = 16", "modes = 16.5")),
                    ContainsSubstring("[discretization] modes must be an integer"));
  CHECK_THROWS_WITH(parse_config(with(kBase, "dt = 1e-3", "dt = fast")),
                    ContainsSubstring("[time] dt must be a finite number"));
  CHECK_THROWS_WITH(parse_config(with(kBase, "[[1, 1, 1.0]]", "[[17, 1, 1.0]]")),
                    ContainsSubstring("mode (17, 1) outside 1..16"));
  CHECK_THROWS_AS(parse_config(with(kBase, "[[1, 1, 1.0]]", "[[1, 1]]")), ConfigError);
  CHECK_THROWS_AS(parse_config("stray = 1\n" + kBase), ConfigError);
}

TEST_CASE("config invariants: positive tolerances, dt below the horizon", "[config]") {
  CHECK_THROWS_AS(parse_config(with(kBase, "dt = 1e-3", "dt = 3")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(kBase, "horizon = 2", "horizon = 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase + "[tolerances]\nkernel = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase + "[tolerances]\nbalance = -1e-6\n"), ConfigError);
  const auto c = parse_config(kBase + "[tolerances]\nbalance = 1e-7 # tighter\n");
  CHECK(c.tol.balance == 1e-7);
}

TEST_CASE("numbers accept pi multiples; values accept comments and quotes", "[config]") {
  const auto c = parse_config(with(with(kBase, "lx = pi", "lx = 2*pi"), "ly = pi", "ly = pi/2"));
  CHECK(c.domain.lx == 2.0 * std::numbers::pi);
  CHECK(c.domain.ly == std::numbers::pi / 2.0);
  const auto q = parse_config(with(kBase, "\"exp_power\"", "exp_power   # bare name"));
  CHECK(q.damping.family == Family::exp_power);
}

TEST_CASE("random profile draws are seeded and reproducible", "[config]") {
  auto text = with(kBase, "w0 = [[1, 1, 1.0]]", "profile = random\nmembers = 3\namplitude = 0.4");
  text = "[experiment]\nseed = 9\n" + text;
  const auto c = parse_config(text);
  const auto basis = make_basis(c);
  const auto a = initial_states(c, basis);
  const auto b = initial_states(c, basis);
  REQUIRE(a.size() == 3);
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t i = 0; i < a[m].w.size(); ++i) {
      CHECK(a[m].w[i] == b[m].w[i]);
      CHECK(a[m].wt[i] == b[m].wt[i]);
      CHECK(std::abs(a[m].w[i]) <= 0.4);
    }
  }
  CHECK(a[0].w[0] != a[1].w[0]);
  CHECK_THROWS_WITH(parse_config(with(text, "members = 3", "members = 3\nw1 = []")),
                    ContainsSubstring("only applies to profile = coefficients"));
}

TEST_CASE("shortest round-trip doubles", "[csv]") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");

  testing::Gen gen(20260101);
  for (int i = 0; i < 2000; ++i) {
    const double x = gen.uniform(-1.0, 1.0) * std::pow(10.0, gen.integer(-300, 300));
    const auto text = format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    REQUIRE(std::memcmp(&back, &x, sizeof x) == 0);
  }
}

TEST_CASE("RFC-4180 quoting", "[csv]") {
  CHECK(quote_field("plain") == "plain");
  CHECK(quote_field("a,b") == "\"a,b\"");
  CHECK(quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(quote_field("two\nlines") == "\"two\nlines\"");

  const auto path = std::filesystem::temp_directory_path() / "sdwave_csv_test.csv";
  constexpr std::array<std::string_view, 3> header{"name", "value", "count"};
  {
    CsvWriter csv(path, header);
    csv.row({std::string_view("x,y"), 0.25, std::int64_t{3}});
    CHECK_THROWS_AS(csv.row({0.5}), ConfigError);
    CHECK(csv.rows() == 1);
  }
  std::ifstream in(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == "name,value,count\n\"x,y\",0.25,3\n");
  std::filesystem::remove(path);
}
