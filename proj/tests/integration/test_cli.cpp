#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdwave/experiments.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SDWAVE_FIXTURE_DIR;
const fs::path kGolden = SDWAVE_GOLDEN_DIR;

fs::path scratch(std::string_view name) {
  const auto dir = fs::temp_directory_path() / "sdwave_cli" / std::string(name);
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

// Runs the CLI with `args` under `env` and returns its exit status.
int cli(const std::string& args, const std::string& env = "env -u SDWAVE_THREADS") {
  const auto command = env + " " + SDWAVE_BINARY + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string first_line(const fs::path& path) {
  const auto text = read(path);
  return text.substr(0, text.find('\n') + 1);
}

std::size_t line_count(const fs::path& path) {
  const auto text = read(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

int run(std::string_view command, std::string_view fixture, const fs::path& out,
        const std::string& extra = "") {
  return cli(std::string(command) + " --config " + (kFixtures / fixture).string() + " --out " +
                out.string() + extra);
}

// Every CSV in `out` must carry exactly the golden header of the same name.
void check_golden_headers(const fs::path& out) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().extension() != ".csv") continue;
    const auto golden = kGolden / entry.path().filename();
    INFO(entry.path().filename().string());
    REQUIRE(fs::exists(golden));
    CHECK(first_line(entry.path()) == read(golden));
    ++seen;
  }
  CHECK(seen > 0);
}

}  // namespace

TEST_CASE("simulate on the minimal fixture writes the ledger and exits 0", "[cli]") {
  const auto out = scratch("simulate_minimal");
  CHECK(run("simulate", "minimal.ini", out) == 0);
  CHECK(first_line(out / "ledger.csv") ==
        "t,kinetic,potential,source_potential,forcing,lyapunov,visc_cum,damping_cum,"
        "shifted_cum,balance_residual,l2_w,h1_w,l2_wt,linf_w\n");
  CHECK(line_count(out / "ledger.csv") == 2002);  // header + t = 0, 0.001, ..., 2
  const auto report = read(out / "report.txt");
  CHECK(report.find("PASS energy balance") != std::string::npos);
  CHECK(report.find("exit: 0") != std::string::npos);
  check_golden_headers(out);
}

TEST_CASE("check-hypotheses rejects super-exponential damping with exit 2", "[cli]") {
  const auto out = scratch("hyp_superexp");
  CHECK(run("check-hypotheses", "superexp_damping.ini", out) == 2);
  const auto report = read(out / "report.txt");
  CHECK(report.find("FAIL hypothesis damping_integrability") != std::string::npos);
  CHECK(report.find("diverges") != std::string::npos);
  check_golden_headers(out);

  CHECK(run("check-hypotheses", "minimal.ini", scratch("hyp_minimal")) == 0);
}

TEST_CASE("inadmissible configs are usage errors for strict subcommands", "[cli]") {
  CHECK(run("simulate", "superexp_damping.ini", scratch("strict")) == 1);
  CHECK(run("simulate", "superexp_damping.ini", scratch("strict_skip"),
            " --skip-hypothesis-check") == 1);

  const auto bad = scratch("typo") / "typo.ini";
  fs::create_directories(bad.parent_path());
  auto text = read(kFixtures / "minimal.ini");
  text.replace(text.find("horizon = 2"), 11, "horizon = 2\nhorizn = 3");
  std::ofstream(bad) << text;
  CHECK(cli("simulate --config " + bad.string() + " --out " + scratch("typo_out").string()) ==
        1);
}

TEST_CASE("usage errors exit 1", "[cli]") {
  CHECK(cli("") == 1);
  CHECK(cli("integrate --config x --out y") == 1);
  CHECK(cli("simulate --out " + scratch("noconfig").string()) == 1);
  CHECK(cli("simulate --config /nonexistent.ini --out " + scratch("missing").string()) == 1);
  CHECK(cli("simulate --config " + (kFixtures / "minimal.ini").string() + " --out " +
               scratch("threads").string() + " --threads many") == 1);
  CHECK(cli("--help") == 0);
}

TEST_CASE("equilibrium on the linear fixture gives one exact root", "[cli]") {
  const auto out = scratch("equilibrium_linear");
  CHECK(run("equilibrium", "linear.ini", out) == 0);
  const auto table = read(out / "equilibrium.csv");
  CHECK(line_count(out / "equilibrium.csv") == 2);
  const auto row = table.substr(table.find('\n') + 1);
  const auto residual = std::stod(row.substr(row.find(',') + 1));
  CHECK(residual < 1e-10);
  check_golden_headers(out);
}

TEST_CASE("decompose and kernel-check pass on the nonlinear fixture", "[cli][slow]") {
  const auto dec = scratch("decompose_nonlinear");
  CHECK(run("decompose", "nonlinear.ini", dec) == 0);
  check_golden_headers(dec);
  const auto ker = scratch("kernel_nonlinear");
  CHECK(run("kernel-check", "nonlinear.ini", ker, " --threads 2") == 0);
  check_golden_headers(ker);
  CHECK(line_count(ker / "kernel.csv") == 1 + 2 * 45);
}

TEST_CASE("sweep and attractor pass on their fixtures", "[cli]") {
  const auto sweep = scratch("sweep");
  CHECK(run("sweep", "ensemble.ini", sweep) == 0);
  check_golden_headers(sweep);
  const auto attractor = scratch("attractor");
  CHECK(run("attractor", "attractor.ini", attractor) == 0);
  check_golden_headers(attractor);
}

TEST_CASE("saturation is inconclusive with exit 3", "[cli]") {
  CHECK(run("simulate", "saturating.ini", scratch("sat_simulate")) == 3);
  CHECK(run("sweep", "saturating.ini", scratch("sat_sweep")) == 3);
  CHECK(run("decompose", "saturating.ini", scratch("sat_decompose")) == 3);
}

TEST_CASE("SDWAVE_THREADS is the fallback for --threads", "[cli]") {
  const auto out = scratch("env_threads");
  const auto args = "sweep --config " + (kFixtures / "ensemble.ini").string() + " --out " +
                    out.string();
  CHECK(cli(args, "SDWAVE_THREADS=3") == 0);
  CHECK(read(out / "report.txt").find("threads: 3") != std::string::npos);
  CHECK(cli(args + " --threads 2", "SDWAVE_THREADS=3") == 0);
  CHECK(read(out / "report.txt").find("threads: 2") != std::string::npos);
  CHECK(cli(args, "SDWAVE_THREADS=lots") == 1);
}

TEST_CASE("single-threaded reruns are byte-identical", "[cli]") {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"simulate", "minimal.ini"},
      {"equilibrium", "nonlinear.ini"},
      {"sweep", "ensemble.ini"},
      {"attractor", "attractor.ini"},
  };
  for (const auto& [command, fixture] : runs) {
    INFO(command << " " << fixture);
    const auto a = scratch("rerun_a_" + command);
    const auto b = scratch("rerun_b_" + command);
    REQUIRE(run(command, fixture, a, " --threads 1") == 0);
    REQUIRE(run(command, fixture, b, " --threads 1") == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      REQUIRE(fs::exists(b / name));
      CHECK(read(a / name) == read(b / name));
    }
  }
}

TEST_CASE("ensemble output does not depend on the thread count", "[cli]") {
  const auto one = scratch("threads_1");
  const auto four = scratch("threads_4");
  REQUIRE(run("sweep", "ensemble.ini", one, " --threads 1") == 0);
  REQUIRE(run("sweep", "ensemble.ini", four, " --threads 4") == 0);
  for (auto name : {"sweep_members.csv", "sweep_linf.csv"}) {
    CHECK(read(one / name) == read(four / name));
  }
}

TEST_CASE("schema constants match the golden headers", "[cli]") {
  const auto joined = [](auto header) {
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
      line += (i ? "," : "") + std::string(header[i]);
    }
    return line + "\n";
  };
  namespace s = sdwave::schema;
  CHECK(read(kGolden / "ledger.csv") == joined(s::ledger));
  CHECK(read(kGolden / "hypotheses.csv") == joined(s::hypotheses));
  CHECK(read(kGolden / "decomposition.csv") == joined(s::decomposition));
  CHECK(read(kGolden / "drift.csv") == joined(s::drift));
  CHECK(read(kGolden / "smoothing.csv") == joined(s::smoothing));
  CHECK(read(kGolden / "linf.csv") == joined(s::linf));
  CHECK(read(kGolden / "kernel.csv") == joined(s::kernel));
  CHECK(read(kGolden / "equilibrium.csv") == joined(s::equilibrium));
  CHECK(read(kGolden / "equilibrium_modes.csv") == joined(s::equilibrium_modes));
  CHECK(read(kGolden / "sweep_members.csv") == joined(s::sweep_members));
  CHECK(read(kGolden / "sweep_linf.csv") == joined(s::sweep_linf));
  CHECK(read(kGolden / "attractor.csv") == joined(s::attractor));
}
