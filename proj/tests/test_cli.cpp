// Behavior of the spherelab binary: exit codes, output shapes, config files.
// The binary path arrives via the SPHERELAB_BIN environment variable.
#include <doctest.h>

#include <cstdio>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

const char* binary() {
  if (const char* bin = std::getenv("SPHERELAB_BIN")) return bin;
#ifdef SPHERELAB_BIN_DEFAULT
  return SPHERELAB_BIN_DEFAULT;
#else
  REQUIRE_MESSAGE(false, "SPHERELAB_BIN must point at the CLI binary");
  return nullptr;
#endif
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("spherelab_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "out.txt";
  const std::string cmd =
      std::string("\"") + binary() + "\" " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::ostringstream os;
  os << in.rdbuf();
  result.out = os.str();
  return result;
}

}  // namespace

TEST_CASE("solve prints both equilibria and flags the minimizer") {
  const CliResult r = run_cli("solve --d 2 --kappa 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("uniform") != std::string::npos);
  CHECK(r.out.find("localized") != std::string::npos);
  CHECK(r.out.find("3.6294099359559") != std::string::npos);
  CHECK(r.out.find("*") != std::string::npos);

  const CliResult marginal = run_cli("solve --d 2 --kappa 3");
  CHECK(marginal.exit_code == 0);
  CHECK(marginal.out.find("localized") == std::string::npos);
  CHECK(marginal.out.find("marginal") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("solve --d 0 --kappa 1").exit_code == 2);
  CHECK(run_cli("solve --d 2 --kappa -1").exit_code == 2);
  CHECK(run_cli("solve --kappa 1").exit_code == 2);
  CHECK(run_cli("product Q7 --kappa 1").exit_code == 2);
  CHECK(run_cli("nonsense").exit_code == 2);
  // grammar listed on a product parse failure
  const CliResult r = run_cli("product S1**2 --kappa 1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("S<d>") != std::string::npos);
}

TEST_CASE("csv output carries the exact header") {
  const CliResult r = run_cli("solve --d 2 --kappa 5 --csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("kind,eta,com_norm,energy,stability,global_minimizer\n", 0) == 0);
}

TEST_CASE("bifurcate writes the documented columns") {
  const fs::path csv = scratch_dir() / "curve.csv";
  const CliResult r = run_cli(
      "bifurcate --d 1 --kappa-min 1 --kappa-max 3 --points 5 --out " + csv.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "kappa,com_norm_uniform,com_norm_localized,eta,energy_gap,uniform_stability");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 5);
  CHECK(fs::exists(csv.string() + ".manifest.json"));
}

TEST_CASE("simulate reports a zero prediction without coupling") {
  const CliResult r =
      run_cli("simulate --d 1 --kappa 0 --N 50 --dt 1e-2 --t-end 0.5 --burn-in 0.1 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("prediction    = 0\n") != std::string::npos);
}

TEST_CASE("product selects assignments by threshold") {
  const CliResult r = run_cli("product S1xS2 --kappa 2.5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("S1:1loc") != std::string::npos);
  CHECK(r.out.find("S2:0loc") != std::string::npos);

  const CliResult e = run_cli("product S1^2 --kappa 3 --enumerate");
  CHECK(e.exit_code == 0);
  // three canonical classes, minimizer first (ascending energy)
  CHECK(e.out.find("S1^2:2loc") < e.out.find("S1^2:1loc"));
  CHECK(e.out.find("S1^2:1loc") < e.out.find("S1^2:0loc"));
}

TEST_CASE("config files supply defaults that flags override") {
  const fs::path cfg = scratch_dir() / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "d=2\nkappa=5\n";
  }
  const CliResult from_file = run_cli("solve --config " + cfg.string());
  CHECK(from_file.exit_code == 0);
  CHECK(from_file.out.find("localized") != std::string::npos);

  const CliResult overridden = run_cli("solve --config " + cfg.string() + " --kappa 1");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.out.find("localized") == std::string::npos);
}

TEST_CASE("inequality command reports PASS and exits zero") {
  const CliResult r = run_cli("inequality --d 2 --trials 5 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("min_residual") != std::string::npos);
}
