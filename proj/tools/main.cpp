// spherelab: equilibria, bifurcation curves, particle Monte Carlo and the
// entropy inequality for the attraction-diffusion energy on spheres.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spherelab/bifurcation.hpp"
#include "spherelab/io_util.hpp"
#include "spherelab/particle_sim.hpp"

namespace {

using namespace spherelab;

std::string command_line_of(int argc, char** argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += ' ';
    line += argv[i];
  }
  return line;
}

std::string trim(const std::string& s) {
  const size_t from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  return s.substr(from, s.find_last_not_of(" \t\r") - from + 1);
}

// A config file mirrors the flags as flat `key=value` lines. Keys already
// given on the command line win; the rest are appended as extra flags.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::FileError("config line is not key=value: " + line);
    const std::string key = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool given = false;
    for (const auto& a : args)
      if (a == key || a.rfind(key + "=", 0) == 0) given = true;
    if (!given) {
      args.push_back(key);
      args.push_back(value);
    }
  }
  return args;
}

struct SolveOptions {
  int d = 2;
  double kappa = 1.0;
  bool as_json = false;
  bool as_csv = false;
  std::string out;
};

struct SolveRow {
  std::string kind;
  double eta;
  double com_norm;
  double energy;
  std::string stability;
  bool global_min;
};

std::vector<SolveRow> solve_rows(const ModelParams& params) {
  const auto solutions = solve_equilibria(params);
  const bool localized_wins = solutions.size() == 2;
  std::vector<SolveRow> rows;
  for (const auto& sol : solutions) {
    SolveRow row;
    row.kind = sol.kind == EquilibriumKind::Uniform ? "uniform" : "localized";
    row.eta = sol.eta;
    row.com_norm = sol.com_norm;
    row.energy = energy_of(sol, params).value;
    row.stability = sol.kind == EquilibriumKind::Uniform
                        ? to_string(classify_uniform(params).verdict)
                        : "stable";
    row.global_min = (sol.kind == EquilibriumKind::Localized) == localized_wins;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_solve(const std::vector<SolveRow>& rows, const SolveOptions& opt) {
  std::ostringstream os;
  if (opt.as_json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      j.push_back(nlohmann::ordered_json{{"kind", r.kind},
                                         {"eta", r.eta},
                                         {"com_norm", r.com_norm},
                                         {"energy", r.energy},
                                         {"stability", r.stability},
                                         {"global_minimizer", r.global_min}});
    }
    os << j.dump(2) << "\n";
    return os.str();
  }
  if (opt.as_csv) {
    os << "kind,eta,com_norm,energy,stability,global_minimizer\n";
    for (const auto& r : rows) {
      os << r.kind << ',' << format_double(r.eta) << ',' << format_double(r.com_norm)
         << ',' << format_double(r.energy) << ',' << r.stability << ','
         << (r.global_min ? 1 : 0) << "\n";
    }
    return os.str();
  }
  os << "kind       eta                      com_norm                 "
        "energy                   stability  global_min\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-24s %-24s %-24s %-10s %s\n",
                  r.kind.c_str(), format_double(r.eta).c_str(),
                  format_double(r.com_norm).c_str(), format_double(r.energy).c_str(),
                  r.stability.c_str(), r.global_min ? "*" : "");
    os << line;
  }
  return os.str();
}

int cmd_solve(const SolveOptions& opt, const std::string& command_line) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams params{SphereDim(opt.d), opt.kappa};
  const std::string text = render_solve(solve_rows(params), opt);
  std::cout << text;
  if (!opt.out.empty()) {
    RunManifest manifest;
    manifest.command_line = command_line;
    manifest.config = {{"d", std::to_string(opt.d)}, {"kappa", format_double(opt.kappa)}};
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_with_manifest(opt.out, text, std::move(manifest));
  }
  return 0;
}

struct BifurcateOptions {
  int d = 2;
  double kappa_min = 0.5;
  double kappa_max = 40.0;
  int points = 200;
  std::string spacing = "linear";
  std::string out;
};

int cmd_bifurcate(const BifurcateOptions& opt, const std::string& command_line) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepSpec spec{SphereDim(opt.d), opt.kappa_min, opt.kappa_max, opt.points,
                 opt.spacing == "log" ? SweepSpacing::LogAboveThreshold
                                      : SweepSpacing::Linear};
  const BifurcationCurve curve = sweep(spec);

  std::ostringstream os;
  os << "kappa,com_norm_uniform,com_norm_localized,eta,energy_gap,uniform_stability\n";
  for (const auto& s : curve.samples) {
    os << format_double(s.kappa) << ',' << format_double(s.com_norm_uniform) << ','
       << format_optional(s.com_norm_localized) << ',' << format_optional(s.eta) << ','
       << format_optional(s.energy_gap) << ',' << to_string(s.uniform_stability)
       << "\n";
  }

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.config = {{"d", std::to_string(opt.d)},
                     {"kappa_min", format_double(opt.kappa_min)},
                     {"kappa_max", format_double(opt.kappa_max)},
                     {"points", std::to_string(opt.points)},
                     {"spacing", opt.spacing}};
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file_with_manifest(opt.out, os.str(), std::move(manifest));

  std::cout << "wrote " << curve.samples.size() << " samples to " << opt.out
            << " (threshold " << format_double(curve.threshold) << ")\n";
  return 0;
}

struct SimulateOptions {
  int d = 2;
  double kappa = 5.0;
  int particles = 2000;
  double dt = 1e-3;
  double t_end = 30.0;
  double burn_in = 10.0;
  std::uint64_t seed = 0;
  std::string scheme = "project";
  std::string out;
};

int cmd_simulate(const SimulateOptions& opt, const std::string& command_line) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams params{SphereDim(opt.d), opt.kappa};
  SimConfig cfg;
  cfg.particle_count = opt.particles;
  cfg.dt = opt.dt;
  cfg.t_end = opt.t_end;
  cfg.burn_in = opt.burn_in;
  cfg.seed = opt.seed;
  cfg.scheme = opt.scheme == "geodesic" ? StepScheme::GeodesicStep
                                        : StepScheme::ProjectRenormalize;
  const SimStats stats = run(params, cfg);

  double prediction = 0.0;
  if (opt.kappa > branch_threshold(params.d)) {
    if (const auto eta = find_eta(params)) prediction = *eta / opt.kappa;
  }

  std::cout << "mean_com_norm = " << format_double(stats.mean_com_norm) << " +/- "
            << format_double(stats.std_error) << "\n"
            << "prediction    = " << format_double(prediction) << "\n";

  if (!opt.out.empty()) {
    std::ostringstream os;
    os << "t,com_norm\n";
    for (size_t i = 0; i < stats.times.size(); ++i)
      os << format_double(stats.times[i]) << ','
         << format_double(stats.com_norm_series[i]) << "\n";
    RunManifest manifest;
    manifest.command_line = command_line;
    manifest.config = {{"d", std::to_string(opt.d)},
                       {"kappa", format_double(opt.kappa)},
                       {"N", std::to_string(opt.particles)},
                       {"dt", format_double(opt.dt)},
                       {"t_end", format_double(opt.t_end)},
                       {"burn_in", format_double(opt.burn_in)},
                       {"scheme", opt.scheme}};
    manifest.seed = opt.seed;
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_with_manifest(opt.out, os.str(), std::move(manifest));
  }
  return 0;
}

struct ProductOptions {
  std::string spec_text;
  double kappa = 1.0;
  bool enumerate = false;
  bool as_json = false;
};

std::string assignment_text(const ProductSpaceSpec& spec, const ProductEquilibrium& eq) {
  std::ostringstream os;
  for (size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    if (i) os << " x ";
    os << "S" << f.d.dim();
    if (f.count > 1) os << "^" << f.count;
    os << ":" << eq.localized_counts[i] << "loc";
  }
  return os.str();
}

int cmd_product(const ProductOptions& opt, const std::string&) {
  const ProductSpaceSpec spec(parse_product_factors(opt.spec_text), opt.kappa);

  std::vector<ProductEquilibrium> list;
  if (opt.enumerate) {
    list = enumerate_equilibria(spec);
    std::sort(list.begin(), list.end(),
              [](const ProductEquilibrium& a, const ProductEquilibrium& b) {
                return a.total_energy < b.total_energy;
              });
  } else {
    list.push_back(global_minimizer(spec));
  }

  if (opt.as_json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& eq : list) {
      j.push_back(nlohmann::ordered_json{{"assignment", assignment_text(spec, eq)},
                                         {"localized_counts", eq.localized_counts},
                                         {"multiplicity", eq.multiplicity},
                                         {"total_energy", eq.total_energy},
                                         {"stability", to_string(eq.stability)},
                                         {"global_minimizer", eq.is_global_minimizer}});
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "space " << format_factors(spec.factors()) << ", kappa "
            << format_double(spec.kappa()) << "\n";
  std::cout << "assignment                multiplicity  total_energy             "
               "stability  global_min\n";
  for (const auto& eq : list) {
    char line[200];
    std::snprintf(line, sizeof(line), "%-25s %-13llu %-24s %-10s %s\n",
                  assignment_text(spec, eq).c_str(),
                  static_cast<unsigned long long>(eq.multiplicity),
                  format_double(eq.total_energy).c_str(), to_string(eq.stability),
                  eq.is_global_minimizer ? "*" : "");
    std::cout << line;
  }
  return 0;
}

struct InequalityOptions {
  int d = 2;
  int trials = 100;
  std::uint64_t seed = 1;
};

VmfMixture random_mixture(std::mt19937_64& engine, SphereDim d, bool force_uniform) {
  std::uniform_int_distribution<int> comp_count(1, 3);
  std::uniform_real_distribution<double> eta_dist(0.0, 8.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> coin(0, 1);

  VmfMixture mix;
  const int n = force_uniform ? 1 : comp_count(engine);
  std::vector<double> weights(n);
  double total = 0.0;
  for (double& w : weights) {
    w = expo(engine) + 1e-12;
    total += w;
  }
  for (int j = 0; j < n; ++j) {
    VmfComponent c;
    c.weight = weights[j] / total;
    c.eta = force_uniform ? 0.0 : eta_dist(engine);
    if (d.dim() <= 2) {
      c.axis = Eigen::VectorXd(d.ambient());
      for (int r = 0; r < c.axis.size(); ++r) c.axis[r] = normal(engine);
      c.axis.normalize();
    } else {
      // entropy quadrature for general axes is limited to d <= 2
      c.axis = Eigen::VectorXd::Zero(d.ambient());
      c.axis[0] = coin(engine) ? 1.0 : -1.0;
    }
    mix.components.push_back(std::move(c));
  }
  return mix;
}

int cmd_inequality(const InequalityOptions& opt, const std::string&) {
  const SphereDim d(opt.d);
  std::mt19937_64 engine(opt.seed);
  double min_residual = std::numeric_limits<double>::infinity();
  double max_residual = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.trials; ++t) {
    const VmfMixture mix = random_mixture(engine, d, t == 0);
    const double r = entropy_inequality_residual(mix, d);
    min_residual = std::min(min_residual, r);
    max_residual = std::max(max_residual, r);
  }
  const bool pass = min_residual >= -1e-8;
  std::cout << "trials = " << opt.trials << ", d = " << opt.d << "\n"
            << "min_residual = " << format_double(min_residual) << "\n"
            << "max_residual = " << format_double(max_residual) << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-energy equilibria and particle dynamics on spheres"};
  app.set_version_flag("--version", std::string("spherelab ") + kToolVersion);
  app.require_subcommand(1);
  const std::string command_line = command_line_of(argc, argv);

  SolveOptions solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "equilibria for one (d, kappa)");
  solve_cmd->add_option("--d", solve_opt.d, "sphere dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--kappa", solve_opt.kappa, "interaction strength")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* json_flag = solve_cmd->add_flag("--json", solve_opt.as_json, "JSON output");
  solve_cmd->add_flag("--csv", solve_opt.as_csv, "CSV output")->excludes(json_flag);
  solve_cmd->add_option("--out", solve_opt.out, "also write the listing to a file");

  BifurcateOptions bif_opt;
  auto* bif_cmd = app.add_subcommand("bifurcate", "kappa sweep to a CSV curve");
  bif_cmd->add_option("--d", bif_opt.d, "sphere dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  bif_cmd->add_option("--kappa-min", bif_opt.kappa_min, "sweep start")
      ->check(CLI::PositiveNumber);
  bif_cmd->add_option("--kappa-max", bif_opt.kappa_max, "sweep end")
      ->check(CLI::PositiveNumber);
  bif_cmd->add_option("--points", bif_opt.points, "number of samples")
      ->check(CLI::Range(2, 1000000));
  bif_cmd->add_option("--spacing", bif_opt.spacing, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}));
  bif_cmd->add_option("--out", bif_opt.out, "output CSV path")->required();

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "interacting-particle SDE run");
  sim_cmd->add_option("--d", sim_opt.d, "sphere dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--kappa", sim_opt.kappa, "interaction strength")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--N", sim_opt.particles, "particle count")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--dt", sim_opt.dt, "time step")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--t-end", sim_opt.t_end, "final time")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--burn-in", sim_opt.burn_in, "discarded initial time")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim_opt.seed, "RNG seed");
  sim_cmd->add_option("--scheme", sim_opt.scheme, "project or geodesic")
      ->check(CLI::IsMember({"project", "geodesic"}));
  sim_cmd->add_option("--out", sim_opt.out, "time-series CSV path");

  ProductOptions prod_opt;
  auto* prod_cmd = app.add_subcommand("product", "equilibria on a product of spheres");
  prod_cmd->add_option("spec", prod_opt.spec_text, "e.g. S1^2xS2")->required();
  prod_cmd->add_option("--kappa", prod_opt.kappa, "interaction strength")
      ->required()
      ->check(CLI::PositiveNumber);
  prod_cmd->add_flag("--enumerate", prod_opt.enumerate,
                     "list every canonical equilibrium class");
  prod_cmd->add_flag("--json", prod_opt.as_json, "JSON output");

  InequalityOptions ineq_opt;
  auto* ineq_cmd =
      app.add_subcommand("inequality", "entropy lower bound on random vMF mixtures");
  ineq_cmd->add_option("--d", ineq_opt.d, "sphere dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  ineq_cmd->add_option("--trials", ineq_opt.trials, "number of random mixtures")
      ->check(CLI::PositiveNumber);
  ineq_cmd->add_option("--seed", ineq_opt.seed, "RNG seed");

  std::string config_path;
  for (auto* cmd : {solve_cmd, bif_cmd, sim_cmd, prod_cmd, ineq_cmd})
    cmd->add_option("--config", config_path,
                    "flat key=value file mirroring the flags; flags win");

  try {
    const std::vector<std::string> args =
        apply_config_file(std::vector<std::string>(argv, argv + argc));
    std::vector<const char*> raw;
    raw.reserve(args.size());
    for (const auto& a : args) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_opt, command_line);
    if (bif_cmd->parsed()) return cmd_bifurcate(bif_opt, command_line);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opt, command_line);
    if (prod_cmd->parsed()) return cmd_product(prod_opt, command_line);
    if (ineq_cmd->parsed()) return cmd_inequality(ineq_opt, command_line);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
