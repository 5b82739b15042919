// Command-line front end for the experiment harness.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 threshold failure in --check mode.

#include "ghdg/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for the damped time-harmonic Galbrun equation"};
  std::string config_path, mode;
  ghdg::RunConfig cli;
  bool check = false, no_best = false;
  app.add_option("-c,--config", config_path, "TOML configuration file");
  auto* o_exp = app.add_option("--experiment", cli.experiment, "convergence | mach | sip | solar");
  auto* o_method = app.add_option("--method", cli.method, "full | reduced");
  auto* o_k = app.add_option("--k", cli.k, "volume polynomial degree");
  auto* o_levels = app.add_option("--levels", cli.levels, "number of refinement levels");
  auto* o_alpha = app.add_option("--alpha", cli.alpha, "divergence penalty (times k^2)");
  auto* o_mode = app.add_option("--mode", mode, "lifting | sip");
  auto* o_lambda = app.add_option("--lambda", cli.lambda, "SIP convection penalty (times k^2)");
  auto* o_lambdas = app.add_option("--lambdas", cli.lambdas, "SIP penalties for the sip study (times k^2)");
  auto* o_preset = app.add_option("--preset", cli.preset, "square-manufactured | paper-disk | solar");
  auto* o_solution = app.add_option("--solution", cli.solution, "manufactured solution or none");
  auto* o_flow = app.add_option("--flow", cli.flow, "background flow kind: 1 | cs | cs/rho");
  auto* o_mach = app.add_option("--mach", cli.mach, "Mach number max |b|/c_s");
  auto* o_sched = app.add_option("--mach-schedule", cli.mach_schedule, "Mach numbers for the mach/solar studies");
  auto* o_csv = app.add_option("--solar-csv", cli.solar_csv, "solar model CSV (radius, soundspeed, density[, pressure])");
  auto* o_dump = app.add_option("--dump-dir", cli.dump_dir, "directory for solar raster dumps");
  auto* o_out = app.add_option("-o,--out", cli.out, "CSV output path (default stdout)");
  auto* o_svg = app.add_option("--svg", cli.svg, "optional SVG plot of the error curves");
  auto* o_qm = app.add_option("--quad-margin", cli.quad_margin, "quadrature exactness margin over 2k");
  auto* o_seed = app.add_option("--seed", cli.seed, "seed recorded in the metadata");
  app.add_flag("--no-best", no_best, "skip the best-approximation rows");
  app.add_flag("--check", check, "exit 4 when a threshold is violated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  ghdg::RunConfig c;
  try {
    if (!config_path.empty()) c = ghdg::load_config(config_path);
    auto set = [](CLI::Option* o, auto& dst, const auto& src) {
      if (o->count()) dst = src;
    };
    set(o_exp, c.experiment, cli.experiment);
    set(o_method, c.method, cli.method);
    set(o_k, c.k, cli.k);
    set(o_levels, c.levels, cli.levels);
    set(o_alpha, c.alpha, cli.alpha);
    set(o_lambda, c.lambda, cli.lambda);
    set(o_lambdas, c.lambdas, cli.lambdas);
    set(o_preset, c.preset, cli.preset);
    set(o_solution, c.solution, cli.solution);
    set(o_flow, c.flow, cli.flow);
    set(o_mach, c.mach, cli.mach);
    set(o_sched, c.mach_schedule, cli.mach_schedule);
    set(o_csv, c.solar_csv, cli.solar_csv);
    set(o_dump, c.dump_dir, cli.dump_dir);
    set(o_out, c.out, cli.out);
    set(o_svg, c.svg, cli.svg);
    set(o_qm, c.quad_margin, cli.quad_margin);
    set(o_seed, c.seed, cli.seed);
    if (o_mode->count()) {
      if (mode == "lifting") c.conv_mode = ghdg::ConvMode::Lifting;
      else if (mode == "sip") c.conv_mode = ghdg::ConvMode::Sip;
      else throw ghdg::ConfigError("--mode must be 'lifting' or 'sip'");
    }
    if (no_best) c.best = false;
    // The solar study defaults to the solar preset, which has no manufactured solution.
    if (c.experiment == "solar" && !o_preset->count() && c.preset == "square-manufactured") c.preset = "solar";
    if (c.preset == "solar" && !o_solution->count() && c.solution == "square-trig") c.solution = "none";
    c.validate();
  } catch (const ghdg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  ghdg::RunResult r;
  try {
    r = ghdg::run_experiment(c);
  } catch (const ghdg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ghdg::SolarLoadError& e) {
    std::cerr << "solar model error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ghdg::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ghdg::AssemblyError& e) {
    std::cerr << "assembly failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return kExitSolver;
  }

  try {
    if (c.out.empty()) {
      ghdg::write_csv(std::cout, c, r);
    } else {
      std::ofstream os(c.out);
      if (!os) throw std::runtime_error("cannot open " + c.out + " for writing");
      ghdg::write_csv(os, c, r);
    }
    if (!c.svg.empty()) ghdg::write_svg(c.svg, r);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }

  for (const std::string& f : r.failures) std::cerr << "failure: " << f << '\n';
  if (check) {
    const auto v = ghdg::check_thresholds(c, r);
    for (const std::string& s : v) std::cerr << "check: " << s << '\n';
    if (!v.empty()) return r.failures.empty() ? kExitCheck : kExitSolver;
    return 0;
  }
  return r.failures.empty() ? 0 : kExitSolver;
}
