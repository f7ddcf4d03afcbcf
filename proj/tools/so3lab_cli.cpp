#include <iostream>

#include <CLI11.hpp>

#include "so3lab/app/commands.hpp"

namespace {

void scenario_options(CLI::App* cmd, so3lab::app::ScenarioArgs& a) {
  cmd->add_option("config", a.config, "YAML scenario file");
  cmd->add_option("--preset", a.preset, "built-in scenario")->check(CLI::IsMember({"v-a", "v-b"}));
  cmd->add_option("--mode", a.mode, "full-state, velocity-free or open-loop");
  cmd->add_option("--duration", a.duration, "override the simulated time (s)");
  cmd->add_option("--step", a.step, "override the integrator step (s)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace so3lab::app;
  CLI::App app{"Attitude observer and velocity-free tracking simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "integrate a scenario, write CSV and a run report");
  scenario_options(simulate, sim);
  simulate->add_option("--out", sim.out, "CSV output path");
  simulate->add_flag("--with-V", sim.with_V, "add the separation Lyapunov function column when certifiable");

  CertifyArgs cert;
  auto* certify = app.add_subcommand("certify", "check the separation certificate conditions");
  scenario_options(certify, cert);
  certify->add_flag("--simulate", cert.simulate, "also simulate and report convergence");

  MonteCarloArgs mc;
  auto* montecarlo = app.add_subcommand("montecarlo", "random initial estimates, terminal classification");
  scenario_options(montecarlo, mc);
  montecarlo->add_option("--n", mc.n, "number of runs");
  montecarlo->add_option("--seed", mc.seed, "base seed");
  montecarlo->add_option("--out", mc.out, "CSV output path");
  montecarlo->add_option("--equilibrium", mc.equilibrium, "start at Q_E = D_i (1..3) or I (0) instead of sampling");
  montecarlo->add_option("--perturbation", mc.perturbation, "rotation angle applied to the equilibrium start");
  montecarlo->add_option("--threads", mc.threads, "worker count (default SO3LAB_THREADS or all cores)");

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "finite-difference check of the error dynamics");
  scenario_options(validate, val);
  validate->add_option("--coarse-step", val.coarse_step, "largest step of the h, h/2, h/4 ladder");
  validate->add_flag("--inject-fault", val.inject_fault, "corrupt one logged sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*simulate) return cmd_simulate(sim, std::cout, std::cerr);
  if (*certify) return cmd_certify(cert, std::cout, std::cerr);
  if (*montecarlo) return cmd_montecarlo(mc, std::cout, std::cerr);
  return cmd_validate(val, std::cout, std::cerr);
}
