#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "so3lab/simulation.hpp"

namespace so3lab::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitBlowup = 3,
  kExitValidation = 4,
};

struct ScenarioArgs {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::string> mode;
  std::optional<double> duration;
  std::optional<double> step;
};

/// Config file (if any) on top of the preset (if any), then the overrides.
/// Throws ConfigError when neither a config nor a preset is given.
Scenario resolve_scenario(const ScenarioArgs& a);

/// Canonical key=value description of every scenario field.
std::string describe_scenario(const Scenario& s);
/// 64-bit FNV-1a of describe_scenario, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

struct SimulateArgs : ScenarioArgs {
  std::optional<std::string> out;
  bool with_V = false;
};

struct CertifyArgs : ScenarioArgs {
  bool simulate = false;
};

struct MonteCarloArgs : ScenarioArgs {
  int n = 100;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  std::optional<int> equilibrium;
  double perturbation = 0.0;
  int threads = 0;
};

struct ValidateArgs : ScenarioArgs {
  /// Coarsest step of the h, h/2, h/4 ladder; defaults to 4x the scenario step.
  std::optional<double> coarse_step;
  bool inject_fault = false;
};

/// Each command writes key=value lines to `out`, diagnostics to `err`, and
/// returns an ExitCode.
int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err);
int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const MonteCarloArgs& a, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err);

}  // namespace so3lab::app
