#pragma once

#include <string>

#include "so3lab/errors.hpp"
#include "so3lab/simulation.hpp"

namespace so3lab::app {

/// Configuration problem; the message is prefixed with "<source>:<line>:<column>: "
/// whenever the offending node is known.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Named scenario: "v-a" or "v-b".
Scenario preset(const std::string& name, ControlMode mode = ControlMode::VelocityFree);

/// Parses a YAML scenario. Top-level keys:
///   name, preset, seed,
///   inertia:    {diagonal: [j1, j2, j3]} | {matrix: [[...], [...], [...]]}
///   weights:    {G: [g1, g2, g3], G_E: [e1, e2, e3]}
///   gains:      {k_R, k_Omega, k_E, k_v}, each a scalar, {matrix_of_inertia: s} or {matrix: [[...]]}
///   initial:    {R, Omega, R_bar, omega_bar}; rotations as {axis_angle: [...]},
///               {euler321: [yaw, pitch, roll]} or {matrix: [[...]]}
///   trajectory: {type: setpoint, R_d: <rotation>} |
///               {type: euler321, yaw: <angle>, pitch: <angle>, roll: <angle>}
///               with <angle> a number or {kind: constant|sine|cosine, a, b, c}
///   integrator: {step, duration, decimation}
///   mode:       full-state | velocity-free | open-loop
///   open_loop:  {constant: [...], amplitude: [...], frequency, frame: body|inertial}
///   certificate: {psi, psi_bar_E}
/// A `preset` key seeds every field before the remaining keys override it.
/// Unknown keys and invalid values raise ConfigError.
Scenario parse_config(const std::string& text, const std::string& source = "<config>");
Scenario load_config(const std::string& path);

}  // namespace so3lab::app
