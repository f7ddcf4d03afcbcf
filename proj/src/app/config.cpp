#include "so3lab/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace so3lab::app {

Scenario preset(const std::string& name, ControlMode mode) {
  if (name == "v-a") return stabilization_v_a(mode);
  if (name == "v-b") return tracking_v_b(mode);
  throw ConfigError("unknown preset '" + name + "' (v-a, v-b)");
}

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) {
      os << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
    }
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number");
    }
  }

  Vec3 vec3(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 3) fail(n, what + " must be a list of three numbers");
    return Vec3(number(n[0], what), number(n[1], what), number(n[2], what));
  }

  Mat3 mat3(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 3) fail(n, what + " must be three rows of three numbers");
    Mat3 m;
    for (int i = 0; i < 3; ++i) m.row(i) = vec3(n[i], what).transpose();
    return m;
  }

  /// Runs f and re-raises library validation errors anchored at node.
  template <class F>
  auto anchored(const YAML::Node& node, F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(node, e.what());
    }
  }

  Rotation rotation(const YAML::Node& n, const std::string& what) const {
    only_keys(n, what, {"axis_angle", "euler321", "matrix"});
    if (n.size() != 1) fail(n, what + " needs exactly one of axis_angle, euler321, matrix");
    if (n["axis_angle"]) return exp_so3(vec3(n["axis_angle"], what));
    if (n["euler321"]) {
      const Vec3 e = vec3(n["euler321"], what);
      return euler321_rotation(e.x(), e.y(), e.z());
    }
    return anchored(n["matrix"], [&] { return Rotation(mat3(n["matrix"], what)); });
  }

  Gain gain(const YAML::Node& n, const std::string& what, const InertiaSpec& j0) const {
    return anchored(n, [&] {
      if (n.IsScalar()) return Gain::scalar(number(n, what));
      only_keys(n, what, {"matrix_of_inertia", "matrix"});
      if (n.size() != 1) fail(n, what + " needs exactly one of matrix_of_inertia, matrix");
      if (n["matrix_of_inertia"]) {
        const double s = number(n["matrix_of_inertia"], what);
        if (!(s > 0.0)) fail(n["matrix_of_inertia"], what + " multiplier must be positive");
        return Gain::matrix(s * j0.matrix());
      }
      return Gain::matrix(mat3(n["matrix"], what));
    });
  }

  AngleProfile angle(const YAML::Node& n, const std::string& what) const {
    if (n.IsScalar()) return AngleProfile::constant(number(n, what));
    only_keys(n, what, {"kind", "a", "b", "c"});
    if (!n["kind"]) fail(n, what + " needs a kind");
    const auto kind = n["kind"].as<std::string>();
    const double a = n["a"] ? number(n["a"], what) : 0.0;
    const double b = n["b"] ? number(n["b"], what) : 0.0;
    const double c = n["c"] ? number(n["c"], what) : 0.0;
    if (kind == "constant") return AngleProfile::constant(c);
    if (kind == "sine") return AngleProfile::sine(a, b, c);
    if (kind == "cosine") return AngleProfile::cosine(a, b, c);
    fail(n["kind"], "unknown angle kind '" + kind + "' (constant, sine, cosine)");
  }

  WeightMatrix weights(const YAML::Node& n, const std::string& what) const {
    const Vec3 w = vec3(n, what);
    return anchored(n, [&] { return WeightMatrix(w.x(), w.y(), w.z()); });
  }

  Scenario parse(const YAML::Node& root) const {
    if (!root.IsMap()) fail(root, "configuration must be a mapping");
    only_keys(root, "configuration",
              {"name", "preset", "seed", "inertia", "weights", "gains", "initial", "trajectory", "integrator",
               "mode", "open_loop", "certificate"});

    ControlMode mode = ControlMode::VelocityFree;
    if (const auto m = root["mode"]) {
      mode = anchored(m, [&] { return control_mode_from_string(m.as<std::string>()); });
    }
    Scenario s;
    if (const auto p = root["preset"]) s = anchored(p, [&] { return preset(p.as<std::string>(), mode); });
    s.mode = mode;
    if (const auto n = root["name"]) s.name = n.as<std::string>();
    if (const auto n = root["seed"]) {
      const double v = number(n, "seed");
      if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) fail(n, "seed must be a non-negative integer");
      s.seed = static_cast<std::uint64_t>(v);
    }

    if (const auto n = root["inertia"]) {
      only_keys(n, "inertia", {"diagonal", "matrix"});
      if (n.size() != 1) fail(n, "inertia needs exactly one of diagonal, matrix");
      if (n["diagonal"]) {
        const Vec3 d = vec3(n["diagonal"], "inertia.diagonal");
        s.inertia = anchored(n["diagonal"], [&] { return InertiaSpec::diagonal(d.x(), d.y(), d.z()); });
      } else {
        const Mat3 m = mat3(n["matrix"], "inertia.matrix");
        s.inertia = anchored(n["matrix"], [&] { return InertiaSpec(m); });
      }
    }
    if (const auto n = root["weights"]) {
      only_keys(n, "weights", {"G", "G_E"});
      if (n["G"]) s.G = weights(n["G"], "weights.G");
      if (n["G_E"]) s.G_E = weights(n["G_E"], "weights.G_E");
    }
    if (const auto n = root["gains"]) {
      only_keys(n, "gains", {"k_R", "k_Omega", "k_E", "k_v"});
      if (n["k_R"]) s.controller.k_R = gain(n["k_R"], "gains.k_R", s.inertia);
      if (n["k_Omega"]) s.controller.k_Omega = gain(n["k_Omega"], "gains.k_Omega", s.inertia);
      if (n["k_E"]) s.observer.k_E = gain(n["k_E"], "gains.k_E", s.inertia);
      if (n["k_v"]) s.observer.k_v = gain(n["k_v"], "gains.k_v", s.inertia);
    }
    if (const auto n = root["initial"]) {
      only_keys(n, "initial", {"R", "Omega", "R_bar", "omega_bar"});
      if (n["R"]) s.R0 = rotation(n["R"], "initial.R");
      if (n["Omega"]) s.Omega0 = vec3(n["Omega"], "initial.Omega");
      if (n["R_bar"]) s.R_bar0 = rotation(n["R_bar"], "initial.R_bar");
      if (n["omega_bar"]) s.omega_bar0 = vec3(n["omega_bar"], "initial.omega_bar");
    }
    if (const auto n = root["trajectory"]) {
      only_keys(n, "trajectory", {"type", "R_d", "yaw", "pitch", "roll"});
      const std::string type = n["type"] ? n["type"].as<std::string>() : "setpoint";
      if (type == "setpoint") {
        if (n["yaw"] || n["pitch"] || n["roll"]) fail(n, "setpoint trajectories take only R_d");
        s.trajectory = Setpoint{n["R_d"] ? rotation(n["R_d"], "trajectory.R_d") : Rotation::identity()};
      } else if (type == "euler321") {
        if (n["R_d"]) fail(n["R_d"], "euler321 trajectories take yaw, pitch and roll");
        Euler321Trajectory e;
        if (n["yaw"]) e.yaw = angle(n["yaw"], "trajectory.yaw");
        if (n["pitch"]) e.pitch = angle(n["pitch"], "trajectory.pitch");
        if (n["roll"]) e.roll = angle(n["roll"], "trajectory.roll");
        s.trajectory = e;
      } else {
        fail(n["type"], "unknown trajectory type '" + type + "' (setpoint, euler321)");
      }
    }
    if (const auto n = root["integrator"]) {
      only_keys(n, "integrator", {"step", "duration", "decimation"});
      if (n["step"]) {
        s.step = number(n["step"], "integrator.step");
        if (!(s.step > 0.0)) fail(n["step"], "integrator.step must be positive");
      }
      if (n["duration"]) {
        s.duration = number(n["duration"], "integrator.duration");
        if (!(s.duration >= s.step)) fail(n["duration"], "integrator.duration must be at least one step");
      }
      if (n["decimation"]) {
        const double d = number(n["decimation"], "integrator.decimation");
        if (d < 1 || d != static_cast<int>(d)) fail(n["decimation"], "integrator.decimation must be a positive integer");
        s.decimation = static_cast<int>(d);
      }
    }
    if (const auto n = root["open_loop"]) {
      only_keys(n, "open_loop", {"constant", "amplitude", "frequency", "frame"});
      if (n["constant"]) s.open_loop.constant = vec3(n["constant"], "open_loop.constant");
      if (n["amplitude"]) s.open_loop.amplitude = vec3(n["amplitude"], "open_loop.amplitude");
      if (n["frequency"]) s.open_loop.frequency = number(n["frequency"], "open_loop.frequency");
      if (n["frame"]) {
        const auto f = n["frame"].as<std::string>();
        if (f != "body" && f != "inertial") fail(n["frame"], "open_loop.frame must be body or inertial");
        s.open_loop.inertial_frame = f == "inertial";
      }
    }
    if (const auto n = root["certificate"]) {
      only_keys(n, "certificate", {"psi", "psi_bar_E"});
      if (n["psi"]) s.psi = number(n["psi"], "certificate.psi");
      if (n["psi_bar_E"]) s.psi_bar_E = number(n["psi_bar_E"], "certificate.psi_bar_E");
    }
    anchored(root, [&] {
      s.validate();
      return 0;
    });
    return s;
  }

 private:
  std::string source_;
};

}  // namespace

Scenario parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  try {
    return Parser(source).parse(root);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace so3lab::app
