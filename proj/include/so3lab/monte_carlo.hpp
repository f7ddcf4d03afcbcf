#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "so3lab/simulation.hpp"

namespace so3lab {

/// Uniform (Haar) rotation from a normalized Gaussian quaternion.
Rotation haar_rotation(std::mt19937_64& rng);

/// Uniform point in the ball of the given radius.
Vec3 uniform_ball(std::mt19937_64& rng, double radius);

/// Initial estimates: R_bar(0) Haar-random, omega_bar(0) uniform in a ball (rad/s).
/// With `equilibrium` set, every run instead starts at Q_E = D_i with e_wE = 0,
/// rotated by exp(perturbation * random unit axis).
struct EstimateSampler {
  double omega_bar_radius = 3.0;
  std::optional<int> equilibrium;
  double perturbation = 0.0;
};

/// R_bar(0), omega_bar(0) for the scenario placing Q_E at D_i (or I for index 0)
/// with the estimate matching the true velocity, then rotating R_bar(0) by exp(delta).
std::pair<Rotation, Vec3> estimate_at_equilibrium(const Scenario& s, int index, const Vec3& delta);

struct MonteCarloRun {
  int index = 0;
  Rotation R_bar0;
  Vec3 omega_bar0 = Vec3::Zero();
  EquilibriumClass terminal;
  /// First time after which ||e_RE|| + ||omega - omega_bar|| stays below the threshold.
  std::optional<double> time_to_threshold;
  double max_Psi_E = 0.0;
  double terminal_estimate_error = 0.0;
};

struct MonteCarloReport {
  std::vector<MonteCarloRun> runs;
  int desired = 0;
  std::array<int, 3> undesired{0, 0, 0};
  int not_equilibrium = 0;
};

struct MonteCarloOptions {
  int n = 100;
  std::uint64_t seed = 0;
  EstimateSampler sampler;
  double threshold = 1e-4;
  double classify_tol = kEquilibriumTolerance;
  /// Worker count; 0 reads SO3LAB_THREADS and falls back to the hardware concurrency.
  int threads = 0;
};

/// Worker count from SO3LAB_THREADS, else std::thread::hardware_concurrency().
int default_worker_count();

/// Simulates one run of the base scenario from the given initial estimate.
MonteCarloRun simulate_estimate(const Scenario& base, int index, const Rotation& R_bar0, const Vec3& omega_bar0,
                                double threshold, double classify_tol);

/// Independent runs distributed over a worker pool; run i draws its initial
/// estimate from an engine seeded by (seed, i), so the result does not depend
/// on the worker count or completion order. Throws InvalidScenario if n < 1.
MonteCarloReport monte_carlo(const Scenario& base, const MonteCarloOptions& options);

/// run_id,terminal_class,time_to_threshold,max_PsiE rows plus a summary comment line.
std::string format_monte_carlo_csv(const MonteCarloReport& r);

}  // namespace so3lab
