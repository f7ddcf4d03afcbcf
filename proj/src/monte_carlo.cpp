#include "so3lab/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Geometry>

#include "so3lab/errors.hpp"

namespace so3lab {

Rotation haar_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng));
  } while (q.norm() < 1e-12);
  q.normalize();
  return project_to_rotation(q.toRotationMatrix());
}

Vec3 uniform_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(u(rng), u(rng), u(rng));
  } while (v.squaredNorm() > 1.0);
  return radius * v;
}

std::pair<Rotation, Vec3> estimate_at_equilibrium(const Scenario& s, int index, const Vec3& delta) {
  // Q_E = R R_bar^T = D  <=>  R_bar = D^T R
  const Rotation d = index == 0 ? Rotation::identity() : undesired_equilibrium(index);
  const Rotation r_bar = exp_so3(delta) * (d.transpose() * s.R0);
  return {r_bar, s.R0 * s.Omega0};
}

int default_worker_count() {
  if (const char* env = std::getenv("SO3LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MonteCarloRun simulate_estimate(const Scenario& base, int index, const Rotation& R_bar0, const Vec3& omega_bar0,
                                double threshold, double classify_tol) {
  Scenario s = base;
  s.R_bar0 = R_bar0;
  s.omega_bar0 = omega_bar0;

  MonteCarloRun r;
  r.index = index;
  r.R_bar0 = R_bar0;
  r.omega_bar0 = omega_bar0;
  std::optional<double> below_since;
  RunOptions opt;
  opt.store_samples = false;
  opt.on_step = [&](const LogSample& l) {
    r.max_Psi_E = std::max(r.max_Psi_E, l.Psi_E);
    const double err = l.e_RE.norm() + l.velocity_error.norm();
    if (err < threshold) {
      if (!below_since) below_since = l.t;
    } else {
      below_since.reset();
    }
  };
  const TrajectoryLog log = run(s, opt);
  const LogSample& last = log.samples.back();
  r.time_to_threshold = below_since;
  r.terminal_estimate_error = last.e_RE.norm() + last.velocity_error.norm();

  const SimState x{{last.R, last.Omega}, {last.R_bar, last.p_bar}};
  r.terminal = classify_equilibrium(compute_estimate_errors(s.inertia, s.G_E, s.observer, x.body, x.obs),
                                    classify_tol);
  return r;
}

MonteCarloReport monte_carlo(const Scenario& base, const MonteCarloOptions& o) {
  if (o.n < 1) throw InvalidScenario("monte carlo needs n >= 1");
  base.validate();

  std::vector<MonteCarloRun> runs(static_cast<std::size_t>(o.n));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int i = next++; i < o.n; i = next++) {
      try {
        std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        Rotation r;
        Vec3 w;
        if (o.sampler.equilibrium) {
          Vec3 axis = uniform_ball(rng, 1.0);
          while (axis.norm() < 1e-3) axis = uniform_ball(rng, 1.0);
          std::tie(r, w) = estimate_at_equilibrium(base, *o.sampler.equilibrium,
                                                   o.sampler.perturbation * axis.normalized());
        } else {
          r = haar_rotation(rng);
          w = uniform_ball(rng, o.sampler.omega_bar_radius);
        }
        runs[static_cast<std::size_t>(i)] = simulate_estimate(base, i, r, w, o.threshold, o.classify_tol);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int workers = std::clamp(o.threads > 0 ? o.threads : default_worker_count(), 1, o.n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloReport rep;
  rep.runs = std::move(runs);
  for (const MonteCarloRun& r : rep.runs) {
    switch (r.terminal.kind) {
      case EquilibriumClass::Kind::Desired:
        ++rep.desired;
        break;
      case EquilibriumClass::Kind::Undesired:
        ++rep.undesired[static_cast<std::size_t>(r.terminal.index - 1)];
        break;
      case EquilibriumClass::Kind::NotEquilibrium:
        ++rep.not_equilibrium;
        break;
    }
  }
  return rep;
}

std::string format_monte_carlo_csv(const MonteCarloReport& r) {
  std::ostringstream os;
  char buf[64];
  os << "run_id,terminal_class,time_to_threshold,max_PsiE\n";
  for (const MonteCarloRun& run : r.runs) {
    os << run.index << ',' << run.terminal.label() << ',';
    if (run.time_to_threshold) {
      std::snprintf(buf, sizeof buf, "%.17g", *run.time_to_threshold);
      os << buf;
    } else {
      os << "none";
    }
    std::snprintf(buf, sizeof buf, "%.17g", run.max_Psi_E);
    os << ',' << buf << '\n';
  }
  os << "# desired=" << r.desired << " undesired1=" << r.undesired[0] << " undesired2=" << r.undesired[1]
     << " undesired3=" << r.undesired[2] << " not_equilibrium=" << r.not_equilibrium << '\n';
  return os.str();
}

}  // namespace so3lab
