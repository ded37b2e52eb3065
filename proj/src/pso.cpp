#include "psopid/pso.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "psopid/error.hpp"

namespace psopid::pso {

namespace {

class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

void check_dims(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorKind::Configuration, std::string("dimension mismatch in ") + what);
  }
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> evaluate_all(const Objective& objective, const std::vector<Particle>& swarm,
                                 std::size_t threads) {
  std::vector<double> f(swarm.size());
  const std::size_t workers = std::min(resolve_threads(threads), swarm.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < swarm.size(); ++i) f[i] = objective(swarm[i].x);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < swarm.size(); i += workers) f[i] = objective(swarm[i].x);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw Error(ErrorKind::Objective,
                  "objective returned a non-finite value for particle " + std::to_string(i));
    }
  }
  return f;
}

}  // namespace

PsoConfig PsoConfig::with_bounds(std::vector<double> lo, std::vector<double> hi,
                                 double v_max_fraction) {
  PsoConfig cfg;
  check_dims(lo.size(), hi.size(), "bounds");
  cfg.v_max.resize(lo.size());
  for (std::size_t d = 0; d < lo.size(); ++d) cfg.v_max[d] = v_max_fraction * (hi[d] - lo[d]);
  cfg.lo = std::move(lo);
  cfg.hi = std::move(hi);
  return cfg;
}

void PsoConfig::validate() const {
  if (pop_size < 2) throw Error(ErrorKind::Configuration, "pop_size must be at least 2");
  if (max_iter < 1) throw Error(ErrorKind::Configuration, "max_iter must be at least 1");
  if (!(w_min <= w_max)) throw Error(ErrorKind::Configuration, "w_min must not exceed w_max");
  if (lo.empty()) throw Error(ErrorKind::Configuration, "search space has no dimensions");
  check_dims(lo.size(), hi.size(), "bounds");
  check_dims(lo.size(), v_max.size(), "v_max");
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d])) throw Error(ErrorKind::Configuration, "bounds require lo < hi");
    if (!(v_max[d] > 0.0)) throw Error(ErrorKind::Configuration, "v_max must be positive");
  }
}

double inertia(std::size_t iter, const PsoConfig& cfg) {
  if (iter > cfg.max_iter) {
    throw Error(ErrorKind::InvalidInput, "iteration exceeds max_iter");
  }
  return cfg.w_max -
         ((cfg.w_max - cfg.w_min) / static_cast<double>(cfg.max_iter)) * static_cast<double>(iter);
}

std::vector<double> update_velocity(const Particle& p, std::span<const double> gbest, double w,
                                    const PsoConfig& cfg, std::span<const double> r1,
                                    std::span<const double> r2) {
  const std::size_t d = p.x.size();
  check_dims(d, p.v.size(), "velocity");
  check_dims(d, p.pbest.size(), "pbest");
  check_dims(d, gbest.size(), "gbest");
  check_dims(d, r1.size(), "r1");
  check_dims(d, r2.size(), "r2");
  check_dims(d, cfg.v_max.size(), "v_max");

  std::vector<double> v(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double raw = w * p.v[j] + cfg.c1 * r1[j] * (p.pbest[j] - p.x[j]) +
                       cfg.c2 * r2[j] * (gbest[j] - p.x[j]);
    v[j] = std::clamp(raw, -cfg.v_max[j], cfg.v_max[j]);
  }
  return v;
}

std::vector<double> update_position(std::span<const double> x, std::span<const double> v,
                                    const PsoConfig& cfg) {
  check_dims(x.size(), v.size(), "position update");
  check_dims(x.size(), cfg.lo.size(), "bounds");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = std::clamp(x[j] + v[j], cfg.lo[j], cfg.hi[j]);
  }
  return out;
}

SwarmResult optimize(const Objective& objective, const PsoConfig& cfg, const PsoHooks& hooks) {
  cfg.validate();
  const std::size_t dims = cfg.dimensions();
  UniformStream rng(cfg.seed);

  std::vector<Particle> swarm(cfg.pop_size);
  for (auto& p : swarm) {
    p.x.resize(dims);
    p.v.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) p.x[d] = rng.next(cfg.lo[d], cfg.hi[d]);
    for (std::size_t d = 0; d < dims; ++d) p.v[d] = rng.next(-cfg.v_max[d], cfg.v_max[d]);
  }

  SwarmResult result;
  result.history.reserve(cfg.max_iter + 1);

  auto absorb = [&](const std::vector<double>& f, bool first) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      auto& p = swarm[i];
      if (hooks.on_evaluate) hooks.on_evaluate(i, p.x, f[i]);
      if (first || f[i] <= p.pbest_f) {
        p.pbest = p.x;
        p.pbest_f = f[i];
      }
    }
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      if ((first && i == 0) || swarm[i].pbest_f <= result.gbest_f) {
        result.gbest = swarm[i].pbest;
        result.gbest_f = swarm[i].pbest_f;
      }
    }
    result.history.push_back(result.gbest_f);
  };

  absorb(evaluate_all(objective, swarm, cfg.threads), true);
  if (hooks.on_iteration) hooks.on_iteration(0, swarm);

  std::vector<double> r1(dims);
  std::vector<double> r2(dims);
  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    const double w = inertia(iter, cfg);
    for (auto& p : swarm) {
      for (std::size_t d = 0; d < dims; ++d) {
        r1[d] = rng.next();
        r2[d] = rng.next();
      }
      if (hooks.zero_coefficients) {
        std::fill(r1.begin(), r1.end(), 0.0);
        std::fill(r2.begin(), r2.end(), 0.0);
      }
      p.v = update_velocity(p, result.gbest, w, cfg, r1, r2);
      p.x = update_position(p.x, p.v, cfg);
    }
    absorb(evaluate_all(objective, swarm, cfg.threads), false);
    if (hooks.on_iteration) hooks.on_iteration(iter + 1, swarm);
  }
  return result;
}

void write_history_csv(std::ostream& os, std::span<const double> history) {
  os << "iter,gbest_f\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) os << i << ',' << history[i] << '\n';
  os.precision(old_precision);
}

}  // namespace psopid::pso
