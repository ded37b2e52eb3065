#pragma once

// Particle swarm optimizer (minimization) with linearly decaying inertia:
//
//   v' = w v + c1 r1 o (pbest - x) + c2 r2 o (gbest - x),  clamped to +-v_max
//   x' = clamp(x + v', lo, hi)
//   w(t) = w_max - ((w_max - w_min) / max_iter) t
//
// Random stream (64-bit Mersenne Twister, 53-bit uniforms), in order:
//   init:      for each particle { for each dim: x }, then { for each dim: v }
//   iteration: for each particle { for each dim: r1, r2 }
// The order is part of the reproducibility contract.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace psopid::pso {

struct PsoConfig {
  std::size_t pop_size = 20;
  std::size_t max_iter = 30;
  double c1 = 2.0;
  double c2 = 2.0;
  double w_min = 0.5;
  double w_max = 0.9;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> v_max;
  std::uint64_t seed = 0;
  /// Concurrent objective evaluations; 0 means hardware concurrency.
  std::size_t threads = 1;

  /// Bounds with v_max = fraction * (hi - lo) per dimension.
  static PsoConfig with_bounds(std::vector<double> lo, std::vector<double> hi,
                               double v_max_fraction = 0.2);

  [[nodiscard]] std::size_t dimensions() const noexcept { return lo.size(); }
  void validate() const;
};

struct Particle {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> pbest;
  double pbest_f = 0.0;
};

struct SwarmResult {
  std::vector<double> gbest;
  double gbest_f = 0.0;
  /// history[0] is the initial swarm's best, history[t] the best after
  /// iteration t; length max_iter + 1.
  std::vector<double> history;
};

using Objective = std::function<double(std::span<const double>)>;

struct PsoHooks {
  /// Called after every evaluation, in particle order, on the calling thread.
  std::function<void(std::size_t particle, std::span<const double> x, double f)> on_evaluate;
  /// Called after each iteration's pbest/gbest update (iteration 0 = init).
  std::function<void(std::size_t iter, const std::vector<Particle>& swarm)> on_iteration;
  /// Forces r1 = r2 = 0 (the stream is still consumed).
  bool zero_coefficients = false;
};

double inertia(std::size_t iter, const PsoConfig& cfg);

std::vector<double> update_velocity(const Particle& p, std::span<const double> gbest, double w,
                                    const PsoConfig& cfg, std::span<const double> r1,
                                    std::span<const double> r2);

std::vector<double> update_position(std::span<const double> x, std::span<const double> v,
                                    const PsoConfig& cfg);

/// The objective must be safe to call concurrently when threads != 1.
/// Non-finite objective values raise an Objective error naming the particle.
SwarmResult optimize(const Objective& objective, const PsoConfig& cfg, const PsoHooks& hooks = {});

/// Writes `iter,gbest_f` rows.
void write_history_csv(std::ostream& os, std::span<const double> history);

}  // namespace psopid::pso
