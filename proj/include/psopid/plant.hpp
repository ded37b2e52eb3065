#pragma once

// Discrete-time plants driven by the controllers and tuners.
//
// The benchmark plant is the two-input/two-output nonlinear difference system
//
//   y1(k) = a1 y1(k-1) y2(k-1) / (1 + a2 y1(k-1)^2 + a3 y2(k-1)^2)
//           + a4 u1(k-2) + a5 u1(k-1) + a6 u2(k-1)
//   y2(k) = b1 y2(k-1) sin(y2(k-2)) / (1 + b2 y2(k-1)^2 + b3 y1(k-1)^2)
//           + b4 u2(k-2) + b5 u2(k-1) + b6 u1(k-1)
//
// Every output depends only on past samples, so y(k) is known before u(k) is
// chosen. Time is purely in step indices here; a sample time only appears in
// reporting.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace psopid::plant {

using Vec2 = std::array<double, 2>;

/// |y| above this (or non-finite) is reported as divergence.
inline constexpr double kDivergenceLimit = 1e6;

/// a[0..5] = a1..a6, b[0..5] = b1..b6. Defaults are the benchmark values.
struct PlantParams {
  std::array<double, 6> a{0.7, 1.0, 1.0, 0.3, 1.0, 0.2};
  std::array<double, 6> b{0.5, 1.0, 1.0, 0.5, 1.0, 0.2};

  void validate() const;
};

/// Lag buffers; index 0 is the most recent sample. At step k the buffers hold
/// y(k-1), y(k-2), u(k-1), u(k-2).
struct PlantState {
  Vec2 y1_hist{};
  Vec2 y2_hist{};
  Vec2 u1_hist{};
  Vec2 u2_hist{};
  std::size_t k = 0;

  void validate() const;
};

struct InputBounds {
  double lo = -2.0;
  double hi = 2.0;

  void validate() const;
};

std::vector<double> saturate(std::span<const double> u, const InputBounds& bounds);

/// y(k) from the current lag buffers.
Vec2 plant_output(const PlantState& state, const PlantParams& params);

struct StepResult {
  PlantState state;
  Vec2 y;
};

/// Computes y(k), then shifts u(k) and y(k) into the buffers and advances k.
/// Throws DivergenceError carrying k.
StepResult plant_step(const PlantState& state, const PlantParams& params, const Vec2& u);

struct TrajectorySample {
  std::size_t k = 0;
  std::vector<double> u;
  std::vector<double> y;
};

using Trajectory = std::vector<TrajectorySample>;

/// Saturates each input, then folds plant_step from the zero state.
Trajectory simulate_open_loop(const PlantParams& params, std::span<const Vec2> u_sequence,
                              const InputBounds& bounds);

/// CSV with header `k,t,u1..un,y1..yn`, t = k*ts, 12 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double ts);
Trajectory read_trajectory_csv(std::istream& is);

/// Generic plant interface used by closed-loop simulation and tuning.
class DiscretePlant {
 public:
  virtual ~DiscretePlant() = default;

  [[nodiscard]] virtual std::size_t channels() const = 0;
  [[nodiscard]] virtual std::size_t step_index() const = 0;
  /// y(k) for the current step; does not depend on u(k).
  [[nodiscard]] virtual std::vector<double> output() const = 0;
  /// Applies u(k) and moves to k+1.
  virtual void advance(std::span<const double> u) = 0;
  virtual void reset() = 0;
  [[nodiscard]] virtual std::unique_ptr<DiscretePlant> clone() const = 0;
};

class BenchmarkPlant final : public DiscretePlant {
 public:
  explicit BenchmarkPlant(PlantParams params = {}, PlantState initial = {});

  [[nodiscard]] std::size_t channels() const override { return 2; }
  [[nodiscard]] std::size_t step_index() const override { return state_.k; }
  [[nodiscard]] std::vector<double> output() const override;
  void advance(std::span<const double> u) override;
  void reset() override { state_ = initial_; }
  [[nodiscard]] std::unique_ptr<DiscretePlant> clone() const override;

  [[nodiscard]] const PlantParams& params() const noexcept { return params_; }
  [[nodiscard]] const PlantState& state() const noexcept { return state_; }

 private:
  PlantParams params_;
  PlantState initial_;
  PlantState state_;
};

/// Decoupled linear channels:
///   y_i(k) = sum_j a_i[j] y_i(k-1-j) + sum_j b_i[j] u_i(k-1-j)
/// Used as a test system with analytically known closed-loop behavior.
class ArxPlant final : public DiscretePlant {
 public:
  struct Channel {
    std::vector<double> a;
    std::vector<double> b;
  };

  explicit ArxPlant(std::vector<Channel> channels);
  ArxPlant(std::vector<double> a, std::vector<double> b);

  [[nodiscard]] std::size_t channels() const override { return channels_.size(); }
  [[nodiscard]] std::size_t step_index() const override { return k_; }
  [[nodiscard]] std::vector<double> output() const override;
  void advance(std::span<const double> u) override;
  void reset() override;
  [[nodiscard]] std::unique_ptr<DiscretePlant> clone() const override;

 private:
  std::vector<Channel> channels_;
  std::vector<std::vector<double>> y_hist_;
  std::vector<std::vector<double>> u_hist_;
  std::size_t k_ = 0;
};

}  // namespace psopid::plant
