#pragma once

// Experiment orchestration: the decentralized closed loop, the PSO objective
// over the stacked gain vector, and the Z-N versus PSO-PID comparison runs.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "psopid/config.hpp"
#include "psopid/metrics.hpp"
#include "psopid/pid.hpp"
#include "psopid/plant.hpp"
#include "psopid/report.hpp"
#include "psopid/tsfuzzy.hpp"

namespace psopid::harness {

/// Objective value for a closed loop that diverged.
inline constexpr double kPenalty = 1e12;

struct ClosedLoopOptions {
  plant::InputBounds bounds;
  bool anti_windup = true;
};

struct ClosedLoopResult {
  /// (k, applied u(k), y(k)) for every completed step.
  plant::Trajectory trajectory;
  metrics::ErrorTrajectory errors;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;
};

/// At each k: e = r - y(k), u(k) = saturate(C(e)), plant advances with u(k).
/// Divergence ends the run and is returned as data.
ClosedLoopResult closed_loop(const plant::DiscretePlant& plant, const pid::MimoPidGains& gains,
                             std::span<const double> reference, std::size_t sim_len, double ts,
                             const ClosedLoopOptions& options = {});

/// kPenalty for diverged (or empty) runs, otherwise the chosen index.
double index_or_penalty(const ClosedLoopResult& run, metrics::Index index);

ClosedLoopOptions loop_options(const ExperimentConfig& cfg);

using GainObjective = std::function<double(std::span<const double>)>;

/// Decodes [kp1, ki1, kd1, kp2, ki2, kd2], simulates, and scores with `index`.
GainObjective make_objective(const ExperimentConfig& cfg, metrics::Index index);
GainObjective make_objective(const ExperimentConfig& cfg);

/// Closed-loop run of `gains` with step statistics and all three indices.
/// Writes the trajectory CSV when `trajectory_path` is non-empty.
ControllerEvaluation evaluate_controller(const ExperimentConfig& cfg,
                                         const pid::MimoPidGains& gains,
                                         const std::filesystem::path& trajectory_path = {});

struct RunPlan {
  bool zn = true;
  std::vector<metrics::Index> pso_indices{metrics::Index::IAE, metrics::Index::ISE,
                                          metrics::Index::ITSE};
};

/// Runs the requested methods, writes report.json, tables.md, and the
/// trajectory/convergence CSVs into `out_dir`, and returns the report.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunPlan& plan,
                                const std::filesystem::path& out_dir);

/// Z-N open and closed loop, then PSO for every index and seed.
ExperimentReport run_comparison(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Uniform random inputs over the input bounds driving the plant from rest.
plant::Trajectory excitation_run(const ExperimentConfig& cfg);

struct IdentifyResult {
  std::vector<tsfuzzy::Identification> channels;
};

/// One MISO model per plant output, using the configured rules/lags/alpha0.
IdentifyResult identify_plant(const ExperimentConfig& cfg, std::span<const tsfuzzy::IoSample> log);

}  // namespace psopid::harness
