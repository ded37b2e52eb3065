#pragma once

// Experiment configuration and its JSON schema. Every object level rejects
// unknown keys; omitted keys keep the defaults below.
//
// {
//   "plant":        {"a": [6 numbers], "b": [6 numbers]},
//   "reference":    [r1, r2],
//   "sim_len":      500,
//   "ts":           0.01,
//   "input_bounds": {"lo": -2, "hi": 2},
//   "gain_bounds":  {"lo": 0 | [6], "hi": 1 | [6]},
//   "pso":          {"pop_size", "max_iter", "c1", "c2", "w_min", "w_max", "v_max_fraction"},
//   "index":        "IAE" | "ISE" | "ITSE",
//   "seeds":        [1, 2, ...],
//   "output_dir":   "runs/latest",
//   "anti_windup":  true,
//   "gains":        [kp1, ki1, kd1, kp2, ki2, kd2],
//   "zn":           {"kind", "step_amplitude", "sim_len", "kp_start", "growth", "max_kp"},
//   "identify":     {"samples", "rules", "lags", "alpha0", "seed"},
//   "threads":      0
// }

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psopid/metrics.hpp"
#include "psopid/plant.hpp"
#include "psopid/zn.hpp"

namespace psopid::harness {

struct PsoSettings {
  std::size_t pop_size = 20;
  std::size_t max_iter = 30;
  double c1 = 2.0;
  double c2 = 2.0;
  double w_min = 0.5;
  double w_max = 0.9;
  double v_max_fraction = 0.2;
};

struct ZnOptions {
  zn::ControllerKind kind = zn::ControllerKind::PID;
  double step_amplitude = 1.0;
  std::size_t sim_len = 500;
  double kp_start = 0.05;
  double growth = 1.05;
  double max_kp = 100.0;
};

struct IdentifyOptions {
  std::size_t samples = 1000;
  std::size_t rules = 4;
  std::size_t lags = 2;
  double alpha0 = 1e4;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  plant::PlantParams plant;
  std::vector<double> reference{1.0, 1.0};
  std::size_t sim_len = 500;
  double ts = 0.01;
  plant::InputBounds input_bounds;
  std::vector<double> gain_lo = std::vector<double>(6, 0.0);
  std::vector<double> gain_hi = std::vector<double>(6, 1.0);
  PsoSettings pso;
  metrics::Index index = metrics::Index::ISE;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string output_dir = "runs/latest";
  bool anti_windup = true;
  /// Controller for `simulate`; empty means all-zero gains.
  std::vector<double> gains;
  ZnOptions zn;
  IdentifyOptions identify;
  /// Concurrent objective evaluations (0 = auto). PSO_PID_THREADS overrides.
  std::size_t threads = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Throws Error(Configuration) when the file is missing or malformed.
ExperimentConfig load_config(const std::filesystem::path& path);

/// PSO_PID_THREADS when set, otherwise cfg.threads.
std::size_t resolve_threads(const ExperimentConfig& cfg);

}  // namespace psopid::harness
