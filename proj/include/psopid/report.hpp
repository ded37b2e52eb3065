#pragma once

// Experiment report: what each tuning method produced, serialized as
// report.json and rendered as markdown tables (gains per output, step
// response per output).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psopid/config.hpp"
#include "psopid/metrics.hpp"
#include "psopid/pid.hpp"

namespace psopid::harness {

struct ControllerEvaluation {
  pid::MimoPidGains gains;
  /// One entry per loop.
  std::vector<metrics::StepSummary> step;
  double iae = 0.0;
  double ise = 0.0;
  double itse = 0.0;
  bool diverged = false;
  std::string trajectory_file;

  [[nodiscard]] double index(metrics::Index which) const;
};

struct ZnLoopResult {
  std::size_t loop = 0;
  double kp = 0.0;
  double Ti = 0.0;  // seconds, +inf for no integral action
  double Td = 0.0;  // seconds
  nlohmann::json fit;
};

struct ZnMethodResult {
  std::string method;  // "zn-open" | "zn-closed"
  bool ok = false;
  std::string error;
  std::vector<ZnLoopResult> loops;
  std::optional<ControllerEvaluation> evaluation;
};

struct PsoRun {
  std::uint64_t seed = 0;
  double gbest_f = 0.0;
  std::vector<double> history;
  std::string convergence_file;
  ControllerEvaluation evaluation;
};

struct PsoMethodResult {
  std::string method;  // "pso-iae" | "pso-ise" | "pso-itse"
  metrics::Index index = metrics::Index::ISE;
  std::vector<PsoRun> runs;
  /// Per-loop medians over seeds; an unsettled run counts as +inf.
  std::vector<metrics::StepSummary> median_step;
  double median_gbest_f = 0.0;
  /// Index into `runs` of the median-fitness run.
  std::size_t representative = 0;
  std::string trajectory_file;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ZnMethodResult> zn;
  std::vector<PsoMethodResult> pso;

  /// zn-open when it succeeded, else zn-closed, else nothing.
  [[nodiscard]] const ZnMethodResult* baseline() const;
};

/// Per loop: median settling strictly below the baseline's, median overshoot
/// not above it. Unsettled means +inf.
struct LoopVerdict {
  bool settling_better = false;
  bool overshoot_not_worse = false;
};

struct MethodVerdict {
  std::string method;
  std::vector<LoopVerdict> loops;
  [[nodiscard]] bool passed() const;
};

std::vector<MethodVerdict> compare_to_baseline(const ExperimentReport& report);

metrics::StepSummary median_summary(const std::vector<metrics::StepSummary>& xs);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Markdown: gains table per output, step-response table per output.
std::string render_tables(const ExperimentReport& report);

}  // namespace psopid::harness
