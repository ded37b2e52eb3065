#pragma once

// Closed-loop performance indices and step-response statistics.
//
// The indices are plain discrete sums over samples k and loops i:
//   IAE  = sum_k sum_i |e_i(k)|
//   ISE  = sum_k sum_i e_i(k)^2
//   ITSE = sum_k sum_i k e_i(k)^2   (k zero-based)
// The sample time is not folded in; it only converts step counts to seconds
// in StepStats.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psopid::metrics {

struct ErrorTrajectory {
  /// errors[k][i] is e_i(k).
  std::vector<std::vector<double>> errors;
  double ts = 0.01;

  void validate() const;
};

double iae(const ErrorTrajectory& traj);
double ise(const ErrorTrajectory& traj);
double itse(const ErrorTrajectory& traj);

enum class Index { IAE, ISE, ITSE };

double evaluate(Index index, const ErrorTrajectory& traj);
std::string_view to_string(Index index);
/// Case-insensitive "iae" / "ise" / "itse".
Index parse_index(std::string_view name);

struct StepStats {
  double overshoot_pct = 0.0;
  double rise_time_s = 0.0;
  double settling_time_s = 0.0;
};

/// Band used for settling time, as a fraction of |reference|.
inline constexpr double kSettlingBand = 0.02;

/// overshoot = 100 max(0, max y - r)/|r|; rise = (k90 - k10) ts on first
/// crossings of 10%/90% of r; settling = ts (1 + last k outside the 2% band),
/// 0 when never outside. Throws RiseUndefined / NotSettled.
StepStats step_stats(std::span<const double> y, double reference, double ts);

/// Same definitions, but undefined rise/settling times are left empty
/// instead of throwing. Used when reporting runs that may not settle.
struct StepSummary {
  double overshoot_pct = 0.0;
  std::optional<double> rise_time_s;
  std::optional<double> settling_time_s;
};

StepSummary summarize_step(std::span<const double> y, double reference, double ts);

}  // namespace psopid::metrics
