#include "psopid/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>

#include "psopid/error.hpp"

namespace psopid::metrics {

void ErrorTrajectory::validate() const {
  if (errors.empty()) {
    throw Error(ErrorKind::InvalidInput, "error trajectory is empty");
  }
  if (!(ts > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "sample time must be positive");
  }
  for (const auto& row : errors) {
    for (double e : row) {
      if (!std::isfinite(e)) {
        throw Error(ErrorKind::InvalidInput, "error trajectory contains non-finite samples");
      }
    }
  }
}

double iae(const ErrorTrajectory& traj) {
  traj.validate();
  double acc = 0.0;
  for (const auto& row : traj.errors) {
    for (double e : row) acc += std::abs(e);
  }
  return acc;
}

double ise(const ErrorTrajectory& traj) {
  traj.validate();
  double acc = 0.0;
  for (const auto& row : traj.errors) {
    for (double e : row) acc += e * e;
  }
  return acc;
}

double itse(const ErrorTrajectory& traj) {
  traj.validate();
  double acc = 0.0;
  for (std::size_t k = 0; k < traj.errors.size(); ++k) {
    double sq = 0.0;
    for (double e : traj.errors[k]) sq += e * e;
    acc += static_cast<double>(k) * sq;
  }
  return acc;
}

double evaluate(Index index, const ErrorTrajectory& traj) {
  switch (index) {
    case Index::IAE: return iae(traj);
    case Index::ISE: return ise(traj);
    case Index::ITSE: return itse(traj);
  }
  throw Error(ErrorKind::Configuration, "unknown performance index");
}

std::string_view to_string(Index index) {
  switch (index) {
    case Index::IAE: return "IAE";
    case Index::ISE: return "ISE";
    case Index::ITSE: return "ITSE";
  }
  return "?";
}

Index parse_index(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "iae") return Index::IAE;
  if (lower == "ise") return Index::ISE;
  if (lower == "itse") return Index::ITSE;
  throw Error(ErrorKind::Configuration, "unknown performance index '" + std::string(name) + "'");
}

namespace {

void check_step_input(std::span<const double> y, double reference, double ts) {
  if (reference == 0.0 || !std::isfinite(reference)) {
    throw Error(ErrorKind::InvalidInput, "step reference must be finite and non-zero");
  }
  if (!(ts > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "sample time must be positive");
  }
  if (y.empty()) {
    throw Error(ErrorKind::InvalidInput, "step response is empty");
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidInput, "step response contains non-finite samples");
    }
  }
}

std::optional<std::size_t> first_crossing(std::span<const double> y, double reference,
                                          double fraction) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y[k] / reference >= fraction) return k;
  }
  return std::nullopt;
}

}  // namespace

StepSummary summarize_step(std::span<const double> y, double reference, double ts) {
  check_step_input(y, reference, ts);
  const double scale = std::abs(reference);

  StepSummary s;
  // Overshoot is measured in the direction of the reference.
  double peak_excess = 0.0;
  for (double v : y) peak_excess = std::max(peak_excess, (v - reference) * (reference > 0 ? 1.0 : -1.0));
  s.overshoot_pct = 100.0 * peak_excess / scale;

  const auto k10 = first_crossing(y, reference, 0.1);
  const auto k90 = first_crossing(y, reference, 0.9);
  if (k10 && k90) {
    s.rise_time_s = static_cast<double>(*k90 - *k10) * ts;
  }

  const double band = kSettlingBand * scale;
  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (std::abs(y[k] - reference) > band) last_outside = k;
  }
  if (!last_outside) {
    s.settling_time_s = 0.0;
  } else if (*last_outside + 1 < y.size()) {
    s.settling_time_s = static_cast<double>(*last_outside + 1) * ts;
  }
  return s;
}

StepStats step_stats(std::span<const double> y, double reference, double ts) {
  const StepSummary s = summarize_step(y, reference, ts);
  if (!s.rise_time_s) {
    throw Error(ErrorKind::RiseUndefined, "response never reaches 90% of the reference");
  }
  if (!s.settling_time_s) {
    throw Error(ErrorKind::NotSettled, "response ends outside the settling band");
  }
  return {s.overshoot_pct, *s.rise_time_s, *s.settling_time_s};
}

}  // namespace psopid::metrics
