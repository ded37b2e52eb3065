#pragma once

// Positional discrete PID, one scalar loop per controlled output:
//
//   C(z) = kp + ki z/(z-1) + kd (z-1)/z
//
// z/(z-1) = 1/(1-z^-1) is an accumulator that includes the current sample, and
// (z-1)/z is the backward difference of the error.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace psopid::pid {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  void validate() const;
  friend bool operator==(const PidGains&, const PidGains&) = default;
};

/// Decentralized controller: loop i drives input i from error i only.
struct MimoPidGains {
  std::vector<PidGains> loops;

  /// [kp1, ki1, kd1, kp2, ki2, kd2, ...]
  [[nodiscard]] std::vector<double> flatten() const;
  static MimoPidGains from_flat(std::span<const double> values);

  friend bool operator==(const MimoPidGains&, const MimoPidGains&) = default;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;

  void reset() { *this = PidState{}; }
  friend bool operator==(const PidState&, const PidState&) = default;
};

struct PidStep {
  double u;
  PidState state;
};

/// integral' = clamp(integral + e, +-windup_limit); u = kp e + ki integral' + kd (e - prev).
PidStep pid_step(const PidGains& gains, const PidState& state, double e,
                 std::optional<double> windup_limit = std::nullopt);

struct MimoPidStep {
  std::vector<double> u;
  std::vector<PidState> states;
};

/// `windup_limits` is either empty (no clamping) or one entry per loop.
MimoPidStep mimo_pid_step(const MimoPidGains& gains, std::span<const PidState> states,
                          std::span<const double> e,
                          std::span<const std::optional<double>> windup_limits = {});

/// ki = kp/Ti, kd = kp*Td with Ti, Td in the controller's own time unit
/// (samples when the result is fed to pid_step). Ti = +inf gives ki = 0.
PidGains zn_form_to_gain_form(double kp, double Ti, double Td);

/// Integrator clamp that keeps ki*integral within the actuator range.
double windup_limit_for(const PidGains& gains, double actuator_limit);

}  // namespace psopid::pid
