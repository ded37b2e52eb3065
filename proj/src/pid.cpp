#include "psopid/pid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psopid/error.hpp"

namespace psopid::pid {

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
    throw Error(ErrorKind::InvalidParameter, "PID gains must be finite");
  }
}

std::vector<double> MimoPidGains::flatten() const {
  std::vector<double> out;
  out.reserve(loops.size() * 3);
  for (const auto& g : loops) {
    out.push_back(g.kp);
    out.push_back(g.ki);
    out.push_back(g.kd);
  }
  return out;
}

MimoPidGains MimoPidGains::from_flat(std::span<const double> values) {
  if (values.size() % 3 != 0) {
    throw Error(ErrorKind::Configuration,
                "gain vector length must be a multiple of 3, got " + std::to_string(values.size()));
  }
  MimoPidGains g;
  for (std::size_t i = 0; i < values.size(); i += 3) {
    g.loops.push_back({values[i], values[i + 1], values[i + 2]});
  }
  return g;
}

PidStep pid_step(const PidGains& gains, const PidState& state, double e,
                 std::optional<double> windup_limit) {
  if (!std::isfinite(e)) {
    throw Error(ErrorKind::InvalidInput, "PID error sample is not finite");
  }
  double integral = state.integral + e;
  if (windup_limit) {
    const double w = std::abs(*windup_limit);
    integral = std::clamp(integral, -w, w);
  }
  const double u = gains.kp * e + gains.ki * integral + gains.kd * (e - state.prev_error);
  return {u, PidState{integral, e}};
}

MimoPidStep mimo_pid_step(const MimoPidGains& gains, std::span<const PidState> states,
                          std::span<const double> e,
                          std::span<const std::optional<double>> windup_limits) {
  const std::size_t n = gains.loops.size();
  if (states.size() != n || e.size() != n || (!windup_limits.empty() && windup_limits.size() != n)) {
    throw Error(ErrorKind::Configuration, "MIMO PID loop count mismatch");
  }
  MimoPidStep out;
  out.u.resize(n);
  out.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto limit = windup_limits.empty() ? std::nullopt : windup_limits[i];
    const auto step = pid_step(gains.loops[i], states[i], e[i], limit);
    out.u[i] = step.u;
    out.states[i] = step.state;
  }
  return out;
}

PidGains zn_form_to_gain_form(double kp, double Ti, double Td) {
  if (!(Ti > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "integral time Ti must be positive");
  }
  if (!std::isfinite(kp) || !std::isfinite(Td)) {
    throw Error(ErrorKind::InvalidParameter, "kp and Td must be finite");
  }
  const double ki = std::isinf(Ti) ? 0.0 : kp / Ti;
  return {kp, ki, kp * Td};
}

double windup_limit_for(const PidGains& gains, double actuator_limit) {
  constexpr double kMinKi = 1e-9;
  return std::abs(actuator_limit) / std::max(std::abs(gains.ki), kMinKi);
}

}  // namespace psopid::pid
