#pragma once

// Ziegler-Nichols baseline tuning.
//
// Open loop: a first-order-plus-dead-time fit of a step response, then the
// table rules on T/L. Closed loop: a proportional-only gain sweep up to
// sustained oscillation, then the classical (Ku, Pu) rules.
//
// All times (T, L, Ti, Td, Pu) are in seconds. Ti = +inf encodes "no
// integral action".

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psopid/plant.hpp"

namespace psopid::zn {

struct FopdtParams {
  double T = 0.0;
  double L = 0.0;
  double K_process = 0.0;
};

/// Two-point fit. Crossing times of 28.3% and 63.2% of the steady state are
/// linearly interpolated between samples; the step is applied at t = 0 and
/// sample k is at t = k ts.
FopdtParams fit_fopdt(std::span<const double> step_response, double step_amplitude, double ts);

enum class ControllerKind { P, PI, PID };

std::string_view to_string(ControllerKind kind);
ControllerKind parse_controller_kind(std::string_view name);

struct ZnSettings {
  double kp = 0.0;
  double Ti = 0.0;
  double Td = 0.0;
};

ZnSettings zn_open_loop(const FopdtParams& f, ControllerKind kind);

struct UltimateParams {
  double Ku = 0.0;
  double Pu = 0.0;

  void validate() const;
};

ZnSettings zn_closed_loop(const UltimateParams& u, ControllerKind kind);

struct UltimateSearch {
  std::size_t loop_index = 0;
  double kp_start = 0.05;
  double growth = 1.05;
  double max_kp = 100.0;
  std::size_t sim_len = 500;
  double ts = 0.01;
  double reference = 1.0;
  /// Applied to the proportional command when set.
  std::optional<plant::InputBounds> bounds;
};

struct Oscillation {
  /// Mean spacing of the detected peaks, in samples.
  double period_samples = 0.0;
  double amplitude = 0.0;
};

/// Peaks needed for a sustained oscillation, and the allowed ratio band
/// between successive peak amplitudes.
inline constexpr std::size_t kSustainedPeaks = 6;
inline constexpr double kPeakRatioLo = 0.9;
inline constexpr double kPeakRatioHi = 1.1;

/// Looks at the second half of `y`: amplitudes are measured from that
/// window's mean, and the last kSustainedPeaks local maxima must have
/// successive amplitude ratios inside [kPeakRatioLo, kPeakRatioHi].
std::optional<Oscillation> detect_sustained_oscillation(std::span<const double> y);

/// Proportional-only loop on `loop_index` (other inputs held at zero), kp
/// multiplied by `growth` per trial. Throws NoUltimateGainError.
UltimateParams find_ultimate(const plant::DiscretePlant& plant, const UltimateSearch& search);

/// y_{loop}(k) for a step of `amplitude` on input `loop_index` alone, from
/// the plant's reset state.
std::vector<double> open_loop_step_response(const plant::DiscretePlant& plant,
                                            std::size_t loop_index, double amplitude,
                                            std::size_t sim_len);

}  // namespace psopid::zn
