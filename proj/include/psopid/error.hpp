#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace psopid {

enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  Configuration,
  Divergence,
  RiseUndefined,
  NotSettled,
  Fit,
  UnboundedGain,
  NoUltimateGain,
  Objective,
  Numerical,
  IdentificationDiverged,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A simulated output left the finite/bounded region at `step`.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error(ErrorKind::Divergence, what), step_(step) {}

  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The ultimate-gain sweep ended without a sustained oscillation. When the
/// loop diverged first, `bracket()` holds (last non-diverging kp, diverging kp).
class NoUltimateGainError : public Error {
 public:
  NoUltimateGainError(const std::string& what,
                      std::optional<std::pair<double, double>> bracket)
      : Error(ErrorKind::NoUltimateGain, what), bracket_(bracket) {}

  [[nodiscard]] const std::optional<std::pair<double, double>>& bracket()
      const noexcept {
    return bracket_;
  }

 private:
  std::optional<std::pair<double, double>> bracket_;
};

}  // namespace psopid
