#include "psopid/zn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "psopid/error.hpp"

namespace psopid::zn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Time at which y/y_ss first reaches `fraction`, interpolated between samples.
std::optional<double> crossing_time(std::span<const double> y, double y_ss, double fraction,
                                    double ts) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double level = y[k] / y_ss;
    if (level >= fraction) {
      if (k == 0) return 0.0;
      const double prev = y[k - 1] / y_ss;
      const double t_frac = (fraction - prev) / (level - prev);
      return (static_cast<double>(k - 1) + t_frac) * ts;
    }
  }
  return std::nullopt;
}

}  // namespace

FopdtParams fit_fopdt(std::span<const double> y, double step_amplitude, double ts) {
  if (y.size() < 10) {
    throw Error(ErrorKind::InvalidInput, "step response needs at least 10 samples");
  }
  if (step_amplitude == 0.0 || !std::isfinite(step_amplitude)) {
    throw Error(ErrorKind::InvalidInput, "step amplitude must be finite and non-zero");
  }
  if (!(ts > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "sample time must be positive");
  }

  const std::size_t tail_len = std::max<std::size_t>(1, y.size() / 10);
  const auto tail = y.last(tail_len);
  const double y_ss = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail_len);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  if (y_ss == 0.0 || !std::isfinite(y_ss) || (*hi - *lo) >= 0.01 * std::abs(y_ss)) {
    throw Error(ErrorKind::NotSettled, "step response has no steady state in its last 10%");
  }

  const auto t283 = crossing_time(y, y_ss, 0.283, ts);
  const auto t632 = crossing_time(y, y_ss, 0.632, ts);
  if (!t283 || !t632 || !(*t632 > *t283)) {
    throw Error(ErrorKind::Fit, "28.3%/63.2% crossings are missing or out of order");
  }

  FopdtParams f;
  f.T = 1.5 * (*t632 - *t283);
  f.L = std::max(0.0, *t632 - f.T);
  f.K_process = y_ss / step_amplitude;
  return f;
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::P: return "P";
    case ControllerKind::PI: return "PI";
    case ControllerKind::PID: return "PID";
  }
  return "?";
}

ControllerKind parse_controller_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "P") return ControllerKind::P;
  if (upper == "PI") return ControllerKind::PI;
  if (upper == "PID") return ControllerKind::PID;
  throw Error(ErrorKind::Configuration, "unknown controller kind '" + std::string(name) + "'");
}

ZnSettings zn_open_loop(const FopdtParams& f, ControllerKind kind) {
  if (!(f.T > 0.0) || !(f.L >= 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "FOPDT requires T > 0 and L >= 0");
  }
  if (f.L == 0.0) {
    throw Error(ErrorKind::UnboundedGain, "zero dead time gives an unbounded T/L gain");
  }
  const double ratio = f.T / f.L;
  switch (kind) {
    case ControllerKind::P: return {ratio, kInf, 0.0};
    case ControllerKind::PI: return {0.9 * ratio, f.L / 0.3, 0.0};
    case ControllerKind::PID: return {1.2 * ratio, 2.0 * f.L, 0.5 * f.L};
  }
  throw Error(ErrorKind::Configuration, "unknown controller kind");
}

void UltimateParams::validate() const {
  if (!(Ku > 0.0) || !(Pu > 0.0) || !std::isfinite(Ku) || !std::isfinite(Pu)) {
    throw Error(ErrorKind::InvalidParameter, "ultimate gain and period must be positive");
  }
}

ZnSettings zn_closed_loop(const UltimateParams& u, ControllerKind kind) {
  u.validate();
  switch (kind) {
    case ControllerKind::P: return {0.5 * u.Ku, kInf, 0.0};
    case ControllerKind::PI: return {0.45 * u.Ku, u.Pu / 1.2, 0.0};
    case ControllerKind::PID: return {0.6 * u.Ku, u.Pu / 2.0, u.Pu / 8.0};
  }
  throw Error(ErrorKind::Configuration, "unknown controller kind");
}

std::optional<Oscillation> detect_sustained_oscillation(std::span<const double> y) {
  const auto window = y.subspan(y.size() / 2);
  if (window.size() < 3) return std::nullopt;

  const double mean =
      std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
  double scale = 1.0;
  for (double v : window) scale = std::max(scale, std::abs(v));
  const double floor = 1e-9 * scale;

  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < window.size(); ++k) {
    if (window[k] > window[k - 1] && window[k] >= window[k + 1] && window[k] - mean > floor) {
      peaks.push_back(k);
    }
  }
  if (peaks.size() < kSustainedPeaks) return std::nullopt;

  const std::span<const std::size_t> last(peaks.end() - kSustainedPeaks, peaks.end());
  for (std::size_t j = 1; j < last.size(); ++j) {
    const double ratio = (window[last[j]] - mean) / (window[last[j - 1]] - mean);
    if (ratio < kPeakRatioLo || ratio > kPeakRatioHi) return std::nullopt;
  }
  Oscillation osc;
  osc.period_samples =
      static_cast<double>(last.back() - last.front()) / static_cast<double>(last.size() - 1);
  osc.amplitude = window[last.back()] - mean;
  return osc;
}

UltimateParams find_ultimate(const plant::DiscretePlant& plant, const UltimateSearch& s) {
  if (!(s.kp_start > 0.0) || !(s.growth > 1.0) || !(s.max_kp >= s.kp_start)) {
    throw Error(ErrorKind::InvalidParameter,
                "ultimate search requires kp_start > 0, growth > 1, max_kp >= kp_start");
  }
  if (s.loop_index >= plant.channels()) {
    throw Error(ErrorKind::Configuration, "loop index out of range");
  }
  if (!(s.ts > 0.0) || s.sim_len < 8 * kSustainedPeaks) {
    throw Error(ErrorKind::InvalidParameter, "ultimate search needs ts > 0 and a longer sim_len");
  }
  if (s.bounds) s.bounds->validate();

  std::optional<double> last_ok;
  for (double kp = s.kp_start; kp <= s.max_kp; kp *= s.growth) {
    auto p = plant.clone();
    p->reset();
    std::vector<double> trace;
    trace.reserve(s.sim_len);
    std::vector<double> u(p->channels(), 0.0);
    try {
      for (std::size_t k = 0; k < s.sim_len; ++k) {
        const auto y = p->output();
        trace.push_back(y[s.loop_index]);
        double cmd = kp * (s.reference - y[s.loop_index]);
        if (s.bounds) cmd = std::clamp(cmd, s.bounds->lo, s.bounds->hi);
        u[s.loop_index] = cmd;
        p->advance(u);
      }
    } catch (const DivergenceError&) {
      std::ostringstream msg;
      msg << "closed loop diverged at kp=" << kp << " before a sustained oscillation";
      if (last_ok) msg << " (last non-diverging kp=" << *last_ok << ")";
      throw NoUltimateGainError(msg.str(), std::pair{last_ok.value_or(0.0), kp});
    }
    if (const auto osc = detect_sustained_oscillation(trace)) {
      return {kp, osc->period_samples * s.ts};
    }
    last_ok = kp;
  }
  throw NoUltimateGainError("no sustained oscillation up to max_kp", std::nullopt);
}

std::vector<double> open_loop_step_response(const plant::DiscretePlant& plant,
                                            std::size_t loop_index, double amplitude,
                                            std::size_t sim_len) {
  if (loop_index >= plant.channels()) {
    throw Error(ErrorKind::Configuration, "loop index out of range");
  }
  auto p = plant.clone();
  p->reset();
  std::vector<double> u(p->channels(), 0.0);
  u[loop_index] = amplitude;
  std::vector<double> y;
  y.reserve(sim_len);
  for (std::size_t k = 0; k < sim_len; ++k) {
    y.push_back(p->output()[loop_index]);
    p->advance(u);
  }
  return y;
}

}  // namespace psopid::zn
