#include "psopid/plant.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "psopid/error.hpp"

namespace psopid::plant {

namespace {

bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_output(double y, std::size_t k, const char* name) {
  if (!std::isfinite(y) || std::abs(y) > kDivergenceLimit) {
    std::ostringstream msg;
    msg << "plant output " << name << " diverged at step " << k << " (value " << y << ")";
    throw DivergenceError(k, msg.str());
  }
}

}  // namespace

void PlantParams::validate() const {
  if (!all_finite(a) || !all_finite(b)) {
    throw Error(ErrorKind::InvalidParameter, "plant coefficients must be finite");
  }
}

void PlantState::validate() const {
  if (!all_finite(y1_hist) || !all_finite(y2_hist) || !all_finite(u1_hist) ||
      !all_finite(u2_hist)) {
    throw Error(ErrorKind::InvalidInput, "plant state must be finite");
  }
}

void InputBounds::validate() const {
  if (!(lo < hi)) {
    throw Error(ErrorKind::InvalidParameter, "input bounds require lo < hi");
  }
}

std::vector<double> saturate(std::span<const double> u, const InputBounds& bounds) {
  bounds.validate();
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) {
      throw Error(ErrorKind::InvalidInput,
                  "non-finite control input on channel " + std::to_string(i));
    }
    out[i] = std::clamp(u[i], bounds.lo, bounds.hi);
  }
  return out;
}

Vec2 plant_output(const PlantState& s, const PlantParams& p) {
  const auto& a = p.a;
  const auto& b = p.b;
  const double y1p = s.y1_hist[0];
  const double y2p = s.y2_hist[0];
  const double y2pp = s.y2_hist[1];

  const double y1 = a[0] * y1p * y2p / (1.0 + a[1] * y1p * y1p + a[2] * y2p * y2p) +
                    a[3] * s.u1_hist[1] + a[4] * s.u1_hist[0] + a[5] * s.u2_hist[0];
  const double y2 = b[0] * y2p * std::sin(y2pp) / (1.0 + b[1] * y2p * y2p + b[2] * y1p * y1p) +
                    b[3] * s.u2_hist[1] + b[4] * s.u2_hist[0] + b[5] * s.u1_hist[0];
  return {y1, y2};
}

StepResult plant_step(const PlantState& state, const PlantParams& params, const Vec2& u) {
  const Vec2 y = plant_output(state, params);
  check_output(y[0], state.k, "y1");
  check_output(y[1], state.k, "y2");

  StepResult r{state, y};
  r.state.y1_hist = {y[0], state.y1_hist[0]};
  r.state.y2_hist = {y[1], state.y2_hist[0]};
  r.state.u1_hist = {u[0], state.u1_hist[0]};
  r.state.u2_hist = {u[1], state.u2_hist[0]};
  r.state.k = state.k + 1;
  return r;
}

Trajectory simulate_open_loop(const PlantParams& params, std::span<const Vec2> u_sequence,
                              const InputBounds& bounds) {
  if (u_sequence.empty()) {
    throw Error(ErrorKind::InvalidInput, "open-loop input sequence is empty");
  }
  params.validate();
  Trajectory traj;
  traj.reserve(u_sequence.size());
  PlantState state;
  for (const Vec2& raw : u_sequence) {
    const auto u = saturate(raw, bounds);
    const Vec2 applied{u[0], u[1]};
    auto step = plant_step(state, params, applied);
    traj.push_back({state.k, u, {step.y[0], step.y[1]}});
    state = step.state;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double ts) {
  const std::size_t n = traj.empty() ? 2 : traj.front().y.size();
  os << "k,t";
  for (std::size_t i = 1; i <= n; ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",y" << i;
  os << '\n';

  const auto old_precision = os.precision(12);
  for (const auto& s : traj) {
    os << s.k << ',' << static_cast<double>(s.k) * ts;
    for (double u : s.u) os << ',' << u;
    for (double y : s.y) os << ',' << y;
    os << '\n';
  }
  os.precision(old_precision);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw Error(ErrorKind::InvalidInput, "trajectory CSV is empty");
  }
  std::size_t columns = 1;
  for (char c : line) columns += (c == ',');
  if (line.rfind("k,t", 0) != 0 || columns < 4 || (columns - 2) % 2 != 0) {
    throw Error(ErrorKind::InvalidInput, "unexpected trajectory CSV header: " + line);
  }
  const std::size_t n = (columns - 2) / 2;

  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != columns) {
      throw Error(ErrorKind::InvalidInput, "trajectory CSV row has wrong column count");
    }
    TrajectorySample s;
    s.k = static_cast<std::size_t>(values[0]);
    s.u.assign(values.begin() + 2, values.begin() + 2 + static_cast<long>(n));
    s.y.assign(values.begin() + 2 + static_cast<long>(n), values.end());
    traj.push_back(std::move(s));
  }
  return traj;
}

BenchmarkPlant::BenchmarkPlant(PlantParams params, PlantState initial)
    : params_(params), initial_(initial), state_(initial) {
  params_.validate();
  initial_.validate();
}

std::vector<double> BenchmarkPlant::output() const {
  const Vec2 y = plant_output(state_, params_);
  check_output(y[0], state_.k, "y1");
  check_output(y[1], state_.k, "y2");
  return {y[0], y[1]};
}

void BenchmarkPlant::advance(std::span<const double> u) {
  if (u.size() != 2) {
    throw Error(ErrorKind::Configuration, "benchmark plant expects 2 inputs");
  }
  state_ = plant_step(state_, params_, {u[0], u[1]}).state;
}

std::unique_ptr<DiscretePlant> BenchmarkPlant::clone() const {
  return std::make_unique<BenchmarkPlant>(*this);
}

ArxPlant::ArxPlant(std::vector<Channel> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw Error(ErrorKind::Configuration, "ARX plant needs at least one channel");
  }
  for (const auto& ch : channels_) {
    if (!all_finite(ch.a) || !all_finite(ch.b)) {
      throw Error(ErrorKind::InvalidParameter, "ARX coefficients must be finite");
    }
  }
  reset();
}

ArxPlant::ArxPlant(std::vector<double> a, std::vector<double> b)
    : ArxPlant(std::vector<Channel>{{std::move(a), std::move(b)}}) {}

std::vector<double> ArxPlant::output() const {
  std::vector<double> y(channels_.size());
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const auto& ch = channels_[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < ch.a.size(); ++j) acc += ch.a[j] * y_hist_[i][j];
    for (std::size_t j = 0; j < ch.b.size(); ++j) acc += ch.b[j] * u_hist_[i][j];
    check_output(acc, k_, "y");
    y[i] = acc;
  }
  return y;
}

void ArxPlant::advance(std::span<const double> u) {
  if (u.size() != channels_.size()) {
    throw Error(ErrorKind::Configuration, "ARX plant input count mismatch");
  }
  const auto y = output();
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    auto& yh = y_hist_[i];
    auto& uh = u_hist_[i];
    if (!yh.empty()) {
      std::copy_backward(yh.begin(), yh.end() - 1, yh.end());
      yh[0] = y[i];
    }
    if (!uh.empty()) {
      std::copy_backward(uh.begin(), uh.end() - 1, uh.end());
      uh[0] = u[i];
    }
  }
  ++k_;
}

void ArxPlant::reset() {
  y_hist_.clear();
  u_hist_.clear();
  for (const auto& ch : channels_) {
    y_hist_.emplace_back(ch.a.size(), 0.0);
    u_hist_.emplace_back(ch.b.size(), 0.0);
  }
  k_ = 0;
}

std::unique_ptr<DiscretePlant> ArxPlant::clone() const {
  return std::make_unique<ArxPlant>(*this);
}

}  // namespace psopid::plant
