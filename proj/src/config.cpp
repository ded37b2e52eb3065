#include "psopid/config.hpp"

#include <cstdlib>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "psopid/error.hpp"

namespace psopid::harness {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::Configuration, what);
}

void check_object(const json& j, std::string_view where,
                  std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) config_error(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<double> read_gain_bound(const json& v, const char* which) {
  if (v.is_number()) return std::vector<double>(6, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != 6) config_error(std::string("gain_bounds.") + which + " needs 6 entries");
  return out;
}

std::array<double, 6> read_coeffs(const json& v, const char* which) {
  const auto xs = v.get<std::vector<double>>();
  if (xs.size() != 6) config_error(std::string("plant.") + which + " needs 6 coefficients");
  std::array<double, 6> out{};
  std::copy(xs.begin(), xs.end(), out.begin());
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    plant.validate();
    input_bounds.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (reference.size() != 2) config_error("reference needs one entry per plant output (2)");
  for (double r : reference) {
    if (!std::isfinite(r)) config_error("reference entries must be finite");
  }
  if (sim_len < 10) config_error("sim_len must be at least 10");
  if (!(ts > 0.0)) config_error("ts must be positive");
  if (gain_lo.size() != 6 || gain_hi.size() != 6) config_error("gain bounds need 6 entries");
  for (std::size_t d = 0; d < 6; ++d) {
    if (!(gain_lo[d] < gain_hi[d])) config_error("gain bounds require lo < hi");
  }
  if (pso.pop_size < 2) config_error("pso.pop_size must be at least 2");
  if (pso.max_iter < 1) config_error("pso.max_iter must be at least 1");
  if (!(pso.w_min <= pso.w_max)) config_error("pso.w_min must not exceed pso.w_max");
  if (!(pso.v_max_fraction > 0.0)) config_error("pso.v_max_fraction must be positive");
  if (seeds.empty()) config_error("at least one seed is required");
  if (!gains.empty() && gains.size() != 6) config_error("gains needs 6 entries");
  if (!(zn.step_amplitude != 0.0) || !(zn.kp_start > 0.0) || !(zn.growth > 1.0) ||
      !(zn.max_kp >= zn.kp_start) || zn.sim_len < 50) {
    config_error("invalid zn options");
  }
  if (identify.rules < 1 || identify.lags < 1 || !(identify.alpha0 > 0.0) ||
      identify.samples <= identify.rules * (2 * identify.lags + 1)) {
    config_error("invalid identify options");
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    check_object(j, "config",
                 {"plant", "reference", "sim_len", "ts", "input_bounds", "gain_bounds", "pso",
                  "index", "seeds", "output_dir", "anti_windup", "gains", "zn", "identify",
                  "threads"});
    if (j.contains("plant")) {
      const auto& p = j.at("plant");
      check_object(p, "plant", {"a", "b"});
      if (p.contains("a")) cfg.plant.a = read_coeffs(p.at("a"), "a");
      if (p.contains("b")) cfg.plant.b = read_coeffs(p.at("b"), "b");
    }
    read(j, "reference", cfg.reference);
    read(j, "sim_len", cfg.sim_len);
    read(j, "ts", cfg.ts);
    if (j.contains("input_bounds")) {
      const auto& b = j.at("input_bounds");
      check_object(b, "input_bounds", {"lo", "hi"});
      read(b, "lo", cfg.input_bounds.lo);
      read(b, "hi", cfg.input_bounds.hi);
    }
    if (j.contains("gain_bounds")) {
      const auto& b = j.at("gain_bounds");
      check_object(b, "gain_bounds", {"lo", "hi"});
      if (b.contains("lo")) cfg.gain_lo = read_gain_bound(b.at("lo"), "lo");
      if (b.contains("hi")) cfg.gain_hi = read_gain_bound(b.at("hi"), "hi");
    }
    if (j.contains("pso")) {
      const auto& p = j.at("pso");
      check_object(p, "pso",
                   {"pop_size", "max_iter", "c1", "c2", "w_min", "w_max", "v_max_fraction"});
      read(p, "pop_size", cfg.pso.pop_size);
      read(p, "max_iter", cfg.pso.max_iter);
      read(p, "c1", cfg.pso.c1);
      read(p, "c2", cfg.pso.c2);
      read(p, "w_min", cfg.pso.w_min);
      read(p, "w_max", cfg.pso.w_max);
      read(p, "v_max_fraction", cfg.pso.v_max_fraction);
    }
    if (j.contains("index")) cfg.index = metrics::parse_index(j.at("index").get<std::string>());
    read(j, "seeds", cfg.seeds);
    read(j, "output_dir", cfg.output_dir);
    read(j, "anti_windup", cfg.anti_windup);
    read(j, "gains", cfg.gains);
    if (j.contains("zn")) {
      const auto& z = j.at("zn");
      check_object(z, "zn", {"kind", "step_amplitude", "sim_len", "kp_start", "growth", "max_kp"});
      if (z.contains("kind")) cfg.zn.kind = zn::parse_controller_kind(z.at("kind").get<std::string>());
      read(z, "step_amplitude", cfg.zn.step_amplitude);
      read(z, "sim_len", cfg.zn.sim_len);
      read(z, "kp_start", cfg.zn.kp_start);
      read(z, "growth", cfg.zn.growth);
      read(z, "max_kp", cfg.zn.max_kp);
    }
    if (j.contains("identify")) {
      const auto& id = j.at("identify");
      check_object(id, "identify", {"samples", "rules", "lags", "alpha0", "seed"});
      read(id, "samples", cfg.identify.samples);
      read(id, "rules", cfg.identify.rules);
      read(id, "lags", cfg.identify.lags);
      read(id, "alpha0", cfg.identify.alpha0);
      read(id, "seed", cfg.identify.seed);
    }
    read(j, "threads", cfg.threads);
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  return {
      {"plant", {{"a", cfg.plant.a}, {"b", cfg.plant.b}}},
      {"reference", cfg.reference},
      {"sim_len", cfg.sim_len},
      {"ts", cfg.ts},
      {"input_bounds", {{"lo", cfg.input_bounds.lo}, {"hi", cfg.input_bounds.hi}}},
      {"gain_bounds", {{"lo", cfg.gain_lo}, {"hi", cfg.gain_hi}}},
      {"pso",
       {{"pop_size", cfg.pso.pop_size},
        {"max_iter", cfg.pso.max_iter},
        {"c1", cfg.pso.c1},
        {"c2", cfg.pso.c2},
        {"w_min", cfg.pso.w_min},
        {"w_max", cfg.pso.w_max},
        {"v_max_fraction", cfg.pso.v_max_fraction}}},
      {"index", std::string(metrics::to_string(cfg.index))},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir},
      {"anti_windup", cfg.anti_windup},
      {"gains", cfg.gains},
      {"zn",
       {{"kind", std::string(zn::to_string(cfg.zn.kind))},
        {"step_amplitude", cfg.zn.step_amplitude},
        {"sim_len", cfg.zn.sim_len},
        {"kp_start", cfg.zn.kp_start},
        {"growth", cfg.zn.growth},
        {"max_kp", cfg.zn.max_kp}}},
      {"identify",
       {{"samples", cfg.identify.samples},
        {"rules", cfg.identify.rules},
        {"lags", cfg.identify.lags},
        {"alpha0", cfg.identify.alpha0},
        {"seed", cfg.identify.seed}}},
      {"threads", cfg.threads},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::size_t resolve_threads(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("PSO_PID_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
  }
  return cfg.threads;
}

}  // namespace psopid::harness
