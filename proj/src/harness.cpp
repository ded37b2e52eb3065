#include "psopid/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "psopid/error.hpp"
#include "psopid/pso.hpp"
#include "psopid/zn.hpp"

namespace psopid::harness {

namespace fs = std::filesystem;

ClosedLoopResult closed_loop(const plant::DiscretePlant& plant, const pid::MimoPidGains& gains,
                             std::span<const double> reference, std::size_t sim_len, double ts,
                             const ClosedLoopOptions& options) {
  const std::size_t n = plant.channels();
  if (gains.loops.size() != n || reference.size() != n) {
    throw Error(ErrorKind::Configuration, "closed loop needs one gain triple and reference per output");
  }
  options.bounds.validate();

  std::vector<std::optional<double>> limits(n);
  if (options.anti_windup) {
    for (std::size_t i = 0; i < n; ++i) {
      limits[i] = pid::windup_limit_for(gains.loops[i], options.bounds.hi);
    }
  }

  ClosedLoopResult out;
  out.errors.ts = ts;
  out.trajectory.reserve(sim_len);
  out.errors.errors.reserve(sim_len);

  auto p = plant.clone();
  p->reset();
  std::vector<pid::PidState> states(n);
  std::vector<double> e(n);
  try {
    for (std::size_t k = 0; k < sim_len; ++k) {
      const auto y = p->output();
      for (std::size_t i = 0; i < n; ++i) e[i] = reference[i] - y[i];
      auto step = pid::mimo_pid_step(gains, states, e, limits);
      const auto u = plant::saturate(step.u, options.bounds);
      states = std::move(step.states);
      out.trajectory.push_back({k, u, y});
      out.errors.errors.push_back(e);
      p->advance(u);
    }
  } catch (const DivergenceError& err) {
    out.diverged = true;
    out.diverged_at = err.step();
  }
  return out;
}

double index_or_penalty(const ClosedLoopResult& run, metrics::Index index) {
  if (run.diverged || run.errors.errors.empty()) return kPenalty;
  const double v = metrics::evaluate(index, run.errors);
  return std::isfinite(v) ? v : kPenalty;
}

ClosedLoopOptions loop_options(const ExperimentConfig& cfg) {
  return {cfg.input_bounds, cfg.anti_windup};
}

GainObjective make_objective(const ExperimentConfig& cfg, metrics::Index index) {
  cfg.validate();
  return [plant = plant::BenchmarkPlant(cfg.plant), reference = cfg.reference,
          sim_len = cfg.sim_len, ts = cfg.ts, options = loop_options(cfg),
          index](std::span<const double> x) {
    const auto gains = pid::MimoPidGains::from_flat(x);
    return index_or_penalty(closed_loop(plant, gains, reference, sim_len, ts, options), index);
  };
}

GainObjective make_objective(const ExperimentConfig& cfg) { return make_objective(cfg, cfg.index); }

ControllerEvaluation evaluate_controller(const ExperimentConfig& cfg, const pid::MimoPidGains& gains,
                                         const fs::path& trajectory_path) {
  const plant::BenchmarkPlant plant(cfg.plant);
  const auto run = closed_loop(plant, gains, cfg.reference, cfg.sim_len, cfg.ts, loop_options(cfg));

  ControllerEvaluation ev;
  ev.gains = gains;
  ev.diverged = run.diverged;
  ev.iae = index_or_penalty(run, metrics::Index::IAE);
  ev.ise = index_or_penalty(run, metrics::Index::ISE);
  ev.itse = index_or_penalty(run, metrics::Index::ITSE);
  if (!run.trajectory.empty()) {
    for (std::size_t i = 0; i < cfg.reference.size(); ++i) {
      std::vector<double> y;
      y.reserve(run.trajectory.size());
      for (const auto& s : run.trajectory) y.push_back(s.y[i]);
      auto summary = metrics::summarize_step(y, cfg.reference[i], cfg.ts);
      if (run.diverged) summary.settling_time_s.reset();
      ev.step.push_back(summary);
    }
  }
  if (!trajectory_path.empty()) {
    std::ofstream os(trajectory_path);
    if (!os) throw Error(ErrorKind::Configuration, "cannot write " + trajectory_path.string());
    plant::write_trajectory_csv(os, run.trajectory, cfg.ts);
    ev.trajectory_file = trajectory_path.filename().string();
  }
  return ev;
}

namespace {

pid::PidGains settings_to_gains(const zn::ZnSettings& s, double ts) {
  // Z-N times are in seconds; the discrete controller counts samples.
  return pid::zn_form_to_gain_form(s.kp, s.Ti / ts, s.Td / ts);
}

ZnMethodResult run_zn_method(const ExperimentConfig& cfg, bool closed, const fs::path& out_dir) {
  ZnMethodResult res;
  res.method = closed ? "zn-closed" : "zn-open";
  const plant::BenchmarkPlant plant(cfg.plant);
  try {
    pid::MimoPidGains gains;
    for (std::size_t i = 0; i < plant.channels(); ++i) {
      ZnLoopResult loop;
      loop.loop = i;
      zn::ZnSettings s;
      if (closed) {
        zn::UltimateSearch search;
        search.loop_index = i;
        search.kp_start = cfg.zn.kp_start;
        search.growth = cfg.zn.growth;
        search.max_kp = cfg.zn.max_kp;
        search.sim_len = cfg.zn.sim_len;
        search.ts = cfg.ts;
        search.reference = cfg.reference[i];
        search.bounds = cfg.input_bounds;
        const auto ult = zn::find_ultimate(plant, search);
        loop.fit = {{"Ku", ult.Ku}, {"Pu", ult.Pu}};
        s = zn::zn_closed_loop(ult, cfg.zn.kind);
      } else {
        const auto y = zn::open_loop_step_response(plant, i, cfg.zn.step_amplitude, cfg.zn.sim_len);
        const auto f = zn::fit_fopdt(y, cfg.zn.step_amplitude, cfg.ts);
        loop.fit = {{"T", f.T}, {"L", f.L}, {"K_process", f.K_process}};
        s = zn::zn_open_loop(f, cfg.zn.kind);
      }
      loop.kp = s.kp;
      loop.Ti = s.Ti;
      loop.Td = s.Td;
      gains.loops.push_back(settings_to_gains(s, cfg.ts));
      res.loops.push_back(std::move(loop));
    }
    res.evaluation = evaluate_controller(cfg, gains, out_dir / ("traj_" + res.method + ".csv"));
    res.ok = true;
  } catch (const Error& e) {
    res.ok = false;
    res.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return res;
}

std::string pso_method_name(metrics::Index index) {
  std::string name(metrics::to_string(index));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return "pso-" + name;
}

PsoMethodResult run_pso_method(const ExperimentConfig& cfg, metrics::Index index,
                               const fs::path& out_dir) {
  PsoMethodResult res;
  res.method = pso_method_name(index);
  res.index = index;
  const auto objective = make_objective(cfg, index);

  for (const auto seed : cfg.seeds) {
    auto pcfg = pso::PsoConfig::with_bounds(cfg.gain_lo, cfg.gain_hi, cfg.pso.v_max_fraction);
    pcfg.pop_size = cfg.pso.pop_size;
    pcfg.max_iter = cfg.pso.max_iter;
    pcfg.c1 = cfg.pso.c1;
    pcfg.c2 = cfg.pso.c2;
    pcfg.w_min = cfg.pso.w_min;
    pcfg.w_max = cfg.pso.w_max;
    pcfg.seed = seed;
    pcfg.threads = resolve_threads(cfg);
    const auto swarm = pso::optimize(objective, pcfg);

    PsoRun run;
    run.seed = seed;
    run.gbest_f = swarm.gbest_f;
    run.history = swarm.history;
    const std::string tag = res.method + "_" + std::to_string(seed);
    run.convergence_file = "conv_" + tag + ".csv";
    {
      std::ofstream os(out_dir / run.convergence_file);
      if (!os) throw Error(ErrorKind::Configuration, "cannot write into " + out_dir.string());
      pso::write_history_csv(os, swarm.history);
    }
    run.evaluation = evaluate_controller(cfg, pid::MimoPidGains::from_flat(swarm.gbest),
                                         out_dir / ("traj_" + tag + ".csv"));
    res.runs.push_back(std::move(run));
  }

  const std::size_t loops = cfg.reference.size();
  for (std::size_t i = 0; i < loops; ++i) {
    std::vector<metrics::StepSummary> per_seed;
    for (const auto& r : res.runs) {
      if (i < r.evaluation.step.size()) per_seed.push_back(r.evaluation.step[i]);
    }
    res.median_step.push_back(median_summary(per_seed));
  }

  std::vector<std::size_t> order(res.runs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return res.runs[a].gbest_f < res.runs[b].gbest_f;
  });
  res.representative = order[(order.size() - 1) / 2];
  std::vector<double> fs_sorted;
  for (auto idx : order) fs_sorted.push_back(res.runs[idx].gbest_f);
  const std::size_t m = fs_sorted.size();
  res.median_gbest_f = m % 2 ? fs_sorted[m / 2] : 0.5 * (fs_sorted[m / 2 - 1] + fs_sorted[m / 2]);

  res.trajectory_file = "traj_" + res.method + ".csv";
  fs::copy_file(out_dir / res.runs[res.representative].evaluation.trajectory_file,
                out_dir / res.trajectory_file, fs::copy_options::overwrite_existing);
  return res;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
  os << text;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunPlan& plan,
                                const fs::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Configuration, "cannot create output directory " + out_dir.string());

  ExperimentReport report;
  report.config = cfg;
  if (plan.zn) {
    report.zn.push_back(run_zn_method(cfg, false, out_dir));
    report.zn.push_back(run_zn_method(cfg, true, out_dir));
  }
  for (const auto index : plan.pso_indices) {
    report.pso.push_back(run_pso_method(cfg, index, out_dir));
  }

  write_text(out_dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(out_dir / "tables.md", render_tables(report));
  return report;
}

ExperimentReport run_comparison(const ExperimentConfig& cfg, const fs::path& out_dir) {
  return run_experiment(cfg, RunPlan{}, out_dir);
}

plant::Trajectory excitation_run(const ExperimentConfig& cfg) {
  cfg.validate();
  std::mt19937_64 engine(cfg.identify.seed);
  auto uniform = [&] {
    const double r = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return cfg.input_bounds.lo + (cfg.input_bounds.hi - cfg.input_bounds.lo) * r;
  };
  std::vector<plant::Vec2> inputs(cfg.identify.samples);
  for (auto& u : inputs) {
    u[0] = uniform();
    u[1] = uniform();
  }
  return plant::simulate_open_loop(cfg.plant, inputs, cfg.input_bounds);
}

IdentifyResult identify_plant(const ExperimentConfig& cfg, std::span<const tsfuzzy::IoSample> log) {
  IdentifyResult out;
  for (std::size_t ch = 0; ch < 2; ++ch) {
    auto spec = tsfuzzy::ModelSpec::benchmark(ch);
    spec.rules = cfg.identify.rules;
    spec.lags = cfg.identify.lags;
    spec.alpha0 = cfg.identify.alpha0;
    out.channels.push_back(tsfuzzy::identify(log, spec));
  }
  return out;
}

}  // namespace psopid::harness
