#include "psopid/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "psopid/error.hpp"
#include "psopid/harness.hpp"

namespace psopid::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
  cmd->add_option("--seed", opts.seed, "Use this single seed instead of the configured list");
  cmd->add_option("--out", opts.out_dir, "Output directory");
}

harness::ExperimentConfig resolve_config(const CommonOptions& opts) {
  auto cfg = opts.config_path.empty() ? harness::ExperimentConfig{}
                                      : harness::load_config(opts.config_path);
  if (opts.seed) {
    cfg.seeds = {*opts.seed};
    cfg.identify.seed = *opts.seed;
  }
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  cfg.validate();
  return cfg;
}

bool is_config_kind(ErrorKind kind) {
  return kind == ErrorKind::Configuration || kind == ErrorKind::InvalidParameter;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Configuration, "cannot create output directory " + dir);
  return dir;
}

int run_simulate(const harness::ExperimentConfig& cfg, bool open, std::ostream& out) {
  const auto dir = ensure_dir(cfg.output_dir);
  const auto traj_path = dir / "traj_simulate.csv";
  nlohmann::json summary;
  if (open) {
    const std::vector<plant::Vec2> inputs(cfg.sim_len,
                                          plant::Vec2{cfg.zn.step_amplitude, cfg.zn.step_amplitude});
    const auto traj = plant::simulate_open_loop(cfg.plant, inputs, cfg.input_bounds);
    std::ofstream os(traj_path);
    plant::write_trajectory_csv(os, traj, cfg.ts);
    summary = {{"mode", "open"}, {"trajectory", traj_path.filename().string()},
               {"final_y", traj.back().y}};
  } else {
    const auto gains = cfg.gains.empty() ? pid::MimoPidGains::from_flat(std::vector<double>(6, 0.0))
                                         : pid::MimoPidGains::from_flat(cfg.gains);
    const auto ev = harness::evaluate_controller(cfg, gains, traj_path);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : ev.step) {
      steps.push_back({{"overshoot_pct", s.overshoot_pct},
                       {"rise_time_s", optional_json(s.rise_time_s)},
                       {"settling_time_s", optional_json(s.settling_time_s)}});
    }
    summary = {{"mode", "closed"},
               {"trajectory", traj_path.filename().string()},
               {"gains", gains.flatten()},
               {"diverged", ev.diverged},
               {"indices", {{"IAE", ev.iae}, {"ISE", ev.ise}, {"ITSE", ev.itse}}},
               {"step_stats", steps}};
  }
  write_json(dir / "simulate.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int run_identify(const harness::ExperimentConfig& cfg, const std::string& log_path,
                 std::ostream& out) {
  const auto dir = ensure_dir(cfg.output_dir);
  plant::Trajectory traj;
  if (log_path.empty()) {
    traj = harness::excitation_run(cfg);
    std::ofstream os(dir / "io_log.csv");
    plant::write_trajectory_csv(os, traj, cfg.ts);
  } else {
    std::ifstream is(log_path);
    if (!is) throw Error(ErrorKind::Configuration, "cannot open I/O log " + log_path);
    traj = plant::read_trajectory_csv(is);
  }
  const auto log = tsfuzzy::io_log_from_trajectory(traj);
  const auto result = harness::identify_plant(cfg, log);

  nlohmann::json channels = nlohmann::json::array();
  for (std::size_t ch = 0; ch < result.channels.size(); ++ch) {
    const auto& id = result.channels[ch];
    const std::string model_file = "model_y" + std::to_string(ch + 1) + ".json";
    write_json(dir / model_file, tsfuzzy::to_json(id.model));
    channels.push_back({{"output", ch},
                        {"model", model_file},
                        {"holdout_rmse", id.report.holdout_rmse},
                        {"train_rmse", id.report.train_rmse},
                        {"train_samples", id.report.train_samples},
                        {"holdout_samples", id.report.holdout_samples},
                        {"membership_fallbacks", id.report.membership_fallbacks}});
  }
  const nlohmann::json summary = {{"samples", log.size()}, {"channels", channels}};
  write_json(dir / "identify.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int run_report(const harness::ExperimentConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.output_dir;
  std::ifstream is(dir / "report.json");
  if (!is) throw Error(ErrorKind::Configuration, "no report.json in " + dir.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("report.json is not valid JSON: ") + e.what());
  }
  const auto report = harness::report_from_json(j);
  const auto tables = harness::render_tables(report);
  std::ofstream(dir / "tables.md", std::ios::binary) << tables;
  out << tables;
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PID auto-tuning laboratory: Z-N baselines and PSO-PID on a MIMO nonlinear plant"};
  app.require_subcommand(1);

  CommonOptions opts;
  bool open_loop = false;
  std::string index_name;
  std::string log_path;

  auto* simulate = app.add_subcommand("simulate", "Simulate the plant (closed loop by default)");
  add_common(simulate, opts);
  simulate->add_flag("--open", open_loop, "Open-loop step on both inputs");

  auto* tune_zn = app.add_subcommand("tune-zn", "Ziegler-Nichols open- and closed-loop tuning");
  add_common(tune_zn, opts);

  auto* tune_pso = app.add_subcommand("tune-pso", "PSO-PID tuning over the configured seeds");
  add_common(tune_pso, opts);
  tune_pso->add_option("--index", index_name, "IAE, ISE or ITSE (default from config)");

  auto* identify = app.add_subcommand("identify", "Takagi-Sugeno identification of both outputs");
  add_common(identify, opts);
  identify->add_option("--log", log_path, "I/O log in trajectory CSV format");

  auto* compare = app.add_subcommand("compare", "Z-N versus PSO-PID for every index and seed");
  add_common(compare, opts);

  auto* report = app.add_subcommand("report", "Re-render tables from a stored report.json");
  add_common(report, opts);

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    const auto cfg = resolve_config(opts);
    if (simulate->parsed()) return run_simulate(cfg, open_loop, out);
    if (identify->parsed()) return run_identify(cfg, log_path, out);
    if (report->parsed()) return run_report(cfg, out);

    harness::RunPlan plan;
    if (tune_zn->parsed()) {
      plan.pso_indices.clear();
    } else if (tune_pso->parsed()) {
      plan.zn = false;
      plan.pso_indices = {index_name.empty() ? cfg.index : metrics::parse_index(index_name)};
    }
    const auto result = harness::run_experiment(cfg, plan, cfg.output_dir);
    out << harness::render_tables(result);
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return is_config_kind(e.kind()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace psopid::cli
