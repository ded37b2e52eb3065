#include "psopid/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "psopid/error.hpp"

namespace psopid::harness {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json optional_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double number_or_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

json gains_json(const pid::MimoPidGains& g) {
  json arr = json::array();
  for (const auto& l : g.loops) arr.push_back({{"kp", l.kp}, {"ki", l.ki}, {"kd", l.kd}});
  return arr;
}

pid::MimoPidGains gains_from(const json& j) {
  pid::MimoPidGains g;
  for (const auto& l : j) {
    g.loops.push_back({l.at("kp").get<double>(), l.at("ki").get<double>(), l.at("kd").get<double>()});
  }
  return g;
}

json step_json(const metrics::StepSummary& s) {
  return {{"overshoot_pct", s.overshoot_pct},
          {"rise_time_s", optional_number(s.rise_time_s)},
          {"settling_time_s", optional_number(s.settling_time_s)}};
}

metrics::StepSummary step_from(const json& j) {
  metrics::StepSummary s;
  s.overshoot_pct = j.at("overshoot_pct").get<double>();
  s.rise_time_s = read_optional(j, "rise_time_s");
  s.settling_time_s = read_optional(j, "settling_time_s");
  return s;
}

json evaluation_json(const ControllerEvaluation& ev) {
  json steps = json::array();
  for (const auto& s : ev.step) steps.push_back(step_json(s));
  return {{"gains", gains_json(ev.gains)},
          {"step_stats", steps},
          {"indices", {{"IAE", ev.iae}, {"ISE", ev.ise}, {"ITSE", ev.itse}}},
          {"diverged", ev.diverged},
          {"trajectory", ev.trajectory_file}};
}

ControllerEvaluation evaluation_from(const json& j) {
  ControllerEvaluation ev;
  ev.gains = gains_from(j.at("gains"));
  for (const auto& s : j.at("step_stats")) ev.step.push_back(step_from(s));
  const auto& idx = j.at("indices");
  ev.iae = idx.at("IAE").get<double>();
  ev.ise = idx.at("ISE").get<double>();
  ev.itse = idx.at("ITSE").get<double>();
  ev.diverged = j.at("diverged").get<bool>();
  ev.trajectory_file = j.at("trajectory").get<std::string>();
  return ev;
}

double settling_or_inf(const metrics::StepSummary& s) { return s.settling_time_s.value_or(kInf); }

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return kInf;
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string fmt(double v, int precision = 4) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt(std::optional<double> v, int precision = 4) {
  return v ? fmt(*v, precision) : std::string("n/a");
}

}  // namespace

double ControllerEvaluation::index(metrics::Index which) const {
  switch (which) {
    case metrics::Index::IAE: return iae;
    case metrics::Index::ISE: return ise;
    case metrics::Index::ITSE: return itse;
  }
  return kInf;
}

const ZnMethodResult* ExperimentReport::baseline() const {
  for (const char* name : {"zn-open", "zn-closed"}) {
    for (const auto& m : zn) {
      if (m.method == name && m.ok && m.evaluation) return &m;
    }
  }
  return nullptr;
}

bool MethodVerdict::passed() const {
  if (loops.empty()) return false;
  return std::all_of(loops.begin(), loops.end(), [](const LoopVerdict& v) {
    return v.settling_better && v.overshoot_not_worse;
  });
}

std::vector<MethodVerdict> compare_to_baseline(const ExperimentReport& report) {
  std::vector<MethodVerdict> out;
  const auto* base = report.baseline();
  for (const auto& m : report.pso) {
    MethodVerdict v;
    v.method = m.method;
    if (base) {
      const auto& bsteps = base->evaluation->step;
      for (std::size_t i = 0; i < m.median_step.size() && i < bsteps.size(); ++i) {
        LoopVerdict lv;
        lv.settling_better = settling_or_inf(m.median_step[i]) < settling_or_inf(bsteps[i]);
        lv.overshoot_not_worse = m.median_step[i].overshoot_pct <= bsteps[i].overshoot_pct;
        v.loops.push_back(lv);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

metrics::StepSummary median_summary(const std::vector<metrics::StepSummary>& xs) {
  std::vector<double> os;
  std::vector<double> rise;
  std::vector<double> settle;
  for (const auto& s : xs) {
    os.push_back(s.overshoot_pct);
    rise.push_back(s.rise_time_s.value_or(kInf));
    settle.push_back(settling_or_inf(s));
  }
  metrics::StepSummary m;
  m.overshoot_pct = xs.empty() ? 0.0 : median_of(os);
  if (const double r = median_of(rise); std::isfinite(r)) m.rise_time_s = r;
  if (const double s = median_of(settle); std::isfinite(s)) m.settling_time_s = s;
  return m;
}

json to_json(const ExperimentReport& report) {
  json zn = json::array();
  for (const auto& m : report.zn) {
    json loops = json::array();
    for (const auto& l : m.loops) {
      loops.push_back({{"method", m.method},
                       {"loop", l.loop},
                       {"kp", l.kp},
                       {"Ti", finite_or_null(l.Ti)},
                       {"Td", l.Td},
                       {"fit", l.fit}});
    }
    json entry = {{"method", m.method}, {"ok", m.ok}, {"error", m.error}, {"tuning", loops}};
    entry["evaluation"] = m.evaluation ? evaluation_json(*m.evaluation) : json(nullptr);
    zn.push_back(std::move(entry));
  }

  json pso = json::array();
  for (const auto& m : report.pso) {
    json runs = json::array();
    for (const auto& r : m.runs) {
      runs.push_back({{"seed", r.seed},
                      {"gbest_f", r.gbest_f},
                      {"history", r.history},
                      {"convergence", r.convergence_file},
                      {"evaluation", evaluation_json(r.evaluation)}});
    }
    json med = json::array();
    for (const auto& s : m.median_step) med.push_back(step_json(s));
    pso.push_back({{"method", m.method},
                   {"index", std::string(metrics::to_string(m.index))},
                   {"runs", runs},
                   {"median_step_stats", med},
                   {"median_gbest_f", m.median_gbest_f},
                   {"representative_seed", m.runs.empty() ? json(nullptr) : json(m.runs[m.representative].seed)},
                   {"trajectory", m.trajectory_file}});
  }

  json verdicts = json::array();
  for (const auto& v : compare_to_baseline(report)) {
    json loops = json::array();
    for (const auto& l : v.loops) {
      loops.push_back({{"settling_better", l.settling_better},
                       {"overshoot_not_worse", l.overshoot_not_worse}});
    }
    verdicts.push_back({{"method", v.method}, {"loops", loops}, {"passed", v.passed()}});
  }

  // The output directory is where the report lives, not part of the result.
  json config = to_json(report.config);
  config.erase("output_dir");
  const auto* base = report.baseline();
  return {{"config", config},
          {"zn", zn},
          {"pso", pso},
          {"baseline", base ? json(base->method) : json(nullptr)},
          {"comparison", verdicts}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    ExperimentReport report;
    report.config = config_from_json(j.at("config"));
    for (const auto& z : j.at("zn")) {
      ZnMethodResult m;
      m.method = z.at("method").get<std::string>();
      m.ok = z.at("ok").get<bool>();
      m.error = z.at("error").get<std::string>();
      for (const auto& l : z.at("tuning")) {
        ZnLoopResult lr;
        lr.loop = l.at("loop").get<std::size_t>();
        lr.kp = l.at("kp").get<double>();
        lr.Ti = number_or_inf(l.at("Ti"));
        lr.Td = l.at("Td").get<double>();
        lr.fit = l.at("fit");
        m.loops.push_back(std::move(lr));
      }
      if (!z.at("evaluation").is_null()) m.evaluation = evaluation_from(z.at("evaluation"));
      report.zn.push_back(std::move(m));
    }
    for (const auto& p : j.at("pso")) {
      PsoMethodResult m;
      m.method = p.at("method").get<std::string>();
      m.index = metrics::parse_index(p.at("index").get<std::string>());
      for (const auto& r : p.at("runs")) {
        PsoRun run;
        run.seed = r.at("seed").get<std::uint64_t>();
        run.gbest_f = r.at("gbest_f").get<double>();
        run.history = r.at("history").get<std::vector<double>>();
        run.convergence_file = r.at("convergence").get<std::string>();
        run.evaluation = evaluation_from(r.at("evaluation"));
        m.runs.push_back(std::move(run));
      }
      for (const auto& s : p.at("median_step_stats")) m.median_step.push_back(step_from(s));
      m.median_gbest_f = p.at("median_gbest_f").get<double>();
      if (!p.at("representative_seed").is_null()) {
        const auto seed = p.at("representative_seed").get<std::uint64_t>();
        for (std::size_t i = 0; i < m.runs.size(); ++i) {
          if (m.runs[i].seed == seed) {
            m.representative = i;
            break;
          }
        }
      }
      m.trajectory_file = p.at("trajectory").get<std::string>();
      report.pso.push_back(std::move(m));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("malformed report JSON: ") + e.what());
  }
}

std::string render_tables(const ExperimentReport& report) {
  struct Row {
    std::string name;
    const pid::MimoPidGains* gains;
    std::vector<metrics::StepSummary> steps;
  };
  std::vector<Row> rows;
  for (const auto& m : report.zn) {
    if (m.evaluation) rows.push_back({m.method, &m.evaluation->gains, m.evaluation->step});
  }
  for (const auto& m : report.pso) {
    if (m.runs.empty()) continue;
    const auto& rep = m.runs[m.representative];
    rows.push_back({m.method + " (seed " + std::to_string(rep.seed) + ")", &rep.evaluation.gains,
                    rep.evaluation.step});
  }

  std::ostringstream os;
  const std::size_t loops = report.config.reference.size();
  for (std::size_t i = 0; i < loops; ++i) {
    os << "## Tuned PID gains (y" << i + 1 << ")\n\n";
    os << "| Tuning method | kp | ki | kd |\n|---|---|---|---|\n";
    for (const auto& r : rows) {
      if (i >= r.gains->loops.size()) continue;
      const auto& g = r.gains->loops[i];
      os << "| " << r.name << " | " << fmt(g.kp) << " | " << fmt(g.ki) << " | " << fmt(g.kd)
         << " |\n";
    }
    os << '\n';
  }
  for (std::size_t i = 0; i < loops; ++i) {
    os << "## Step response (y" << i + 1 << ")\n\n";
    os << "| Tuning method | Overshoot (%) | Rise time (s) | Settling time (s) |\n"
          "|---|---|---|---|\n";
    for (const auto& r : rows) {
      if (i >= r.steps.size()) continue;
      const auto& s = r.steps[i];
      os << "| " << r.name << " | " << fmt(s.overshoot_pct) << " | " << fmt(s.rise_time_s) << " | "
         << fmt(s.settling_time_s) << " |\n";
    }
    for (const auto& m : report.pso) {
      if (i >= m.median_step.size()) continue;
      const auto& s = m.median_step[i];
      os << "| " << m.method << " (median of " << m.runs.size() << " seeds) | "
         << fmt(s.overshoot_pct) << " | " << fmt(s.rise_time_s) << " | " << fmt(s.settling_time_s)
         << " |\n";
    }
    os << '\n';
  }
  for (const auto& m : report.zn) {
    if (!m.ok) os << "- " << m.method << " failed: " << m.error << '\n';
  }
  if (const auto* base = report.baseline()) {
    os << "- Z-N baseline: " << base->method << '\n';
  }
  return os.str();
}

}  // namespace psopid::harness
