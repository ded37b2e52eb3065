#include "psopid/tsfuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psopid/error.hpp"

namespace psopid::tsfuzzy {

namespace {

constexpr double kBlowUpFactor = 1e12;

void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

std::size_t max_lag(const ModelSpec& spec) {
  std::size_t m = spec.lags;
  for (const auto& t : spec.antecedents) m = std::max(m, t.lag);
  return m;
}

double signal_value(const IoSample& s, const LagTerm& t) {
  const auto& values = t.signal == Signal::Output ? s.y : s.u;
  require(t.channel < values.size(), ErrorKind::Configuration, "antecedent channel out of range");
  return values[t.channel];
}

void history_at(std::span<const IoSample> log, std::size_t k, std::size_t n, std::size_t out_ch,
                std::size_t in_ch, std::vector<double>& y_hist, std::vector<double>& u_hist) {
  y_hist.resize(n);
  u_hist.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = log[k - 1 - j];
    require(out_ch < s.y.size() && in_ch < s.u.size(), ErrorKind::Configuration,
            "model channel out of range for the I/O log");
    y_hist[j] = s.y[out_ch];
    u_hist[j] = s.u[in_ch];
  }
}

}  // namespace

void MembershipSpec::validate(std::size_t dims) const {
  require(!centers.empty(), ErrorKind::Configuration, "membership spec needs at least one rule");
  require(widths.size() == centers.size(), ErrorKind::Configuration,
          "membership centers/widths rule count mismatch");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    require(centers[i].size() == dims && widths[i].size() == dims, ErrorKind::Configuration,
            "membership dimension does not match the antecedent");
    for (double w : widths[i]) {
      require(w > 0.0 && std::isfinite(w), ErrorKind::InvalidParameter,
              "membership widths must be positive");
    }
  }
}

void TsModel::validate() const {
  require(lags >= 1, ErrorKind::Configuration, "model lags must be at least 1");
  require(!antecedents.empty(), ErrorKind::Configuration, "model needs antecedent variables");
  memberships.validate(antecedents.size());
  require(theta.size() == rules(), ErrorKind::Configuration, "theta rule count mismatch");
  for (const auto& t : theta) {
    require(t.size() == block_size(), ErrorKind::Configuration,
            "theta block must have 2*lags+1 entries");
  }
}

MembershipResult membership_degrees(const TsModel& model, std::span<const double> x) {
  const auto& ms = model.memberships;
  const std::size_t r = ms.rules();
  require(r >= 1, ErrorKind::Configuration, "model has no rules");
  require(x.size() == model.antecedents.size(), ErrorKind::Configuration,
          "antecedent dimension mismatch");

  std::vector<double> dist(r, 0.0);
  bool finite = true;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double z = (x[d] - ms.centers[i][d]) / ms.widths[i][d];
      dist[i] += z * z;
    }
    finite = finite && std::isfinite(dist[i]);
  }

  MembershipResult out;
  if (!finite) {
    out.mu.assign(r, 1.0 / static_cast<double>(r));
    out.fallback = true;
    return out;
  }
  const double nearest = *std::min_element(dist.begin(), dist.end());
  out.mu.resize(r);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    out.mu[i] = std::exp(-(dist[i] - nearest));
    total += out.mu[i];
  }
  for (double& m : out.mu) m /= total;
  return out;
}

std::vector<double> memberships(const TsModel& model, std::span<const double> antecedent) {
  return membership_degrees(model, antecedent).mu;
}

std::vector<double> build_regressor(const TsModel& model, std::span<const double> y_hist,
                                    std::span<const double> u_hist, std::span<const double> mu) {
  const std::size_t n = model.lags;
  require(y_hist.size() >= n && u_hist.size() >= n, ErrorKind::InvalidInput,
          "regressor history is shorter than the model lags");
  require(mu.size() == model.rules(), ErrorKind::Configuration, "membership count mismatch");

  std::vector<double> phi;
  phi.reserve(model.regressor_size());
  for (double m : mu) {
    for (std::size_t j = 0; j < n; ++j) phi.push_back(m * y_hist[j]);
    for (std::size_t j = 0; j < n; ++j) phi.push_back(m * u_hist[j]);
    phi.push_back(m);
  }
  return phi;
}

double predict(const TsModel& model, std::span<const double> phi) {
  require(phi.size() == model.regressor_size(), ErrorKind::Configuration,
          "regressor length does not match the model");
  require(model.theta.size() == model.rules(), ErrorKind::Configuration,
          "theta rule count mismatch");
  double acc = 0.0;
  std::size_t idx = 0;
  for (const auto& block : model.theta) {
    require(block.size() == model.block_size(), ErrorKind::Configuration,
            "theta block has the wrong length");
    for (double t : block) acc += t * phi[idx++];
  }
  return acc;
}

RwlsState RwlsState::initial(std::size_t dims, double alpha0) {
  require(alpha0 > 0.0, ErrorKind::InvalidParameter, "alpha0 must be positive");
  RwlsState s;
  s.theta_hat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims));
  s.P = alpha0 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dims),
                                           static_cast<Eigen::Index>(dims));
  s.alpha0 = alpha0;
  return s;
}

RwlsState rwls_update(const RwlsState& state, const Eigen::VectorXd& phi, double y, double mu_k) {
  require(phi.size() == state.theta_hat.size(), ErrorKind::Configuration,
          "regressor length does not match the estimator");
  require(mu_k > 0.0 && std::isfinite(mu_k), ErrorKind::InvalidInput,
          "sample weight must be positive");

  const Eigen::VectorXd p_phi = state.P * phi;
  const double denom = 1.0 / mu_k + phi.dot(p_phi);
  require(denom > 0.0 && std::isfinite(denom), ErrorKind::Numerical,
          "RWLS gain denominator is not positive");

  RwlsState next;
  next.alpha0 = state.alpha0;
  const Eigen::VectorXd gain = p_phi / denom;
  next.theta_hat = state.theta_hat + gain * (y - phi.dot(state.theta_hat));
  Eigen::MatrixXd P = state.P - gain * p_phi.transpose();
  next.P = 0.5 * (P + P.transpose());
  return next;
}

ModelSpec ModelSpec::benchmark(std::size_t channel) {
  require(channel < 2, ErrorKind::Configuration, "benchmark plant has two channels");
  const std::size_t other = 1 - channel;
  ModelSpec s;
  s.output_channel = channel;
  s.input_channel = channel;
  s.rules = 4;
  s.lags = 2;
  s.antecedents = {
      {Signal::Output, channel, 1}, {Signal::Output, channel, 2}, {Signal::Input, channel, 1},
      {Signal::Input, channel, 2},  {Signal::Input, other, 1},
  };
  return s;
}

std::vector<double> antecedent_at(std::span<const LagTerm> terms, std::span<const IoSample> log,
                                  std::size_t k) {
  std::vector<double> x;
  x.reserve(terms.size());
  for (const auto& t : terms) {
    require(t.lag >= 1 && t.lag <= k, ErrorKind::InvalidInput,
            "antecedent lag reaches before the start of the log");
    x.push_back(signal_value(log[k - t.lag], t));
  }
  return x;
}

double predict_at(const TsModel& model, std::span<const IoSample> log, std::size_t k) {
  require(k >= model.lags && k < log.size(), ErrorKind::InvalidInput,
          "prediction index outside the usable log range");
  const auto x = antecedent_at(model.antecedents, log, k);
  const auto mu = memberships(model, x);
  std::vector<double> y_hist;
  std::vector<double> u_hist;
  history_at(log, k, model.lags, model.output_channel, model.input_channel, y_hist, u_hist);
  return predict(model, build_regressor(model, y_hist, u_hist, mu));
}

MembershipSpec grid_memberships(std::span<const std::vector<double>> antecedents,
                                std::size_t rules) {
  require(!antecedents.empty(), ErrorKind::InvalidInput, "no antecedent samples for the grid");
  require(rules >= 1, ErrorKind::Configuration, "rule count must be at least 1");
  const std::size_t dims = antecedents.front().size();
  std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
  for (const auto& x : antecedents) {
    for (std::size_t d = 0; d < dims; ++d) {
      lo[d] = std::min(lo[d], x[d]);
      hi[d] = std::max(hi[d], x[d]);
    }
  }
  MembershipSpec ms;
  ms.centers.assign(rules, std::vector<double>(dims));
  ms.widths.assign(rules, std::vector<double>(dims));
  for (std::size_t d = 0; d < dims; ++d) {
    double h = (hi[d] - lo[d]) / static_cast<double>(rules);
    if (!(h > 0.0)) h = 1.0;  // constant signal
    for (std::size_t i = 0; i < rules; ++i) {
      ms.centers[i][d] = lo[d] + (static_cast<double>(i) + 0.5) * h;
      ms.widths[i][d] = h;
    }
  }
  return ms;
}

Identification identify(std::span<const IoSample> log, const ModelSpec& spec) {
  require(spec.rules >= 1 && spec.lags >= 1, ErrorKind::Configuration,
          "identification needs rules >= 1 and lags >= 1");
  require(!spec.antecedents.empty(), ErrorKind::Configuration, "no antecedent variables");
  require(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0, ErrorKind::Configuration,
          "holdout fraction must be in (0, 1)");
  const std::size_t dims = spec.rules * (2 * spec.lags + 1);
  require(log.size() > dims, ErrorKind::InvalidInput,
          "I/O log needs more than r*(2n+1) samples");

  const std::size_t k0 = max_lag(spec);
  require(log.size() > k0 + 2, ErrorKind::InvalidInput, "I/O log too short for the lags");
  const std::size_t rows = log.size() - k0;
  const auto holdout = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(spec.holdout_fraction * static_cast<double>(rows))));
  const std::size_t train = rows - holdout;
  require(train >= 1, ErrorKind::InvalidInput, "no training samples left");

  TsModel model;
  model.lags = spec.lags;
  model.output_channel = spec.output_channel;
  model.input_channel = spec.input_channel;
  model.antecedents = spec.antecedents;

  std::vector<std::vector<double>> train_x;
  train_x.reserve(train);
  for (std::size_t k = k0; k < k0 + train; ++k) train_x.push_back(antecedent_at(spec.antecedents, log, k));

  model.memberships = spec.memberships ? *spec.memberships : grid_memberships(train_x, spec.rules);
  require(model.memberships.rules() == spec.rules, ErrorKind::Configuration,
          "membership spec rule count does not match");
  model.theta.assign(spec.rules, std::vector<double>(model.block_size(), 0.0));
  model.validate();

  FitReport report;
  RwlsState est = RwlsState::initial(dims, spec.alpha0);
  std::vector<double> y_hist;
  std::vector<double> u_hist;
  for (std::size_t row = 0; row < train; ++row) {
    const std::size_t k = k0 + row;
    const auto m = membership_degrees(model, train_x[row]);
    report.membership_fallbacks += m.fallback;
    history_at(log, k, spec.lags, spec.output_channel, spec.input_channel, y_hist, u_hist);
    const auto phi = build_regressor(model, y_hist, u_hist, m.mu);
    const double mu_k = *std::max_element(m.mu.begin(), m.mu.end());
    est = rwls_update(est, Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size())),
                      log[k].y[spec.output_channel], mu_k);
    if (!(est.P.trace() <= kBlowUpFactor * spec.alpha0)) {
      throw Error(ErrorKind::IdentificationDiverged,
                  "RWLS covariance blew up at sample " + std::to_string(k));
    }
  }

  for (std::size_t i = 0; i < spec.rules; ++i) {
    for (std::size_t j = 0; j < model.block_size(); ++j) {
      model.theta[i][j] = est.theta_hat(static_cast<Eigen::Index>(i * model.block_size() + j));
    }
  }

  auto rmse = [&](std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t k = from; k < to; ++k) {
      const double err = predict_at(model, log, k) - log[k].y[spec.output_channel];
      acc += err * err;
    }
    return std::sqrt(acc / static_cast<double>(to - from));
  };
  report.train_samples = train;
  report.holdout_samples = holdout;
  report.train_rmse = rmse(k0, k0 + train);
  report.holdout_rmse = rmse(k0 + train, log.size());
  return {std::move(model), report};
}

std::vector<IoSample> io_log_from_trajectory(const plant::Trajectory& traj) {
  std::vector<IoSample> log;
  log.reserve(traj.size());
  for (const auto& s : traj) log.push_back({s.u, s.y});
  return log;
}

nlohmann::json to_json(const TsModel& model) {
  nlohmann::json ants = nlohmann::json::array();
  for (const auto& t : model.antecedents) {
    ants.push_back({{"signal", t.signal == Signal::Output ? "y" : "u"},
                    {"channel", t.channel},
                    {"lag", t.lag}});
  }
  return {
      {"r", model.rules()},
      {"lags", model.lags},
      {"centers", model.memberships.centers},
      {"widths", model.memberships.widths},
      {"theta", model.theta},
      {"output_channel", model.output_channel},
      {"input_channel", model.input_channel},
      {"antecedents", ants},
  };
}

TsModel model_from_json(const nlohmann::json& j) {
  try {
    TsModel m;
    m.lags = j.at("lags").get<std::size_t>();
    m.memberships.centers = j.at("centers").get<std::vector<std::vector<double>>>();
    m.memberships.widths = j.at("widths").get<std::vector<std::vector<double>>>();
    m.theta = j.at("theta").get<std::vector<std::vector<double>>>();
    m.output_channel = j.value("output_channel", std::size_t{0});
    m.input_channel = j.value("input_channel", m.output_channel);
    if (j.contains("antecedents")) {
      for (const auto& t : j.at("antecedents")) {
        const auto sig = t.at("signal").get<std::string>();
        require(sig == "y" || sig == "u", ErrorKind::Configuration, "antecedent signal must be y or u");
        m.antecedents.push_back({sig == "y" ? Signal::Output : Signal::Input,
                                 t.at("channel").get<std::size_t>(), t.at("lag").get<std::size_t>()});
      }
    } else {
      m.antecedents = ModelSpec::benchmark(m.output_channel).antecedents;
    }
    require(j.at("r").get<std::size_t>() == m.rules(), ErrorKind::Configuration,
            "model 'r' does not match the number of centers");
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace psopid::tsfuzzy
