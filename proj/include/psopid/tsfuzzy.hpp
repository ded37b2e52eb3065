#pragma once

// Takagi-Sugeno fuzzy MISO model with recursive weighted least-squares
// estimation of the rule consequents.
//
// Rule i fires with normalized Gaussian strength mu_i over an antecedent
// vector and contributes the affine local model
//   theta_i . [y(k-1)..y(k-n), u(k-1)..u(k-n), 1].
// Stacking the blocks mu_i [y.., u.., 1] over rules gives one regressor phi
// that is linear in the stacked parameters, so a single RWLS estimator
// updates every rule jointly.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "psopid/plant.hpp"

namespace psopid::tsfuzzy {

enum class Signal { Output, Input };

/// signal_channel(k - lag), lag >= 1.
struct LagTerm {
  Signal signal = Signal::Output;
  std::size_t channel = 0;
  std::size_t lag = 1;

  friend bool operator==(const LagTerm&, const LagTerm&) = default;
};

struct MembershipSpec {
  /// centers[i][d], widths[i][d] for rule i and antecedent variable d.
  std::vector<std::vector<double>> centers;
  std::vector<std::vector<double>> widths;

  [[nodiscard]] std::size_t rules() const noexcept { return centers.size(); }
  void validate(std::size_t dims) const;
};

struct TsModel {
  std::size_t lags = 2;
  std::size_t output_channel = 0;
  std::size_t input_channel = 0;
  std::vector<LagTerm> antecedents;
  MembershipSpec memberships;
  /// theta[i] = [a_i1..a_in, b_i1..b_in, c_i].
  std::vector<std::vector<double>> theta;

  [[nodiscard]] std::size_t rules() const noexcept { return memberships.rules(); }
  [[nodiscard]] std::size_t block_size() const noexcept { return 2 * lags + 1; }
  [[nodiscard]] std::size_t regressor_size() const noexcept { return rules() * block_size(); }
  void validate() const;
};

struct MembershipResult {
  std::vector<double> mu;
  bool fallback = false;
};

/// mu_i = w_i / sum_j w_j, w_i = exp(-sum_d ((x_d - c_id) / s_id)^2). The
/// weights are shifted by the largest one before normalizing; if the
/// distances are not finite the result is the uniform 1/r.
MembershipResult membership_degrees(const TsModel& model, std::span<const double> antecedent);
std::vector<double> memberships(const TsModel& model, std::span<const double> antecedent);

/// y_hist = [y(k-1)..], u_hist = [u(k-1)..], each at least `lags` long.
std::vector<double> build_regressor(const TsModel& model, std::span<const double> y_hist,
                                    std::span<const double> u_hist, std::span<const double> mu);

double predict(const TsModel& model, std::span<const double> phi);

struct RwlsState {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd P;
  double alpha0 = 1e4;

  /// theta = 0, P = alpha0 I.
  static RwlsState initial(std::size_t dims, double alpha0 = 1e4);
};

/// L = P phi / (1/mu_k + phi' P phi); theta' = theta + L (y - phi' theta);
/// P' = P - L phi' P, then symmetrized.
RwlsState rwls_update(const RwlsState& state, const Eigen::VectorXd& phi, double y, double mu_k);

struct IoSample {
  std::vector<double> u;
  std::vector<double> y;
};

struct ModelSpec {
  std::size_t output_channel = 0;
  std::size_t input_channel = 0;
  std::size_t rules = 4;
  std::size_t lags = 2;
  std::vector<LagTerm> antecedents;
  double alpha0 = 1e4;
  double holdout_fraction = 0.2;
  /// When empty, centers are placed on a uniform grid over the training range.
  std::optional<MembershipSpec> memberships;

  /// Output `channel` of the two-channel benchmark plant with antecedents
  /// [y(k-1), y(k-2), u_own(k-1), u_own(k-2), u_other(k-1)].
  static ModelSpec benchmark(std::size_t channel);
};

struct FitReport {
  double holdout_rmse = 0.0;
  double train_rmse = 0.0;
  std::size_t train_samples = 0;
  std::size_t holdout_samples = 0;
  std::size_t membership_fallbacks = 0;
};

struct Identification {
  TsModel model;
  FitReport report;
};

/// Runs RWLS over the leading part of the log (weight = dominant firing
/// strength per sample) and scores one-step-ahead prediction on the held-out
/// tail.
Identification identify(std::span<const IoSample> io_log, const ModelSpec& spec);

/// Antecedent vector for predicting sample k.
std::vector<double> antecedent_at(std::span<const LagTerm> terms, std::span<const IoSample> log,
                                  std::size_t k);

/// One-step-ahead prediction of y_{output}(k) from the log's true history.
double predict_at(const TsModel& model, std::span<const IoSample> log, std::size_t k);

/// Grid placement: center_id = lo_d + (i + 1/2) h_d, width h_d = (hi_d - lo_d)/r.
MembershipSpec grid_memberships(std::span<const std::vector<double>> antecedents,
                                std::size_t rules);

std::vector<IoSample> io_log_from_trajectory(const plant::Trajectory& traj);

nlohmann::json to_json(const TsModel& model);
TsModel model_from_json(const nlohmann::json& j);

}  // namespace psopid::tsfuzzy
