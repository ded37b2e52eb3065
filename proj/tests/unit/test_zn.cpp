#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "psopid/error.hpp"
#include "psopid/zn.hpp"

using namespace psopid;
using namespace psopid::zn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> fopdt_samples(double K, double T, double L, double amplitude, double ts,
                                  double duration) {
  std::vector<double> y;
  for (std::size_t k = 0; static_cast<double>(k) * ts <= duration; ++k) {
    const double t = static_cast<double>(k) * ts;
    y.push_back(t < L ? 0.0 : K * amplitude * (1.0 - std::exp(-(t - L) / T)));
  }
  return y;
}

// y(k) = sum a_j y(k-j) + sum b_j u(k-j) under u = -kp y has characteristic
// polynomial z^n - sum a_j z^(n-j) + kp sum b_j z^(n-j). Roots come from the
// companion matrix; Ku is where the largest root modulus crosses 1, and Pu is
// 2 pi / arg of that root (in samples).
struct LinearOracle {
  double Ku;
  double Pu_samples;
};

Eigen::VectorXcd closed_loop_roots(const std::vector<double>& a, const std::vector<double>& b,
                                   double kp) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> c(n + 1, 0.0);  // c[0] z^n + c[1] z^(n-1) + ...
  c[0] = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) c[j + 1] -= a[j];
  for (std::size_t j = 0; j < b.size(); ++j) c[j + 1] += kp * b[j];
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) comp(0, j) = -c[j + 1];
  for (std::size_t j = 1; j < n; ++j) comp(j, j - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(comp).eigenvalues();
}

double spectral_radius(const Eigen::VectorXcd& r) { return r.cwiseAbs().maxCoeff(); }

LinearOracle linear_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double lo = 0.0, hi = 1.0;
  while (spectral_radius(closed_loop_roots(a, b, hi)) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spectral_radius(closed_loop_roots(a, b, mid)) < 1.0 ? lo : hi) = mid;
  }
  const auto roots = closed_loop_roots(a, b, hi);
  Eigen::Index idx = 0;
  roots.cwiseAbs().maxCoeff(&idx);
  return {hi, 2.0 * M_PI / std::abs(std::arg(roots[idx]))};
}

// First-order lag with a ten-sample transport delay.
const std::vector<double> kDelayA{0.9};
const std::vector<double> kDelayB{0, 0, 0, 0, 0, 0, 0, 0, 0, 0.1};

}  // namespace

TEST(FitFopdt, RecoversExactFopdt) {
  const auto y = fopdt_samples(1.0, 1.0, 0.5, 1.0, 0.001, 12.0);
  const auto f = fit_fopdt(y, 1.0, 0.001);
  EXPECT_NEAR(f.T, 1.0, 0.02);
  EXPECT_NEAR(f.L, 0.5, 0.01);
  EXPECT_NEAR(f.K_process, 1.0, 1e-3);
}

TEST(FitFopdt, PureFirstOrderHasNoDeadTime) {
  const auto y = fopdt_samples(2.0, 0.8, 0.0, 1.0, 0.001, 10.0);
  const auto f = fit_fopdt(y, 1.0, 0.001);
  EXPECT_NEAR(f.L, 0.0, 0.01);
  EXPECT_NEAR(f.T, 0.8, 0.016);
  EXPECT_NEAR(f.K_process, 2.0, 2e-3);
}

TEST(FitFopdt, CoScalingInvariant) {
  const auto y1 = fopdt_samples(1.5, 2.0, 0.3, 1.0, 0.01, 25.0);
  const auto y2 = fopdt_samples(1.5, 2.0, 0.3, 2.0, 0.01, 25.0);
  const auto a = fit_fopdt(y1, 1.0, 0.01);
  const auto b = fit_fopdt(y2, 2.0, 0.01);
  EXPECT_NEAR(a.T, b.T, 1e-12);
  EXPECT_NEAR(a.L, b.L, 1e-12);
  EXPECT_NEAR(a.K_process, b.K_process, 1e-12);
}

TEST(FitFopdt, RampHasNoSteadyState) {
  std::vector<double> y;
  for (int k = 0; k < 100; ++k) y.push_back(k);
  try {
    fit_fopdt(y, 1.0, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSettled);
  }
}

TEST(FitFopdt, MissingCrossingIsFitError) {
  // Jumps straight to steady state: both crossings land on the same sample.
  std::vector<double> y(100, 1.0);
  try {
    fit_fopdt(y, 1.0, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Fit);
  }
}

TEST(ZnOpenLoop, TableRows) {
  const FopdtParams f{1.0, 0.5, 1.0};
  const auto pid = zn_open_loop(f, ControllerKind::PID);
  EXPECT_NEAR(pid.kp, 2.4, 1e-15);
  EXPECT_NEAR(pid.Ti, 1.0, 1e-15);
  EXPECT_NEAR(pid.Td, 0.25, 1e-15);

  const auto p = zn_open_loop(f, ControllerKind::P);
  EXPECT_NEAR(p.kp, 2.0, 1e-15);
  EXPECT_EQ(p.Ti, kInf);
  EXPECT_EQ(p.Td, 0.0);

  const auto pi = zn_open_loop(f, ControllerKind::PI);
  EXPECT_NEAR(pi.kp, 1.8, 1e-15);
  EXPECT_NEAR(pi.Ti, 0.5 / 0.3, 1e-15);
  EXPECT_EQ(pi.Td, 0.0);

  EXPECT_NEAR(zn_open_loop({0.7, 0.7, 1.0}, ControllerKind::PID).kp, 1.2, 1e-15);
}

TEST(ZnOpenLoop, ZeroDeadTimeIsUnbounded) {
  try {
    zn_open_loop({1.0, 0.0, 1.0}, ControllerKind::PID);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundedGain);
  }
}

TEST(ZnOpenLoop, HomogeneousInTimeScale) {
  for (const auto kind : {ControllerKind::P, ControllerKind::PI, ControllerKind::PID}) {
    const auto a = zn_open_loop({1.3, 0.4, 1.0}, kind);
    for (const double c : {0.1, 2.0, 7.5}) {
      const auto b = zn_open_loop({1.3 * c, 0.4 * c, 1.0}, kind);
      EXPECT_NEAR(b.kp, a.kp, 1e-12);
      if (std::isfinite(a.Ti)) {
        EXPECT_NEAR(b.Ti, c * a.Ti, 1e-12);
      } else {
        EXPECT_EQ(b.Ti, kInf);
      }
      EXPECT_NEAR(b.Td, c * a.Td, 1e-12);
    }
  }
}

TEST(ZnClosedLoop, ClassicalRules) {
  const auto pid = zn_closed_loop({10.0, 2.0}, ControllerKind::PID);
  EXPECT_NEAR(pid.kp, 6.0, 1e-15);
  EXPECT_NEAR(pid.Ti, 1.0, 1e-15);
  EXPECT_NEAR(pid.Td, 0.25, 1e-15);
  EXPECT_NEAR(zn_closed_loop({10.0, 2.0}, ControllerKind::P).kp, 5.0, 1e-15);
  EXPECT_NEAR(zn_closed_loop({1.0, 8.0}, ControllerKind::PID).Td, 1.0, 1e-15);
  const auto pi = zn_closed_loop({10.0, 2.4}, ControllerKind::PI);
  EXPECT_NEAR(pi.kp, 4.5, 1e-15);
  EXPECT_NEAR(pi.Ti, 2.0, 1e-15);
}

TEST(ZnClosedLoop, GainOrdering) {
  const UltimateParams u{3.7, 1.1};
  const double p = zn_closed_loop(u, ControllerKind::P).kp;
  const double pi = zn_closed_loop(u, ControllerKind::PI).kp;
  const double pid = zn_closed_loop(u, ControllerKind::PID).kp;
  EXPECT_LT(pi, p);
  EXPECT_LT(p, pid);
}

TEST(ZnClosedLoop, InvalidUltimateRejected) {
  EXPECT_THROW(zn_closed_loop({0.0, 1.0}, ControllerKind::P), Error);
  EXPECT_THROW(zn_closed_loop({1.0, -1.0}, ControllerKind::P), Error);
}

TEST(ControllerKindNames, RoundTrip) {
  for (const auto k : {ControllerKind::P, ControllerKind::PI, ControllerKind::PID}) {
    EXPECT_EQ(parse_controller_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_controller_kind("pid"), ControllerKind::PID);
  EXPECT_THROW(parse_controller_kind("PD"), Error);
}

TEST(DetectOscillation, SineIsSustainedDecayIsNot) {
  std::vector<double> sine, decay;
  for (int k = 0; k < 400; ++k) {
    sine.push_back(1.0 + 0.5 * std::sin(2 * M_PI * k / 20.0));
    decay.push_back(1.0 + std::pow(0.97, k) * std::sin(2 * M_PI * k / 20.0));
  }
  const auto osc = detect_sustained_oscillation(sine);
  ASSERT_TRUE(osc);
  EXPECT_NEAR(osc->period_samples, 20.0, 1e-9);
  EXPECT_NEAR(osc->amplitude, 0.5, 0.01);
  EXPECT_FALSE(detect_sustained_oscillation(decay));
  EXPECT_FALSE(detect_sustained_oscillation(std::vector<double>(400, 1.0)));
}

TEST(FindUltimate, MatchesCharacteristicPolynomialOracle) {
  const plant::ArxPlant p(kDelayA, kDelayB);
  const auto oracle = linear_oracle(kDelayA, kDelayB);
  UltimateSearch s;
  s.ts = 0.01;
  const auto u = find_ultimate(p, s);
  EXPECT_NEAR(u.Ku / oracle.Ku, 1.0, 0.10);
  EXPECT_NEAR(u.Pu / (oracle.Pu_samples * s.ts), 1.0, 0.10);
}

TEST(FindUltimate, GrowthRefinementIsConsistent) {
  const plant::ArxPlant p(kDelayA, kDelayB);
  UltimateSearch coarse;
  coarse.growth = 1.1;
  UltimateSearch fine;
  fine.growth = 1.01;
  const double kc = find_ultimate(p, coarse).Ku;
  const double kf = find_ultimate(p, fine).Ku;
  EXPECT_LE(std::max(kc, kf) / std::min(kc, kf), 1.1);
}

TEST(FindUltimate, PureGainCannotOscillate) {
  // y(k) = 0.01 u(k-1): a static gain behind the unavoidable sample delay.
  // Up to kp = 50 the loop gain stays below one, so there is nothing to find.
  const plant::ArxPlant p(std::vector<double>{}, std::vector<double>{0.01});
  UltimateSearch s;
  s.max_kp = 50.0;
  try {
    find_ultimate(p, s);
    FAIL();
  } catch (const NoUltimateGainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoUltimateGain);
    EXPECT_FALSE(e.bracket());
  }
}

TEST(FindUltimate, DivergenceReportsBracket) {
  // Unstable open loop: the proportional sweep diverges before it oscillates.
  const plant::ArxPlant p(std::vector<double>{1.5}, std::vector<double>{1.0});
  UltimateSearch s;
  s.kp_start = 0.01;
  s.max_kp = 0.2;
  try {
    find_ultimate(p, s);
    FAIL();
  } catch (const NoUltimateGainError& e) {
    ASSERT_TRUE(e.bracket());
    EXPECT_EQ(e.bracket()->first, 0.0);
    EXPECT_NEAR(e.bracket()->second, 0.01, 1e-15);
  }
}

TEST(FindUltimate, InvalidSearchRejected) {
  const plant::ArxPlant p(kDelayA, kDelayB);
  UltimateSearch s;
  s.growth = 1.0;
  EXPECT_THROW(find_ultimate(p, s), Error);
  s.growth = 1.05;
  s.loop_index = 3;
  EXPECT_THROW(find_ultimate(p, s), Error);
}

TEST(OpenLoopStepResponse, BenchmarkLoopOne) {
  const plant::BenchmarkPlant p;
  const auto y = open_loop_step_response(p, 0, 1.0, 5);
  ASSERT_EQ(y.size(), 5u);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_DOUBLE_EQ(y[1], 1.0);
}
