#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "psopid/error.hpp"
#include "psopid/pid.hpp"

using namespace psopid;
using namespace psopid::pid;

TEST(PidStep, ZeroErrorFreshStateGivesZero) {
  const auto r = pid_step({3.0, 2.0, 1.0}, {}, 0.0);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_EQ(r.state, PidState{});
}

TEST(PidStep, PureProportional) {
  EXPECT_EQ(pid_step({1.0, 0.0, 0.0}, {}, 0.5).u, 0.5);
}

TEST(PidStep, HandRolledDifferenceEquation) {
  const PidGains g{1.0, 1.0, 1.0};
  const auto s0 = pid_step(g, {}, 1.0);
  EXPECT_EQ(s0.u, 3.0);
  const auto s1 = pid_step(g, s0.state, 1.0);
  EXPECT_EQ(s1.u, 3.0);
  EXPECT_EQ(s1.state.integral, 2.0);
  EXPECT_EQ(s1.state.prev_error, 1.0);
}

TEST(PidStep, HandRolledNonTrivialGains) {
  const PidGains g{0.5, 0.25, 2.0};
  // e = [2, -1, 0.5]
  // k0: I=2,   u = 1 + 0.5 + 4 = 5.5
  // k1: I=1,   u = -0.5 + 0.25 - 6 = -6.25
  // k2: I=1.5, u = 0.25 + 0.375 + 3 = 3.625
  PidState s;
  const double es[] = {2.0, -1.0, 0.5};
  const double expect[] = {5.5, -6.25, 3.625};
  for (int k = 0; k < 3; ++k) {
    const auto r = pid_step(g, s, es[k]);
    EXPECT_NEAR(r.u, expect[k], 1e-12);
    s = r.state;
  }
}

TEST(PidStep, RejectsNonFiniteError) {
  try {
    pid_step({1, 1, 1}, {}, std::numeric_limits<double>::quiet_NaN());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(PidStep, WindupClampsIntegral) {
  PidState s;
  for (int k = 0; k < 10; ++k) s = pid_step({0.0, 1.0, 0.0}, s, 1.0, 3.0).state;
  EXPECT_EQ(s.integral, 3.0);
  for (int k = 0; k < 10; ++k) s = pid_step({0.0, 1.0, 0.0}, s, -1.0, 3.0).state;
  EXPECT_EQ(s.integral, -3.0);
}

TEST(PidProperty, LinearInErrorAndState) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const PidGains g{d(rng), d(rng), d(rng)};
    const PidState s{d(rng), d(rng)};
    const double e = d(rng);
    const auto a = pid_step(g, s, e);
    const auto b = pid_step(g, {2 * s.integral, 2 * s.prev_error}, 2 * e);
    EXPECT_NEAR(b.u, 2 * a.u, 1e-12 * (1 + std::abs(a.u)));
  }
}

TEST(PidProperty, ProportionalOnlyIsMemoryless) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  PidState s;
  const PidGains g{1.7, 0.0, 0.0};
  for (int k = 0; k < 100; ++k) {
    const double e = d(rng);
    const auto r = pid_step(g, s, e);
    EXPECT_EQ(r.u, 1.7 * e);
    s = r.state;
  }
}

TEST(PidProperty, ResetReproducesSequence) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> es(50);
  for (auto& e : es) e = d(rng);
  const PidGains g{0.8, 0.3, 0.1};
  auto run = [&](PidState& s) {
    std::vector<double> us;
    for (double e : es) {
      const auto r = pid_step(g, s, e, 4.0);
      us.push_back(r.u);
      s = r.state;
    }
    return us;
  };
  PidState s;
  const auto first = run(s);
  EXPECT_NE(s, PidState{});
  s.reset();
  EXPECT_EQ(s, PidState{});
  EXPECT_EQ(run(s), first);
}

TEST(PidProperty, WindupBoundHoldsEveryStep) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  PidState s;
  const double w = 1.25;
  for (int k = 0; k < 2000; ++k) {
    s = pid_step({1.0, 0.5, 0.2}, s, d(rng) + 0.5, w).state;
    ASSERT_LE(std::abs(s.integral), w);
  }
}

TEST(MimoPidStep, ZeroErrorsGiveZero) {
  const MimoPidGains g{{{1, 2, 3}, {4, 5, 6}}};
  const std::vector<PidState> s(2);
  const auto r = mimo_pid_step(g, s, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(r.u, (std::vector<double>{0.0, 0.0}));
}

TEST(MimoPidStep, SymmetricLoopsAgree) {
  const MimoPidGains g{{{1.5, 0.5, 0.1}, {1.5, 0.5, 0.1}}};
  const std::vector<PidState> s(2);
  const auto r = mimo_pid_step(g, s, std::vector<double>{0.3, 0.3});
  EXPECT_EQ(r.u[0], r.u[1]);
}

TEST(MimoPidStep, LoopwiseEqualsScalar) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  const MimoPidGains g{{{0.7, 0.2, 0.05}, {1.1, 0.4, 0.3}}};
  std::vector<PidState> ms(2);
  PidState s0, s1;
  const std::vector<std::optional<double>> limits{2.0, std::nullopt};
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> e{d(rng), d(rng)};
    const auto r = mimo_pid_step(g, ms, e, limits);
    const auto a = pid_step(g.loops[0], s0, e[0], 2.0);
    const auto b = pid_step(g.loops[1], s1, e[1]);
    EXPECT_EQ(r.u[0], a.u);
    EXPECT_EQ(r.u[1], b.u);
    ms = r.states;
    s0 = a.state;
    s1 = b.state;
  }
}

TEST(MimoPidStep, LengthMismatchIsConfigurationError) {
  const MimoPidGains g{{{1, 0, 0}, {1, 0, 0}}};
  const std::vector<PidState> s(2);
  try {
    mimo_pid_step(g, s, std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Configuration);
  }
}

TEST(ZnFormToGainForm, AppliesIdentities) {
  const auto g = zn_form_to_gain_form(2.4, 1.0, 0.25);
  EXPECT_NEAR(g.kp, 2.4, 1e-15);
  EXPECT_NEAR(g.ki, 2.4, 1e-15);
  EXPECT_NEAR(g.kd, 0.6, 1e-15);
}

TEST(ZnFormToGainForm, InfiniteTiMeansProportionalOnly) {
  const auto g = zn_form_to_gain_form(1.0, std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_EQ(g, (PidGains{1.0, 0.0, 0.0}));
}

TEST(ZnFormToGainForm, ZeroKpGivesZeros) {
  EXPECT_EQ(zn_form_to_gain_form(0.0, 3.0, 2.0), (PidGains{0.0, 0.0, 0.0}));
}

TEST(ZnFormToGainForm, NonPositiveTiRejected) {
  for (double ti : {0.0, -1.0}) {
    try {
      zn_form_to_gain_form(1.0, ti, 0.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
  }
}

TEST(MimoPidGains, FlattenRoundTrip) {
  const std::vector<double> flat{1, 2, 3, 4, 5, 6};
  const auto g = MimoPidGains::from_flat(flat);
  ASSERT_EQ(g.loops.size(), 2u);
  EXPECT_EQ(g.loops[1], (PidGains{4, 5, 6}));
  EXPECT_EQ(g.flatten(), flat);
  EXPECT_THROW(MimoPidGains::from_flat(std::vector<double>{1, 2}), Error);
}

TEST(WindupLimit, ScalesWithIntegralGain) {
  EXPECT_DOUBLE_EQ(windup_limit_for({1.0, 0.5, 0.0}, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(windup_limit_for({1.0, 0.0, 0.0}, 2.0), 2e9);
}
