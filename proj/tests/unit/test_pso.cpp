#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "psopid/error.hpp"
#include "psopid/pso.hpp"

using namespace psopid;
using namespace psopid::pso;

namespace {

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

PsoConfig box(std::size_t dims, double lo, double hi, std::uint64_t seed = 1) {
  auto cfg = PsoConfig::with_bounds(std::vector<double>(dims, lo), std::vector<double>(dims, hi));
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Inertia, Endpoints) {
  const auto cfg = box(2, -1, 1);
  EXPECT_EQ(inertia(0, cfg), 0.9);
  EXPECT_NEAR(inertia(cfg.max_iter, cfg), 0.5, 1e-12);
  EXPECT_NEAR(inertia(cfg.max_iter / 2, cfg), 0.7, 1e-12);
  EXPECT_THROW(inertia(cfg.max_iter + 1, cfg), Error);
}

TEST(Inertia, LinearSchedule) {
  auto cfg = box(1, 0, 1);
  cfg.max_iter = 40;
  for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
    EXPECT_NEAR(inertia(t - 1, cfg) - inertia(t, cfg), 0.4 / 40.0, 1e-12);
  }
}

TEST(UpdateVelocity, MomentumOnly) {
  const auto cfg = box(2, -10, 10);
  const Particle p{{1, 2}, {0.5, -0.25}, {3, 3}, 0.0};
  const std::vector<double> zero{0, 0};
  EXPECT_EQ(update_velocity(p, std::vector<double>{-1, 4}, 1.0, cfg, zero, zero), p.v);
}

TEST(UpdateVelocity, NoAttractionAtOptimum) {
  const auto cfg = box(2, -10, 10);
  const Particle p{{1, 2}, {0.5, -0.25}, {1, 2}, 0.0};
  const std::vector<double> r{0.3, 0.9};
  const auto v = update_velocity(p, p.x, 0.7, cfg, r, r);
  EXPECT_NEAR(v[0], 0.35, 1e-15);
  EXPECT_NEAR(v[1], -0.175, 1e-15);
}

TEST(UpdateVelocity, HandEvaluatedScalar) {
  auto cfg = box(1, -100, 100);  // v_max = 40, no clamp
  const Particle p{{0.0}, {1.0}, {1.0}, 0.0};
  const std::vector<double> r{0.5};
  const auto v = update_velocity(p, std::vector<double>{2.0}, 0.5, cfg, r, r);
  EXPECT_NEAR(v[0], 3.5, 1e-15);

  cfg.v_max = {2.0};
  EXPECT_EQ(update_velocity(p, std::vector<double>{2.0}, 0.5, cfg, r, r)[0], 2.0);
}

TEST(UpdateVelocity, DimensionMismatch) {
  const auto cfg = box(2, -1, 1);
  const Particle p{{0, 0}, {0, 0}, {0, 0}, 0.0};
  const std::vector<double> r{0.5};
  try {
    update_velocity(p, std::vector<double>{0, 0}, 0.5, cfg, r, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Configuration);
  }
}

TEST(UpdatePosition, Examples) {
  const auto wide = box(2, -100, 100);
  const std::vector<double> x{1, 2};
  EXPECT_EQ(update_position(x, std::vector<double>{0, 0}, wide), x);
  EXPECT_EQ(update_position(x, std::vector<double>{0.5, -1}, wide), (std::vector<double>{1.5, 1}));
  const auto tight = box(2, 0, 2);
  EXPECT_EQ(update_position(std::vector<double>{2, 2}, std::vector<double>{0.3, 0.1}, tight),
            (std::vector<double>{2, 2}));
  EXPECT_THROW(update_position(x, std::vector<double>{1}, wide), Error);
}

TEST(PsoConfig, Validation) {
  auto cfg = box(2, 0, 1);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.v_max, (std::vector<double>{0.2, 0.2}));
  auto bad = cfg;
  bad.pop_size = 1;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.max_iter = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.w_min = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.hi = {1, 0};
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.v_max = {0.2, 0.0};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Optimize, FindsShiftedQuadraticOptimum) {
  const std::vector<double> c{0.3, -0.7};
  auto f = [&](std::span<const double> x) {
    return (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
  };
  const auto r = optimize(f, box(2, -2, 2, 4));
  EXPECT_NEAR(r.gbest[0], c[0], 1e-2);
  EXPECT_NEAR(r.gbest[1], c[1], 1e-2);
}

TEST(Optimize, ConstantObjective) {
  const auto r = optimize([](std::span<const double>) { return 3.25; }, box(3, -1, 1));
  ASSERT_EQ(r.history.size(), 31u);
  for (double h : r.history) EXPECT_EQ(h, 3.25);
  EXPECT_EQ(r.gbest_f, 3.25);
}

TEST(Optimize, SphereReducesByHundredfold) {
  const auto r = optimize(sphere, box(6, -5, 5, 1));
  EXPECT_LE(r.history.back(), 0.01 * r.history.front());
}

TEST(Optimize, DeterministicUnderSeedAndThreads) {
  auto cfg = box(4, -3, 3, 42);
  const auto a = optimize(sphere, cfg);
  const auto b = optimize(sphere, cfg);
  cfg.threads = 4;
  const auto c = optimize(sphere, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.gbest, b.gbest);
  EXPECT_EQ(a.history, c.history);
  EXPECT_EQ(a.gbest, c.gbest);
  cfg.seed = 43;
  EXPECT_NE(optimize(sphere, cfg).gbest, a.gbest);
}

TEST(Optimize, NonFiniteObjectiveNamesParticle) {
  auto f = [](std::span<const double> x) {
    return x[0] > 0 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  try {
    optimize(f, box(1, -1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Objective);
    EXPECT_NE(std::string(e.what()).find("particle"), std::string::npos);
  }
}

TEST(Optimize, PenaltySentinelIsAccepted) {
  auto f = [](std::span<const double> x) { return x[0] > 0.5 ? 1e12 : sphere(x); };
  const auto r = optimize(f, box(2, -1, 1));
  EXPECT_LT(r.gbest_f, 1e12);
}

class PsoSeeds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PsoSeeds, InvariantsHoldAlongTheRun) {
  auto cfg = box(3, -2, 4, GetParam());
  cfg.lo = {-2, 0, 1};
  cfg.hi = {4, 0.5, 9};
  cfg.v_max = {1.2, 0.1, 1.6};

  std::vector<double> min_seen(cfg.pop_size, std::numeric_limits<double>::infinity());
  std::size_t bad_bounds = 0, bad_pbest = 0;
  PsoHooks hooks;
  hooks.on_evaluate = [&](std::size_t i, std::span<const double>, double f) {
    min_seen[i] = std::min(min_seen[i], f);
  };
  hooks.on_iteration = [&](std::size_t, const std::vector<Particle>& swarm) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      const auto& p = swarm[i];
      for (std::size_t d = 0; d < 3; ++d) {
        if (p.x[d] < cfg.lo[d] || p.x[d] > cfg.hi[d] || std::abs(p.v[d]) > cfg.v_max[d]) {
          ++bad_bounds;
        }
      }
      if (p.pbest_f != min_seen[i]) ++bad_pbest;
    }
  };
  auto f = [](std::span<const double> x) {
    return std::pow(x[0] - 1, 2) + 10 * std::cos(3 * x[1]) + std::abs(x[2] - 5);
  };
  const auto r = optimize(f, cfg, hooks);
  EXPECT_EQ(bad_bounds, 0u);
  EXPECT_EQ(bad_pbest, 0u);
  for (std::size_t t = 1; t < r.history.size(); ++t) EXPECT_LE(r.history[t], r.history[t - 1]);
  EXPECT_EQ(r.gbest_f, r.history.back());
  EXPECT_EQ(f(r.gbest), r.gbest_f);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PsoSeeds, ::testing::Range<std::uint64_t>(1, 11));

TEST(Optimize, ZeroCoefficientsGivePureInertialDrift) {
  auto cfg = box(2, -1, 1, 9);
  cfg.max_iter = 1;
  std::vector<Particle> initial, after;
  PsoHooks hooks;
  hooks.zero_coefficients = true;
  hooks.on_iteration = [&](std::size_t iter, const std::vector<Particle>& s) {
    (iter == 0 ? initial : after) = s;
  };
  optimize(sphere, cfg, hooks);
  ASSERT_EQ(after.size(), cfg.pop_size);
  const double w = inertia(0, cfg);
  for (std::size_t i = 0; i < cfg.pop_size; ++i) {
    for (std::size_t d = 0; d < 2; ++d) {
      const double v = std::clamp(w * initial[i].v[d], -cfg.v_max[d], cfg.v_max[d]);
      EXPECT_EQ(after[i].v[d], v);
      EXPECT_EQ(after[i].x[d], std::clamp(initial[i].x[d] + v, cfg.lo[d], cfg.hi[d]));
    }
  }
}

TEST(Optimize, InitialSwarmWithinBounds) {
  auto cfg = box(5, 3, 4, 77);
  std::vector<Particle> initial;
  PsoHooks hooks;
  hooks.on_iteration = [&](std::size_t iter, const std::vector<Particle>& s) {
    if (iter == 0) initial = s;
  };
  optimize(sphere, cfg, hooks);
  for (const auto& p : initial) {
    for (std::size_t d = 0; d < 5; ++d) {
      EXPECT_GE(p.x[d], 3.0);
      EXPECT_LE(p.x[d], 4.0);
      EXPECT_LE(std::abs(p.v[d]), 0.2);
    }
  }
}

TEST(HistoryCsv, Format) {
  std::ostringstream os;
  write_history_csv(os, std::vector<double>{2.5, 1.0 / 3.0});
  EXPECT_EQ(os.str(), "iter,gbest_f\n0,2.5\n1,0.33333333333333331\n");
}
