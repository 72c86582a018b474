#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rpwy/dynamics.hpp"
#include "rpwy/errors.hpp"
#include "support/oracle.hpp"

namespace rpwy {
namespace {

RadicalPairModel minimal(double a = 1.0) {
  RadicalPairModel m;
  m.nuclei = {{a, Site::Donor}};
  return m;
}

double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST(TimeGrid, DefaultsAndValidation) {
  const TimeGrid g;
  EXPECT_EQ(g.steps, 10000u);
  EXPECT_EQ(g.t_max(1.0), 10.0);
  EXPECT_DOUBLE_EQ(g.dt(1.0), 1e-3);
  EXPECT_LE(std::exp(-g.t_max(1.0)), 1e-4);
  EXPECT_NO_THROW(g.validate());
  EXPECT_THROW((TimeGrid{10.0, 0, 1}).validate(), ValidationError);
  EXPECT_THROW((TimeGrid{0.0, 10, 1}).validate(), ValidationError);
  EXPECT_THROW((TimeGrid{10.0, 10, 0}).validate(), ValidationError);
  EXPECT_THROW((TimeGrid{10.0, 10, 3}).validate(), ValidationError);
  const TimeGrid r = TimeGrid{10.0, 100, 5}.refined(10);
  EXPECT_EQ(r.steps, 1000u);
  EXPECT_EQ(r.coherence_stride, 50u);
}

TEST(Propagate, ZeroHamiltonianIsStationary) {
  for (double kappa : {0.0, 2.0}) {
    RadicalPairModel m = minimal(0.0);
    m.nuclei.push_back({0.0, Site::Acceptor});
    m.kappa_st = kappa;
    const auto traj = propagate(m, 0.0, TimeGrid{}, {.keep_states = false});
    for (double p : traj.p_singlet) EXPECT_NEAR(p, 1.0, 1e-14);
    EXPECT_NEAR(singlet_yield(traj), 1.0 - std::exp(-10.0), 1e-7);
    EXPECT_NEAR(yield_uncertainty(traj), 0.0, 1e-7);
  }
}

TEST(Propagate, MinimalModelMatchesClosedForm) {
  // One nucleus on one electron: the singlet population is 5/8 + 3/8 cos(a t).
  const double a = 1.0;
  const TimeGrid grid{10.0, 10000, 1};
  const auto traj = propagate(minimal(a), 0.0, grid);
  const auto oracle = testing::unitary_singlet_population(minimal(a), 0.0, grid.dt(1.0), grid.steps);
  double worst = 0.0, worst_closed = 0.0;
  for (std::size_t i = 0; i <= grid.steps; ++i) {
    const double t = traj.time(i);
    worst_closed = std::max(worst_closed, std::abs(oracle[i] - (0.625 + 0.375 * std::cos(a * t))));
    worst = std::max(worst, std::abs(traj.p_singlet[i] - oracle[i]));
  }
  EXPECT_LT(worst_closed, 1e-10);
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(traj.p_singlet[0], 1.0, 1e-10);
}

TEST(Propagate, MatchesLiouvillianOracleWithDephasing) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 4; ++rep) {
    RadicalPairModel m = minimal(10.0 * u(gen));
    m.exchange = 20.0 * u(gen) - 10.0;
    m.kappa_st = 5.0 * u(gen);
    const double b = rep % 2 ? 1.0 : 0.0;
    const TimeGrid grid{10.0, 10000, 1};
    const auto traj = propagate(m, b, grid, {.keep_states = false});
    const auto oracle = testing::exact_singlet_population(m, b, grid.dt(1.0), grid.steps);
    EXPECT_LT(max_deviation(traj.p_singlet, oracle), 1e-6);
    EXPECT_NEAR(singlet_yield(traj), testing::weighted_trapezoid(oracle, grid.dt(1.0)), 1e-7);
  }
}

TEST(Propagate, TwoNucleiMatchOracle) {
  RadicalPairModel m;
  m.nuclei = {{3.0, Site::Donor}, {1.2, Site::Acceptor}};
  m.exchange = -0.8;
  m.kappa_st = 0.6;
  const TimeGrid grid{10.0, 4000, 1};
  const auto traj = propagate(m, 1.0, grid, {.keep_states = false});
  const auto oracle = testing::exact_singlet_population(m, 1.0, grid.dt(1.0), grid.steps);
  EXPECT_LT(max_deviation(traj.p_singlet, oracle), 1e-6);
}

TEST(Propagate, ProbabilitiesBoundedAndTraceConserved) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      RadicalPairModel m;
      for (std::size_t j = 0; j < n; ++j) m.nuclei.push_back({10.0 * u(gen), u(gen) < 0.5 ? Site::Donor : Site::Acceptor});
      m.exchange = 20.0 * u(gen) - 10.0;
      m.kappa_st = 5.0 * u(gen);
      const auto traj = propagate(m, 0.0, TimeGrid{10.0, 2000, 1}, {.keep_states = false});
      for (double p : traj.p_singlet) {
        EXPECT_GE(p, -1e-8);
        EXPECT_LE(p, 1.0 + 1e-8);
      }
      EXPECT_LT(traj.max_trace_drift, 1e-8);
      // The identity holds for the discrete weight; the trapezoid itself is O(dt^2) off 1 - e^{-10}.
      const std::vector<double> ones(traj.p_singlet.size(), 1.0);
      EXPECT_NEAR(singlet_yield(traj) + triplet_yield(traj), reaction_integral(ones, traj.dt(), 1.0), 1e-9);
      EXPECT_NEAR(singlet_yield(traj) + triplet_yield(traj), 1.0 - std::exp(-10.0), 1e-5);
    }
  }
}

TEST(Propagate, StoredStatesArePhysical) {
  RadicalPairModel m = minimal(4.0);
  m.kappa_st = 1.0;
  const auto traj = propagate(m, 0.5, TimeGrid{10.0, 200, 20});
  ASSERT_EQ(traj.states.size(), 11u);
  EXPECT_EQ(traj.state_steps.back(), 200u);
  const auto q = build_singlet_projector(m);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const DensityMatrix rho = traj.state(i);
    rho.check_physical();
    EXPECT_NEAR(rho.expectation(q.singlet), traj.p_singlet[traj.state_steps[i]], 1e-12);
  }
}

TEST(Propagate, ObserverSeesEveryStridePoint) {
  std::vector<std::size_t> seen;
  PropagationOptions opts{.keep_states = false, .observer = [&](std::size_t s, const SectorBlocks&) { seen.push_back(s); }};
  const auto traj = propagate(minimal(), 0.0, TimeGrid{10.0, 100, 25}, opts);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 25, 50, 75, 100}));
  EXPECT_TRUE(traj.states.empty());
}

TEST(Propagate, UnstableStepAborts) {
  RadicalPairModel m = minimal(10.0);
  m.exchange = 10.0;
  try {
    propagate(m, 0.0, TimeGrid{1000.0, 100, 1});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Quadrature, ConstantIntegrands) {
  const double dt = 1e-3;
  const std::vector<double> ones(10001, 1.0), zeros(10001, 0.0), halves(10001, 0.5);
  EXPECT_NEAR(reaction_integral(ones, dt, 1.0), 1.0 - std::exp(-10.0), 1e-7);
  EXPECT_NEAR(reaction_integral(ones, dt, 1.0), 0.9999546, 1e-7);
  EXPECT_EQ(reaction_integral(zeros, dt, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(reaction_integral(ones, dt, 1.0), testing::weighted_trapezoid(ones, dt));
  Trajectory t;
  t.grid = TimeGrid{10.0, 10000, 1};
  t.p_singlet = halves;
  EXPECT_NEAR(yield_uncertainty(t), 0.5 * std::sqrt(1.0 - std::exp(-10.0)), 1e-7);
  EXPECT_NEAR(singlet_yield(t), 0.5 * (1.0 - std::exp(-10.0)), 1e-7);
  t.p_singlet = zeros;
  EXPECT_EQ(singlet_yield(t), 0.0);
}

TEST(Yields, MinimalModelAgainstOracle) {
  const TimeGrid grid;
  const auto traj = propagate(minimal(), 0.0, grid, {.keep_states = false});
  const auto oracle = testing::unitary_singlet_population(minimal(), 0.0, grid.dt(1.0), grid.steps);
  std::vector<double> var(oracle.size());
  std::transform(oracle.begin(), oracle.end(), var.begin(), [](double p) { return p * (1.0 - p); });
  EXPECT_NEAR(singlet_yield(traj), testing::weighted_trapezoid(oracle, grid.dt(1.0)), 1e-7);
  EXPECT_NEAR(yield_uncertainty(traj), std::sqrt(testing::weighted_trapezoid(var, grid.dt(1.0))), 1e-7);
  // Closed form of the untruncated integral for 5/8 + 3/8 cos t with k = 1 is 5/8 + 3/16.
  EXPECT_NEAR(singlet_yield(traj), 0.8125, 1e-4);
}

TEST(Yields, DerivativeAgainstOracle) {
  const TimeGrid grid{10.0, 10000, 1};
  const double dt = grid.dt(1.0);
  const double y0 = testing::weighted_trapezoid(testing::exact_singlet_population(minimal(), 0.0, dt, grid.steps), dt);
  const double y1 = testing::weighted_trapezoid(testing::exact_singlet_population(minimal(), 1.0, dt, grid.steps), dt);
  EXPECT_NEAR(yield_derivative(minimal(), grid), std::abs(y1 - y0), 1e-7);
}

TEST(Yields, DerivativeVanishesWithoutCoupling) {
  RadicalPairModel m = minimal(0.0);
  m.exchange = 3.0;
  EXPECT_EQ(yield_derivative(m, TimeGrid{10.0, 500, 1}), 0.0);
}

TEST(Yields, GridConvergence) {
  RadicalPairModel m;
  m.nuclei = {{2.3, Site::Donor}, {0.9, Site::Acceptor}};
  m.exchange = 1.7;
  m.kappa_st = 0.4;
  const auto coarse = propagate(m, 0.0, TimeGrid{}, {.keep_states = false});
  const auto fine = propagate(m, 0.0, TimeGrid{}.refined(2), {.keep_states = false});
  EXPECT_LT(std::abs(singlet_yield(coarse) - singlet_yield(fine)), 1e-5);
  EXPECT_LT(std::abs(yield_uncertainty(coarse) - yield_uncertainty(fine)), 1e-5);
}

}  // namespace
}  // namespace rpwy
