#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emgame/errors.hpp"
#include "emgame/oracle.hpp"
#include "test_support.hpp"

namespace emgame {
namespace {

using testing::rel_err;
using testing::smelter_game;

double max_b(const GameSpec& spec) {
  double m = 0.0;
  for (const auto& p : spec.players()) m = std::max(m, p.b);
  return m;
}

TEST(Simulate, ZeroControlsDecay) {
  const GameSpec spec({{"a", 1.0, 0.5}}, 0.0, 0.4, 0.2, 1.0);
  const auto sim = simulate(spec, GridControl::constant(spec, 100, 0.0));
  EXPECT_NEAR(sim.stock.back(), std::exp(-0.08), 1e-15);
  EXPECT_NEAR(sim.stock.back(), 0.92312, 1e-5);
}

TEST(Simulate, ConstantControlsAreExactForAnyGrid) {
  const GameSpec spec({{"a", 2.0, 0.0}, {"b", 0.7, 0.0}}, 1.0, 4.0, 0.35, 3.0);
  const auto exact = stock_trajectory(spec, nash_controls(spec));
  for (std::size_t steps : {2u, 7u, 1000u}) {
    const auto grid = GridControl::constant(spec, steps, 1.0);
    const auto sim = simulate(spec, grid);
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = spec.t0() + grid.step_width() * static_cast<double>(k);
      EXPECT_LE(rel_err(sim.stock[k], exact.value(t)), 1e-12) << steps << " " << k;
    }
    const auto payoffs = profile_payoffs(spec, nash_controls(spec));
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_LE(rel_err(sim.payoffs[i], payoffs[i](spec.x0())), 1e-12);
  }
}

TEST(Simulate, SampledNashPayoffConverges) {
  const auto spec = smelter_game(0.02, 100.0);
  const auto profile = nash_controls(spec);
  const auto sim = simulate(spec, GridControl::sample(spec, profile, 10000));
  const auto exact = profile_payoffs(spec, profile);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LE(rel_err(sim.payoffs[i], exact[i](spec.x0())), 1e-6);
}

TEST(GridControl, RejectsInvalidGrids) {
  const auto spec = smelter_game(0.2);
  EXPECT_THROW(GridControl::constant(spec, 1, 0.5), ConfigError);
  EXPECT_THROW(GridControl::constant(spec, 10, 1.5), std::invalid_argument);
  auto grid = GridControl::constant(spec, 10, 0.5);
  EXPECT_THROW(grid.set_row(0, std::vector<double>(10, -1.0)), std::invalid_argument);
  EXPECT_THROW(grid.set_row(0, std::vector<double>(9, 1.0)), std::invalid_argument);
}

TEST(BestResponse, NoFineMeansFullEmission) {
  const GameSpec spec({{"a", 2.0, 0.0}, {"b", 1.0, 0.8}}, 0.0, 1.0, 0.3);
  const auto br = best_response(spec, 0, GridControl::constant(spec, 500, 0.25));
  for (double u : br.row) EXPECT_DOUBLE_EQ(u, 2.0);
}

TEST(BestResponse, RecoversSwitchingControl) {
  const GameSpec spec({{"a", 1.0, 1.0}}, 0.0, 2.0, 0.5);
  const std::size_t steps = 4000;
  const auto br = best_response(spec, 0, GridControl::constant(spec, steps, 0.5));
  const auto closed = nash_controls(spec)[0];
  const double h = spec.horizon() / steps;
  double gap = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = (k + 0.5) * h;
    gap = std::max(gap, std::abs(br.row[k] - closed.value(t)));
    if ((k + 1) * h < 0.6137) {
      EXPECT_NEAR(br.row[k], 0.0, 1e-12) << k;
    }
  }
  EXPECT_LE(gap, 2e-3);
  EXPECT_NEAR(br.row.back(), 1.0, 2e-3);
}

TEST(BestResponse, RecoversKrasnoyarskNashAgainstNashOpponents) {
  const auto spec = smelter_game(0.02);
  const auto profile = nash_controls(spec);
  auto grid = GridControl::sample(spec, profile, 10000);
  grid.set_row(0, std::vector<double>(10000, 0.0));
  const auto br = best_response(spec, 0, grid);
  std::vector<double> closed(10000);
  double gap = 0.0;
  for (std::size_t k = 0; k < closed.size(); ++k)
    gap = std::max(gap, std::abs(br.row[k] - profile[0].value((k + 0.5) * grid.step_width())));
  EXPECT_LE(gap / 59035.12, 1e-4);
}

TEST(BestResponse, AscentIsMonotone) {
  std::mt19937_64 rng(8);
  const auto spec = testing::random_game(rng, 3, true);
  OracleOptions opts;
  opts.steps = 800;
  opts.step_scale = 0.3;
  const auto br = best_response(spec, 0, GridControl::constant(spec, opts.steps, 0.9), opts);
  EXPECT_GT(br.iterations, 5u);
  for (std::size_t k = 1; k < br.payoff_trace.size(); ++k)
    EXPECT_GE(br.payoff_trace[k], br.payoff_trace[k - 1] - 1e-12 * std::abs(br.payoff_trace[k]));
}

TEST(BestResponse, ReportsNonConvergence) {
  const auto spec = smelter_game(0.02);
  OracleOptions opts;
  opts.steps = 100;
  opts.step_scale = 0.05;
  opts.max_iterations = 3;
  try {
    best_response(spec, 0, GridControl::constant(spec, opts.steps, 0.0), opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), opts.tolerance);
  }
  EXPECT_THROW(best_response(spec, 5, GridControl::constant(spec, 10, 0.0)), std::out_of_range);
}

TEST(IteratedBestResponse, NoFineGameConvergesInOneSweep) {
  const GameSpec spec({{"a", 2.0, 0.0}, {"b", 1.0, 0.0}}, 0.0, 1.0, 0.3);
  OracleOptions opts;
  opts.steps = 200;
  const auto rep = iterated_best_response(spec, opts);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 1u);
  EXPECT_LE(rep.control_gap, 1e-15);
}

TEST(IteratedBestResponse, SmelterGameAtNormalWeather) {
  const auto rep = iterated_best_response(smelter_game(0.2));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.control_gap, 1e-3);
  for (double g : rep.payoff_gap) EXPECT_LE(g, 1e-6);
  EXPECT_LE(rep.pontryagin_residual, 1e-8);
}

TEST(JointOptimum, SinglePlayerAgreesWithBestResponse) {
  const GameSpec spec({{"a", 1.0, 1.0}}, 0.0, 2.0, 0.5);
  OracleOptions opts;
  opts.steps = 1000;
  const auto joint = joint_optimum(spec, opts);
  const auto nash = iterated_best_response(spec, opts);
  ASSERT_EQ(joint.solution.size(), 1u);
  for (std::size_t k = 0; k < opts.steps; ++k)
    EXPECT_NEAR(joint.solution[0][k], nash.solution[0][k], 1e-12);
}

TEST(JointOptimum, SmelterGameAtAdverseWeather) {
  const auto spec = smelter_game(0.02);
  const auto rep = joint_optimum(spec);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.joint_payoff_gap, 1e-6);
  EXPECT_LE(rep.control_gap, 1e-3 * max_b(spec));
}

TEST(JointOptimum, PerturbingTheOptimumLowersTheJointPayoff) {
  const auto spec = smelter_game(0.02, 50.0);
  OracleOptions opts;
  opts.steps = 2000;
  const auto rep = joint_optimum(spec, opts);
  const auto joint = [&](const std::vector<std::vector<double>>& rows) {
    const auto sim = simulate(spec, GridControl(spec, opts.steps, rows));
    return sim.payoffs[0] + sim.payoffs[1] + sim.payoffs[2];
  };
  const double best = joint(rep.solution);
  for (std::size_t i = 0; i < 3; ++i)
    for (double factor : {0.99, 1.01}) {
      auto rows = rep.solution;
      for (double& u : rows[i]) u = std::min(u * factor, spec.player(i).b);
      EXPECT_LT(joint(rows), best) << "player " << i << " factor " << factor;
    }
}

TEST(PontryaginResidual, ClosedFormsAreStationary) {
  for (double delta : {0.02, 0.2}) {
    const auto spec = smelter_game(delta);
    for (Mode mode : {Mode::nash, Mode::cooperative}) {
      const auto r = pontryagin_residual(spec, optimal_controls(spec, mode), mode);
      EXPECT_LE(r.max_residual, 1e-8);
      EXPECT_LE(r.terminal, 1e-12);
    }
  }
}

TEST(PontryaginResidual, NonOptimalProfileIsDetected) {
  const auto spec = smelter_game(0.2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> frac(0.2, 0.6);
  Profile random;
  for (std::size_t i = 0; i < 3; ++i) {
    const double b = spec.player(i).b;
    random.push_back(
        PiecewiseControl::exp_form(i, b, 0.2, 0.0, 0.4, frac(rng) * b, 0.1 * frac(rng) * b));
  }
  EXPECT_GT(pontryagin_residual(spec, random, Mode::nash).max_residual, 1e-3);
  EXPECT_GT(pontryagin_residual(spec, random, Mode::nash).terminal, 1e-3);
}

TEST(OracleRefinement, GapsShrinkAsTheGridRefines) {
  std::mt19937_64 rng(99);
  const auto spec = testing::random_game(rng, 3, true).with_x0(1.0);
  double prev_control = INFINITY, prev_payoff = INFINITY;
  for (std::size_t steps = 250; steps <= 16000; steps *= 2) {
    OracleOptions opts;
    opts.steps = steps;
    const auto rep = iterated_best_response(spec, opts);
    const double payoff = *std::max_element(rep.payoff_gap.begin(), rep.payoff_gap.end());
    EXPECT_LE(rep.control_gap, prev_control * 1.01 + 1e-12) << steps;
    EXPECT_LE(payoff, prev_payoff * 1.01 + 1e-13) << steps;
    prev_control = rep.control_gap;
    prev_payoff = payoff;
  }
}

}  // namespace
}  // namespace emgame
