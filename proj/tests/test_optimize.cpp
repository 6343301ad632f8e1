#include <cmath>

#include <gtest/gtest.h>

#include "invex/optimize.hpp"

namespace {

namespace op = invex::optimize;
namespace pw = invex::pathway;

const pw::PathwayModel kModel = pw::PathwayModel::canonical();

TEST(Newton, ConvergesFromDefaultStart) {
  const auto r = op::minimize_objective(kModel);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gradient_norm, 1e-8);
  EXPECT_LT(r.y_star(0), std::log(kModel.x0));
  EXPECT_GT(r.y_star(0), r.y_star(1));
}

TEST(Newton, FewStepsFromOracleStart) {
  const auto g = op::grid_oracle(kModel, 256);
  const auto r = op::minimize_objective(kModel, g.y);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 5);
}

TEST(Newton, StartsAgree) {
  const auto a = op::minimize_objective(kModel);
  const double ly0 = std::log(kModel.x0);
  const auto b = op::minimize_objective(kModel, Eigen::Vector2d(ly0 - 3.0, ly0 - 7.0));
  ASSERT_TRUE(a.converged && b.converged);
  EXPECT_LE((a.y_star - b.y_star).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(a.value, b.value, 1e-12 * a.value);
}

TEST(Newton, HistoryNeverIncreases) {
  const double ly0 = std::log(kModel.x0);
  const auto r = op::minimize_objective(kModel, Eigen::Vector2d(ly0 - 0.01, ly0 - 9.0));
  ASSERT_GE(r.history.size(), 2u);
  EXPECT_LT(r.history[1], r.history[0]);
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    EXPECT_LE(r.history[k], r.history[k - 1] * (1.0 + 1e-15));
  }
}

TEST(Newton, InfeasibleStartRejected) {
  EXPECT_THROW(op::minimize_objective(kModel, Eigen::Vector2d(0.0, 1.0)), invex::contract_violation);
}

TEST(GridOracle, RefinementNeverWorsens) {
  double prev = std::numeric_limits<double>::infinity();
  for (int res : {16, 32, 64, 128, 256}) {
    const auto g = op::grid_oracle(kModel, res);
    EXPECT_LE(g.value, prev) << res;
    prev = g.value;
  }
  EXPECT_THROW(op::grid_oracle(kModel, 8), invex::contract_violation);
}

TEST(GridOracle, NewtonBeatsOracleClosely) {
  const auto g = op::grid_oracle(kModel, 256);
  const auto r = op::minimize_objective(kModel);
  EXPECT_LE(r.value, g.value);
  EXPECT_LE((g.value - r.value) / r.value, 1e-3);
}

TEST(Allocation, SharesScaleWithBudget) {
  const auto a1 = op::optimal_enzyme_allocation(kModel, 1.0);
  const auto a5 = op::optimal_enzyme_allocation(kModel, 5.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a5.e_star.e[i], 5.0 * a1.e_star.e[i], 1e-12);
  EXPECT_NEAR(a1.e_star.total(), 1.0, 1e-14);
  EXPECT_NEAR(a5.flux, 5.0 * a1.flux, 1e-12);
  EXPECT_NEAR(a1.specific_flux, a5.specific_flux, 1e-10);
}

TEST(Allocation, SteadyStateAtOptimumMatchesMinimizer) {
  const auto a = op::optimal_enzyme_allocation(kModel, 3.0);
  EXPECT_LE(a.concentration_gap, 1e-6);
  EXPECT_NEAR(a.specific_flux * a.optimum.value, 1.0, 1e-8);
  EXPECT_NEAR(a.state.flux, a.flux, 1e-8 * a.flux);
}

TEST(Allocation, OptimumDominatesRandomSplits) {
  const double e_total = 3.0;
  const auto a = op::optimal_enzyme_allocation(kModel, e_total);
  const auto pts = pw::enzyme_sampler(2024, 1000, 0.01, 1.0).sample(pw::positive_enzymes);
  for (const auto& v : pts) {
    const pw::EnzymeVector e = pw::to_enzymes(v).scaled(e_total / v.sum());
    ASSERT_LE(pw::specific_flux(kModel, e), a.specific_flux * (1.0 + 1e-12));
  }
}

}  // namespace
