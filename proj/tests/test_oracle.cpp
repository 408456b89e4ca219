#include "hetnet/oracle.hpp"
#include "hetnet/waterfill.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hetnet;
using Catch::Approx;

TEST_CASE("single slot takes the top level", "[oracle]") {
  const NetworkConfig c = NetworkConfig::uniform(1, 1, 1, 1, 1, 5.0, 0.3, 0.1);
  ChannelGains gains(Band::F2, 2, 2, 1, 0.5);
  const OracleResult o = brute_force({gains, c, {}, BudgetScope::PerCell});
  REQUIRE(o.feasible);
  CHECK(o.allocation.power(1, 0) == Approx(std::min(c.budget(1), c.mask_f2(1))));
  CHECK(o.objective == Approx(std::log1p(0.5 * 0.3 / 0.1)));
}

TEST_CASE("assignment counts", "[oracle]") {
  testing::Gen g(71);
  const NetworkConfig c = NetworkConfig::uniform(1, 1, 2, 2, 2, 5.0, 1.0, 0.1);
  const OracleResult a = brute_force({testing::random_gains(g, c, Band::F2), c, {}, BudgetScope::PerCell});
  CHECK(a.assignments == 4);
  const NetworkConfig c2 = NetworkConfig::uniform(2, 1, 2, 2, 2, 5.0, 1.0, 0.1);
  OracleBudget small;
  small.levels = 8;
  const OracleResult b = brute_force({testing::random_gains(g, c2, Band::F2), c2, {}, BudgetScope::PerCell}, small);
  CHECK(b.assignments == 16);
}

TEST_CASE("budget guard", "[oracle]") {
  const NetworkConfig c = NetworkConfig::uniform(4, 1, 2, 2, 2, 5.0, 1.0, 0.1);
  ChannelGains gains(Band::F2, 5, 9, 2, 0.5);
  CHECK_THROWS_AS(brute_force({gains, c, {}, BudgetScope::PerCell}), OracleBudgetExceeded);
}

TEST_CASE("no interference matches water-filling within a grid step", "[oracle][property]") {
  testing::Gen g(72);
  for (int t = 0; t < 10; ++t) {
    NetworkConfig c = NetworkConfig::uniform(1, 1, 1, 3, 3, 5.0, 1.0, testing::log_uniform(g, 0.01, 1.0));
    c.mask_f2(1) = testing::uniform(g, 0.34, 1.0);
    const ChannelGains gains = testing::random_gains(g, c, Band::F2, 0.05, 5.0);
    const OracleResult o = brute_force({gains, c, {}, BudgetScope::PerCell});
    const Eigen::VectorXd h = gains.from(1).row(1).transpose();
    const auto w = capped_waterfill(h, c.noise_power, c.budget(1), Eigen::VectorXd::Constant(3, c.mask_f2(1)));
    const double wf = sum_rate(h, w.powers, Eigen::VectorXd::Constant(3, c.noise_power));
    CHECK(o.objective <= wf + 1e-12);
    CHECK(o.objective >= wf - 3.0 * o.grid_step_slack - 1e-12);
  }
}

TEST_CASE("symmetric two-variable grid optimum is symmetric", "[oracle]") {
  const NetworkConfig c = NetworkConfig::uniform(2, 1, 1, 1, 1, 5.0, 1.0, 0.2);
  ChannelGains gains(Band::F2, 3, 3, 1, 1.0);
  gains.at(1, 2, 0) = 0.05;
  gains.at(2, 1, 0) = 0.05;
  Allocation fixed(Band::F2, 3, 1);
  fixed.assign(1, 0, 0);
  fixed.assign(2, 0, 0);
  const OracleResult o = grid_power_search({gains, c, {}, BudgetScope::PerCell}, fixed);
  REQUIRE(o.feasible);
  CHECK(o.allocation.power(1, 0) == o.allocation.power(2, 0));
}

TEST_CASE("grid search is deterministic", "[oracle]") {
  testing::Gen g(73);
  const NetworkConfig c = NetworkConfig::uniform(2, 1, 2, 2, 2, 5.0, 1.0, 0.1);
  const ChannelGains gains = testing::random_gains(g, c, Band::F2);
  OracleBudget b;
  b.levels = 12;
  const OracleResult x = brute_force({gains, c, {}, BudgetScope::PerCell}, b);
  const OracleResult y = brute_force({gains, c, {}, BudgetScope::PerCell}, b);
  CHECK(x.objective == y.objective);
  CHECK(x.allocation == y.allocation);
}
