#include "hetnet/waterfill.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hetnet;
using Catch::Approx;

TEST_CASE("cap clamp", "[waterfill]") {
  CHECK(cap_clamp(-1.0, 5.0) == 0.0);
  CHECK(cap_clamp(3.0, 5.0) == 3.0);
  CHECK(cap_clamp(7.0, 5.0) == 5.0);
}

TEST_CASE("macro assignment", "[waterfill]") {
  Eigen::MatrixXd g(2, 2);
  g << 3, 1, 2, 4;
  CHECK(macro_assignment(g) == std::vector<int>{0, 1});
  CHECK(macro_assignment(Eigen::MatrixXd::Constant(1, 3, 0.5)) == std::vector<int>{0, 0, 0});
  CHECK(macro_assignment(Eigen::MatrixXd::Constant(3, 2, 2.0)) == std::vector<int>{0, 0});
  CHECK_THROWS_AS(macro_assignment(Eigen::MatrixXd(0, 2)), std::invalid_argument);
}

TEST_CASE("capped waterfill examples", "[waterfill]") {
  const auto one = capped_waterfill(Eigen::VectorXd::Constant(1, 0.7), 1.0, 2.0, Eigen::VectorXd::Constant(1, 3.0));
  CHECK(one.powers(0) == Approx(2.0));

  const auto four = capped_waterfill(Eigen::VectorXd::Constant(4, 1.3), 0.2, 2.0, Eigen::VectorXd::Constant(4, 1.0));
  for (int i = 0; i < 4; ++i) CHECK(four.powers(i) == Approx(0.5));

  const Eigen::Vector2d h(1.0, 0.5);
  const auto two = capped_waterfill(h, 1.0, 2.0, Eigen::Vector2d(2.0, 2.0));
  double best = -1.0;
  for (int s = 0; s <= 100000; ++s) {
    const double p1 = 2.0 * s / 100000.0;
    best = std::max(best, std::log1p(p1) + std::log1p(0.5 * (2.0 - p1)));
  }
  CHECK(sum_rate(h, two.powers, Eigen::Vector2d::Ones()) == Approx(best).margin(1e-4));
  CHECK(two.powers(0) == Approx(1.5).margin(1e-4));
}

TEST_CASE("waterfill KKT properties", "[waterfill][property]") {
  testing::Gen g(31);
  for (int t = 0; t < 1000; ++t) {
    const int n = testing::pick(g, 1, 16);
    Eigen::VectorXd h(n), caps(n);
    for (int i = 0; i < n; ++i) h(i) = testing::log_uniform(g, 1e-2, 1e2);
    const bool equal_caps = t % 2 == 0;
    const double cap = testing::uniform(g, 0.05, 2.0);
    for (int i = 0; i < n; ++i) caps(i) = equal_caps ? cap : testing::uniform(g, 0.0, 2.0);
    const double noise = testing::log_uniform(g, 1e-2, 1.0);
    const double budget = testing::uniform(g, 0.0, 1.2 * caps.sum());
    const auto w = capped_waterfill(h, noise, budget, caps);
    const Eigen::VectorXd& p = w.powers;

    CHECK((p.array() >= 0.0).all());
    CHECK((p.array() <= caps.array()).all());
    if (caps.sum() >= budget) CHECK(std::abs(p.sum() - budget) <= 1e-9 * std::max(budget, 1e-300));
    else CHECK(p.sum() == Approx(caps.sum()));

    for (int i = 0; i < n; ++i)
      if (p(i) > 0.0 && p(i) < caps(i))
        CHECK(std::abs(p(i) + noise / h(i) - w.water_level) <= 1e-8 * w.water_level);

    int inversions = 0;
    if (equal_caps)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (h(i) >= h(j) && p(i) < p(j) - 1e-12) ++inversions;
    CHECK(inversions == 0);

    const Eigen::VectorXd noise_vec = Eigen::VectorXd::Constant(n, noise);
    const double opt = sum_rate(h, p, noise_vec);
    int beaten = 0;
    for (int s = 0; s < 1000; ++s) {
      Eigen::VectorXd q(n);
      for (int i = 0; i < n; ++i) q(i) = testing::uniform(g, 0.0, caps(i));
      if (q.sum() > budget) q *= budget / q.sum();
      if (sum_rate(h, q, noise_vec) > opt + 1e-12 * (1.0 + opt)) ++beaten;
    }
    CHECK(beaten == 0);
  }
}
