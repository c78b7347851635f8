// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bigfive/rng.hpp"
#include "bigfive/stats.hpp"
#include "oracles.hpp"

using namespace bigfive;

TEST_SUITE("stats") {
  TEST_CASE("perfect linear and anti-linear data") {
    std::vector<double> x, up, down;
    for (int i = 0; i < 20; ++i) {
      x.push_back(i * 0.5 - 3);
      up.push_back(2.0 * x.back() + 7);
      down.push_back(-0.25 * x.back() + 1);
    }
    const auto a = pearson(x, up);
    const auto b = pearson(x, down);
    CHECK(a.r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.r == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(a.p_value < 1e-12);
    CHECK(a.n == 20);
  }

  TEST_CASE("agrees with the two-pass definition on random vectors") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 3 + rng.uniform_index(200);
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal(5.0, 2.0);
        y[i] = 0.3 * x[i] + rng.normal(0.0, 1.0);
      }
      CHECK(std::abs(pearson(x, y).r - testing::brute_force_pearson(x, y)) < 1e-12);
    }
  }

  TEST_CASE("p-values match reference values computed with scipy") {
    CHECK(students_t_two_tailed(2.0, 10) == doctest::Approx(0.07338803477074039).epsilon(1e-10));
    CHECK(students_t_two_tailed(0.5, 3) == doctest::Approx(0.651447964848151).epsilon(1e-10));
    CHECK(students_t_two_tailed(3.5, 498) == doctest::Approx(0.0005070272965904837).epsilon(1e-9));
    CHECK(students_t_two_tailed(-1.2, 20) == doctest::Approx(0.24416160768409245).epsilon(1e-10));
    CHECK(students_t_two_tailed(10.0, 5) == doctest::Approx(0.00017094757574296357).epsilon(1e-9));

    const std::vector<double> x1 = {1, 2, 3, 4, 5, 6}, y1 = {2, 1, 4, 3, 6, 5};
    const auto a = pearson(x1, y1);
    CHECK(a.r == doctest::Approx(0.8285714285714283).epsilon(1e-12));
    CHECK(a.p_value == doctest::Approx(0.04156268221574357).epsilon(1e-9));

    const std::vector<double> x2 = {0.3, 1.7, 2.2, 4.0, 4.1, 5.9, 7.5, 8.0};
    const std::vector<double> y2 = {9.1, 7.7, 8.3, 6.0, 5.2, 5.5, 2.9, 1.0};
    const auto b = pearson(x2, y2);
    CHECK(b.r == doctest::Approx(-0.9574119949416233).epsilon(1e-12));
    CHECK(b.p_value == doctest::Approx(0.00018699317715033362).epsilon(1e-9));
  }

  TEST_CASE("undefined inputs are rejected") {
    const std::vector<double> flat = {1, 1, 1, 1};
    const std::vector<double> v = {1, 2, 3, 4};
    CHECK_THROWS_AS(pearson(flat, v), StatisticsError);
    CHECK_THROWS_AS(pearson(v, std::vector<double>{1, 2, 3}), StatisticsError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{2, 1}), StatisticsError);
  }

  TEST_CASE("shift and scale invariance") {
    Rng rng(8);
    std::vector<double> x(50), y(50), xs(50);
    for (int i = 0; i < 50; ++i) {
      x[i] = rng.normal();
      y[i] = x[i] + rng.normal();
      xs[i] = 1e6 + 3.0 * x[i];
    }
    CHECK(pearson(xs, y).r == doctest::Approx(pearson(x, y).r).epsilon(1e-9));
  }

  TEST_CASE("significance stars") {
    CHECK(significance_stars(0.0009) == "***");
    CHECK(significance_stars(0.001) == "**");
    CHECK(significance_stars(0.0099) == "**");
    CHECK(significance_stars(0.01) == "");
  }
}
