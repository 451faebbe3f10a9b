#include <doctest.h>

#include "oracles.hpp"
#include "rootmle/fixtures.hpp"
#include "rootmle/simulate.hpp"

using namespace rootmle;

TEST_SUITE("simulate") {
  TEST_CASE("deterministic, totals respected, zero rows allowed") {
    Eigen::MatrixXd p(3, 3);
    p << .7, .2, .1, .1, .8, .1, 0, 0, 1;
    const StochasticMatrix sp(p);
    const CountGrid a = simulate_counts(sp, 3, {1000, 500, 0}, 7);
    const CountGrid b = simulate_counts(sp, 3, {1000, 500, 0}, 7);
    CHECK(a == b);
    CHECK(a.row(0).sum() == 1000);
    CHECK(a.row(1).sum() == 500);
    CHECK(a.row(2).sum() == 0);
    CHECK(a(1, 0) + a(1, 1) + a(1, 2) == 500);
    CHECK(simulate_counts(sp, 3, {1000, 500, 0}, 8) != a);
    CHECK_THROWS_AS(simulate_counts(sp, 3, {1000, 500}, 7), InputError);
    CHECK_THROWS_AS(simulate_counts(sp, 0, {1, 1, 1}, 7), Error);
  }

  TEST_CASE("frequencies approach the T-th power") {
    Eigen::MatrixXd p(3, 3);
    p << .6, .3, .1, .2, .5, .3, .1, .1, .8;
    const Eigen::MatrixXd pt = oracle::naive_power(p, 4);
    const std::int64_t n = 200000;
    const CountGrid c = simulate_counts(StochasticMatrix(p), 4, {n, n, n}, 123);
    const Eigen::MatrixXd freq = c.cast<double>() / static_cast<double>(n);
    // Five binomial standard deviations at most.
    CHECK(linf_distance(freq, pt) < 5 * std::sqrt(0.25 / static_cast<double>(n)));
  }
}
