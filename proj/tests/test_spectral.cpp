#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "rootmle/fixtures.hpp"
#include "rootmle/spectral.hpp"

using namespace rootmle;

namespace {

StochasticMatrix two_state(double a, double b) {
  Eigen::MatrixXd p(2, 2);
  p << 1 - a, a, b, 1 - b;
  return StochasticMatrix(p);
}

StochasticMatrix mle(const char* name) {
  const StudyFixture& f = find_fixture(name);
  return interval_mle(f.counts, f.mask);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("two-state principal root matches the closed form") {
    // Eigenvalue 1 - a - b; the root scales the off-diagonal mass by
    // (1 - lambda^(1/T)) / (1 - lambda).
    for (auto [a, b] : {std::pair{0.2, 0.1}, std::pair{0.05, 0.4}, std::pair{0.3, 0.3}}) {
      for (int t : {2, 3, 12}) {
        const double lambda = 1 - a - b;
        const double scale = (1 - std::pow(lambda, 1.0 / t)) / (1 - lambda);
        const RootCandidate r = principal_root(two_state(a, b), t);
        CHECK(r.matrix(0, 1) == doctest::Approx(a * scale).epsilon(1e-12));
        CHECK(r.matrix(1, 0) == doctest::Approx(b * scale).epsilon(1e-12));
        CHECK(r.is_stochastic);
      }
    }
  }

  TEST_CASE("eigen structure classification") {
    const EigenStructure s2 = eigen_decompose(mle("study2"));
    CHECK(s2.positive_count == 3);
    CHECK(s2.complex_pairs == 0);
    CHECK(std::abs(s2.eigenvalues(s2.perron_index) - 1.0) < 1e-12);
    const EigenStructure s6 = eigen_decompose(mle("study6"));
    CHECK(s6.complex_pairs == 1);
    CHECK(s6.positive_count == 0);
    const EigenStructure s8 = eigen_decompose(mle("study8"));
    CHECK(s8.negative_count == 1);
    CHECK(s8.complex_pairs == 1);
    // Sorted by modulus.
    for (Index k = 1; k < s8.eigenvalues.size(); ++k)
      CHECK(std::abs(s8.eigenvalues(k - 1)) >= std::abs(s8.eigenvalues(k)) - 1e-15);
  }

  TEST_CASE("eigenvalues match the printed values") {
    for (const auto& f : study_fixtures()) {
      CAPTURE(f.name);
      const EigenStructure eig = eigen_decompose(interval_mle(f.counts, f.mask));
      for (const auto& printed : f.eigenvalues) {
        double nearest = 1e9;
        for (Index k = 0; k < eig.eigenvalues.size(); ++k)
          nearest = std::min(nearest, std::abs(eig.eigenvalues(k) - printed));
        CHECK(nearest < 1e-3);
      }
    }
  }

  TEST_CASE("real root counts") {
    CHECK(real_root_count(eigen_decompose(mle("study2")), 12) == 8);
    CHECK(real_root_count(eigen_decompose(mle("study6")), 2) == 2);
    CHECK(real_root_count(eigen_decompose(mle("study6")), 3) == 3);
    CHECK(real_root_count(eigen_decompose(mle("study3")), 6) == 0);
    CHECK(real_root_count(eigen_decompose(mle("study4")), 2) == 0);
    CHECK(real_root_count(eigen_decompose(mle("study4")), 3) == 1);
    CHECK(real_root_count(eigen_decompose(two_state(0.2, 0.1)), 4) == 2);
  }

  TEST_CASE("every enumerated root reproduces the matrix") {
    for (auto [name, t] : {std::pair{"study2", 12}, std::pair{"study6", 2}, std::pair{"study6", 5},
                           std::pair{"study4", 3}, std::pair{"study8", 3}}) {
      CAPTURE(name);
      CAPTURE(t);
      const StochasticMatrix p = mle(name);
      const auto roots = enumerate_real_roots(p, t, 1e6);
      CHECK(static_cast<double>(roots.size()) == real_root_count(eigen_decompose(p), t));
      for (std::size_t k = 0; k < roots.size(); ++k) {
        CHECK(linf_distance(oracle::naive_power(roots[k].matrix, t), p.matrix()) < 1e-8);
        for (std::size_t l = 0; l < k; ++l) CHECK(linf_distance(roots[k].matrix, roots[l].matrix) > 1e-6);
        const bool stochastic = StochasticMatrix::satisfies(roots[k].matrix, kStochasticTol);
        CHECK(roots[k].is_stochastic == stochastic);
      }
    }
  }

  TEST_CASE("even roots of a matrix with a negative eigenvalue are rejected") {
    CHECK_THROWS_WITH_AS(principal_root(mle("study3"), 6), doctest::Contains("no real root"), Error);
    CHECK(enumerate_real_roots(mle("study3"), 6, 1e6).empty());
  }

  TEST_CASE("identity has the identity as a root") {
    const StochasticMatrix id(Eigen::MatrixXd::Identity(3, 3));
    const RootCandidate r = principal_root(id, 12);
    CHECK(r.matrix.isIdentity(1e-14));
    CHECK(r.is_stochastic);
  }

  TEST_CASE("defective and repeated eigenvalues are rejected") {
    Eigen::MatrixXd jordan(3, 3);
    jordan << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(principal_root(StochasticMatrix(jordan), 2), Error);
  }

  TEST_CASE("budget overflow") {
    CHECK_THROWS_WITH_AS(enumerate_real_roots(mle("study2"), 12, 4), doctest::Contains("infeasible"),
                         Error);
  }

  TEST_CASE("roots are equivariant under relabelling the states") {
    const StochasticMatrix p = mle("study6");
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(3);
    perm.indices() << 2, 0, 1;
    const Eigen::MatrixXd q = perm * p.matrix() * perm.transpose();
    const auto a = enumerate_real_roots(p, 2, 1e6);
    const auto b = enumerate_real_roots(StochasticMatrix(q), 2, 1e6);
    REQUIRE(a.size() == b.size());
    for (const auto& ra : a) {
      const Eigen::MatrixXd moved = perm * ra.matrix * perm.transpose();
      double best = 1e9;
      for (const auto& rb : b) best = std::min(best, linf_distance(moved, rb.matrix));
      CHECK(best < 1e-9);
    }
  }
}
