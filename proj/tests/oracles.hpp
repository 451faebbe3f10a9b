// Independent reference computations used by the tests. Nothing here calls
// the library routine it is meant to check.
#ifndef ROOTMLE_TESTS_ORACLES_HPP
#define ROOTMLE_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// P^T by repeated multiplication.
inline Eigen::MatrixXd naive_power(const Eigen::MatrixXd& p, int t) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (int k = 0; k < t; ++k) out = out * p;
  return out;
}

// theta -> P by hand.
inline Eigen::MatrixXd full(const Eigen::MatrixXd& theta) {
  Eigen::MatrixXd p(theta.rows(), theta.cols() + 1);
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    double rest = 1.0;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
      p(i, j) = theta(i, j);
      rest -= theta(i, j);
    }
    p(i, theta.cols()) = rest;
  }
  return p;
}

// Multinomial log-likelihood written out term by term.
inline double loglik(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& theta, int t) {
  const Eigen::MatrixXd pt = naive_power(full(theta), t);
  double total = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j)
      if (counts(i, j) > 0) total += counts(i, j) * std::log(pt(i, j));
  return total;
}

// Central differences with a Richardson step (h and h/2).
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2 * h);
  const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
  return (4 * d2 - d1) / 3;
}

// Gradient of the term-by-term log-likelihood over every theta entry.
inline Eigen::MatrixXd fd_gradient(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& theta,
                                   int t, double h = 1e-5) {
  Eigen::MatrixXd g(theta.rows(), theta.cols());
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    for (Eigen::Index j = 0; j < theta.cols(); ++j)
      g(i, j) = central_difference(
          [&](double v) {
            Eigen::MatrixXd th = theta;
            th(i, j) = v;
            return loglik(counts, th, t);
          },
          theta(i, j), h);
  return g;
}

// Random interior theta: each row is a Dirichlet(1) draw with every entry
// at least `floor`.
inline Eigen::MatrixXd random_theta(int s, std::mt19937_64& rng, double floor = 0.02) {
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd theta(s, s - 1);
  for (int i = 0; i < s; ++i) {
    std::vector<double> w(static_cast<std::size_t>(s));
    double sum = 0;
    for (auto& x : w) sum += (x = e(rng));
    for (int j = 0; j < s - 1; ++j)
      theta(i, j) = floor + (1.0 - s * floor) * w[static_cast<std::size_t>(j)] / sum;
  }
  return theta;
}

// Exhaustive maximization for s = 2 over the closed unit square: a lattice of
// step `step`, then a lattice 50 times finer over +-5 coarse steps around the
// coarse best. The finer pass matters on flat ridges, where the coarse argmax
// can sit more than one step from the optimum.
struct DenseOptimum {
  double a = 0, b = 0, value = -INFINITY;
};
inline DenseOptimum dense_grid_s2(const Eigen::MatrixXd& counts, int t, double step = 1e-3) {
  DenseOptimum best;
  auto visit = [&](double a, double b) {
    Eigen::MatrixXd th(2, 1);
    th << a, b;
    const double v = loglik(counts, th, t);
    if (std::isfinite(v) && v > best.value) best = {a, b, v};
  };
  const int n = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) visit(i * step, j * step);
  const double fine = step / 50;
  const DenseOptimum coarse = best;
  for (int i = -250; i <= 250; ++i)
    for (int j = -250; j <= 250; ++j) {
      const double a = coarse.a + i * fine, b = coarse.b + j * fine;
      if (a >= 0 && a <= 1 && b >= 0 && b <= 1) visit(a, b);
    }
  return best;
}

// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = std::filesystem::temp_directory_path() /
             ("rootmle_" + name + "_" + std::to_string(stamp));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace oracle

#endif  // ROOTMLE_TESTS_ORACLES_HPP
