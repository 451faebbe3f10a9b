#include "rootmle/simulate.hpp"

#include <algorithm>
#include <random>

namespace rootmle {

CountGrid simulate_counts(const StochasticMatrix& p, int cycles,
                          const std::vector<std::int64_t>& row_totals, std::uint64_t seed) {
  const Index s = p.states();
  if (cycles < 1) throw InputError("cycles must be positive");
  if (static_cast<Index>(row_totals.size()) != s) throw InputError("need one row total per state");
  const Eigen::MatrixXd pt = matrix_power(p.matrix(), cycles);
  std::mt19937_64 rng(seed);
  CountGrid out = CountGrid::Zero(s, s);
  for (Index i = 0; i < s; ++i) {
    std::int64_t left = row_totals[static_cast<std::size_t>(i)];
    if (left < 0) throw InputError("row totals must be nonnegative");
    // Sequential conditional binomials.
    double mass = 1.0;
    for (Index j = 0; j < s - 1 && left > 0; ++j) {
      const double q = mass > 0.0 ? std::clamp(pt(i, j) / mass, 0.0, 1.0) : 0.0;
      std::binomial_distribution<std::int64_t> draw(left, q);
      const std::int64_t k = draw(rng);
      out(i, j) = k;
      left -= k;
      mass -= pt(i, j);
    }
    out(i, s - 1) += left;
  }
  return out;
}

}  // namespace rootmle
