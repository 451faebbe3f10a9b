#include "rootmle/grid.hpp"

#include <cmath>
#include <limits>

namespace rootmle {
namespace {

int row_budget(const ConstraintMask& mask, Index row, int denominator) {
  return static_cast<int>(std::floor(denominator * (1.0 - mask.fixed_mass(row)) + 1e-9));
}

void enumerate_tuples(int free, int denominator, int budget, std::vector<int>& prefix,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == free) {
    out.push_back(prefix);
    return;
  }
  const int used = [&] {
    int sum = 0;
    for (int k : prefix) sum += k;
    return sum;
  }();
  const int remaining = free - static_cast<int>(prefix.size()) - 1;  // each needs >= 1
  for (int k = 1; k <= denominator - 1 && used + k + remaining <= budget; ++k) {
    prefix.push_back(k);
    enumerate_tuples(free, denominator, budget, prefix, out);
    prefix.pop_back();
  }
}

std::uint64_t grid_size(const ConstraintMask& mask, const std::vector<int>& g) {
  std::uint64_t total = 1;
  for (Index i = 0; i < mask.states(); ++i) {
    const Index f = mask.free_in_row(i);
    if (f == 0) continue;
    const int gi = g[static_cast<std::size_t>(i)];
    total *= row_point_count(static_cast<int>(f), gi, row_budget(mask, i, gi));
    if (total == 0) return 0;
  }
  return total;
}

}  // namespace

std::uint64_t row_point_count(int free, int denominator, int budget) {
  // Count tuples with entries in [1, g-1] and sum <= budget by dynamic
  // programming over the running sum.
  if (free == 0) return 1;
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(std::max(budget, 0)) + 1, 0);
  ways[0] = 1;
  for (int c = 0; c < free; ++c) {
    std::vector<std::uint64_t> next(ways.size(), 0);
    for (std::size_t sum = 0; sum < ways.size(); ++sum) {
      if (ways[sum] == 0) continue;
      for (int k = 1; k <= denominator - 1 && sum + static_cast<std::size_t>(k) < ways.size(); ++k)
        next[sum + static_cast<std::size_t>(k)] += ways[sum];
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  const ConstraintMask& mask = spec_.mask;
  const Index s = mask.states();
  if (static_cast<Index>(spec_.denominators.size()) != s)
    throw InputError("grid needs one denominator per row");
  rows_.resize(static_cast<std::size_t>(s));
  free_cols_.resize(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) {
    auto& cols = free_cols_[static_cast<std::size_t>(i)];
    for (Index j = 0; j < s - 1; ++j)
      if (mask.is_free(i, j)) cols.push_back(j);
    auto& points = rows_[static_cast<std::size_t>(i)];
    if (cols.empty()) {
      points.emplace_back(0);
      continue;
    }
    const int g = spec_.denominators[static_cast<std::size_t>(i)];
    if (g < 2) throw InputError("grid denominators must be at least 2");
    std::vector<std::vector<int>> tuples;
    std::vector<int> prefix;
    enumerate_tuples(static_cast<int>(cols.size()), g, row_budget(mask, i, g), prefix, tuples);
    if (tuples.empty()) throw InputError("grid row has no admissible points; increase its denominator");
    for (const auto& t : tuples) {
      Eigen::RowVectorXd values(static_cast<Index>(t.size()));
      for (std::size_t k = 0; k < t.size(); ++k)
        values(static_cast<Index>(k)) = static_cast<double>(t[k]) / g;
      points.push_back(values);
    }
  }
  size_ = 1;
  for (const auto& points : rows_) {
    const auto n = static_cast<std::uint64_t>(points.size());
    if (size_ > std::numeric_limits<std::uint64_t>::max() / n) throw InputError("grid too large");
    size_ *= n;
  }
}

Eigen::MatrixXd Grid::point(std::uint64_t index) const {
  if (index >= size_) throw Error("grid index out of range");
  Eigen::MatrixXd theta = spec_.mask.fixed_template();
  // Decode from the least significant (last) row.
  for (std::size_t r = rows_.size(); r-- > 0;) {
    const auto n = static_cast<std::uint64_t>(rows_[r].size());
    const auto& values = rows_[r][static_cast<std::size_t>(index % n)];
    index /= n;
    const auto& cols = free_cols_[r];
    for (std::size_t k = 0; k < cols.size(); ++k)
      theta(static_cast<Index>(r), cols[k]) = values(static_cast<Index>(k));
  }
  return theta;
}

Eigen::MatrixXd Grid::start(std::uint64_t index) const {
  Eigen::MatrixXd theta = point(index);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& cols = free_cols_[r];
    if (cols.empty()) continue;
    const Index i = static_cast<Index>(r);
    const double slack = 1.0 - theta.row(i).sum();
    if (slack > kFaceShrink * 1e-3) continue;
    for (Index j : cols) theta(i, j) *= (1.0 - kFaceShrink);
  }
  return theta;
}

std::vector<int> scaled_denominators(const ConstraintMask& mask, const std::vector<int>& base,
                                     double target) {
  if (static_cast<Index>(base.size()) != mask.states())
    throw InputError("grid needs one denominator per row");
  std::vector<int> best = base;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 4000; ++step) {
    const double alpha = step / 1000.0;
    std::vector<int> g(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      g[i] = std::max(2, static_cast<int>(std::lround(alpha * base[i])));
    const std::uint64_t m = grid_size(mask, g);
    if (m == 0) continue;
    const double gap = std::abs(std::log(static_cast<double>(m)) - std::log(target));
    if (gap < best_gap - 1e-12) {
      best_gap = gap;
      best = g;
    }
  }
  return best;
}

}  // namespace rootmle
