#ifndef ROOTMLE_GRID_HPP
#define ROOTMLE_GRID_HPP

#include <cstdint>
#include <vector>

#include "rootmle/core.hpp"

namespace rootmle {

/// Start-grid description: each row's free coordinates take values k/g_i with
/// k in [1, g_i - 1], intersected with the row's simplex (free mass no larger
/// than one minus the pinned mass). The full grid is the Cartesian product of
/// the per-row sets.
struct GridSpec {
  ConstraintMask mask;
  std::vector<int> denominators;  // one per row; ignored for fully pinned rows
};

/// Number of admissible index tuples for `free` coordinates in [1, g-1] whose
/// sum is at most `budget`.
std::uint64_t row_point_count(int free, int denominator, int budget);

/// Lazily indexed start grid. Point `index` decodes row-major over the per-row
/// index tuples (row 0 most significant); rows enumerate tuples
/// lexicographically.
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  std::uint64_t size() const { return size_; }
  std::uint64_t row_size(Index row) const {
    return static_cast<std::uint64_t>(rows_[static_cast<std::size_t>(row)].size());
  }

  /// Grid point as a theta matrix. Points on a row's remainder face are
  /// returned as generated (remainder zero).
  Eigen::MatrixXd point(std::uint64_t index) const;

  /// The grid point pulled just inside the open region so it can serve as an
  /// optimizer start.
  Eigen::MatrixXd start(std::uint64_t index) const;

 private:
  GridSpec spec_;
  std::vector<std::vector<Eigen::RowVectorXd>> rows_;  // per-row free-coordinate values
  std::vector<std::vector<Index>> free_cols_;
  std::uint64_t size_ = 1;
};

inline Grid build_grid(GridSpec spec) { return Grid(std::move(spec)); }

/// Relative shrink applied to free coordinates of rows whose grid point lies on
/// the remainder face.
inline constexpr double kFaceShrink = 1e-6;

/// Per-row denominators scaled so the grid holds roughly `target` points.
std::vector<int> scaled_denominators(const ConstraintMask& mask, const std::vector<int>& base,
                                     double target);

}  // namespace rootmle

#endif  // ROOTMLE_GRID_HPP
