#ifndef ROOTMLE_SIMULATE_HPP
#define ROOTMLE_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "rootmle/core.hpp"

namespace rootmle {

/// Draws row i of a count matrix from Multinomial(row_totals[i], row i of P^T).
/// Deterministic for a given seed. The result may contain all-zero rows, so it
/// is returned as a raw grid.
CountGrid simulate_counts(const StochasticMatrix& p, int cycles,
                          const std::vector<std::int64_t>& row_totals, std::uint64_t seed);

}  // namespace rootmle

#endif  // ROOTMLE_SIMULATE_HPP
