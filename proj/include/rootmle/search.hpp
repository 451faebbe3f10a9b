#ifndef ROOTMLE_SEARCH_HPP
#define ROOTMLE_SEARCH_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rootmle/grid.hpp"
#include "rootmle/optimizer.hpp"
#include "rootmle/record_store.hpp"

namespace rootmle {

/// Relative log-likelihood tolerance for membership in the argmax set.
inline constexpr double kArgmaxTieTol = 1e-9;

struct SearchReport {
  std::vector<ConvergenceRecord> records;  // ascending start_id
  std::uint64_t grid_size = 0;
  double completion_rate = 0.0;  // percent of the grid that converged
  double global_max_loglik = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> argmax_set;
  double wall_time = 0.0;  // seconds spent running optimizations in this call

  bool complete() const { return records.size() == grid_size; }
  std::size_t converged_count() const;
  /// Lowest-index record attaining the global maximum.
  const ConvergenceRecord& best() const;
  /// Record comparison that ignores wall time.
  bool same_records(const SearchReport& other) const;
};

/// Builds the aggregates from a set of records (any order).
SearchReport summarize(std::vector<ConvergenceRecord> records, std::uint64_t grid_size,
                       double wall_time = 0.0);

struct SearchOptions {
  int workers = 1;
  /// Directory of the durable store; empty keeps records in memory only.
  std::filesystem::path store;
  /// Stop after this many new optimizations (simulates an interruption).
  std::uint64_t max_new_records = std::numeric_limits<std::uint64_t>::max();
  /// Indices handed to a worker per claim.
  std::uint64_t chunk = 16;
  /// Called from the writer with (records done, grid size).
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

StoreManifest make_manifest(const LikelihoodContext& ctx, const GridSpec& spec,
                            const OptimizerSettings& settings);

/// One maximize call per grid point. Records stream to the store when one is
/// given; the store must not exist yet.
SearchReport run_search(const LikelihoodContext& ctx, const GridSpec& spec,
                        const OptimizerSettings& settings, const SearchOptions& options);
SearchReport run_search(const LikelihoodContext& ctx, const GridSpec& spec,
                        const OptimizerSettings& settings, int workers);

/// Continues a stored search, running only indices without a record.
/// The problem definition comes from the store manifest.
SearchReport resume_search(const std::filesystem::path& store, SearchOptions options = {});

/// As above, but first checks that the store was built for exactly this
/// problem; refuses on any fingerprint mismatch.
SearchReport resume_search(const std::filesystem::path& store, const LikelihoodContext& ctx,
                           const GridSpec& spec, const OptimizerSettings& settings,
                           SearchOptions options = {});

/// Report of whatever the store currently holds, without running anything.
SearchReport load_report(const std::filesystem::path& store);

}  // namespace rootmle

#endif  // ROOTMLE_SEARCH_HPP
