#include "rootmle/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rootmle {
namespace {

ConvergenceRecord optimize_point(const LikelihoodContext& ctx, const Grid& grid,
                                 const OptimizerSettings& settings, std::uint64_t index) {
  const Eigen::MatrixXd start = grid.start(index);
  try {
    return maximize(ctx, ThetaParam(start, ctx.mask()), settings, index);
  } catch (const std::exception&) {
    ConvergenceRecord rec;
    rec.start_id = index;
    rec.theta_final = ThetaParam(start, ctx.mask());
    rec.loglik = -std::numeric_limits<double>::infinity();
    rec.grad_linf = std::numeric_limits<double>::quiet_NaN();
    rec.status = ConvergenceStatus::FailedNonfinite;
    return rec;
  }
}

// Runs the listed indices on a worker pool and hands each record to `sink`
// under a single lock.
void execute(const LikelihoodContext& ctx, const Grid& grid, const OptimizerSettings& settings,
             const std::vector<std::uint64_t>& pending, const SearchOptions& options,
             const std::function<void(const ConvergenceRecord&)>& sink) {
  const std::uint64_t limit = std::min<std::uint64_t>(pending.size(), options.max_new_records);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk);
  std::atomic<std::uint64_t> next{0};
  std::mutex lock;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(chunk);
      if (begin >= limit) return;
      const std::uint64_t end = std::min(limit, begin + chunk);
      for (std::uint64_t k = begin; k < end; ++k) {
        ConvergenceRecord rec = optimize_point(ctx, grid, settings, pending[k]);
        std::lock_guard<std::mutex> guard(lock);
        if (failure) return;
        try {
          sink(rec);
        } catch (...) {
          failure = std::current_exception();
          next.store(limit);
          return;
        }
      }
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SearchReport continue_store(RecordStore& store, SearchOptions options) {
  const StoreManifest& m = store.manifest();
  const LikelihoodContext ctx(m.counts, m.cycles, m.mask);
  const Grid grid(GridSpec{m.mask, m.denominators});
  if (grid.size() != m.grid_size) throw Error("store grid size disagrees with its grid");

  std::vector<bool> seen(grid.size(), false);
  for (const auto& rec : store.records()) {
    if (rec.start_id >= grid.size()) throw Error("store holds a record outside the grid");
    seen[rec.start_id] = true;
  }
  std::vector<std::uint64_t> pending;
  for (std::uint64_t i = 0; i < grid.size(); ++i)
    if (!seen[i]) pending.push_back(i);

  const auto start = std::chrono::steady_clock::now();
  std::uint64_t done = store.records().size();
  std::uint64_t since_flush = 0;
  try {
    execute(ctx, grid, m.settings, pending, options, [&](const ConvergenceRecord& rec) {
      store.append(rec);
      ++done;
      if (++since_flush == 64) {
        store.flush();
        since_flush = 0;
      }
      if (options.progress) options.progress(done, grid.size());
    });
  } catch (...) {
    store.flush();
    throw;
  }
  store.flush();
  return summarize(store.records(), grid.size(), seconds_since(start));
}

}  // namespace

std::size_t SearchReport::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.converged(); }));
}

const ConvergenceRecord& SearchReport::best() const {
  if (argmax_set.empty()) throw Error("search report has no converged record");
  const auto it = std::lower_bound(
      records.begin(), records.end(), argmax_set.front(),
      [](const ConvergenceRecord& r, std::uint64_t id) { return r.start_id < id; });
  return *it;
}

bool SearchReport::same_records(const SearchReport& other) const {
  if (grid_size != other.grid_size || records.size() != other.records.size()) return false;
  if (argmax_set != other.argmax_set || completion_rate != other.completion_rate) return false;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& a = records[k];
    const auto& b = other.records[k];
    const bool same_loglik = a.loglik == b.loglik || (std::isnan(a.loglik) && std::isnan(b.loglik));
    const bool same_grad =
        a.grad_linf == b.grad_linf || (std::isnan(a.grad_linf) && std::isnan(b.grad_linf));
    if (a.start_id != b.start_id || a.status != b.status || a.outer_iters != b.outer_iters ||
        !same_loglik || !same_grad || a.theta_final.matrix() != b.theta_final.matrix())
      return false;
  }
  return true;
}

SearchReport summarize(std::vector<ConvergenceRecord> records, std::uint64_t grid_size,
                       double wall_time) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.start_id < b.start_id; });
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].start_id == records[k - 1].start_id)
      throw Error("duplicate record for grid index " + std::to_string(records[k].start_id));

  SearchReport report;
  report.grid_size = grid_size;
  report.wall_time = wall_time;
  std::size_t converged = 0;
  for (const auto& r : records) {
    if (!r.converged()) continue;
    ++converged;
    report.global_max_loglik = std::max(report.global_max_loglik, r.loglik);
  }
  report.completion_rate =
      grid_size == 0 ? 0.0 : 100.0 * static_cast<double>(converged) / static_cast<double>(grid_size);
  if (converged > 0) {
    const double cutoff =
        report.global_max_loglik - kArgmaxTieTol * std::abs(report.global_max_loglik);
    for (const auto& r : records)
      if (r.converged() && r.loglik >= cutoff) report.argmax_set.push_back(r.start_id);
  }
  report.records = std::move(records);
  return report;
}

StoreManifest make_manifest(const LikelihoodContext& ctx, const GridSpec& spec,
                            const OptimizerSettings& settings) {
  if (!(spec.mask == ctx.mask())) throw InputError("grid mask differs from the problem mask");
  const Grid grid(spec);
  return StoreManifest{ctx.counts(), ctx.mask(), ctx.cycles(), spec.denominators, settings, grid.size()};
}

SearchReport run_search(const LikelihoodContext& ctx, const GridSpec& spec,
                        const OptimizerSettings& settings, const SearchOptions& options) {
  if (options.workers < 1) throw InputError("workers must be at least 1");
  settings.validate();
  if (!options.store.empty()) {
    RecordStore store = RecordStore::create(options.store, make_manifest(ctx, spec, settings));
    return continue_store(store, options);
  }
  if (!(spec.mask == ctx.mask())) throw InputError("grid mask differs from the problem mask");
  const Grid grid(spec);
  std::vector<std::uint64_t> pending(grid.size());
  for (std::uint64_t i = 0; i < grid.size(); ++i) pending[i] = i;
  std::vector<ConvergenceRecord> records;
  records.reserve(grid.size());
  const auto start = std::chrono::steady_clock::now();
  execute(ctx, grid, settings, pending, options, [&](const ConvergenceRecord& rec) {
    records.push_back(rec);
    if (options.progress) options.progress(records.size(), grid.size());
  });
  return summarize(std::move(records), grid.size(), seconds_since(start));
}

SearchReport run_search(const LikelihoodContext& ctx, const GridSpec& spec,
                        const OptimizerSettings& settings, int workers) {
  SearchOptions options;
  options.workers = workers;
  return run_search(ctx, spec, settings, options);
}

SearchReport resume_search(const std::filesystem::path& path, SearchOptions options) {
  if (options.workers < 1) throw InputError("workers must be at least 1");
  RecordStore store = RecordStore::open(path);
  return continue_store(store, options);
}

SearchReport resume_search(const std::filesystem::path& path, const LikelihoodContext& ctx,
                           const GridSpec& spec, const OptimizerSettings& settings,
                           SearchOptions options) {
  if (options.workers < 1) throw InputError("workers must be at least 1");
  RecordStore store = RecordStore::open(path);
  const std::string expected = make_manifest(ctx, spec, settings).fingerprint();
  if (store.manifest().fingerprint() != expected)
    throw InputError("store fingerprint " + store.manifest().fingerprint() +
                     " does not match this problem (" + expected + "); refusing to resume");
  return continue_store(store, options);
}

SearchReport load_report(const std::filesystem::path& path) {
  const RecordStore store = RecordStore::open(path);
  return summarize(store.records(), store.manifest().grid_size);
}

}  // namespace rootmle
