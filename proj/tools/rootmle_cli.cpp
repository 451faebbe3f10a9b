// Command-line front end: interval MLE, root analysis, grid search, analysis
// of stored searches and synthetic data generation.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rootmle/analysis.hpp"
#include "rootmle/fixtures.hpp"
#include "rootmle/io.hpp"
#include "rootmle/search.hpp"
#include "rootmle/simulate.hpp"
#include "rootmle/spectral.hpp"

namespace fs = std::filesystem;
using namespace rootmle;

namespace {

constexpr double kSmallScaleTarget = 1e4;

struct ProblemArgs {
  std::string counts;
  std::string mask;
  std::string fixture;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& args) {
  cmd->add_option("--counts", args.counts, "count matrix CSV");
  cmd->add_option("--mask", args.mask, "constraint mask CSV (default: unconstrained)");
  cmd->add_option("--fixture", args.fixture, "bundled study (see `fixtures list`)");
}

struct Problem {
  CountMatrix counts;
  ConstraintMask mask;
  const StudyFixture* fixture = nullptr;
};

Problem load_problem(const ProblemArgs& args) {
  if (args.fixture.empty() == args.counts.empty())
    throw InputError("give exactly one of --counts or --fixture");
  if (!args.fixture.empty()) {
    const StudyFixture& f = find_fixture(args.fixture);
    ConstraintMask mask = args.mask.empty() ? f.mask : read_mask_csv(args.mask);
    return {f.counts, mask, &f};
  }
  CountMatrix counts = read_counts_csv(args.counts);
  ConstraintMask mask = args.mask.empty() ? ConstraintMask(counts.states()) : read_mask_csv(args.mask);
  if (mask.states() != counts.states()) throw InputError("mask and counts differ in size");
  return {counts, mask, nullptr};
}

std::string format_complex(std::complex<double> z) {
  char buf[64];
  if (std::abs(z.imag()) < 1e-12)
    std::snprintf(buf, sizeof buf, "%.6f", z.real());
  else
    std::snprintf(buf, sizeof buf, "%.6f%+.6fi", z.real(), z.imag());
  return buf;
}

void print_matrix(const Eigen::MatrixXd& m, int decimals = 6) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) std::printf("%s%.*f", j ? "  " : "  ", decimals, m(i, j));
    std::printf("\n");
  }
}

int cmd_fixtures() {
  for (const auto& f : study_fixtures()) {
    std::printf("%-8s s=%ld T=", f.name.c_str(), static_cast<long>(f.counts.states()));
    for (std::size_t k = 0; k < f.cycles.size(); ++k) std::printf("%s%d", k ? "," : "", f.cycles[k]);
    std::printf("  %s\n", f.description.c_str());
  }
  return 0;
}

int cmd_mle(const ProblemArgs& args) {
  const Problem p = load_problem(args);
  std::cout << format_matrix_csv(interval_mle(p.counts, p.mask).matrix(), 6);
  return 0;
}

int cmd_root(const ProblemArgs& args, int cycles, double budget) {
  const Problem p = load_problem(args);
  const StochasticMatrix pt = interval_mle(p.counts, p.mask);
  const EigenStructure eig = eigen_decompose(pt);
  std::printf("eigenvalues:");
  for (Index k = 0; k < eig.eigenvalues.size(); ++k)
    std::printf(" %s", format_complex(eig.eigenvalues(k)).c_str());
  std::printf("\n");

  if (pt.matrix().isIdentity(1e-12)) {
    std::printf("stochastic root found: identity\n");
    return 0;
  }
  if (cycles % 2 == 0 && eig.has_negative()) {
    std::printf("no real roots (negative eigenvalue");
    for (Index k = 0; k < eig.eigenvalues.size(); ++k) {
      const auto z = eig.eigenvalues(k);
      if (std::abs(z.imag()) < kEigenTol && z.real() < -kEigenTol)
        std::printf(" %s", format_complex(z).c_str());
    }
    std::printf(")\n");
    return 0;
  }
  const auto roots = enumerate_real_roots(pt, cycles, budget);
  std::size_t stochastic = 0;
  for (const auto& r : roots) stochastic += r.is_stochastic ? 1 : 0;
  std::printf("%zu real roots, %zu stochastic\n", roots.size(), stochastic);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    std::printf("root %zu branches", k + 1);
    for (int b : roots[k].branch_labels) std::printf(" %d", b);
    std::printf("%s (min entry %.6f)\n", roots[k].is_stochastic ? " stochastic" : "",
                roots[k].min_entry);
    print_matrix(roots[k].matrix);
  }
  if (stochastic > 0)
    std::printf("stochastic root found\n");
  else if (!roots.empty())
    std::printf("real roots exist but none stochastic\n");
  return 0;
}

struct SearchArgs {
  ProblemArgs problem;
  int cycles = 0;
  std::string scale;
  double target = kSmallScaleTarget;
  std::string denominators;
  int workers = 1;
  std::string store;
  std::string settings;
  bool resume = false;
  std::uint64_t max_new = 0;
  bool quiet = false;
};

void print_report(const SearchReport& report) {
  std::printf("grid points: %llu\n", static_cast<unsigned long long>(report.grid_size));
  std::printf("records: %zu\n", report.records.size());
  std::printf("completion rate: %.2f%%\n", report.completion_rate);
  std::printf("wall time: %.2f s\n", report.wall_time);
  if (report.argmax_set.empty()) return;
  std::printf("global max loglik: %.10f (%zu tied points)\n", report.global_max_loglik,
              report.argmax_set.size());
  std::printf("maximizer (grid index %llu):\n",
              static_cast<unsigned long long>(report.best().start_id));
  print_matrix(append_remainder(report.best().theta_final.matrix()));
}

std::function<void(std::uint64_t, std::uint64_t)> progress_printer(bool quiet) {
  if (quiet) return {};
  return [last = -1](std::uint64_t done, std::uint64_t total) mutable {
    const int pct = static_cast<int>(100 * done / std::max<std::uint64_t>(total, 1));
    if (pct / 10 != last / 10 || done == total) {
      std::fprintf(stderr, "\r%llu/%llu", static_cast<unsigned long long>(done),
                   static_cast<unsigned long long>(total));
      if (done == total) std::fprintf(stderr, "\n");
      last = pct;
    }
  };
}

int cmd_grid_search(const SearchArgs& a) {
  SearchOptions options;
  options.workers = a.workers;
  options.progress = progress_printer(a.quiet);
  if (a.max_new > 0) options.max_new_records = a.max_new;

  if (a.resume) {
    if (a.store.empty()) throw InputError("--resume needs --store");
    const SearchReport report = resume_search(a.store, options);
    print_report(report);
    return 0;
  }

  const Problem p = load_problem(a.problem);
  if (a.cycles < 1) throw InputError("--cycles must be a positive integer");
  OptimizerSettings settings = p.fixture ? p.fixture->settings(a.cycles) : OptimizerSettings{};
  if (!a.settings.empty()) settings = read_settings(a.settings, settings);

  std::vector<int> denominators;
  if (!a.denominators.empty()) {
    denominators = parse_int_list(a.denominators);
    if (!a.scale.empty()) throw InputError("--scale and --grid-denominators are exclusive");
  } else if (p.fixture) {
    denominators = p.fixture->full_denominators;
    if (a.scale.empty() || a.scale == "small")
      denominators = scaled_denominators(p.mask, denominators, a.target);
    else if (a.scale != "full")
      throw InputError("--scale must be small or full");
  } else {
    throw InputError("--grid-denominators is required without --fixture");
  }
  if (static_cast<Index>(denominators.size()) != p.mask.states())
    throw InputError("need one grid denominator per state");

  const LikelihoodContext ctx(p.counts, a.cycles, p.mask);
  options.store = a.store;
  std::printf("grid denominators:");
  for (int g : denominators) std::printf(" %d", g);
  std::printf("\n");
  const SearchReport report = run_search(ctx, GridSpec{p.mask, denominators}, settings, options);
  print_report(report);
  return 0;
}

struct AnalyzeArgs {
  std::string store;
  std::string fixture;
  double top_fraction = 0.0;
  double level_tol = 0.0;
  std::vector<std::string> emit;
  std::string out = ".";
  int plateau_rows = 10;
};

int cmd_analyze(const AnalyzeArgs& a) {
  if (a.store.empty()) throw InputError("--store is required");
  const RecordStore store = RecordStore::open(a.store);
  const StoreManifest& m = store.manifest();
  const SearchReport report = summarize(store.records(), m.grid_size);
  const LikelihoodContext ctx(m.counts, m.cycles, m.mask);
  print_report(report);
  if (report.argmax_set.empty()) throw Error("no converged records to analyze");

  const double level_tol = a.level_tol > 0.0 ? a.level_tol : default_level_tol(report);
  const PlateauSummary plateaus = detect_plateaus(report, level_tol);
  std::printf("plateaus (level_tol %.6g): %zu\n", level_tol, plateaus.plateaus.size());
  for (std::size_t k = 0; k < plateaus.plateaus.size() && static_cast<int>(k) < a.plateau_rows; ++k) {
    const Plateau& pl = plateaus.plateaus[k];
    std::printf("  level %.6f..%.6f  members %llu  fraction %.4f  grad %.4g..%.4g\n", pl.level_low,
                pl.level, static_cast<unsigned long long>(pl.members), pl.fraction, pl.grad_min,
                pl.grad_max);
  }
  std::printf("top plateau fraction: %.4f\n", plateaus.global_plateau_fraction);

  double top = a.top_fraction;
  if (top <= 0.0) top = a.fixture.empty() ? 1.0 : default_top_fraction(a.fixture, m.cycles);
  const MaximizerSet set = maximizer_uniqueness(report, top, ctx);
  std::printf("top fraction %.4f: %zu points, max distance %.6f, median %.6f\n", top,
              set.distances.size(), set.max_distance, set.median_distance);
  std::printf("maximizers distinct in P^T: %zu (unique_in_PT = %s)\n", set.representatives.size(),
              set.unique_in_PT ? "true" : "false");
  const RootRecovery roots = recover_roots(set.representatives.front().pt_hat, m.cycles);
  std::printf("roots of the maximizer's power: %s\n", roots.message.c_str());

  if (!a.emit.empty()) {
    fs::create_directories(a.out);
    PlotOptions options;
    options.top_fraction = top;
    for (const auto& id : a.emit) {
      const PlotKind kind = parse_plot_kind(id);
      const fs::path file = fs::path(a.out) / (id + ".csv");
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + file.string());
      emit_plot_data(report, ctx, kind, options, out);
      std::printf("wrote %s\n", file.string().c_str());
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string matrix;
  int cycles = 1;
  std::string totals;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const StochasticMatrix p(parse_matrix_csv(read_text_file(a.matrix)));
  const CountGrid n = simulate_counts(p, a.cycles, parse_int64_list(a.totals), a.seed);
  std::ostringstream text;
  for (Index i = 0; i < n.rows(); ++i) {
    for (Index j = 0; j < n.cols(); ++j) text << (j ? "," : "") << n(i, j);
    text << '\n';
  }
  if (a.out.empty())
    std::cout << text.str();
  else
    write_text_file(a.out, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum likelihood estimation of Markov transition matrices from interval data"};
  app.require_subcommand(1);

  CLI::App* fixtures = app.add_subcommand("fixtures", "bundled studies");
  fixtures->add_subcommand("list", "list bundled studies");
  fixtures->require_subcommand(1);

  ProblemArgs mle_args;
  CLI::App* mle = app.add_subcommand("mle", "interval MLE (row-normalized counts)");
  add_problem_options(mle, mle_args);

  ProblemArgs root_args;
  int root_cycles = 0;
  double root_budget = 1e6;
  CLI::App* root = app.add_subcommand("root", "real T-th roots of the interval MLE");
  add_problem_options(root, root_args);
  root->add_option("--cycles,-T", root_cycles, "cycles per observation interval")->required()
      ->check(CLI::PositiveNumber);
  root->add_option("--budget", root_budget, "maximum number of roots to enumerate");

  SearchArgs search;
  CLI::App* grid = app.add_subcommand("grid-search", "multi-start grid search");
  add_problem_options(grid, search.problem);
  grid->add_option("--cycles,-T", search.cycles, "cycles per observation interval");
  grid->add_option("--scale", search.scale, "small (about 1e4 points) or full")
      ->check(CLI::IsMember({"small", "full"}));
  grid->add_option("--target", search.target, "grid size aimed for by --scale small");
  grid->add_option("--grid-denominators", search.denominators, "per-row denominators, e.g. 8,8,8");
  grid->add_option("--workers,-j", search.workers, "worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--store", search.store, "record store directory");
  grid->add_option("--settings", search.settings, "optimizer settings file (key = value)");
  grid->add_flag("--resume", search.resume, "continue the search held in --store");
  grid->add_option("--max-new", search.max_new, "stop after this many new optimizations");
  grid->add_flag("--quiet,-q", search.quiet, "no progress output");

  AnalyzeArgs analyze;
  CLI::App* an = app.add_subcommand("analyze", "plateaus, uniqueness and plot data");
  an->add_option("--store", analyze.store, "record store directory");
  an->add_option("--fixture", analyze.fixture, "study name for the default top fraction");
  an->add_option("--top-fraction", analyze.top_fraction, "share of best points for distances");
  an->add_option("--level-tol", analyze.level_tol, "plateau gap (default 1e-4 of |max|)");
  an->add_option("--emit", analyze.emit, "panel ids: rank gradient distance fig1..fig12 figS1..figS6")
      ->delimiter(',');
  an->add_option("--out", analyze.out, "output directory for CSV files");
  an->add_option("--plateau-rows", analyze.plateau_rows, "plateaus to print");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "multinomial counts from P^T");
  simulate->add_option("--matrix", sim.matrix, "stochastic matrix CSV")->required();
  simulate->add_option("--cycles,-T", sim.cycles, "cycles")->check(CLI::PositiveNumber);
  simulate->add_option("--totals", sim.totals, "row totals, comma separated")->required();
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fixtures) return cmd_fixtures();
    if (*mle) return cmd_mle(mle_args);
    if (*root) return cmd_root(root_args, root_cycles, root_budget);
    if (*grid) return cmd_grid_search(search);
    if (*an) return cmd_analyze(analyze);
    if (*simulate) return cmd_simulate(sim);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
