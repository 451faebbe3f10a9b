// Acceptance checks. Run `acceptance N` for one criterion or no argument for
// all of them; prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "rootmle/analysis.hpp"
#include "rootmle/fixtures.hpp"
#include "rootmle/grid.hpp"
#include "rootmle/likelihood.hpp"
#include "rootmle/search.hpp"
#include "rootmle/spectral.hpp"

using namespace rootmle;

namespace {

// Three printed decimals: half a unit in the last place.
constexpr double kPrinted3dp = 5e-4 + 1e-12;
constexpr double kSmallGridTarget = 1e4;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[fail] ") << what << "; ";
  }
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

StochasticMatrix mle(const StudyFixture& f) { return interval_mle(f.counts, f.mask); }

struct SmallSearch {
  LikelihoodContext ctx;
  GridSpec spec;
  SearchReport report;
  double seconds = 0.0;
};

SmallSearch small_search(const std::string& name, int t, double target = kSmallGridTarget) {
  const StudyFixture& f = find_fixture(name);
  LikelihoodContext ctx(f.counts, t, f.mask);
  GridSpec spec{f.mask, scaled_denominators(f.mask, f.full_denominators, target)};
  const auto start = std::chrono::steady_clock::now();
  SearchReport report = run_search(ctx, spec, f.settings(t), workers());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(ctx), std::move(spec), std::move(report), secs};
}

// Smallest L-infinity distance from `printed` to any maximizer tied with the
// global maximum (distinct roots of one P^T are all valid estimates).
double distance_to_argmax(const SearchReport& report, const ConstraintMask& mask,
                          const Eigen::MatrixXd& printed) {
  double best = INFINITY;
  for (std::uint64_t id : report.argmax_set) {
    const auto& rec = report.records[static_cast<std::size_t>(id)];
    best = std::min(best, linf_distance(theta_to_matrix(rec.theta_final, mask).matrix(), printed));
  }
  return best;
}

std::string grid_desc(const SmallSearch& s) {
  std::ostringstream o;
  o << "M=" << s.report.grid_size << " g=";
  for (std::size_t i = 0; i < s.spec.denominators.size(); ++i)
    o << (i ? "," : "") << s.spec.denominators[i];
  o << " completion=" << fmt(s.report.completion_rate, 5) << "% time=" << fmt(s.seconds, 3) << "s";
  return o.str();
}

// Random strictly interior theta honoring the mask: each row's free entries
// and remainder are a floored Dirichlet(1) split of the unpinned mass.
Eigen::MatrixXd random_masked_theta(const ConstraintMask& mask, std::mt19937_64& rng, double floor = 0.02) {
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd theta = mask.fixed_template();
  for (Index i = 0; i < mask.states(); ++i) {
    const Index k = mask.free_in_row(i);
    if (k == 0) continue;
    const double mass = 1.0 - mask.fixed_mass(i);
    std::vector<double> w(static_cast<std::size_t>(k + 1));
    double sum = 0;
    for (auto& x : w) sum += (x = e(rng));
    std::size_t n = 0;
    for (Index j = 0; j < mask.states() - 1; ++j)
      if (mask.is_free(i, j))
        theta(i, j) = mass * (floor + (1.0 - static_cast<double>(k + 1) * floor) * w[n++] / sum);
  }
  return theta;
}

// ---------------------------------------------------------------------------

Outcome interval_mle_regression() {
  Outcome o;
  for (const char* name : {"study2", "study3"}) {
    const StudyFixture& f = find_fixture(name);
    const double d = linf_distance(mle(f).matrix(), f.interval_mle->value);
    o.require(d <= kPrinted3dp, std::string(name) + " max|diff|=" + fmt(d, 3));
  }
  return o;
}

Outcome eigenvalue_regression() {
  Outcome o;
  for (const auto& f : study_fixtures()) {
    const EigenStructure eig = eigen_decompose(mle(f));
    double worst = 0.0;
    for (const auto& want : f.eigenvalues) {
      double nearest = INFINITY;
      for (Index k = 0; k < eig.eigenvalues.size(); ++k)
        if (k != eig.perron_index) nearest = std::min(nearest, std::abs(eig.eigenvalues(k) - want));
      worst = std::max(worst, nearest);
    }
    o.require(worst <= 1e-3, f.name + " " + fmt(worst, 2));
  }
  return o;
}

Outcome root_enumeration() {
  Outcome o;
  {
    const StudyFixture& f = find_fixture("study2");
    const auto roots = enumerate_real_roots(mle(f), 12, 1e6);
    o.require(roots.size() == 8, "study2 T=12 real roots=" + std::to_string(roots.size()));
    o.require(std::none_of(roots.begin(), roots.end(), [](const auto& r) { return r.is_stochastic; }),
              "study2 none stochastic");
    const RootCandidate principal = principal_root(mle(f), 12);
    const double d = linf_distance(principal.matrix, f.printed_roots->roots[0].value);
    o.require(d <= kPrinted3dp, "principal root max|diff|=" + fmt(d, 3) +
                                    " entry(2,4)=" + fmt(principal.matrix(1, 3), 3));
  }
  {
    const StudyFixture& f = find_fixture("study6");
    const auto roots = enumerate_real_roots(mle(f), 2, 1e6);
    o.require(roots.size() == 2, "study6 T=2 real roots=" + std::to_string(roots.size()));
    o.require(std::none_of(roots.begin(), roots.end(), [](const auto& r) { return r.is_stochastic; }),
              "study6 none stochastic");
    for (const auto& printed : f.printed_roots->roots) {
      double nearest = INFINITY;
      for (const auto& r : roots) nearest = std::min(nearest, linf_distance(r.matrix, printed.value));
      o.require(nearest <= kPrinted3dp, "study6 printed root matched to " + fmt(nearest, 3));
    }
  }
  return o;
}

Outcome gradient_correctness() {
  Outcome o;
  std::mt19937_64 rng(2024);
  for (const auto& f : study_fixtures()) {
    double worst = 0.0;
    for (int t : {2, 6, 12, 24, 100}) {
      const LikelihoodContext ctx(f.counts, t, f.mask);
      for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd theta = random_masked_theta(f.mask, rng);
        const Eigen::MatrixXd g = gradient(ctx, ThetaParam(theta, f.mask));
        const Eigen::MatrixXd fd = oracle::fd_gradient(f.counts.as_double(), theta, t);
        double err = 0.0, scale = 0.0;
        for (const auto& [i, j] : f.mask.free_entries()) {
          err = std::max(err, std::abs(g(i, j) - fd(i, j)));
          scale = std::max(scale, std::abs(fd(i, j)));
        }
        worst = std::max(worst, err / std::max(scale, 1.0));
      }
    }
    o.require(worst < 1e-6, f.name + " worst rel=" + fmt(worst, 2));
  }
  return o;
}

Outcome small_instance_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::int64_t> count(1, 400);
  double worst_theta = 0.0, worst_ll = 0.0;
  int failures = 0;
  for (int t : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      CountGrid n(2, 2);
      n << count(rng), count(rng), count(rng), count(rng);
      const ConstraintMask mask(2);
      const LikelihoodContext ctx{CountMatrix(n), t, mask};
      const auto dense = oracle::dense_grid_s2(n.cast<double>(), t, 1e-3);
      // Maximize from a modest start grid so that every root branch is reached.
      const SearchReport report = run_search(ctx, GridSpec{mask, {10, 10}}, OptimizerSettings{}, 1);
      double dtheta = INFINITY;
      for (std::uint64_t id : report.argmax_set) {
        const auto& th = report.records[static_cast<std::size_t>(id)].theta_final;
        dtheta = std::min(dtheta, std::max(std::abs(th(0, 0) - dense.a), std::abs(th(1, 0) - dense.b)));
      }
      const double dll = std::abs(report.global_max_loglik - dense.value);
      worst_theta = std::max(worst_theta, dtheta);
      worst_ll = std::max(worst_ll, dll);
      if (!(dtheta <= 1e-3 && dll <= 1e-3)) ++failures;
    }
  }
  o.require(failures == 0, "40 instances, failures=" + std::to_string(failures) + " worst theta=" +
                               fmt(worst_theta, 3) + " worst loglik=" + fmt(worst_ll, 3));
  return o;
}

Outcome study2_recovery() {
  Outcome o;
  const StudyFixture& f = find_fixture("study2");
  const SmallSearch s = small_search("study2", 12);
  o.detail << grid_desc(s) << "; ";
  const Eigen::MatrixXd p = theta_to_matrix(s.report.best().theta_final, f.mask).matrix();
  const double d = distance_to_argmax(s.report, f.mask, f.reference(12)->maximizer->value);
  o.require(d <= 0.005, "maximizer max|diff|=" + fmt(d, 3));
  const double err = frobenius_rel_error(oracle::naive_power(p, 12), mle(f).matrix());
  o.require(std::abs(err - 0.0384) <= 0.001, "Frobenius rel error=" + fmt(100 * err, 4) + "%");
  return o;
}

Outcome plateau_study(const std::vector<std::string>& names, double entry_tol) {
  Outcome o;
  for (const auto& name : names) {
    const StudyFixture& f = find_fixture(name);
    const SmallSearch s = small_search(name, 2);
    const CycleReference* ref = f.reference(2);
    const double d = distance_to_argmax(s.report, f.mask, ref->maximizer->value);
    const PlateauSummary plateaus = detect_plateaus(s.report);
    const double frac = plateaus.global_plateau_fraction;
    o.detail << name << " " << grid_desc(s) << "; ";
    o.require(d <= entry_tol, name + " maximizer max|diff|=" + fmt(d, 3));
    o.require(std::abs(frac - *ref->top_plateau_fraction) <= 0.10,
              name + " top plateau=" + fmt(100 * frac, 4) + "% (ref " +
                  fmt(100 * *ref->top_plateau_fraction, 3) + "%)");
  }
  return o;
}

Outcome large_t_fixed_point() {
  Outcome o;
  const StudyFixture& f = find_fixture("study4");
  const SmallSearch s = small_search("study4", 100);
  o.detail << grid_desc(s) << "; ";
  const ConvergenceRecord& best = s.report.best();
  const ConvergenceRecord again = maximize(s.ctx, best.theta_final, f.settings(100), best.start_id);
  const double d = linf_distance(again.theta_final.matrix(), best.theta_final.matrix());
  o.require(again.converged() && d <= 1e-6, "restart moved " + fmt(d, 3));
  const double printed = log_likelihood_of_matrix(s.ctx, f.reference(100)->maximizer->value);
  o.require(best.loglik >= printed - 1e-3 * std::abs(printed),
            "loglik " + fmt(best.loglik, 12) + " vs printed-matrix " + fmt(printed, 12));
  return o;
}

Outcome uniqueness_analytics() {
  Outcome o;
  const SmallSearch s = small_search("study4", 2);
  const MaximizerSet set = maximizer_uniqueness(s.report, 0.3125, s.ctx);
  o.detail << grid_desc(s) << "; ";
  o.require(set.unique_in_PT, "unique_in_PT=" + std::string(set.unique_in_PT ? "true" : "false") +
                                  " representatives=" + std::to_string(set.representatives.size()));
  o.require(set.max_distance <= 0.016, "band max distance=" + fmt(set.max_distance, 3));
  // Distances below the P^T-equivalence threshold describe the same point.
  const auto floored = [](double x) { return std::max(x, kEquivTol); };
  const std::size_t top = std::min<std::size_t>(20, set.distances.size());
  double top_max = 0.0;
  for (std::size_t k = 0; k < top; ++k) top_max = std::max(top_max, set.distances[k].distance);
  o.require(floored(top_max) <= floored(set.median_distance),
            "top-20 max distance=" + fmt(top_max, 3) + " band median=" + fmt(set.median_distance, 3));
  return o;
}

Outcome determinism_and_resume() {
  Outcome o;
  const StudyFixture& f = find_fixture("study4");
  const LikelihoodContext ctx(f.counts, 2, f.mask);
  const GridSpec spec{f.mask, scaled_denominators(f.mask, f.full_denominators, 2000)};
  const OptimizerSettings settings = f.settings(2);
  const SearchReport full = run_search(ctx, spec, settings, workers());

  const auto dir = oracle::scratch_dir("acceptance_resume");
  SearchOptions first;
  first.store = dir;
  first.workers = workers();
  first.max_new_records = full.grid_size / 3;
  const SearchReport partial = run_search(ctx, spec, settings, first);
  SearchOptions second;
  second.workers = 2;
  second.max_new_records = full.grid_size / 3;
  resume_search(dir, ctx, spec, settings, second);
  const SearchReport resumed = resume_search(dir, ctx, spec, settings);
  std::filesystem::remove_all(dir);

  o.require(!partial.complete(), "interrupted after " + std::to_string(partial.records.size()) + " of " +
                                     std::to_string(full.grid_size));
  o.require(resumed.same_records(full), "resumed report equals uninterrupted record-for-record");
  o.require(resumed.global_max_loglik == full.global_max_loglik && resumed.argmax_set == full.argmax_set,
            "aggregates equal");
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"interval MLE regression", interval_mle_regression},
      {"eigenvalue regression", eigenvalue_regression},
      {"root enumeration", root_enumeration},
      {"gradient correctness", gradient_correctness},
      {"small-instance oracle equivalence", small_instance_oracle},
      {"Study 2 maximizer recovery", study2_recovery},
      {"Studies 4-6 at T=2", [] { return plateau_study({"study4", "study5", "study6"}, 0.005); }},
      {"Studies 7-8 at T=2", [] { return plateau_study({"study7", "study8"}, 0.01); }},
      {"large-T fixed point", large_t_fixed_point},
      {"uniqueness analytics", uniqueness_analytics},
      {"determinism and resume", determinism_and_resume},
  };
  return list;
}

bool run_one(std::size_t n) {
  const Criterion& c = criteria()[n - 1];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  std::cout << "criterion " << n << " (" << c.title << "): " << (o.pass ? "PASS" : "FAIL") << " | "
            << o.detail.str() << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t count = criteria().size();
  if (argc > 2) {
    std::cerr << "usage: acceptance [criterion 1-" << count << "]\n";
    return 2;
  }
  if (argc == 2) {
    const std::size_t n = std::strtoul(argv[1], nullptr, 10);
    if (n < 1 || n > count) {
      std::cerr << "criterion must be in 1-" << count << "\n";
      return 2;
    }
    return run_one(n) ? 0 : 1;
  }
  bool all = true;
  for (std::size_t n = 1; n <= count; ++n) all = run_one(n) && all;
  return all ? 0 : 1;
}
