#include "rootmle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace rootmle {
namespace {

std::vector<const ConvergenceRecord*> converged_descending(const SearchReport& report) {
  std::vector<const ConvergenceRecord*> out;
  for (const auto& r : report.records)
    if (r.converged()) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->loglik > b->loglik; });
  return out;
}

Eigen::MatrixXd full_matrix(const ConvergenceRecord& r) {
  return append_remainder(r.theta_final.matrix());
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<RankPoint> rank_curve(const SearchReport& report) {
  std::vector<const ConvergenceRecord*> ordered;
  for (const auto& r : report.records)
    if (r.converged()) ordered.push_back(&r);
  if (ordered.empty()) throw Error("rank curve needs at least one converged record");
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->loglik < b->loglik; });
  const double n = static_cast<double>(ordered.size());
  std::vector<RankPoint> out;
  out.reserve(ordered.size());
  for (std::size_t k = 0; k < ordered.size(); ++k)
    out.push_back({static_cast<double>(k + 1) / n, ordered[k]->loglik, ordered[k]->grad_linf,
                   ordered[k]->start_id});
  return out;
}

double default_level_tol(const SearchReport& report) {
  if (report.argmax_set.empty()) throw Error("no converged records");
  return kLevelTolRelative * std::abs(report.global_max_loglik);
}

PlateauSummary detect_plateaus(const SearchReport& report, double level_tol) {
  if (!(level_tol > 0.0)) throw InputError("level_tol must be positive");
  PlateauSummary summary;
  summary.level_tol = level_tol;
  const auto ordered = converged_descending(report);
  const double m = static_cast<double>(report.grid_size);
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& r = *ordered[k];
    if (k == 0 || ordered[k - 1]->loglik - r.loglik > level_tol) {
      summary.plateaus.push_back({r.loglik, r.loglik, 0, 0.0, r.grad_linf, r.grad_linf});
    }
    Plateau& p = summary.plateaus.back();
    p.level_low = r.loglik;
    ++p.members;
    p.fraction = static_cast<double>(p.members) / m;
    p.grad_min = std::min(p.grad_min, r.grad_linf);
    p.grad_max = std::max(p.grad_max, r.grad_linf);
  }
  if (!summary.plateaus.empty()) summary.global_plateau_fraction = summary.plateaus.front().fraction;
  return summary;
}

MaximizerSet maximizer_uniqueness(const SearchReport& report, double top_fraction,
                                  const LikelihoodContext& ctx, double tau_equiv) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw InputError("top_fraction must lie in (0, 1]");
  const auto ordered = converged_descending(report);
  if (ordered.empty()) throw Error("uniqueness analysis needs a converged record");
  const int t = ctx.cycles();

  MaximizerSet set;
  const ConvergenceRecord& best = report.best();
  const Eigen::MatrixXd best_p = full_matrix(best);

  // Group the argmax ties by their T-th powers.
  for (std::uint64_t id : report.argmax_set) {
    const auto it = std::lower_bound(
        report.records.begin(), report.records.end(), id,
        [](const ConvergenceRecord& r, std::uint64_t v) { return r.start_id < v; });
    const Eigen::MatrixXd p = full_matrix(*it);
    const Eigen::MatrixXd pt = matrix_power(p, t);
    auto rep = std::find_if(set.representatives.begin(), set.representatives.end(),
                            [&](const auto& r) { return linf_distance(r.pt_hat, pt) <= tau_equiv; });
    if (rep == set.representatives.end()) {
      set.representatives.push_back({p, pt, {id}});
    } else {
      rep->members.push_back(id);
    }
  }
  set.unique_in_PT = set.representatives.size() == 1;

  const auto keep = static_cast<std::size_t>(
      std::max(1.0, std::ceil(top_fraction * static_cast<double>(ordered.size()) - 1e-9)));
  const std::size_t n = std::min(keep, ordered.size());
  set.cutoff_loglik = ordered[n - 1]->loglik;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = linf_distance(full_matrix(*ordered[k]), best_p);
    set.distances.push_back({ordered[k]->start_id, ordered[k]->loglik, d});
    set.max_distance = std::max(set.max_distance, d);
  }
  std::vector<double> ds;
  for (const auto& d : set.distances) ds.push_back(d.distance);
  std::sort(ds.begin(), ds.end());
  set.median_distance = ds.size() % 2 ? ds[ds.size() / 2]
                                      : 0.5 * (ds[ds.size() / 2 - 1] + ds[ds.size() / 2]);
  return set;
}

double default_top_fraction(const std::string& study, int cycles) {
  static const std::map<std::pair<std::string, int>, double> presets{
      {{"study3", 6}, 0.9375}, {{"study4", 2}, 0.3125}, {{"study4", 24}, 0.01},
      {{"study5", 2}, 0.50},   {{"study5", 24}, 0.03},  {{"study6", 2}, 0.50},
      {{"study6", 24}, 0.03},  {{"study7", 2}, 0.125},  {{"study8", 2}, 0.125}};
  const auto it = presets.find({study, cycles});
  return it == presets.end() ? 1.0 : it->second;
}

RootRecovery recover_roots(const Eigen::MatrixXd& pt_hat, int cycles, double budget) {
  RootRecovery out;
  try {
    const StochasticMatrix p(pt_hat, 1e-6);
    out.roots = enumerate_real_roots(p, cycles, budget);
    out.feasible = true;
    const auto stochastic = std::count_if(out.roots.begin(), out.roots.end(),
                                          [](const auto& r) { return r.is_stochastic; });
    out.message = std::to_string(out.roots.size()) + " real roots, " + std::to_string(stochastic) +
                  " stochastic";
  } catch (const Error& e) {
    out.feasible = false;
    out.message = e.what();
  }
  return out;
}

PlotKind parse_plot_kind(const std::string& id) {
  static const std::map<std::string, PlotKind> kinds{
      {"rank", PlotKind::Rank},        {"gradient", PlotKind::Gradient},
      {"distance", PlotKind::Distance}, {"fig1", PlotKind::Rank},
      {"fig2", PlotKind::Rank},        {"fig3", PlotKind::Rank},
      {"fig4", PlotKind::Gradient},    {"fig5", PlotKind::Distance},
      {"fig6", PlotKind::Rank},        {"fig7", PlotKind::Distance},
      {"fig8", PlotKind::Distance},    {"fig9", PlotKind::Rank},
      {"fig10", PlotKind::Rank},       {"fig11", PlotKind::Rank},
      {"fig12", PlotKind::Rank},       {"figS1", PlotKind::Distance},
      {"figS2", PlotKind::Distance},   {"figS3", PlotKind::Distance},
      {"figS4", PlotKind::Distance},   {"figS5", PlotKind::Distance},
      {"figS6", PlotKind::Distance}};
  const auto it = kinds.find(id);
  if (it == kinds.end()) throw InputError("unknown figure id '" + id + "'");
  return it->second;
}

void emit_plot_data(const SearchReport& report, const LikelihoodContext& ctx, PlotKind kind,
                    const PlotOptions& options, std::ostream& out) {
  switch (kind) {
    case PlotKind::Rank: {
      out << "# rank curve: converged points in ascending log-likelihood\n"
          << "# columns: scaled_rank, loglik, grad_linf, grid_index\n";
      for (const auto& p : rank_curve(report))
        out << number(p.scaled_rank) << ',' << number(p.loglik) << ',' << number(p.grad_linf)
            << ',' << p.start_id << '\n';
      break;
    }
    case PlotKind::Gradient: {
      out << "# gradient norm against log-likelihood at each converged point\n"
          << "# columns: loglik, grad_linf, grid_index\n";
      for (const auto& p : rank_curve(report))
        out << number(p.loglik) << ',' << number(p.grad_linf) << ',' << p.start_id << '\n';
      break;
    }
    case PlotKind::Distance: {
      const MaximizerSet set = maximizer_uniqueness(report, options.top_fraction, ctx);
      out << "# L-infinity distance to the global maximizer, top " << number(options.top_fraction)
          << " of converged points\n"
          << "# columns: loglik, distance, grid_index\n";
      for (const auto& d : set.distances)
        out << number(d.loglik) << ',' << number(d.distance) << ',' << d.start_id << '\n';
      break;
    }
  }
}

}  // namespace rootmle
