#ifndef ROOTMLE_ANALYSIS_HPP
#define ROOTMLE_ANALYSIS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rootmle/search.hpp"
#include "rootmle/spectral.hpp"

namespace rootmle {

/// P^T-equivalence threshold (L-infinity).
inline constexpr double kEquivTol = 1e-6;
/// Default plateau gap, relative to |global max|.
inline constexpr double kLevelTolRelative = 1e-4;

struct RankPoint {
  double scaled_rank = 0.0;  // k / (number of converged records)
  double loglik = 0.0;
  double grad_linf = 0.0;
  std::uint64_t start_id = 0;
};

/// Converged records in ascending log-likelihood (ties by grid index).
std::vector<RankPoint> rank_curve(const SearchReport& report);

struct Plateau {
  double level = 0.0;      // highest log-likelihood in the group
  double level_low = 0.0;  // lowest log-likelihood in the group
  std::uint64_t members = 0;
  double fraction = 0.0;  // of the whole grid
  double grad_min = 0.0;
  double grad_max = 0.0;
};

struct PlateauSummary {
  std::vector<Plateau> plateaus;  // descending level
  double global_plateau_fraction = 0.0;  // fraction of the top plateau
  double level_tol = 0.0;
};

double default_level_tol(const SearchReport& report);

/// Single-linkage grouping of converged log-likelihoods: consecutive sorted
/// values closer than `level_tol` share a plateau.
PlateauSummary detect_plateaus(const SearchReport& report, double level_tol);
inline PlateauSummary detect_plateaus(const SearchReport& report) {
  return detect_plateaus(report, default_level_tol(report));
}

struct MaximizerRepresentative {
  Eigen::MatrixXd p_hat;
  Eigen::MatrixXd pt_hat;
  std::vector<std::uint64_t> members;
};

struct DistancePoint {
  std::uint64_t start_id = 0;
  double loglik = 0.0;
  double distance = 0.0;  // L-infinity distance of P_i to the global maximizer
};

/// Result of the uniqueness analysis.
///
/// `representatives` groups the records tied with the global maximum (within
/// the argmax tolerance) by P^T-equivalence; `unique_in_PT` is true when they
/// all share one T-th power. `distances` covers the top `top_fraction` of
/// converged records, in descending log-likelihood.
struct MaximizerSet {
  std::vector<MaximizerRepresentative> representatives;
  bool unique_in_PT = false;
  std::vector<DistancePoint> distances;
  double cutoff_loglik = 0.0;
  double max_distance = 0.0;
  double median_distance = 0.0;
};

MaximizerSet maximizer_uniqueness(const SearchReport& report, double top_fraction,
                                  const LikelihoodContext& ctx, double tau_equiv = kEquivTol);

/// Cutoff fractions of the published distance figures.
double default_top_fraction(const std::string& study, int cycles);

/// Real roots of the best maximizer's T-th power, to surface roots the grid
/// did not reach.
struct RootRecovery {
  bool feasible = false;
  std::string message;
  std::vector<RootCandidate> roots;
};
RootRecovery recover_roots(const Eigen::MatrixXd& pt_hat, int cycles, double budget = 1e6);

/// Figure panels that can be exported.
enum class PlotKind { Rank, Gradient, Distance };

/// Maps `rank`, `gradient`, `distance` and the published figure ids (fig1..fig12,
/// figS1..figS6) to a panel kind; throws on unknown ids.
PlotKind parse_plot_kind(const std::string& id);

struct PlotOptions {
  double top_fraction = 1.0;  // for distance panels
};

/// CSV with '#' header comments describing the columns.
void emit_plot_data(const SearchReport& report, const LikelihoodContext& ctx, PlotKind kind,
                    const PlotOptions& options, std::ostream& out);

}  // namespace rootmle

#endif  // ROOTMLE_ANALYSIS_HPP
