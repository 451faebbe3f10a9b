#ifndef ROOTMLE_OPTIMIZER_HPP
#define ROOTMLE_OPTIMIZER_HPP

#include <cstdint>
#include <string>

#include "rootmle/likelihood.hpp"

namespace rootmle {

/// How the barrier is driven toward zero across outer iterations.
///  - Geometric: barrier mu * sum(log slack); mu is divided by
///    `barrier_reduction` after each outer iteration.
///  - Adaptive: mu stays fixed and each slack's log is weighted by its value at
///    the start of the outer iteration, with the linear correction that makes
///    the barrier stationary there (the weights shrink as constraints become
///    active).
enum class BarrierSchedule { Geometric, Adaptive };

const char* to_string(BarrierSchedule schedule);
BarrierSchedule parse_barrier_schedule(const std::string& text);

struct OptimizerSettings {
  double outer_rel_tol = 1e-10;
  double inner_abs_tol = 1e-8;
  double inner_rel_tol = 1e-8;
  double barrier_mu = 1e-4;
  /// mu is divided by this factor after every outer iteration.
  double barrier_reduction = 10.0;
  BarrierSchedule barrier_schedule = BarrierSchedule::Geometric;
  /// Finish each inner solve with damped Newton steps on the barrier
  /// objective.
  bool newton_refine = true;
  int max_outer_iters = 100;
  int max_inner_iters = 500;

  void validate() const;
  bool operator==(const OptimizerSettings&) const = default;
};

/// Tolerances used for a study at a given number of cycles.
OptimizerSettings tolerance_preset(const std::string& study, int cycles);

enum class ConvergenceStatus : std::uint32_t { Converged = 0, FailedNonfinite = 1, MaxIters = 2 };

const char* to_string(ConvergenceStatus status);

struct ConvergenceRecord {
  std::uint64_t start_id = 0;
  ThetaParam theta_final;
  double loglik = 0.0;
  double grad_linf = 0.0;
  ConvergenceStatus status = ConvergenceStatus::Converged;
  std::uint32_t outer_iters = 0;

  bool converged() const { return status == ConvergenceStatus::Converged; }
};

/// l(theta) + mu * (sum of log free entries + sum of log row remainders).
/// -infinity outside the open feasible region.
double barrier_objective(const LikelihoodContext& ctx, const ThetaParam& theta, double mu);
double barrier_term(const ConstraintMask& mask, const Eigen::MatrixXd& theta);

/// True when every free entry is positive and every row with free entries has
/// a positive remainder.
bool strictly_interior(const ConstraintMask& mask, const Eigen::MatrixXd& theta);

/// Log-barrier interior-point ascent with an inner BFGS loop (optionally
/// followed by Newton refinement).
ConvergenceRecord maximize(const LikelihoodContext& ctx, const ThetaParam& start,
                           const OptimizerSettings& settings, std::uint64_t start_id = 0);

}  // namespace rootmle

#endif  // ROOTMLE_OPTIMIZER_HPP
