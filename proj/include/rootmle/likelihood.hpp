#ifndef ROOTMLE_LIKELIHOOD_HPP
#define ROOTMLE_LIKELIHOOD_HPP

#include <vector>

#include "rootmle/core.hpp"

namespace rootmle {

/// Data, observation interval and structural constraints for one estimation
/// problem. Immutable once built; shared by concurrent optimizer instances.
class LikelihoodContext {
 public:
  LikelihoodContext(CountMatrix counts, int cycles, ConstraintMask mask);

  const CountMatrix& counts() const { return counts_; }
  const Eigen::MatrixXd& counts_double() const { return counts_d_; }
  int cycles() const { return cycles_; }
  const ConstraintMask& mask() const { return mask_; }
  Index states() const { return counts_.states(); }

 private:
  CountMatrix counts_;
  Eigen::MatrixXd counts_d_;
  int cycles_;
  ConstraintMask mask_;
};

/// log(x) with x below 1e-300 mapped to -infinity.
double clamped_log(double x);

/// Multinomial log-likelihood of the counts under P^T, as a function of the
/// one-cycle matrix P. Terms with zero count contribute nothing; a positive
/// count against a nonpositive probability gives -infinity.
double log_likelihood_of_matrix(const LikelihoodContext& ctx, const Eigen::MatrixXd& p);
double log_likelihood(const LikelihoodContext& ctx, const ThetaParam& theta);

/// Powers P^0 .. P^T.
std::vector<Eigen::MatrixXd> power_table(const Eigen::MatrixXd& p, int cycles);

/// d(P^T)/d(theta_uv) with the remainder column adjusting (0-based u, v).
Eigen::MatrixXd d_power_d_theta(const Eigen::MatrixXd& p, int cycles, Index u, Index v);

/// Value and gradient of the log-likelihood. `gradient` is s x (s-1) with zeros
/// at fixed entries. Throws when the gradient is not finite.
struct LikelihoodEvaluation {
  double value = 0.0;
  Eigen::MatrixXd gradient;
};

LikelihoodEvaluation evaluate_with_gradient(const LikelihoodContext& ctx,
                                            const Eigen::MatrixXd& theta);

Eigen::MatrixXd gradient(const LikelihoodContext& ctx, const ThetaParam& theta);

}  // namespace rootmle

#endif  // ROOTMLE_LIKELIHOOD_HPP
