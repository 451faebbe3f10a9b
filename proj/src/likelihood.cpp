#include "rootmle/likelihood.hpp"

#include <cmath>
#include <limits>

namespace rootmle {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LikelihoodContext::LikelihoodContext(CountMatrix counts, int cycles, ConstraintMask mask)
    : counts_(std::move(counts)),
      counts_d_(counts_.as_double()),
      cycles_(cycles),
      mask_(std::move(mask)) {
  if (cycles_ < 1) throw InputError("number of cycles T must be at least 1");
  if (mask_.states() != counts_.states())
    throw InputError("mask and counts disagree on state count");
}

double clamped_log(double x) {
  if (!(x >= 1e-300)) return kNegInf;
  return std::log(x);
}

double log_likelihood_of_matrix(const LikelihoodContext& ctx, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd pt = matrix_power(p, ctx.cycles());
  const Eigen::MatrixXd& n = ctx.counts_double();
  const Index s = ctx.states();
  double total = 0.0;
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) {
      if (n(i, j) == 0.0) continue;
      const double lg = clamped_log(pt(i, j));
      if (lg == kNegInf) return kNegInf;
      total += n(i, j) * lg;
    }
  }
  return std::isnan(total) ? kNegInf : total;
}

double log_likelihood(const LikelihoodContext& ctx, const ThetaParam& theta) {
  return log_likelihood_of_matrix(ctx, append_remainder(theta.matrix()));
}

std::vector<Eigen::MatrixXd> power_table(const Eigen::MatrixXd& p, int cycles) {
  std::vector<Eigen::MatrixXd> table;
  table.reserve(static_cast<std::size_t>(cycles) + 1);
  table.push_back(Eigen::MatrixXd::Identity(p.rows(), p.cols()));
  for (int k = 1; k <= cycles; ++k) table.push_back(table.back() * p);
  return table;
}

Eigen::MatrixXd d_power_d_theta(const Eigen::MatrixXd& p, int cycles, Index u, Index v) {
  const Index s = p.rows();
  if (u < 0 || u >= s || v < 0 || v >= s - 1) throw Error("d_power_d_theta: index out of range");
  const auto powers = power_table(p, cycles - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s, s);
  // (P^{k-1} E_uv P^{T-k})_ij = (P^{k-1})_iu [(P^{T-k})_vj - (P^{T-k})_sj]
  for (int k = 1; k <= cycles; ++k) {
    const Eigen::MatrixXd& left = powers[static_cast<std::size_t>(k - 1)];
    const Eigen::MatrixXd& right = powers[static_cast<std::size_t>(cycles - k)];
    out.noalias() += left.col(u) * (right.row(v) - right.row(s - 1));
  }
  return out;
}

LikelihoodEvaluation evaluate_with_gradient(const LikelihoodContext& ctx,
                                            const Eigen::MatrixXd& theta) {
  const Index s = ctx.states();
  const int cycles = ctx.cycles();
  const Eigen::MatrixXd p = append_remainder(theta);
  const auto powers = power_table(p, cycles);
  const Eigen::MatrixXd& pt = powers.back();
  const Eigen::MatrixXd& n = ctx.counts_double();

  LikelihoodEvaluation eval;
  eval.value = 0.0;
  // Weights of d(P^T)_ij for j < s; the remainder column carries -n_is/(P^T)_is.
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(s, s);
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) {
      if (n(i, j) == 0.0) continue;
      const double lg = clamped_log(pt(i, j));
      if (lg == kNegInf) throw Error("gradient undefined at boundary");
      eval.value += n(i, j) * lg;
    }
    const double tail = n(i, s - 1) == 0.0 ? 0.0 : n(i, s - 1) / pt(i, s - 1);
    for (Index j = 0; j < s - 1; ++j) {
      const double head = n(i, j) == 0.0 ? 0.0 : n(i, j) / pt(i, j);
      weight(i, j) = head - tail;
    }
  }

  // G = sum_k (P^{k-1})^T W (P^{T-k})^T; dl/dtheta_uv = G_uv - G_us.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(s, s);
  for (int k = 1; k <= cycles; ++k) {
    g.noalias() += powers[static_cast<std::size_t>(k - 1)].transpose() * weight *
                   powers[static_cast<std::size_t>(cycles - k)].transpose();
  }
  eval.gradient = g.leftCols(s - 1).colwise() - g.col(s - 1);
  const ConstraintMask& mask = ctx.mask();
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j < s - 1; ++j)
      if (!mask.is_free(i, j)) eval.gradient(i, j) = 0.0;

  if (!std::isfinite(eval.value) || !eval.gradient.allFinite())
    throw Error("gradient undefined at boundary");
  return eval;
}

Eigen::MatrixXd gradient(const LikelihoodContext& ctx, const ThetaParam& theta) {
  return evaluate_with_gradient(ctx, theta.matrix()).gradient;
}

}  // namespace rootmle
