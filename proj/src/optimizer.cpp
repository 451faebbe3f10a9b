#include "rootmle/optimizer.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace rootmle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr double kBoundaryFraction = 0.99;

// Free-coordinate view of a constrained problem. The barrier is
// mu * (sum_k w_k log x_k + sum_i v_i log slack_i) with per-constraint weights.
class FreeProblem {
 public:
  FreeProblem(const LikelihoodContext& ctx, double mu) : ctx_(ctx), mask_(ctx.mask()), mu_(mu) {
    entries_ = mask_.free_entries();
    theta_template_ = mask_.fixed_template();
    for (Index i = 0; i < mask_.states(); ++i) {
      if (mask_.free_in_row(i) > 0) rows_.push_back(i);
    }
    entry_weights_ = Eigen::VectorXd::Ones(size());
    row_weights_ = Eigen::VectorXd::Ones(mask_.states());
  }

  void set_mu(double mu) { mu_ = mu; }
  Index size() const { return static_cast<Index>(entries_.size()); }

  // Weight every log term by its slack at x.
  void set_weights_from(const Eigen::VectorXd& x) {
    entry_weights_ = x;
    const Eigen::MatrixXd t = theta(x);
    row_weights_ = Eigen::VectorXd::Ones(t.rows()) - t.rowwise().sum();
  }

  Eigen::MatrixXd theta(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd t = theta_template_;
    for (std::size_t k = 0; k < entries_.size(); ++k)
      t(entries_[k].first, entries_[k].second) = x(static_cast<Index>(k));
    return t;
  }

  // -infinity when outside the open region.
  double barrier(const Eigen::VectorXd& x, const Eigen::MatrixXd& t) const {
    double total = 0.0;
    for (Index k = 0; k < size(); ++k) {
      if (!(x(k) > 0.0)) return kNegInf;
      total += entry_weights_(k) * std::log(x(k));
    }
    for (Index i : rows_) {
      const double slack = 1.0 - t.row(i).sum();
      if (!(slack > 0.0)) return kNegInf;
      total += row_weights_(i) * std::log(slack);
    }
    return total;
  }

  double value(const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd t = theta(x);
    const double b = barrier(x, t);
    if (b == kNegInf) return kNegInf;
    const double l = log_likelihood_of_matrix(ctx_, append_remainder(t));
    if (!std::isfinite(l)) return kNegInf;
    return l + mu_ * b;
  }

  // Value and gradient of the barrier objective; throws if nonfinite.
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const Eigen::MatrixXd t = theta(x);
    const double b = barrier(x, t);
    if (b == kNegInf) throw Error("iterate left the feasible region");
    const LikelihoodEvaluation eval = evaluate_with_gradient(ctx_, t);
    const Eigen::VectorXd slack = Eigen::VectorXd::Ones(t.rows()) - t.rowwise().sum();
    grad.resize(size());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto [i, j] = entries_[k];
      const auto kk = static_cast<Index>(k);
      grad(kk) = eval.gradient(i, j) + mu_ * (entry_weights_(kk) / x(kk) - row_weights_(i) / slack(i));
    }
    if (!grad.allFinite()) throw Error("gradient undefined at boundary");
    return eval.value + mu_ * b;
  }

  // Hessian of the barrier objective: the likelihood part by central
  // differences of the analytic gradient (steps kept inside the region), the
  // barrier part in closed form.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    const Index n = size();
    const Eigen::MatrixXd t = theta(x);
    const Eigen::VectorXd slack = Eigen::VectorXd::Ones(t.rows()) - t.rowwise().sum();
    Eigen::MatrixXd h(n, n);
    for (Index k = 0; k < n; ++k) {
      const auto [i, j] = entries_[static_cast<std::size_t>(k)];
      const double step = std::min({1e-6, 0.25 * x(k), 0.25 * slack(i)});
      Eigen::MatrixXd up = t, down = t;
      up(i, j) += step;
      down(i, j) -= step;
      const Eigen::MatrixXd gu = evaluate_with_gradient(ctx_, up).gradient;
      const Eigen::MatrixXd gd = evaluate_with_gradient(ctx_, down).gradient;
      for (Index l = 0; l < n; ++l) {
        const auto [a, b] = entries_[static_cast<std::size_t>(l)];
        h(l, k) = (gu(a, b) - gd(a, b)) / (2.0 * step);
      }
    }
    h = 0.5 * (h + h.transpose()).eval();
    for (Index k = 0; k < n; ++k) {
      const Index i = entries_[static_cast<std::size_t>(k)].first;
      h(k, k) -= mu_ * entry_weights_(k) / (x(k) * x(k));
      for (Index l = 0; l < n; ++l)
        if (entries_[static_cast<std::size_t>(l)].first == i)
          h(k, l) -= mu_ * row_weights_(i) / (slack(i) * slack(i));
    }
    if (!h.allFinite()) throw Error("hessian undefined at boundary");
    return h;
  }

  // Largest alpha keeping x + alpha d inside the closed region.
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < size(); ++k)
      if (d(k) < 0.0) alpha = std::min(alpha, -x(k) / d(k));
    const Eigen::MatrixXd t = theta(x);
    for (Index i : rows_) {
      double slack = 1.0 - t.row(i).sum();
      double rate = 0.0;
      for (std::size_t k = 0; k < entries_.size(); ++k)
        if (entries_[k].first == i) rate += d(static_cast<Index>(k));
      if (rate > 0.0) alpha = std::min(alpha, slack / rate);
    }
    return alpha;
  }

 private:
  const LikelihoodContext& ctx_;
  const ConstraintMask& mask_;
  double mu_;
  std::vector<std::pair<Index, Index>> entries_;
  std::vector<Index> rows_;
  Eigen::MatrixXd theta_template_;
  Eigen::VectorXd entry_weights_;
  Eigen::VectorXd row_weights_;
};

struct InnerResult {
  double value = 0.0;
  int iterations = 0;
  bool hit_cap = false;
};

// BFGS ascent on the barrier objective. x is updated in place and always
// remains strictly feasible.
InnerResult bfgs_ascent(const FreeProblem& problem, Eigen::VectorXd& x,
                        const OptimizerSettings& settings) {
  const Index m = problem.size();
  Eigen::VectorXd grad;
  double f = problem.value_and_gradient(x, grad);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);  // inverse curvature of -f
  bool h_is_identity = true;
  bool scaled = false;

  InnerResult result;
  for (int iter = 0; iter < settings.max_inner_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() == 0.0) break;
    Eigen::VectorXd dir = h * grad;  // ascent direction
    double slope = grad.dot(dir);
    if (!(slope > 0.0)) {
      h.setIdentity();
      h_is_identity = true;
      dir = grad;
      slope = grad.dot(dir);
    }

    double alpha = std::min(1.0, kBoundaryFraction * problem.max_step(x, dir));
    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = kNegInf;
    for (int halving = 0; halving < kMaxHalvings && alpha > 0.0; ++halving) {
      trial = x + alpha * dir;
      f_trial = problem.value(trial);
      if (f_trial != kNegInf && f_trial >= f + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }

    if (!accepted) {
      if (h_is_identity) break;  // no ascent possible from here
      h.setIdentity();
      h_is_identity = true;
      continue;
    }

    Eigen::VectorXd grad_new;
    const double f_new = problem.value_and_gradient(trial, grad_new);
    const Eigen::VectorXd step = trial - x;
    // Curvature pair for the minimization of -f.
    const Eigen::VectorXd change = grad - grad_new;
    const double sy = step.dot(change);
    if (sy > 1e-14 * step.norm() * change.norm()) {
      if (!scaled) {
        h = (sy / change.squaredNorm()) * Eigen::MatrixXd::Identity(m, m);
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left =
          Eigen::MatrixXd::Identity(m, m) - rho * step * change.transpose();
      h = left * h * left.transpose() + rho * step * step.transpose();
      h_is_identity = false;
    }

    const double delta = std::abs(f_new - f);
    x = trial;
    grad = grad_new;
    f = f_new;
    result.iterations = iter + 1;
    if (delta < settings.inner_abs_tol ||
        delta / (std::abs(f) + settings.inner_abs_tol) < settings.inner_rel_tol)
      break;
    if (iter + 1 == settings.max_inner_iters) result.hit_cap = true;
  }
  result.value = f;
  return result;
}

constexpr int kMaxNewtonSteps = 50;

// Damped Newton refinement of the barrier objective from the BFGS result.
// Stops after a full step taken when half the Newton decrement is below the
// inner tolerances, or when the model is not concave or no ascent step exists.
double newton_refine(const FreeProblem& problem, Eigen::VectorXd& x,
                     const OptimizerSettings& settings, double f) {
  for (int iter = 0; iter < kMaxNewtonSteps; ++iter) {
    Eigen::VectorXd grad;
    f = problem.value_and_gradient(x, grad);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(-problem.hessian(x));
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) break;
    const Eigen::VectorXd dir = ldlt.solve(grad);
    const double decrement = grad.dot(dir);
    if (!(decrement > 0.0) || !dir.allFinite()) break;
    // Once the predicted gain is below tolerance, one last full step is still
    // taken: it costs little and squares the remaining error. A step cut short
    // by the boundary does not count, since it also shortens the move of the
    // interior coordinates.
    const double gain = 0.5 * decrement;
    if (gain <= 1e-15 * (std::abs(f) + 1.0)) break;
    const bool small = gain < settings.inner_abs_tol ||
                       gain / (std::abs(f) + settings.inner_abs_tol) < settings.inner_rel_tol;

    double alpha = std::min(1.0, kBoundaryFraction * problem.max_step(x, dir));
    const bool full = alpha == 1.0;
    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings && alpha > 0.0; ++halving) {
      const Eigen::VectorXd trial = x + alpha * dir;
      const double f_trial = problem.value(trial);
      if (f_trial != kNegInf && f_trial >= f + kArmijo * alpha * decrement) {
        x = trial;
        f = f_trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted || (small && full)) break;
  }
  return f;
}

}  // namespace

void OptimizerSettings::validate() const {
  if (!(outer_rel_tol > 0.0 && inner_abs_tol > 0.0 && inner_rel_tol > 0.0))
    throw InputError("tolerances must be positive");
  if (!(barrier_mu > 0.0)) throw InputError("barrier_mu must be positive");
  if (!(barrier_reduction > 1.0)) throw InputError("barrier_reduction must exceed 1");
  if (max_outer_iters < 1 || max_inner_iters < 1)
    throw InputError("iteration limits must be positive");
}

OptimizerSettings tolerance_preset(const std::string& study, int cycles) {
  // (outer relative, inner absolute, inner relative)
  static const std::map<std::pair<std::string, int>, std::tuple<double, double, double>> presets{
      {{"study1", 6}, {1e-11, 1e-9, 1e-9}},
      {{"study2", 12}, {1e-13, 1e-12, 1e-12}},
      {{"study3", 6}, {1e-12, 1e-10, 1e-10}},
  };
  OptimizerSettings settings;
  auto apply = [&settings](const std::tuple<double, double, double>& t) {
    settings.outer_rel_tol = std::get<0>(t);
    settings.inner_abs_tol = std::get<1>(t);
    settings.inner_rel_tol = std::get<2>(t);
  };
  if (auto it = presets.find({study, cycles}); it != presets.end()) {
    apply(it->second);
  } else if (cycles <= 2) {
    apply({1e-10, 1e-8, 1e-8});
  } else if (cycles <= 24) {
    apply({1e-11, 1e-9, 1e-9});
  } else {
    apply({1e-12, 1e-10, 1e-10});
  }
  return settings;
}

const char* to_string(BarrierSchedule schedule) {
  return schedule == BarrierSchedule::Adaptive ? "adaptive" : "geometric";
}

BarrierSchedule parse_barrier_schedule(const std::string& text) {
  if (text == "adaptive") return BarrierSchedule::Adaptive;
  if (text == "geometric") return BarrierSchedule::Geometric;
  throw InputError("unknown barrier schedule '" + text + "'");
}

const char* to_string(ConvergenceStatus status) {
  switch (status) {
    case ConvergenceStatus::Converged: return "converged";
    case ConvergenceStatus::FailedNonfinite: return "failed_nonfinite";
    case ConvergenceStatus::MaxIters: return "max_iters";
  }
  return "unknown";
}

double barrier_term(const ConstraintMask& mask, const Eigen::MatrixXd& theta) {
  double total = 0.0;
  for (Index i = 0; i < mask.states(); ++i) {
    if (mask.free_in_row(i) == 0) continue;
    for (Index j = 0; j < mask.states() - 1; ++j) {
      if (!mask.is_free(i, j)) continue;
      if (!(theta(i, j) > 0.0)) return kNegInf;
      total += std::log(theta(i, j));
    }
    const double slack = 1.0 - theta.row(i).sum();
    if (!(slack > 0.0)) return kNegInf;
    total += std::log(slack);
  }
  return total;
}

bool strictly_interior(const ConstraintMask& mask, const Eigen::MatrixXd& theta) {
  return barrier_term(mask, theta) != kNegInf;
}

double barrier_objective(const LikelihoodContext& ctx, const ThetaParam& theta, double mu) {
  if (!(mu > 0.0)) throw Error("barrier mu must be positive");
  const double b = barrier_term(ctx.mask(), theta.matrix());
  if (b == kNegInf) return kNegInf;
  const double l = log_likelihood(ctx, theta);
  if (!std::isfinite(l)) return kNegInf;
  return l + mu * b;
}

ConvergenceRecord maximize(const LikelihoodContext& ctx, const ThetaParam& start,
                           const OptimizerSettings& settings, std::uint64_t start_id) {
  settings.validate();
  const ConstraintMask& mask = ctx.mask();
  if (!strictly_interior(mask, start.matrix()))
    throw Error("maximize: start is not strictly interior");

  FreeProblem problem(ctx, settings.barrier_mu);
  Eigen::VectorXd x = start.free_vector(mask);

  ConvergenceRecord record{start_id, start, kNegInf, 0.0, ConvergenceStatus::FailedNonfinite, 0};

  auto finish = [&](ConvergenceStatus status) {
    const Eigen::MatrixXd theta = problem.theta(x);
    record.theta_final = ThetaParam(theta, mask);
    try {
      const LikelihoodEvaluation eval = evaluate_with_gradient(ctx, theta);
      record.loglik = eval.value;
      record.grad_linf = eval.gradient.size() ? eval.gradient.lpNorm<Eigen::Infinity>() : 0.0;
      record.status = status;
    } catch (const Error&) {
      record.loglik = log_likelihood_of_matrix(ctx, append_remainder(theta));
      record.grad_linf = std::numeric_limits<double>::infinity();
      record.status = ConvergenceStatus::FailedNonfinite;
    }
    return record;
  };

  if (problem.size() == 0) return finish(ConvergenceStatus::Converged);

  const bool adaptive = settings.barrier_schedule == BarrierSchedule::Adaptive;
  double mu = settings.barrier_mu;
  if (adaptive) problem.set_weights_from(x);
  double previous = problem.value(x);
  if (previous == kNegInf) return finish(ConvergenceStatus::FailedNonfinite);

  try {
    for (int outer = 0; outer < settings.max_outer_iters; ++outer) {
      problem.set_mu(mu);
      if (adaptive) problem.set_weights_from(x);
      const InnerResult inner = bfgs_ascent(problem, x, settings);
      record.outer_iters = static_cast<std::uint32_t>(outer + 1);
      const double current =
          settings.newton_refine ? newton_refine(problem, x, settings, inner.value) : inner.value;
      if (std::abs(current - previous) < settings.outer_rel_tol * (std::abs(current) + 1e-3))
        return finish(inner.hit_cap ? ConvergenceStatus::MaxIters : ConvergenceStatus::Converged);
      previous = current;
      if (!adaptive) mu /= settings.barrier_reduction;
    }
  } catch (const Error&) {
    record.status = ConvergenceStatus::FailedNonfinite;
    record.theta_final = ThetaParam(problem.theta(x), mask);
    record.loglik = log_likelihood_of_matrix(ctx, append_remainder(problem.theta(x)));
    record.grad_linf = std::numeric_limits<double>::infinity();
    return record;
  }
  return finish(ConvergenceStatus::MaxIters);
}

}  // namespace rootmle
