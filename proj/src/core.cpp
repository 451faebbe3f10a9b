#include "rootmle/core.hpp"

#include <cmath>
#include <sstream>

namespace rootmle {

CountMatrix::CountMatrix(CountGrid counts) : counts_(std::move(counts)) {
  if (counts_.rows() != counts_.cols())
    throw InputError("count matrix must be square");
  if (counts_.rows() < 2) throw InputError("count matrix needs at least 2 states");
  if ((counts_.array() < 0).any()) throw InputError("count matrix has negative entries");
  if (counts_.sum() <= 0) throw InputError("count matrix has no observed transitions");
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd p, double tol) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw Error("stochastic matrix must be square");
  if (!satisfies(p_, tol)) {
    std::ostringstream msg;
    msg << "matrix is not stochastic within " << tol;
    throw Error(msg.str());
  }
}

bool StochasticMatrix::satisfies(const Eigen::MatrixXd& p, double tol) {
  if (p.rows() != p.cols() || p.size() == 0) return false;
  if (!p.allFinite()) return false;
  if (p.minCoeff() < -tol || p.maxCoeff() > 1.0 + tol) return false;
  const Eigen::VectorXd sums = p.rowwise().sum();
  return ((sums.array() - 1.0).abs() <= tol).all();
}

ConstraintMask::ConstraintMask(Index states)
    : states_(states),
      free_(Matrix<bool>::Constant(states, states - 1, true)),
      values_(Eigen::MatrixXd::Zero(states, states - 1)),
      absorbing_(static_cast<std::size_t>(states), false) {
  if (states < 2) throw InputError("constraint mask needs at least 2 states");
}

void ConstraintMask::fix(Index i, Index j, double value) {
  if (i < 0 || i >= states_ || j < 0 || j >= states_ - 1)
    throw InputError("constraint mask index out of range");
  if (!(value >= 0.0 && value <= 1.0)) throw InputError("fixed value outside [0, 1]");
  const bool was_free = free_(i, j);
  const double old = values_(i, j);
  free_(i, j) = false;
  values_(i, j) = value;
  if (fixed_mass(i) > 1.0 + kStochasticTol) {
    free_(i, j) = was_free;
    values_(i, j) = old;
    throw InputError("fixed values in a row sum to more than 1");
  }
}

void ConstraintMask::make_absorbing(Index i) {
  if (i < 0 || i >= states_) throw InputError("absorbing state out of range");
  for (Index j = 0; j < states_ - 1; ++j) {
    free_(i, j) = false;
    values_(i, j) = (i == j) ? 1.0 : 0.0;
  }
  absorbing_[static_cast<std::size_t>(i)] = true;
}

double ConstraintMask::fixed_mass(Index i) const {
  double mass = 0.0;
  for (Index j = 0; j < states_ - 1; ++j)
    if (!free_(i, j)) mass += values_(i, j);
  return mass;
}

std::vector<std::pair<Index, Index>> ConstraintMask::free_entries() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < states_; ++i)
    for (Index j = 0; j < states_ - 1; ++j)
      if (free_(i, j)) out.emplace_back(i, j);
  return out;
}

bool ConstraintMask::operator==(const ConstraintMask& other) const {
  return states_ == other.states_ && free_ == other.free_ && values_ == other.values_ &&
         absorbing_ == other.absorbing_;
}

ThetaParam::ThetaParam(Eigen::MatrixXd theta, const ConstraintMask& mask, double tol)
    : theta_(std::move(theta)) {
  const Index s = mask.states();
  if (theta_.rows() != s || theta_.cols() != s - 1)
    throw Error("theta has the wrong shape for the mask");
  if (!theta_.allFinite()) throw Error("theta has nonfinite entries");
  if (theta_.minCoeff() < -tol) throw Error("theta has negative entries");
  if ((theta_.rowwise().sum().array() > 1.0 + tol).any())
    throw Error("theta row sum exceeds 1");
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j < s - 1; ++j)
      if (!mask.is_free(i, j) && std::abs(theta_(i, j) - mask.fixed_value(i, j)) > tol)
        throw Error("theta disagrees with a fixed mask entry");
}

Eigen::VectorXd ThetaParam::free_vector(const ConstraintMask& mask) const {
  const auto entries = mask.free_entries();
  Eigen::VectorXd out(static_cast<Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k)
    out(static_cast<Index>(k)) = theta_(entries[k].first, entries[k].second);
  return out;
}

ThetaParam ThetaParam::from_free(const Eigen::VectorXd& free, const ConstraintMask& mask,
                                 double tol) {
  const auto entries = mask.free_entries();
  if (static_cast<std::size_t>(free.size()) != entries.size())
    throw Error("free vector has the wrong length");
  Eigen::MatrixXd theta = mask.fixed_template();
  for (std::size_t k = 0; k < entries.size(); ++k)
    theta(entries[k].first, entries[k].second) = free(static_cast<Index>(k));
  return ThetaParam(std::move(theta), mask, tol);
}

StochasticMatrix interval_mle(const CountMatrix& counts, const ConstraintMask& mask) {
  const Index s = counts.states();
  if (mask.states() != s) throw InputError("mask and counts disagree on state count");
  Eigen::MatrixXd p(s, s);
  const Eigen::MatrixXd n = counts.as_double();
  for (Index i = 0; i < s; ++i) {
    const double total = n.row(i).sum();
    if (total > 0.0) {
      p.row(i) = n.row(i) / total;
    } else if (mask.row_fully_fixed(i)) {
      p.row(i) = append_remainder(mask.fixed_template().row(i));
    } else {
      std::ostringstream msg;
      msg << "unidentifiable row " << (i + 1) << ": no transitions and no fixed row";
      throw InputError(msg.str());
    }
  }
  return StochasticMatrix(std::move(p));
}

StochasticMatrix theta_to_matrix(const ThetaParam& theta, const ConstraintMask& mask) {
  if (theta.states() != mask.states()) throw Error("theta and mask disagree on state count");
  return StochasticMatrix(append_remainder(theta.matrix()));
}

StochasticMatrix matrix_power(const StochasticMatrix& p, int exponent) {
  if (exponent < 1) throw Error("matrix_power: exponent must be positive");
  return StochasticMatrix(matrix_power(p.matrix(), exponent));
}

}  // namespace rootmle
