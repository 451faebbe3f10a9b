#ifndef ROOTMLE_CORE_HPP
#define ROOTMLE_CORE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rootmle {

using Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using CountGrid = Matrix<std::int64_t>;

/// Tolerance used when validating row sums and nonnegativity of probabilities.
inline constexpr double kStochasticTol = 1e-9;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed input (files, flags, shapes).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Observed transition counts over one observation interval. Rows are origin
/// states. Zero rows are allowed (censored or absorbing origins).
class CountMatrix {
 public:
  explicit CountMatrix(CountGrid counts);

  Index states() const { return counts_.rows(); }
  const CountGrid& counts() const { return counts_; }
  std::int64_t operator()(Index i, Index j) const { return counts_(i, j); }
  std::int64_t row_total(Index i) const { return counts_.row(i).sum(); }
  Eigen::MatrixXd as_double() const { return counts_.cast<double>(); }

 private:
  CountGrid counts_;
};

/// A square matrix with entries in [0, 1] and unit row sums (within tolerance).
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Eigen::MatrixXd p, double tol = kStochasticTol);

  Index states() const { return p_.rows(); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double operator()(Index i, Index j) const { return p_(i, j); }

  static bool satisfies(const Eigen::MatrixXd& p, double tol = kStochasticTol);

 private:
  Eigen::MatrixXd p_;
};

/// Which entries of the first s-1 columns of P are free parameters and which
/// are pinned to a constant. The last column is always the row remainder.
class ConstraintMask {
 public:
  explicit ConstraintMask(Index states);

  static ConstraintMask unconstrained(Index states) { return ConstraintMask(states); }

  /// Pin entry (i, j), j < s-1, to `value`.
  void fix(Index i, Index j, double value);
  /// Pin row i to the identity row (state i is absorbing).
  void make_absorbing(Index i);

  Index states() const { return states_; }
  bool is_free(Index i, Index j) const { return free_(i, j); }
  double fixed_value(Index i, Index j) const { return values_(i, j); }
  bool row_fully_fixed(Index i) const { return free_in_row(i) == 0; }
  bool is_absorbing(Index i) const { return absorbing_[static_cast<std::size_t>(i)]; }
  Index free_in_row(Index i) const { return free_.row(i).count(); }
  Index free_count() const { return free_.count(); }
  /// Sum of pinned values in row i.
  double fixed_mass(Index i) const;
  /// Free (row, col) pairs in row-major order.
  std::vector<std::pair<Index, Index>> free_entries() const;

  /// Theta matrix with fixed entries set and free entries zero.
  Eigen::MatrixXd fixed_template() const { return values_; }

  bool operator==(const ConstraintMask& other) const;

 private:
  Index states_;
  Matrix<bool> free_;
  Eigen::MatrixXd values_;
  std::vector<bool> absorbing_;
};

/// The s x (s-1) matrix of leading-column probabilities of P.
class ThetaParam {
 public:
  ThetaParam() = default;  // empty placeholder
  ThetaParam(Eigen::MatrixXd theta, const ConstraintMask& mask, double tol = kStochasticTol);

  Index states() const { return theta_.rows(); }
  const Eigen::MatrixXd& matrix() const { return theta_; }
  double operator()(Index i, Index j) const { return theta_(i, j); }

  /// Free entries packed in the order of ConstraintMask::free_entries().
  Eigen::VectorXd free_vector(const ConstraintMask& mask) const;
  static ThetaParam from_free(const Eigen::VectorXd& free, const ConstraintMask& mask,
                              double tol = kStochasticTol);

 private:
  Eigen::MatrixXd theta_;
};

/// Row-normalized counts. Zero rows take the mask's pinned row.
StochasticMatrix interval_mle(const CountMatrix& counts, const ConstraintMask& mask);

/// Append the remainder column 1 - theta * 1.
template <typename Derived>
Eigen::MatrixXd append_remainder(const Eigen::MatrixBase<Derived>& theta) {
  const Index rows = theta.rows();
  const Index cols = theta.cols();
  Eigen::MatrixXd p(rows, cols + 1);
  p.leftCols(cols) = theta;
  p.col(cols) = Eigen::VectorXd::Ones(rows) - theta.rowwise().sum();
  return p;
}

StochasticMatrix theta_to_matrix(const ThetaParam& theta, const ConstraintMask& mask);

/// A^T by binary exponentiation.
template <typename Derived>
Matrix<typename Derived::Scalar> matrix_power(const Eigen::MatrixBase<Derived>& a, int exponent) {
  using Result = Matrix<typename Derived::Scalar>;
  if (exponent < 0) throw Error("matrix_power: negative exponent");
  Result result = Result::Identity(a.rows(), a.cols());
  Result base = a;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e != 0) base = base * base;
  }
  return result;
}

StochasticMatrix matrix_power(const StochasticMatrix& p, int exponent);

/// Largest absolute entrywise difference.
template <typename DerivedA, typename DerivedB>
double linf_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("linf_distance: dimension mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline double linf_distance(const StochasticMatrix& a, const StochasticMatrix& b) {
  return linf_distance(a.matrix(), b.matrix());
}

/// ||A - B||_F / ||B||_F
template <typename DerivedA, typename DerivedB>
double frobenius_rel_error(const Eigen::MatrixBase<DerivedA>& a,
                           const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("frobenius_rel_error: dimension mismatch");
  const double denom = b.norm();
  if (denom == 0.0) throw Error("frobenius_rel_error: reference matrix is zero");
  return (a - b).norm() / denom;
}

inline double frobenius_rel_error(const StochasticMatrix& a, const StochasticMatrix& b) {
  return frobenius_rel_error(a.matrix(), b.matrix());
}

}  // namespace rootmle

#endif  // ROOTMLE_CORE_HPP
