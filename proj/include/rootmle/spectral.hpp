#ifndef ROOTMLE_SPECTRAL_HPP
#define ROOTMLE_SPECTRAL_HPP

#include <complex>
#include <vector>

#include "rootmle/core.hpp"

namespace rootmle {

/// Eigendecomposition of a transition matrix together with the counts that
/// govern how many real primary roots exist.
///
/// Eigenvalues are sorted by descending modulus (ties by real part, then
/// imaginary part). The unit (Perron) eigenvalue is identified separately and
/// excluded from `positive_count`.
struct EigenStructure {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns match `eigenvalues`
  Index perron_index = 0;
  int positive_count = 0;  // real, > 0, excluding the Perron eigenvalue
  int complex_pairs = 0;
  int negative_count = 0;
  int zero_count = 0;
  bool distinct = true;

  bool has_negative() const { return negative_count > 0; }
  bool singular() const { return zero_count > 0; }
};

/// A candidate T-th root produced from one choice of branch per eigenvalue.
struct RootCandidate {
  Eigen::MatrixXd matrix;
  std::vector<int> branch_labels;  // one per eigenvalue, in EigenStructure order
  bool is_stochastic = false;
  double min_entry = 0.0;
};

/// Eigenvalues within this distance are treated as coincident.
inline constexpr double kEigenTol = 1e-9;
/// Largest imaginary residue truncated when reconstructing a real candidate.
inline constexpr double kImagResidueTol = 1e-9;
/// Required accuracy of R^T against the input for every returned root.
inline constexpr double kRootReconstructionTol = 1e-8;

EigenStructure eigen_decompose(const Eigen::MatrixXd& p);
inline EigenStructure eigen_decompose(const StochasticMatrix& p) {
  return eigen_decompose(p.matrix());
}

/// Principal T-th root A D^{1/T} A^{-1}. Throws when the principal root is
/// not real (negative eigenvalue with even T) or the input is not
/// diagonalizable with distinct eigenvalues.
RootCandidate principal_root(const StochasticMatrix& p, int cycles);

/// Number of real primary roots with the Perron branch fixed to +1.
/// Zero when T is even and a negative eigenvalue is present.
double real_root_count(const EigenStructure& eig, int cycles);

/// Every real primary T-th root, in lexicographic order of branch labels.
/// Label conventions: positive real eigenvalues use 0 for the positive root
/// and 1 for the negative root; a complex pair uses k in [0, T) for the
/// argument offset 2*pi*k/T (the conjugate partner carries the same label).
std::vector<RootCandidate> enumerate_real_roots(const StochasticMatrix& p, int cycles,
                                                double budget);

}  // namespace rootmle

#endif  // ROOTMLE_SPECTRAL_HPP
