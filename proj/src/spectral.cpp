#include "rootmle/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rootmle {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr double kRealImagTol = 1e-12;

enum class EigenKind { Perron, Positive, Negative, Zero, ComplexUpper, ComplexLower };

EigenKind classify(const EigenStructure& eig, Index k) {
  if (k == eig.perron_index) return EigenKind::Perron;
  const Complex z = eig.eigenvalues(k);
  if (std::abs(z.imag()) > kRealImagTol) {
    return z.imag() > 0.0 ? EigenKind::ComplexUpper : EigenKind::ComplexLower;
  }
  if (z.real() > kEigenTol) return EigenKind::Positive;
  if (z.real() < -kEigenTol) return EigenKind::Negative;
  return EigenKind::Zero;
}

// Index of the conjugate partner of eigenvalue k.
Index conjugate_partner(const EigenStructure& eig, Index k) {
  const Complex target = std::conj(eig.eigenvalues(k));
  Index best = -1;
  double best_dist = 0.0;
  for (Index j = 0; j < eig.eigenvalues.size(); ++j) {
    if (j == k) continue;
    const double d = std::abs(eig.eigenvalues(j) - target);
    if (best < 0 || d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

Complex positive_real_root(double x, int cycles) {
  return Complex(std::pow(x, 1.0 / cycles), 0.0);
}

// Root of one eigenvalue under a branch label.
Complex branch_root(const EigenStructure& eig, Index k, int label, int cycles) {
  const Complex z = eig.eigenvalues(k);
  const double modulus_root = std::pow(std::abs(z), 1.0 / cycles);
  switch (classify(eig, k)) {
    case EigenKind::Perron:
      return std::pow(z, 1.0 / cycles);
    case EigenKind::Positive: {
      const Complex root = positive_real_root(z.real(), cycles);
      return label == 0 ? root : -root;
    }
    case EigenKind::Negative:
      // Only odd T reaches the real branch; label -1 requests the principal
      // (non-real) branch.
      if (label < 0) return std::polar(modulus_root, kPi / cycles);
      return Complex(-modulus_root, 0.0);
    case EigenKind::Zero:
      return Complex(0.0, 0.0);
    case EigenKind::ComplexUpper:
      return std::polar(modulus_root, (std::arg(z) + 2.0 * kPi * label) / cycles);
    case EigenKind::ComplexLower: {
      const Index partner = conjugate_partner(eig, k);
      const Complex upper = eig.eigenvalues(partner);
      return std::conj(std::polar(std::pow(std::abs(upper), 1.0 / cycles),
                                  (std::arg(upper) + 2.0 * kPi * label) / cycles));
    }
  }
  return z;
}

RootCandidate build_candidate(const EigenStructure& eig, const Eigen::MatrixXd& p,
                              const std::vector<int>& labels, int cycles) {
  const Index s = eig.eigenvalues.size();
  Eigen::VectorXcd roots(s);
  for (Index k = 0; k < s; ++k)
    roots(k) = branch_root(eig, k, labels[static_cast<std::size_t>(k)], cycles);

  const Eigen::MatrixXcd& v = eig.eigenvectors;
  const Eigen::MatrixXcd full = v * roots.asDiagonal() * v.partialPivLu().inverse();
  if (full.imag().cwiseAbs().maxCoeff() > kImagResidueTol)
    throw Error("root candidate is not real");

  RootCandidate out;
  out.matrix = full.real();
  out.branch_labels = labels;
  out.min_entry = out.matrix.minCoeff();
  out.is_stochastic = StochasticMatrix::satisfies(out.matrix, kStochasticTol);

  const double err = linf_distance(matrix_power(out.matrix, cycles), p);
  if (!(err < kRootReconstructionTol)) {
    std::ostringstream msg;
    msg << "root candidate fails to reproduce the input (error " << err << ")";
    throw Error(msg.str());
  }
  return out;
}

void require_rootable(const EigenStructure& eig) {
  if (!eig.distinct) throw Error("repeated eigenvalues: only distinct-eigenvalue inputs are supported");
  if (eig.singular()) throw Error("matrix is singular: primary roots are not supported");
}

}  // namespace

EigenStructure eigen_decompose(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw Error("eigen_decompose: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(p, true);
  if (solver.info() != Eigen::Success) throw Error("eigen_decompose: eigensolver failed");

  const Index s = p.rows();
  std::vector<Index> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), Index{0});
  const Eigen::VectorXcd raw_values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Complex x = raw_values(a);
    const Complex y = raw_values(b);
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });

  EigenStructure eig;
  eig.eigenvalues.resize(s);
  eig.eigenvectors.resize(s, s);
  const Eigen::MatrixXcd raw_vectors = solver.eigenvectors();
  for (Index k = 0; k < s; ++k) {
    eig.eigenvalues(k) = raw_values(order[static_cast<std::size_t>(k)]);
    eig.eigenvectors.col(k) = raw_vectors.col(order[static_cast<std::size_t>(k)]);
  }

  Index perron = 0;
  for (Index k = 1; k < s; ++k)
    if (std::abs(eig.eigenvalues(k) - 1.0) < std::abs(eig.eigenvalues(perron) - 1.0)) perron = k;
  eig.perron_index = perron;

  for (Index k = 0; k < s; ++k) {
    switch (classify(eig, k)) {
      case EigenKind::Positive: ++eig.positive_count; break;
      case EigenKind::Negative: ++eig.negative_count; break;
      case EigenKind::Zero: ++eig.zero_count; break;
      case EigenKind::ComplexUpper: ++eig.complex_pairs; break;
      default: break;
    }
  }
  for (Index a = 0; a < s && eig.distinct; ++a)
    for (Index b = a + 1; b < s; ++b)
      if (std::abs(eig.eigenvalues(a) - eig.eigenvalues(b)) <= kEigenTol) {
        eig.distinct = false;
        break;
      }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eig.eigenvectors);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) throw Error("defective or near-defective matrix");

  const Eigen::MatrixXcd rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.partialPivLu().inverse();
  if ((rebuilt - p.cast<Complex>()).cwiseAbs().maxCoeff() > 1e-9)
    throw Error("defective or near-defective matrix: reconstruction failed");
  return eig;
}

RootCandidate principal_root(const StochasticMatrix& p, int cycles) {
  if (cycles < 1) throw Error("principal_root: T must be positive");
  const EigenStructure eig = eigen_decompose(p);
  if (eig.has_negative() && cycles % 2 == 0)
    throw Error("no real root exists: negative eigenvalue with even T");
  // Identity-like inputs with repeated unit eigenvalues have the trivial root.
  if (!eig.distinct) {
    if (linf_distance(p.matrix(), Eigen::MatrixXd::Identity(p.states(), p.states())) == 0.0) {
      RootCandidate id;
      id.matrix = p.matrix();
      id.branch_labels.assign(static_cast<std::size_t>(p.states()), 0);
      id.is_stochastic = true;
      id.min_entry = id.matrix.minCoeff();
      return id;
    }
  }
  require_rootable(eig);
  std::vector<int> labels(static_cast<std::size_t>(eig.eigenvalues.size()), 0);
  for (Index k = 0; k < eig.eigenvalues.size(); ++k)
    if (classify(eig, k) == EigenKind::Negative) labels[static_cast<std::size_t>(k)] = -1;
  return build_candidate(eig, p.matrix(), labels, cycles);
}

double real_root_count(const EigenStructure& eig, int cycles) {
  const bool even = cycles % 2 == 0;
  if (even && eig.has_negative()) return 0.0;
  double count = 1.0;
  if (even) count *= std::pow(2.0, eig.positive_count);
  count *= std::pow(static_cast<double>(cycles), eig.complex_pairs);
  return count;
}

std::vector<RootCandidate> enumerate_real_roots(const StochasticMatrix& p, int cycles,
                                                double budget) {
  if (cycles < 1) throw Error("enumerate_real_roots: T must be positive");
  const EigenStructure eig = eigen_decompose(p);
  require_rootable(eig);
  const bool even = cycles % 2 == 0;
  if (even && eig.has_negative()) return {};

  const double expected = real_root_count(eig, cycles);
  if (expected > budget) {
    std::ostringstream msg;
    msg << "enumeration infeasible: " << expected << " roots exceed budget " << budget;
    throw Error(msg.str());
  }

  // Free branch slots, most significant first.
  struct Slot {
    Index eigen;
    int options;
  };
  std::vector<Slot> slots;
  const Index s = eig.eigenvalues.size();
  for (Index k = 0; k < s; ++k) {
    const EigenKind kind = classify(eig, k);
    if (kind == EigenKind::Positive && even) slots.push_back({k, 2});
    if (kind == EigenKind::ComplexUpper) slots.push_back({k, cycles});
  }

  std::vector<RootCandidate> out;
  out.reserve(static_cast<std::size_t>(expected));
  std::vector<int> digits(slots.size(), 0);
  while (true) {
    std::vector<int> labels(static_cast<std::size_t>(s), 0);
    for (std::size_t d = 0; d < slots.size(); ++d) {
      labels[static_cast<std::size_t>(slots[d].eigen)] = digits[d];
      if (classify(eig, slots[d].eigen) == EigenKind::ComplexUpper)
        labels[static_cast<std::size_t>(conjugate_partner(eig, slots[d].eigen))] = digits[d];
    }
    out.push_back(build_candidate(eig, p.matrix(), labels, cycles));

    std::size_t d = slots.size();
    while (d > 0) {
      --d;
      if (++digits[d] < slots[d].options) break;
      digits[d] = 0;
      if (d == 0) return out;
    }
    if (slots.empty()) return out;
  }
}

}  // namespace rootmle
