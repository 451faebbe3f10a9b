#ifndef ROOTMLE_FIXTURES_HPP
#define ROOTMLE_FIXTURES_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rootmle/optimizer.hpp"

namespace rootmle {

enum class Provenance { Published, Computed };

const char* to_string(Provenance provenance);

/// Printed 3-decimal matrix with its provenance.
struct ReferenceMatrix {
  Eigen::MatrixXd value;
  Provenance source = Provenance::Published;
};

/// Reference results for one number of cycles.
struct CycleReference {
  int cycles = 0;
  std::optional<ReferenceMatrix> maximizer;
  std::optional<ReferenceMatrix> gradient;
  /// Approximate share of the grid converging near the global maximum.
  std::optional<double> top_plateau_fraction;
  /// Cutoff used for the uniqueness (distance) panel.
  std::optional<double> top_fraction;
  /// Bound on maximizer distances inside the top band.
  std::optional<double> band_distance;
};

/// Real T-th roots of the interval MLE as printed. For the principal-root
/// case the first entry is the principal root.
struct PrintedRoots {
  int cycles = 0;
  std::vector<ReferenceMatrix> roots;
};

struct StudyFixture {
  std::string name;
  std::string description;
  CountMatrix counts;
  ConstraintMask mask;
  std::vector<int> cycles;
  /// Per-row grid denominators for the full-size search.
  std::vector<int> full_denominators;
  std::optional<ReferenceMatrix> interval_mle;
  /// Non-unit eigenvalues of the interval MLE.
  std::vector<std::complex<double>> eigenvalues;
  std::vector<CycleReference> references;
  std::optional<PrintedRoots> printed_roots;

  OptimizerSettings settings(int t) const { return tolerance_preset(name, t); }
  const CycleReference* reference(int t) const;
};

const std::vector<StudyFixture>& study_fixtures();
const StudyFixture& find_fixture(const std::string& name);

}  // namespace rootmle

#endif  // ROOTMLE_FIXTURES_HPP
