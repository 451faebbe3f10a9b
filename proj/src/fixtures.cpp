#include "rootmle/fixtures.hpp"

#include <initializer_list>

namespace rootmle {
namespace {

using Rows = std::initializer_list<std::initializer_list<double>>;

Eigen::MatrixXd matrix(Rows rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Eigen::MatrixXd m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

CountMatrix counts(Rows rows) { return CountMatrix(matrix(rows).cast<std::int64_t>()); }

ReferenceMatrix published(Rows rows) { return {matrix(rows), Provenance::Published}; }

CycleReference cycle(int t, ReferenceMatrix maximizer, ReferenceMatrix gradient) {
  CycleReference ref;
  ref.cycles = t;
  ref.maximizer = std::move(maximizer);
  ref.gradient = std::move(gradient);
  return ref;
}

CycleReference with_bands(CycleReference ref, double plateau, double top, double band) {
  ref.top_plateau_fraction = plateau;
  ref.top_fraction = top;
  ref.band_distance = band;
  return ref;
}

std::vector<StudyFixture> build() {
  std::vector<StudyFixture> out;

  {
    // Annual counts of a 4-state HIV progression model; death is absorbing
    // and progression is one-directional.
    ConstraintMask mask(4);
    mask.fix(1, 0, 0.0);
    mask.fix(2, 0, 0.0);
    mask.fix(2, 1, 0.0);
    mask.make_absorbing(3);
    StudyFixture f{"study2",
                   "4-state HIV model, annual data, monthly cycle (principal root negative)",
                   counts({{4494, 1257, 417, 61}, {0, 1734, 1214, 36}, {0, 0, 6724, 2240}, {0, 0, 0, 0}}),
                   mask,
                   {12},
                   {10, 20, 20, 2},
                   published({{.721, .202, .067, .010},
                              {0, .581, .407, .012},
                              {0, 0, .750, .250},
                              {0, 0, 0, 1}}),
                   {.750, .721, .581},
                   {}, std::nullopt};
    CycleReference ref = cycle(12,
                               published({{.973, .025, .002, .000},
                                          {0, .956, .044, .000},
                                          {0, 0, .978, .022},
                                          {0, 0, 0, 1}}),
                               published({{28.421, 69.054, 104.774},
                                          {0, 21710.401, 21745.079},
                                          {0, 0, -3837.441},
                                          {0, 0, 0}}));
    f.references.push_back(ref);
    f.printed_roots = PrintedRoots{12,
                                   {published({{.973, .025, .001, .001},
                                               {0, .956, .049, -.005},
                                               {0, 0, .976, .024},
                                               {0, 0, 0, 1}})}};
    out.push_back(std::move(f));
  }

  {
    ConstraintMask mask(5);
    mask.make_absorbing(4);
    StudyFixture f{"study3",
                   "5-state HIV model, six-month data, monthly cycle (negative eigenvalue)",
                   counts({{339, 31, 24, 17, 5},
                           {233, 73, 55, 49, 6},
                           {150, 77, 63, 91, 34},
                           {70, 26, 60, 193, 66},
                           {0, 0, 0, 0, 415}}),
                   mask,
                   {6},
                   {8, 8, 8, 8, 2},
                   published({{.815, .075, .058, .041, .012},
                              {.560, .175, .132, .118, .014},
                              {.361, .186, .152, .219, .082},
                              {.169, .063, .145, .465, .159},
                              {0, 0, 0, 0, 1}}),
                   {-.005},
                   {}, std::nullopt};
    CycleReference ref = cycle(6,
                               published({{.955, .021, .018, .005, .001},
                                          {.201, .670, .106, .023, .000},
                                          {.059, .185, .623, .118, .016},
                                          {.027, .000, .078, .861, .034},
                                          {0, 0, 0, 0, 1}}),
                               published({{.049, .048, .046, .047},
                                          {426.782, 426.781, 426.779, 426.778},
                                          {.013, .012, .010, .010},
                                          {.001, -57.638, -.001, .000},
                                          {0, 0, 0, 0}}));
    ref.top_plateau_fraction = 0.94;
    ref.top_fraction = 0.9375;
    ref.band_distance = 0.36;
    f.references.push_back(ref);
    out.push_back(std::move(f));
  }

  {
    StudyFixture f{"study4", "3-state synthetic chain with one negative eigenvalue",
                   counts({{200, 650, 400}, {350, 100, 450}, {100, 500, 250}}),
                   ConstraintMask(3), {2, 24, 100}, {20, 20, 20}, std::nullopt,
                   {-.439, .004}, {}, std::nullopt};
    f.references.push_back(with_bands(
        cycle(2, published({{.000, .775, .225}, {.000, .501, .499}, {.762, .000, .238}}),
              published({{-14.807, .002}, {-360.156, -.008}, {-.002, -6.827}})),
        0.30, 0.3125, 0.011));
    f.references.push_back(with_bands(
        cycle(24, published({{.858, .000, .142}, {.078, .922, .000}, {.000, .089, .911}}),
              published({{.009, -227.041}, {22.819, 22.790}, {-851.854, -.005}})),
        0.01, 0.01, 0.002));
    f.references.push_back(
        cycle(100, published({{.963, .000, .037}, {.020, .980, .000}, {.000, .023, .977}}),
              published({{.238, -674.966}, {32.510, 32.708}, {-2736.605, .121}})));
    out.push_back(std::move(f));
  }

  {
    StudyFixture f{"study5", "3-state synthetic chain with two negative eigenvalues",
                   counts({{100, 200, 650}, {300, 350, 100}, {250, 300, 50}}),
                   ConstraintMask(3), {2, 24, 100}, {20, 20, 20}, std::nullopt,
                   {-.328, -.017}, {}, std::nullopt};
    f.references.push_back(with_bands(
        cycle(2, published({{.206, .794, .000}, {.181, .043, .775}, {.591, .248, .161}}),
              published({{491.270, 491.270}, {.000, -.001}, {.001, .001}})),
        0.50, 0.50, 0.003));
    f.references.push_back(with_bands(
        cycle(24, published({{.919, .000, .081}, {.039, .961, .000}, {.018, .049, .933}}),
              published({{-.001, -2011.865}, {3014.974, 3014.990}, {-.011, -.002}})),
        0.03, 0.03, 0.001));
    f.references.push_back(
        cycle(100, published({{.980, .000, .020}, {.010, .990, .000}, {.005, .012, .983}}),
              published({{.004, -7743.587}, {11652.493, 11652.492}, {-.017, -.002}})));
    out.push_back(std::move(f));
  }

  {
    StudyFixture f{"study6", "3-state synthetic chain with a complex eigenvalue pair",
                   counts({{200, 400, 100}, {100, 250, 300}, {150, 200, 100}}),
                   ConstraintMask(3), {2, 24, 100}, {20, 20, 20},
                   published({{.286, .571, .143}, {.154, .385, .462}, {.333, .444, .222}}),
                   {{-.054, .151}, {-.054, -.151}}, {}, std::nullopt};
    f.references.push_back(with_bands(
        cycle(2, published({{.000, .317, .683}, {.505, .345, .150}, {.160, .684, .156}}),
              published({{-140.262, .000}, {.000, .000}, {.000, .000}})),
        0.50, 0.50, 0.003));
    f.references.push_back(with_bands(
        cycle(24, published({{.938, .062, .000}, {.000, .954, .046}, {.051, .021, .927}}),
              published({{1299.309, 1299.308}, {-827.211, .001}, {-.001, -.003}})),
        0.03, 0.03, 0.001));
    f.references.push_back(
        cycle(100, published({{.985, .015, .000}, {.000, .989, .011}, {.013, .005, .982}}),
              published({{5076.655, 5076.649}, {-3310.540, .015}, {.005, .004}})));
    f.printed_roots = PrintedRoots{
        2,
        {published({{.601, .560, -.160}, {-.032, .502, .530}, {.357, .284, .359}}),
         published({{-.118, .337, .781}, {.515, .395, .090}, {.126, .612, .262}})}};
    out.push_back(std::move(f));
  }

  {
    StudyFixture f{"study7", "4-state synthetic chain with a negative eigenvalue",
                   counts({{100, 200, 650, 100}, {300, 350, 100, 200}, {250, 300, 50, 300},
                           {100, 200, 300, 400}}),
                   ConstraintMask(4), {2, 24, 100}, {8, 8, 8, 8}, std::nullopt,
                   {-.310, .222, .007}, {}, std::nullopt};
    f.references.push_back(with_bands(
        cycle(2,
              published({{.210, .715, .000, .075},
                         {.175, .000, .773, .053},
                         {.407, .146, .154, .294},
                         {.046, .338, .000, .616}}),
              published({{.036, .026, -402.074},
                         {.021, -132.976, .008},
                         {.036, .036, .025},
                         {-.005, -.007, -44.290}})),
        0.13, 0.125, 0.005));
    f.references.push_back(cycle(24,
                                 published({{.919, .000, .081, .000},
                                            {.034, .949, .000, .017},
                                            {.009, .046, .919, .026},
                                            {.011, .009, .026, .955}}),
                                 published({{1870.668, -31.145, 1870.723},
                                            {.018, -.096, -3129.985},
                                            {-.065, -.098, .010},
                                            {-.088, -.073, .070}})));
    f.references.push_back(cycle(100,
                                 published({{.980, .000, .020, .000},
                                            {.008, .987, .000, .004},
                                            {.002, .011, .980, .006},
                                            {.003, .002, .007, .989}}),
                                 published({{7244.156, -14.832, 7244.209},
                                            {-0.019, -0.062, -11980.129},
                                            {0.031, -0.008, 0.059},
                                            {-0.072, -0.109, -0.012}})));
    out.push_back(std::move(f));
  }

  {
    StudyFixture f{"study8", "4-state synthetic chain with negative and complex eigenvalues",
                   counts({{200, 650, 400, 100}, {350, 100, 450, 200}, {100, 500, 250, 300},
                           {400, 300, 200, 100}}),
                   ConstraintMask(4), {2, 24, 100}, {8, 8, 8, 8}, std::nullopt,
                   {-.357, {-.043, .170}, {-.043, -.170}}, {}, std::nullopt};
    f.references.push_back(with_bands(
        cycle(2,
              published({{.025, .301, .211, .463},
                         {.215, .369, .417, .000},
                         {.540, .000, .153, .307},
                         {.000, .694, .306, .000}}),
              published({{-.069, -.007, -.041},
                         {253.566, 253.544, 253.558},
                         {.047, -131.636, .007},
                         {-73.725, 130.756, 130.749}})),
        0.13, 0.125, 0.012));
    f.references.push_back(cycle(24,
                                 published({{.919, .000, .081, .000},
                                            {.000, .906, .039, .055},
                                            {.000, .108, .892, .000},
                                            {.107, .000, .000, .893}}),
                                 published({{2645.061, 2380.088, 2645.052},
                                            {-562.497, -.054, -.080},
                                            {1381.186, 3325.479, 3325.464},
                                            {-.012, -718.366, -626.450}})));
    f.references.push_back(cycle(100,
                                 published({{.980, .000, .020, .000},
                                            {.000, .976, .010, .014},
                                            {.000, .028, .972, .000},
                                            {.027, .000, .000, .973}}),
                                 published({{10188.296, 9246.027, 10188.303},
                                            {-2233.645, -.002, -.001},
                                            {4948.569, 12326.711, 12326.716},
                                            {-.005, -2790.863, -2648.348}})));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

const char* to_string(Provenance provenance) {
  return provenance == Provenance::Published ? "published" : "computed";
}

const CycleReference* StudyFixture::reference(int t) const {
  for (const auto& ref : references)
    if (ref.cycles == t) return &ref;
  return nullptr;
}

const std::vector<StudyFixture>& study_fixtures() {
  static const std::vector<StudyFixture> fixtures = build();
  return fixtures;
}

const StudyFixture& find_fixture(const std::string& name) {
  for (const auto& f : study_fixtures())
    if (f.name == name) return f;
  throw InputError("unknown fixture '" + name + "'");
}

}  // namespace rootmle
