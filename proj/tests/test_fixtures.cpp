#include <doctest.h>

#include <set>

#include "rootmle/fixtures.hpp"
#include "rootmle/grid.hpp"

using namespace rootmle;

TEST_SUITE("fixtures") {
  TEST_CASE("all studies are present and consistent") {
    std::set<std::string> names;
    for (const auto& f : study_fixtures()) {
      CAPTURE(f.name);
      names.insert(f.name);
      CHECK(f.mask.states() == f.counts.states());
      CHECK(f.full_denominators.size() == static_cast<std::size_t>(f.counts.states()));
      CHECK_NOTHROW(Grid({f.mask, f.full_denominators}));
      CHECK_FALSE(f.cycles.empty());
      CHECK_FALSE(f.eigenvalues.empty());
      for (const auto& ref : f.references) {
        CHECK(std::find(f.cycles.begin(), f.cycles.end(), ref.cycles) != f.cycles.end());
        CHECK(f.reference(ref.cycles) == &ref);
        if (ref.maximizer) {
          CHECK(ref.maximizer->value.rows() == f.counts.states());
          CHECK(ref.maximizer->value.cols() == f.counts.states());
          // Printed to three decimals.
          CHECK(StochasticMatrix::satisfies(ref.maximizer->value, 2e-3));
        }
        if (ref.gradient) {
          CHECK(ref.gradient->value.rows() == f.counts.states());
          CHECK(ref.gradient->value.cols() == f.counts.states() - 1);
        }
      }
      if (f.interval_mle) CHECK(StochasticMatrix::satisfies(f.interval_mle->value, 2e-3));
    }
    CHECK(names == std::set<std::string>{"study2", "study3", "study4", "study5", "study6", "study7", "study8"});
    CHECK(find_fixture("study4").reference(7) == nullptr);
    CHECK_THROWS_AS(find_fixture("study9"), InputError);
    CHECK(std::string(to_string(Provenance::Published)) == "published");
  }
}
