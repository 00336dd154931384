#include "doctest.h"

#include <stdexcept>

#include "mcvd/modulation.hpp"
#include "mcvd/rng.hpp"

using namespace mcvd;

TEST_SUITE_BEGIN("modulation");

TEST_CASE("emit_count") {
  QcskScheme scheme{150, 4, MoleculeType::TypeI};
  CHECK(emit_count(scheme, 0) == 0);
  CHECK(emit_count(scheme, 1) == 150);
  CHECK(emit_count(scheme, 3) == 450);
  CHECK_THROWS_AS(emit_count(scheme, 4), std::domain_error);
  CHECK_THROWS_AS(emit_count(scheme, -1), std::domain_error);

  QcskScheme degenerate{0, 4, MoleculeType::TypeI};
  for (int s = 0; s < 4; ++s) CHECK(emit_count(degenerate, s) == 0);
}

TEST_CASE("detect against the Table-II d=3 row") {
  const Thresholds t{108, 198, 287};
  CHECK(detect(100.0, t, 4) == 0);
  CHECK(detect(-5.0, t, 4) == 0);
  CHECK(detect(150.0, t, 4) == 1);
  CHECK(detect(198.0, t, 4) == 2);  // boundary goes to the higher symbol
  CHECK(detect(108.0, t, 4) == 1);
  CHECK(detect(287.0, t, 4) == 3);
  CHECK(detect(1e9, t, 4) == 3);
}

TEST_CASE("bcsk uses tau1 only") {
  const Thresholds t{50, 0, 0};
  CHECK(detect(49.9, t, 2) == 0);
  CHECK(detect(50.0, t, 2) == 1);
}

TEST_CASE("detect is monotone and a partition") {
  const Thresholds t{80, 213, 345};
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double a = 600.0 * rng.uniform() - 100.0;
    const double b = 600.0 * rng.uniform() - 100.0;
    const int da = detect(a, t, 4);
    const int db = detect(b, t, 4);
    if (a <= b) CHECK(da <= db);
    CHECK(da >= 0);
    CHECK(da < 4);
    (void)db;
  }
}

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS((Thresholds{0, 1, 2}.validate(4)), std::domain_error);
  CHECK_THROWS_AS((Thresholds{5, 4, 6}.validate(4)), std::domain_error);
  CHECK_NOTHROW((Thresholds{1, 2, 3}.validate(4)));
}

TEST_SUITE_END();
