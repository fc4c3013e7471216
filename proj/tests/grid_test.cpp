#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlhomog/grid.hpp"

using namespace nlhomog;

TEST_CASE("torus wrap and volumes") {
  TorusGrid t(2, 16);
  CHECK(t.h() == doctest::Approx(1.0 / 16));
  CHECK(t.cell_volume() == doctest::Approx(1.0 / 256));
  CHECK(t.cell_count() == 256);
  CHECK(t.wrap1(-1) == 15);
  CHECK(t.wrap1(16) == 0);
  CHECK(t.index(ivec(-1, -1)) == t.index(ivec(15, 15)));
  CHECK_THROWS_AS(TorusGrid(2, 4), ValidationError);
  CHECK_THROWS_AS(TorusGrid(3, 16), ValidationError);
}

TEST_CASE("window indexing") {
  WindowGrid w(2, 8, ivec(-4, -8), ivec(12, 8));
  CHECK(w.nx() == 16);
  CHECK(w.ny() == 16);
  CHECK(w.cell_count() == 256);
  CHECK(w.contains(ivec(-4, -8)));
  CHECK_FALSE(w.contains(ivec(12, 0)));
  const IVec k = ivec(3, -2);
  CHECK(w.coords(w.index(k)) == k);
  const DVec c = w.center(k);
  CHECK(c[0] == doctest::Approx((3 + 0.5) / 8.0));
  CHECK(c[1] == doctest::Approx((-2 + 0.5) / 8.0));
}

TEST_CASE("physical window construction requires alignment") {
  auto w = WindowGrid::from_physical(1, 8, dvec(-1.0), dvec(2.0));
  CHECK(w.lo[0] == -8);
  CHECK(w.hi[0] == 16);
  CHECK_THROWS_AS(WindowGrid::from_physical(1, 8, dvec(-1.03), dvec(2.0)), ValidationError);
}

TEST_CASE("unit cube enumeration in 1D") {
  WindowGrid w(1, 8, ivec(-8), ivec(40));
  // Omega = (0,3): cubes (0,1),(1,2),(2,3)
  auto cov = enumerate_unit_cubes(w, Box(1, dvec(0.0), dvec(3.0)), 1.0);
  REQUIRE(cov.cubes.size() == 3);
  CHECK(cov.cubes[0][0] == 0);
  CHECK(cov.cubes[2][0] == 2);

  // Omega = (0.5, 3.5): only (1,2),(2,3) fit
  auto cov2 = enumerate_unit_cubes(w, Box(1, dvec(0.5), dvec(3.5)), 1.0);
  REQUIRE(cov2.cubes.size() == 2);
  CHECK(cov2.cubes[0][0] == 1);

  // misaligned epsilon is refused, never silently rounded
  CHECK_THROWS_AS(enumerate_unit_cubes(w, Box(1, dvec(0.0), dvec(3.0)), 0.3), ValidationError);
}

TEST_CASE("cube cover count for boxes") {
  WindowGrid w(2, 8, ivec(-8, -8), ivec(48, 48));
  for (double L : {1.0, 2.0, 4.0, 5.0}) {
    auto cov = enumerate_unit_cubes(w, Box(2, dvec(0.0, 0.0), dvec(L, L)), 1.0);
    const long n = static_cast<long>(L);
    CHECK(static_cast<long>(cov.cubes.size()) == n * n);
  }
  // epsilon-scaled cover
  auto cov = enumerate_unit_cubes(w, Box(2, dvec(0.0, 0.0), dvec(1.0, 1.0)), 0.25);
  CHECK(cov.cubes.size() == 16);
}
