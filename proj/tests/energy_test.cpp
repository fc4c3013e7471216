#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlhomog/energy.hpp"

using namespace nlhomog;

namespace {

PairStencil st_1d(int m) { return build_stencil(KernelSpec::k1(1, 0.25), m, 1.0); }
PairStencil st_2d(int m) { return build_stencil(KernelSpec::k1(2, 0.25), m, std::sqrt(2.0)); }

}  // namespace

TEST_CASE("interaction of empty set vanishes, symmetry holds") {
  const int m = 16;
  auto st = st_1d(m);
  WindowGrid w(1, m, ivec(0), ivec(m));
  auto empty = LatticeSet::empty(w);
  auto half = LatticeSet::box_set(w, Box(1, dvec(0.0), dvec(0.5)));
  CHECK(interaction(empty, half, st) == 0.0);

  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto a = LatticeSet::empty(w);
    auto b = LatticeSet::empty(w);
    for (long x = 0; x < m; ++x) {
      const int r = static_cast<int>(rng.next_index(3));
      if (r == 0) a.set_bit(ivec(x), true);
      if (r == 1) b.set_bit(ivec(x), true);
    }
    CHECK(interaction(a, b, st) == doctest::Approx(interaction(b, a, st)).epsilon(1e-14));
  }
}

TEST_CASE("interaction reproduces the closed form on adjacent intervals") {
  // A=(0,1/2), B=(1/2,1), K1 s=1/4:
  // int_0^{1/2} int_{1/2}^1 (y-x)^{-3/2} = 8 sqrt(1/2) - 4;
  // cell-aligned sets carry the continuum value at every resolution
  const double expect = 8.0 * std::sqrt(0.5) - 4.0;
  for (int m : {16, 32, 64, 128}) {
    auto st = st_1d(m);
    WindowGrid w(1, m, ivec(0), ivec(m));
    auto a = LatticeSet::box_set(w, Box(1, dvec(0.0), dvec(0.5)));
    auto b = LatticeSet::box_set(w, Box(1, dvec(0.5), dvec(1.0)));
    CHECK(interaction(a, b, st) == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("overlapping sets are rejected") {
  const int m = 16;
  auto st = st_1d(m);
  WindowGrid w(1, m, ivec(0), ivec(m));
  auto a = LatticeSet::box_set(w, Box(1, dvec(0.0), dvec(0.6)));
  auto b = LatticeSet::box_set(w, Box(1, dvec(0.5), dvec(1.0)));
  CHECK_THROWS_AS(interaction(a, b, st), ValidationError);
}

TEST_CASE("halfspace ray perimeter is exact") {
  // E = {x < 0}, Omega = (-1,1): P_K = int_0^1 t^{-2s} dt... = 1/(1-2s) = 2,
  // and the tent weights carry the value exactly at every resolution
  for (int m : {8, 32, 128}) {
    auto st = st_1d(m);
    WindowGrid w(1, m, ivec(-3 * m), ivec(3 * m));
    auto e = LatticeSet::halfspace(w, dvec(-1.0), 0.0);  // -x > 0, i.e. x < 0
    auto b = perimeter(e, Box(1, dvec(-1.0), dvec(1.0)), st);
    CHECK(b.total() == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(b.truncation_bound == 0.0);
  }
}

TEST_CASE("full space has no perimeter") {
  const int m = 16;
  auto st = st_1d(m);
  WindowGrid w(1, m, ivec(-m), ivec(2 * m));
  auto e = LatticeSet::full(w);
  auto b = perimeter(e, Box(1, dvec(0.0), dvec(1.0)), st);
  CHECK(b.total() == 0.0);
}

TEST_CASE("complement symmetry of the perimeter") {
  const int m = 16;
  auto st = st_2d(m);
  WindowGrid w(2, m, ivec(-2 * m, -2 * m), ivec(2 * m, 2 * m));
  Rng rng(99);
  const Box omega(2, dvec(-1.0, -1.0), dvec(1.0, 1.0));
  for (int trial = 0; trial < 3; ++trial) {
    auto e = LatticeSet::random(w, rng, 0.4);
    auto b1 = perimeter(e, omega, st);
    auto b2 = perimeter(e.complement(), omega, st);
    CHECK(b1.perimeter_part() == doctest::Approx(b2.perimeter_part()).epsilon(1e-13));
    // in_in is symmetric exactly; the cross terms swap
    CHECK(b1.in_in == doctest::Approx(b2.in_in).epsilon(1e-13));
    CHECK(b1.in_out == doctest::Approx(b2.out_in).epsilon(1e-13));
  }
}

TEST_CASE("submodularity witness on full-window perimeters") {
  const int m = 12;
  KernelSpec k = KernelSpec::k1(2, 0.25);
  auto st = build_stencil(k, m, std::sqrt(2.0));
  WindowGrid w(2, m, ivec(0, 0), ivec(m, m));
  Rng rng(4242);
  const Box omega(2, dvec(-1.0, -1.0), dvec(2.0, 2.0));  // window plus margin
  for (int trial = 0; trial < 5; ++trial) {
    auto e = LatticeSet::random(w, rng, 0.5);
    auto f = LatticeSet::random(w, rng, 0.5);
    LatticeSet u = e, n = e;
    for (std::size_t i = 0; i < u.bits.size(); ++i) {
      u.bits[i] = e.bits[i] | f.bits[i];
      n.bits[i] = e.bits[i] & f.bits[i];
    }
    const double pe = perimeter(e, omega, st).perimeter_part();
    const double pf = perimeter(f, omega, st).perimeter_part();
    const double pu = perimeter(u, omega, st).perimeter_part();
    const double pn = perimeter(n, omega, st).perimeter_part();
    CHECK(pu + pn <= pe + pf + 1e-10 * (pe + pf));
  }
}

TEST_CASE("J with zero forcing equals the perimeter; empty set costs nothing") {
  const int m = 16;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  auto g0 = ForcingField::zero(t);
  WindowGrid w(1, m, ivec(-2 * m), ivec(2 * m));
  auto e = LatticeSet::halfspace(w, dvec(1.0), 0.3);
  const Box omega(1, dvec(-1.0), dvec(1.0));
  CHECK(functional_J(e, omega, st, g0).total() ==
        doctest::Approx(perimeter(e, omega, st).total()).epsilon(1e-14));
  auto empty = LatticeSet::empty(w);
  CHECK(functional_J(empty, omega, st, g0).total() == 0.0);
}

TEST_CASE("J complement difference equals the forcing difference") {
  const int m = 16;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  auto g = ForcingField::cosine(t, 0.3);
  WindowGrid w(1, m, ivec(-2 * m), ivec(2 * m));
  const Box omega(1, dvec(-1.0), dvec(1.0));
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    auto e = LatticeSet::random(w, rng, 0.5);
    auto j1 = functional_J(e, omega, st, g);
    auto j2 = functional_J(e.complement(), omega, st, g);
    // perimeters agree, so the difference is the forcing difference
    CHECK(j1.total() - j2.total() ==
          doctest::Approx(j1.forcing - j2.forcing).epsilon(1e-10));
  }
}

TEST_CASE("F forcing vanishes when no unit cube fits") {
  const int m = 16;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  auto g = ForcingField::cosine(t, 0.5);
  WindowGrid w(1, m, ivec(-2 * m), ivec(2 * m));
  auto e = LatticeSet::halfspace(w, dvec(1.0), 0.1);
  const Box omega(1, dvec(0.1), dvec(0.9));  // shorter than one period
  auto f = functional_F(e, omega, st, g);
  CHECK(f.forcing == 0.0);
  CHECK(f.perimeter_part() == doctest::Approx(perimeter(e, omega, st).perimeter_part()));
}

TEST_CASE("F minus E_trunc is the in-out interaction") {
  const int m = 16;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  auto g = ForcingField::cosine(t, 0.2);
  WindowGrid w(1, m, ivec(-3 * m), ivec(3 * m));
  Rng rng(11);
  const Box omega(1, dvec(-1.0), dvec(1.0));
  for (int trial = 0; trial < 4; ++trial) {
    auto e = LatticeSet::random(w, rng, 0.5, ExteriorRule::Halfspace);
    e.hs_p = dvec(1.0);
    e.hs_t = 0.0;
    auto f = functional_F(e, omega, st, g);
    auto et = functional_E_trunc(e, omega, st, g);
    CHECK(f.total() - et.total() == doctest::Approx(f.in_out).epsilon(1e-12));
    CHECK(f.in_out >= 0.0);
  }
}

TEST_CASE("cell energy of the zero profile is the transport bound, exactly in 1D") {
  const int m = 64;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  PeriodicProfile u(t, ivec(1));
  auto g = ForcingField::cosine(t, 0.05);
  // E_p(0) = (|p|/2) first_moment |Q| = 2; forcing pairs with u = 0
  CHECK(cell_energy(u, st, g) == doctest::Approx(2.0).epsilon(1e-8));

  PeriodicProfile u0(t, ivec(0));
  auto g0 = ForcingField::zero(t);
  CHECK(cell_energy(u0, st, g0) == 0.0);
}

TEST_CASE("cell energy rejects non-mean-zero profiles") {
  const int m = 16;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  PeriodicProfile u(t, ivec(1));
  for (double& x : u.u) x = 0.5;
  CHECK_THROWS_AS(cell_energy(u, st, ForcingField::zero(t)), ValidationError);
}

TEST_CASE("zero profile is a minimizer for g = 0 (random perturbations)") {
  const int m = 32;
  auto st = st_1d(m);
  TorusGrid t(1, m);
  auto g0 = ForcingField::zero(t);
  PeriodicProfile u(t, ivec(1));
  const double base = cell_energy(u, st, g0);
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    PeriodicProfile v(t, ivec(1));
    for (double& x : v.u) x = rng.next_in(-0.05, 0.05);
    v.recenter();
    CHECK(cell_energy(v, st, g0) >= base - 1e-12 * base);
  }
}

TEST_CASE("per-cube lower bound: closed-form instance and sweeps") {
  const int m = 16;
  KernelSpec k = KernelSpec::k1(1, 0.25);
  k.kappa3 = 1.0;
  auto st = build_stencil(k, m, 1.0);
  TorusGrid t(1, m);
  auto g0 = ForcingField::zero(t);
  WindowGrid w(1, m, ivec(0), ivec(m));

  // F = left half of the cube: lhs = 8 sqrt(1/2) - 4 ~ 1.657 >= 0.25 = rhs
  auto f = LatticeSet::box_set(w, Box(1, dvec(0.0), dvec(0.5)));
  auto r = check_cube_bound(f, ivec(0), st, g0);
  CHECK(r.lhs == doctest::Approx(8.0 * std::sqrt(0.5) - 4.0).epsilon(2e-3));
  CHECK(r.rhs == doctest::Approx(0.25));
  CHECK(r.pass);

  // degenerate cube: empty intersection gives rhs = 0
  auto empty = LatticeSet::empty(w);
  auto r0 = check_cube_bound(empty, ivec(0), st, g0);
  CHECK(r0.rhs == 0.0);
  CHECK(r0.pass);

  // seeded random sweep with forcing at the positivity limit
  auto g = ForcingField::cosine(t, k.kappa3 / 4.0);
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto fr = LatticeSet::random(w, rng, rng.next_unit());
    auto rc = check_cube_bound(fr, ivec(0), st, g);
    CHECK(rc.pass);
  }
}

TEST_CASE("2D halfspace perimeter: window increments equal the slicing value") {
  // P_K(E, Omega_W) has an O(1) boundary excess at finite windows, but once
  // the window is taller than the kernel range the increment per unit of
  // interface equals (1/2) int |h_1| K = 4 * 2^{1/4} exactly
  const int m = 16;
  auto st = st_2d(m);
  WindowGrid w(2, m, ivec(-3 * m, -3 * m), ivec(3 * m, 7 * m));
  auto e = LatticeSet::halfspace(w, dvec(-1.0, 0.0), 0.0);
  const double p3 = perimeter(e, Box(2, dvec(-1.0, 0.0), dvec(1.0, 3.0)), st).total();
  const double p4 = perimeter(e, Box(2, dvec(-1.0, 0.0), dvec(1.0, 4.0)), st).total();
  const double oracle = 4.0 * std::pow(2.0, 0.25);
  CHECK(p4 - p3 == doctest::Approx(oracle).epsilon(1e-7));
  // the finite-window value itself sits above the per-length limit
  CHECK(p3 / 3.0 > oracle);
}

TEST_CASE("2D diagonal staircase excess stays within the oracle tolerance") {
  // the lattice set {x . p > t} for p = (1,1) is a staircase; its exact
  // K-perimeter per unit diagonal length exceeds the halfspace oracle by an
  // O(sqrt h) amount, which must stay below the 2% acceptance budget at the
  // acceptance resolutions
  const double oracle = 4.0 * std::pow(2.0, 0.25);
  double prev_excess = 1e9;
  for (int m : {16, 32, 64}) {
    auto st = st_2d(m);
    const double h = 1.0 / m;
    WindowGrid w(2, m, ivec(-4 * m, -4 * m), ivec(4 * m, 4 * m));
    auto e = LatticeSet::halfspace(w, dvec(1.0, 1.0), 0.33 * h);
    const double L = 2.0;  // diagonal window of cross-section 2
    // rotated box |x.phat| <= 1, |x.perp| <= L/2 realized at lattice resolution
    // approximated here by counting within a rhombus via the box in rotated frame:
    // use an axis box and normalize by the interface length it contains
    const Box omega(2, dvec(-1.0, -1.0), dvec(1.0, 1.0));
    auto b = perimeter(e, omega, st);
    // interface {x.(1,1)=0.33h} crosses the box with length 2 sqrt 2 * (1 - o(h))
    const double len = 2.0 * std::sqrt(2.0) * (1.0 - 0.33 * h / 2.0 / std::sqrt(2.0));
    const double per_len = b.total() / len;
    const double excess = per_len / oracle - 1.0;
    CHECK(excess > -5e-3);
    CHECK(excess < prev_excess);
    prev_excess = excess;
    MESSAGE("m=", m, " staircase excess = ", excess);
  }
  CHECK(prev_excess < 0.02);
}
