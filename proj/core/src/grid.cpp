#include "nlhomog/grid.hpp"

#include <cmath>

namespace nlhomog {

namespace {

// nearest integer if within tol, otherwise a ValidationError
long aligned_round(double x, double tol, const char* what) {
  double r = std::round(x);
  if (std::abs(x - r) > tol)
    throw ValidationError(std::string(what) + ": value " + std::to_string(x) +
                          " is not lattice-aligned");
  return static_cast<long>(r);
}

}  // namespace

WindowGrid WindowGrid::from_physical(int dim, int m, DVec a, DVec b) {
  IVec lo = ivec(0), hi = ivec(0, 1);
  for (int c = 0; c < dim; ++c) {
    lo[c] = aligned_round(a[c] * m, 1e-9 * m, "window bound");
    hi[c] = aligned_round(b[c] * m, 1e-9 * m, "window bound");
  }
  if (dim == 1) {
    lo[1] = 0;
    hi[1] = 1;
  }
  return WindowGrid(dim, m, lo, hi);
}

CubeCover enumerate_unit_cubes(const WindowGrid& window, const Box& omega, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("cube cover: epsilon must be positive");
  const double h = window.h();
  // cube faces must land exactly on cell boundaries
  const double cells_per_cube = epsilon / h;
  if (std::abs(cells_per_cube - std::round(cells_per_cube)) > 1e-9 * std::max(1.0, cells_per_cube))
    throw ValidationError("cube cover: epsilon is not an integer multiple of the cell spacing");

  CubeCover cover;
  cover.epsilon = epsilon;
  const int dim = window.dim;

  // candidate integer translates k with eps(k+Q) inside omega
  IVec klo = ivec(0), khi = ivec(0, 1);
  const double tol = 1e-12 * std::max(1.0, std::abs(omega.b[0]) + std::abs(omega.b[1]));
  for (int c = 0; c < dim; ++c) {
    klo[c] = static_cast<long>(std::ceil(omega.a[c] / epsilon - tol));
    khi[c] = static_cast<long>(std::floor(omega.b[c] / epsilon + tol)) - 1;
  }
  if (dim == 1) {
    klo[1] = 0;
    khi[1] = 0;
  }
  for (long ky = klo[1]; ky <= khi[1]; ++ky)
    for (long kx = klo[0]; kx <= khi[0]; ++kx) {
      // containment is checked exactly at lattice resolution
      const double x0 = kx * epsilon, x1 = (kx + 1) * epsilon;
      const double y0 = ky * epsilon, y1 = (ky + 1) * epsilon;
      bool inside = x0 >= omega.a[0] - tol && x1 <= omega.b[0] + tol;
      if (dim == 2) inside = inside && y0 >= omega.a[1] - tol && y1 <= omega.b[1] + tol;
      if (inside) cover.cubes.push_back(ivec(kx, ky));
    }
  return cover;
}

}  // namespace nlhomog
