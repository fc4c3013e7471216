#pragma once

#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

// Mean-zero Z^n-periodic scalar field u together with the direction p of its
// affine completion v_p(x) = u(x) + p . x.  v_p unwraps across periods:
// v_p(x + k) = v_p(x) + p . k.
struct PeriodicProfile {
  TorusGrid torus;
  std::vector<double> u;
  IVec p = ivec(0, 0);

  PeriodicProfile() = default;
  PeriodicProfile(const TorusGrid& t, IVec dir) : torus(t), u(t.cell_count(), 0.0), p(dir) {}

  double mean() const;
  void recenter();  // subtract the mean (permutation-invariant sum)

  double u_at(const IVec& cell) const { return u[torus.index(cell)]; }
  // affine completion at any (unwrapped) cell index
  double v_at(const IVec& cell) const {
    const double h = torus.h();
    double v = u[torus.index(cell)] + p[0] * (cell[0] + 0.5) * h;
    if (torus.dim == 2) v += p[1] * (cell[1] + 0.5) * h;
    return v;
  }

  void check_mean_zero(double tol = 1e-12) const;
};

}  // namespace nlhomog
