#pragma once

#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

// Z^n-periodic forcing term sampled at the torus cell centers, re-centered to
// exact zero mean.
struct ForcingField {
  TorusGrid torus;
  std::vector<double> values;   // per torus cell, mean zero
  double linf = 0.0;            // sup norm after re-centering
  double amplitude = 0.0;       // construction parameter, for reports

  double at(const IVec& cell) const { return values[torus.index(cell)]; }
  bool is_zero() const { return linf == 0.0; }

  // L^q(Q) norm of the sampled field (cell sums); q = n/(2 s1) in reports
  double lq_norm(double q) const;

  static ForcingField zero(const TorusGrid& t);
  // A * prod_i cos(2 pi x_i), mean-zero by symmetry
  static ForcingField cosine(const TorusGrid& t, double amplitude);
  static ForcingField tabulated(const TorusGrid& t, std::vector<double> cell_values);
};

}  // namespace nlhomog
