#pragma once

#include <memory>
#include <vector>

#include "nlhomog/grid.hpp"
#include "nlhomog/kernel.hpp"

namespace nlhomog {

// Pairwise interaction stencil on the lattice with spacing h = 1/m.
//
// The weight attached to an offset d is the exact kernel mass between two
// cells at that displacement,
//     W(d) = integral of K(|t|) * prod_i (h - |t_i - d_i h|)_+ dt,
// so lattice energies of cell-aligned sets coincide with the continuum
// functionals (up to the reported tail bound).  Offsets are ordered
// lexicographically; W(d) = W(-d) > 0 for every retained offset.
struct PairStencil {
  int dim = 1;
  int m = 8;
  double rcut = 1.0;
  KernelSpec kernel;

  std::vector<IVec> offsets;       // full list, both orientations
  std::vector<double> weights;     // aligned with offsets
  std::vector<IVec> half_offsets;  // one orientation per unordered pair class
  std::vector<double> half_weights;

  double tail_bound = 0.0;       // neglected kernel mass per unit volume
  double weight_sum = 0.0;       // sum of W(d) over the full list
  double weight_sq_sum = 0.0;    // sum of W(d)^2 over the full list

  double h() const { return 1.0 / m; }
};

// Midpoint-rule weight h^{2n} K(|d| h); kept as a diagnostic reference.
double midpoint_weight(const KernelSpec& k, int m, const IVec& d);

// Exact cell-pair weight for a single offset (quadrature tolerance ~1e-10).
double pair_weight(const KernelSpec& k, int m, const IVec& d);

double default_rcut(const KernelSpec& k);

PairStencil build_stencil(const KernelSpec& k, int m, double rcut);

// process-wide cache keyed by kernel parameters, m and rcut
std::shared_ptr<const PairStencil> stencil_cache(const KernelSpec& k, int m, double rcut);

}  // namespace nlhomog
