#pragma once

#include <vector>

#include "nlhomog/energy.hpp"

namespace nlhomog {

enum class PlateauFunctional { J, F };

struct PlateauResult {
  LatticeSet minimizer;
  double optimum = 0.0;         // energy-module evaluation of the minimizer
  double objective = 0.0;       // solver-internal objective (same decomposition)
  double rounding_bound = 0.0;  // capacity quantum times the cut cardinality
  long free_cells = 0;
};

// Exact global minimization of J or F over all configurations of the cells of
// omega, with every other cell fixed by `exterior` (bits inside its window,
// exterior rule beyond).  The interaction term has nonnegative pair weights,
// so the problem is a minimum s-t cut; ties resolve to the largest minimizer.
PlateauResult solve_plateau(const LatticeSet& exterior, const Box& omega,
                            const PairStencil& st, const ForcingField& g,
                            PlateauFunctional fn = PlateauFunctional::J);

// Exhaustive enumeration oracle, at most 20 free cells; ties resolve to the
// lexicographically smallest indicator.
PlateauResult brute_force_plateau(const LatticeSet& exterior, const Box& omega,
                                  const PairStencil& st, const ForcingField& g,
                                  PlateauFunctional fn = PlateauFunctional::J);

struct ClassAReport {
  double worst_gap = 0.0;
  std::vector<double> gaps;  // J(E, box) - min J(., box) per tested box
};

// Certifies discrete class-A minimality of E on the given family of boxes:
// every gap is J(E, box) minus the exact constrained minimum, hence >= 0 up
// to roundoff; a small worst gap certifies minimality on the family.
ClassAReport classA_window_check(const LatticeSet& e, const std::vector<Box>& windows,
                                 const PairStencil& st, const ForcingField& g);

}  // namespace nlhomog
