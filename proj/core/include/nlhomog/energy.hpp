#pragma once

#include "nlhomog/forcing.hpp"
#include "nlhomog/lattice_set.hpp"
#include "nlhomog/profile.hpp"
#include "nlhomog/stencil.hpp"

namespace nlhomog {

// Partial sums of the three interaction terms of P_K(E, Omega) plus the
// forcing contribution; total = in_in + in_out + out_in + forcing.
struct EnergyBreakdown {
  double in_in = 0.0;    // L_K(E cap Omega, E^c cap Omega)
  double in_out = 0.0;   // L_K(E cap Omega, E^c cap Omega^c)
  double out_in = 0.0;   // L_K(E cap Omega^c, E^c cap Omega)
  double forcing = 0.0;
  double truncation_bound = 0.0;

  double perimeter_part() const { return in_in + in_out + out_in; }
  double total() const { return perimeter_part() + forcing; }
};

// K-interaction between two disjoint sets; pairs are restricted to the shared
// window, exterior rules are not consulted.
double interaction(const LatticeSet& a, const LatticeSet& b, const PairStencil& st);

// P_K(E, Omega) with the three-term breakdown; the exterior rule of E fills
// every cell the stencil can reach beyond E's stored window.
EnergyBreakdown perimeter(const LatticeSet& e, const Box& omega, const PairStencil& st);

// J(E, Omega) = P_K(E, Omega) + integral of g over E cap Omega
EnergyBreakdown functional_J(const LatticeSet& e, const Box& omega, const PairStencil& st,
                             const ForcingField& g);

// F(E, Omega) at scale eps; eps = 1 forces over the unit-cube cover Q(Omega)_1,
// eps < 1 evaluates at scale 1 on the blown-up domain and rescales by eps^{n-1}.
EnergyBreakdown functional_F(const LatticeSet& e, const Box& omega, const PairStencil& st,
                             const ForcingField& g, double eps = 1.0);

// truncated energy (F minus the interaction of E cap Omega with E^c cap Omega^c)
EnergyBreakdown functional_E_trunc(const LatticeSet& e, const Box& omega, const PairStencil& st,
                                   const ForcingField& g, double eps = 1.0);

// cell energy E_p(u): pairwise term over the periodic-wrapped stencil with the
// affine correction from the unwrapped displacement, plus the forcing pairing
double cell_energy(const PeriodicProfile& u, const PairStencil& st, const ForcingField& g);

// pairwise part and forcing pairing separately (solver diagnostics)
double cell_energy_pair_part(const PeriodicProfile& u, const PairStencil& st);

struct CubeBoundCheck {
  double lhs = 0.0;  // in-cube interaction + forcing over F cap cube
  double rhs = 0.0;  // (kappa3/2 - ||g||_inf) min(|F cap cube|, |F^c cap cube|)
  bool pass = true;
};

// Lemma-style per-cube lower bound witness on the unit cube k + Q.
CubeBoundCheck check_cube_bound(const LatticeSet& f, const IVec& cube, const PairStencil& st,
                                const ForcingField& g, double tol_scale = 1e-10);

// restriction of a set (bits + rule evaluation) to a window
LatticeSet restrict_to(const LatticeSet& s, const WindowGrid& w);

}  // namespace nlhomog
