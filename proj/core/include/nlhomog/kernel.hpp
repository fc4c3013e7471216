#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlhomog/common.hpp"

namespace nlhomog {

enum class KernelKind { K1, K2, K3, TabulatedRadial };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

// Radial interaction kernel together with the structural constants
// (s1, s2, delta, kappa1..kappa3) it is declared to satisfy.  Evaluation
// depends on |x-y| only; symmetry and invariance hold by construction.
struct KernelSpec {
  KernelKind kind = KernelKind::K1;
  int dim = 1;                 // n in {1,2}
  double s1 = 0.25;            // in (0, 1/2)
  double s2 = 0.75;            // in (1/2, 1)
  double delta = 1.0;          // near-field radius > 0
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double kappa3 = 1.0;
  // tabulated-radial: strictly increasing radii, nonnegative values;
  // evaluation is log-log linear between samples, no extrapolation.
  std::vector<double> table_r;
  std::vector<double> table_v;

  //

  double eval(double r) const;           // throws std::domain_error for r <= 0
  // K(r) * r^p with the powers fused, stable arbitrarily close to r = 0
  double eval_scaled(double r, double p) const;
  double support_radius() const;         // +inf when the kernel has a tail
  std::vector<double> breakpoints() const;  // radii where the formula kinks

  void check_parameters() const;         // structural invariants on the constants

  static KernelSpec k1(int dim, double s, double delta_decl = -1.0);
  static KernelSpec k2(int dim, double s, double delta);
  static KernelSpec k3(int dim, double s, double S, double delta);
  static KernelSpec tabulated(int dim, std::vector<double> r, std::vector<double> v,
                              double s1, double s2, double delta);
};

// Moments of an admissible kernel; quadrature with known breakpoints.
struct KernelMoments {
  double first_moment = 0.0;  // integral of |h| K(h,0) over R^n
  double quad_tol = 1e-8;
};

double first_moment(const KernelSpec& k, double rel_tol = 1e-8);
double tail_mass(const KernelSpec& k, double rcut, double rel_tol = 1e-8);
// integral over R^n of |h . phat| K(|h|) dh, for a unit direction phat;
// rotation invariant, so the direction argument only matters for diagnostics.
double directional_first_moment(const KernelSpec& k, double rel_tol = 1e-8);

struct ValidationClause {
  bool pass = true;
  double worst_radius = 0.0;
  double worst_margin = 0.0;  // most negative slack observed
};

struct ValidationReport {
  ValidationClause lower_envelope;   // kappa1 chi_(0,delta) r^{-n-2s1} <= K
  ValidationClause upper_envelope;   // K <= kappa2 min(r^{-n-2s1}, r^{-n-2s2})
  ValidationClause cube_infimum;     // inf_(0,sqrt n] K >= kappa3
  ValidationClause nonnegative;
  bool moment_finite = false;
  double first_moment_value = 0.0;
  double measured_infimum = 0.0;     // sampled inf over (0, sqrt n]
  bool admissible() const {
    return lower_envelope.pass && upper_envelope.pass && cube_infimum.pass &&
           nonnegative.pass && moment_finite;
  }
};

// Deterministic radial sampling of the kernel assumptions.
ValidationReport validate_assumptions(const KernelSpec& k, int sample_count = 10000);

}  // namespace nlhomog
