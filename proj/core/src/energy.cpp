#include "nlhomog/energy.hpp"

#include <cmath>

namespace nlhomog {

namespace {

long stencil_extent(const PairStencil& st) {
  long e = 0;
  for (const IVec& d : st.offsets) e = std::max({e, std::abs(d[0]), std::abs(d[1])});
  return e;
}

// frame holding every cell within the stencil reach of omega
WindowGrid padded_frame(const Box& omega, const PairStencil& st) {
  const int m = st.m;
  const long pad = stencil_extent(st) + 1;
  IVec lo = ivec(0), hi = ivec(0, 1);
  for (int c = 0; c < omega.dim; ++c) {
    lo[c] = static_cast<long>(std::floor(omega.a[c] * m)) - pad;
    hi[c] = static_cast<long>(std::ceil(omega.b[c] * m)) + pad;
  }
  if (omega.dim == 1) {
    lo[1] = 0;
    hi[1] = 1;
  }
  return WindowGrid(omega.dim, m, lo, hi);
}

double forcing_sum_over(const BitImage& img, const WindowGrid& frame, const ForcingField& g) {
  Accumulator acc;
  const double hn = frame.cell_volume();
  for (long y = frame.lo[1]; y < frame.hi[1]; ++y)
    for (long x = frame.lo[0]; x < frame.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (img.get(k)) acc.add(g.at(k) * hn);
    }
  return acc.value();
}

struct BreakdownImages {
  BitImage e_in, ec_in, e_out, ec_out;
};

EnergyBreakdown interaction_breakdown(const LatticeSet& e, const Box& omega,
                                      const PairStencil& st) {
  if (e.win.m != st.m) throw ValidationError("energy: set and stencil grids differ");
  if (e.win.dim != st.dim) throw ValidationError("energy: dimension mismatch");
  const WindowGrid frame = padded_frame(omega, st);

  BitImage eimg(frame), ecomp(frame), mask(frame), maskc(frame);
  eimg.fill_from(e);
  ecomp.fill_complement_of(eimg);
  mask.fill_box_mask(omega);
  maskc.fill_complement_of(mask);

  BitImage e_in = eimg, ec_in = ecomp, e_out = eimg, ec_out = ecomp;
  e_in.and_with(mask);
  ec_in.and_with(mask);
  e_out.and_with(maskc);
  ec_out.and_with(maskc);

  Accumulator in_in, in_out, out_in;
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    const IVec& d = st.offsets[i];
    const double w = st.weights[i];
    in_in.add(w * BitImage::count_pairs(e_in, ec_in, d));
    in_out.add(w * BitImage::count_pairs(e_in, ec_out, d));
    out_in.add(w * BitImage::count_pairs(e_out, ec_in, d));
  }

  EnergyBreakdown b;
  b.in_in = in_in.value();
  b.in_out = in_out.value();
  b.out_in = out_in.value();
  b.truncation_bound = omega.volume() * st.tail_bound;
  return b;
}

double forcing_over_omega(const LatticeSet& e, const Box& omega, const PairStencil& st,
                          const ForcingField& g) {
  if (g.is_zero()) return 0.0;
  const WindowGrid frame = padded_frame(omega, st);
  BitImage eimg(frame), mask(frame);
  eimg.fill_from(e);
  mask.fill_box_mask(omega);
  eimg.and_with(mask);
  return forcing_sum_over(eimg, frame, g);
}

double forcing_over_cover(const LatticeSet& e, const Box& omega, const PairStencil& st,
                          const ForcingField& g) {
  if (g.is_zero()) return 0.0;
  const WindowGrid frame = padded_frame(omega, st);
  const CubeCover cover = enumerate_unit_cubes(frame, omega, 1.0);
  BitImage eimg(frame);
  eimg.fill_from(e);
  Accumulator acc;
  const double hn = frame.cell_volume();
  const int m = st.m;
  for (const IVec& k : cover.cubes) {
    for (long y = (frame.dim == 2 ? k[1] * m : 0); y < (frame.dim == 2 ? (k[1] + 1) * m : 1);
         ++y)
      for (long x = k[0] * m; x < (k[0] + 1) * m; ++x) {
        const IVec cell = ivec(x, y);
        if (eimg.get(cell)) acc.add(g.at(cell) * hn);
      }
  }
  return acc.value();
}

}  // namespace

LatticeSet restrict_to(const LatticeSet& s, const WindowGrid& w) {
  LatticeSet r(w, s.rule);
  r.hs_p = s.hs_p;
  r.hs_t = s.hs_t;
  r.hs_flipped = s.hs_flipped;
  r.torus_pattern = s.torus_pattern;
  r.torus_flipped = s.torus_flipped;
  r.label = s.label;
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (s.contains(k)) r.set_bit(k, true);
    }
  return r;
}

double interaction(const LatticeSet& a, const LatticeSet& b, const PairStencil& st) {
  if (!(a.win.dim == b.win.dim && a.win.m == b.win.m && a.win.lo == b.win.lo &&
        a.win.hi == b.win.hi))
    throw ValidationError("interaction: sets must share one window");
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] & b.bits[i]) throw ValidationError("interaction: sets overlap");

  // window-local bits only; the exterior rule is not consulted here
  BitImage ja(a.win), jb(b.win);
  for (long y = a.win.lo[1]; y < a.win.hi[1]; ++y)
    for (long x = a.win.lo[0]; x < a.win.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (a.bit(k)) ja.set(k);
      if (b.bit(k)) jb.set(k);
    }
  ja.recompute_spans();
  jb.recompute_spans();

  Accumulator acc;
  for (std::size_t i = 0; i < st.offsets.size(); ++i)
    acc.add(st.weights[i] * BitImage::count_pairs(ja, jb, st.offsets[i]));
  return acc.value();
}

EnergyBreakdown perimeter(const LatticeSet& e, const Box& omega, const PairStencil& st) {
  return interaction_breakdown(e, omega, st);
}

EnergyBreakdown functional_J(const LatticeSet& e, const Box& omega, const PairStencil& st,
                             const ForcingField& g) {
  EnergyBreakdown b = interaction_breakdown(e, omega, st);
  b.forcing = forcing_over_omega(e, omega, st, g);
  return b;
}

EnergyBreakdown functional_F(const LatticeSet& e, const Box& omega, const PairStencil& st,
                             const ForcingField& g, double eps) {
  if (eps == 1.0) {
    EnergyBreakdown b = interaction_breakdown(e, omega, st);
    b.forcing = forcing_over_cover(e, omega, st, g);
    return b;
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("functional_F: eps must lie in (0, 1]");
  // evaluate at scale 1 on the blown-up domain, then rescale
  Box blown(omega.dim, dvec(omega.a[0] / eps, omega.a[1] / eps),
            dvec(omega.b[0] / eps, omega.b[1] / eps));
  EnergyBreakdown b = interaction_breakdown(e, blown, st);
  b.forcing = forcing_over_cover(e, blown, st, g);
  const double scale = std::pow(eps, st.dim - 1);
  b.in_in *= scale;
  b.in_out *= scale;
  b.out_in *= scale;
  b.forcing *= scale;
  b.truncation_bound *= scale;
  return b;
}

EnergyBreakdown functional_E_trunc(const LatticeSet& e, const Box& omega, const PairStencil& st,
                                   const ForcingField& g, double eps) {
  EnergyBreakdown b = functional_F(e, omega, st, g, eps);
  b.in_out = 0.0;  // F minus L_K(E cap Omega, E^c cap Omega^c)
  return b;
}

double cell_energy_pair_part(const PeriodicProfile& u, const PairStencil& st) {
  const TorusGrid& t = u.torus;
  if (t.m != st.m || t.dim != st.dim)
    throw ValidationError("cell_energy: profile and stencil grids differ");
  const double h = t.h();
  std::vector<double> per_cell(t.cell_count());
  const long n = t.cell_count();
  for (long i = 0; i < n; ++i) {
    const IVec c = t.coords(i);
    Accumulator acc;
    for (std::size_t j = 0; j < st.offsets.size(); ++j) {
      const IVec& d = st.offsets[j];
      const long nb = t.index(ivec(c[0] + d[0], c[1] + d[1]));
      const double shift = (u.p[0] * d[0] + u.p[1] * d[1]) * h;
      acc.add(0.5 * st.weights[j] * std::abs(u.u[i] - u.u[nb] - shift));
    }
    per_cell[i] = acc.value();
  }
  return accumulate_sorted(std::move(per_cell));
}

double cell_energy(const PeriodicProfile& u, const PairStencil& st, const ForcingField& g) {
  u.check_mean_zero();
  double pair = cell_energy_pair_part(u, st);
  if (g.is_zero()) return pair;
  if (g.torus.m != u.torus.m || g.torus.dim != u.torus.dim)
    throw ValidationError("cell_energy: forcing grid differs from the profile grid");
  const double hn = u.torus.cell_volume();
  std::vector<double> terms(u.torus.cell_count());
  for (long i = 0; i < u.torus.cell_count(); ++i) terms[i] = g.values[i] * u.u[i] * hn;
  return pair + accumulate_sorted(std::move(terms));
}

CubeBoundCheck check_cube_bound(const LatticeSet& f, const IVec& cube, const PairStencil& st,
                                const ForcingField& g, double tol_scale) {
  const int m = st.m;
  const WindowGrid cube_win(st.dim, m, ivec(cube[0] * m, st.dim == 2 ? cube[1] * m : 0),
                            ivec((cube[0] + 1) * m, st.dim == 2 ? (cube[1] + 1) * m : 1));
  const LatticeSet fc = restrict_to(f, cube_win);
  const LatticeSet fcc = fc.complement();

  CubeBoundCheck r;
  r.lhs = interaction(fc, fcc, st);
  if (!g.is_zero()) {
    Accumulator acc;
    const double hn = cube_win.cell_volume();
    for (long y = cube_win.lo[1]; y < cube_win.hi[1]; ++y)
      for (long x = cube_win.lo[0]; x < cube_win.hi[0]; ++x) {
        const IVec k = ivec(x, y);
        if (fc.bit(k)) acc.add(g.at(k) * hn);
      }
    r.lhs += acc.value();
  }
  const double vol_f = fc.window_volume();
  const double vol_fc = 1.0 - vol_f;
  const double kappa3 = st.kernel.kappa3;
  r.rhs = (0.5 * kappa3 - g.linf) * std::min(vol_f, vol_fc);
  r.pass = r.lhs >= r.rhs - tol_scale * kappa3;
  return r;
}

}  // namespace nlhomog
