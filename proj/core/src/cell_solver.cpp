#include "nlhomog/cell_solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace nlhomog {

namespace {

// wrap table covering lattice index plus any stencil offset
struct WrapTables {
  std::vector<long> x;
  long off = 0;  // table position of lattice index 0

  WrapTables(int m, long dmax) {
    off = dmax + 1;
    x.resize(m + 2 * off);
    for (long i = 0; i < static_cast<long>(x.size()); ++i) {
      long v = (i - off) % m;
      if (v < 0) v += m;
      x[i] = v;
    }
  }
};

long max_abs_offset(const PairStencil& st) {
  long e = 0;
  for (const IVec& d : st.offsets) e = std::max({e, std::abs(d[0]), std::abs(d[1])});
  return e;
}

// per-edge affine shifts c_e = p . d h per half offset
std::vector<double> edge_shifts(const PairStencil& st, const IVec& p) {
  std::vector<double> c(st.half_offsets.size());
  const double h = st.h();
  for (std::size_t e = 0; e < c.size(); ++e)
    c[e] = (p[0] * st.half_offsets[e][0] + p[1] * st.half_offsets[e][1]) * h;
  return c;
}

// EL residual field R_i = sum_d W(d) z(i,d) + g_i h^n over the full stencil;
// the opposite orientation enters through antisymmetry.  Gather form: every
// cell accumulates in the same offset order, so a translation of the data
// relabels cells without changing any rounding sequence.
std::vector<double> residual_field(const Calibration& cal, const ForcingField& g) {
  const PairStencil& st = *cal.stencil;
  const TorusGrid& t = cal.torus;
  const long n = t.cell_count();
  WrapTables wt(t.m, max_abs_offset(st));
  const double hn = t.cell_volume();
  const long m = t.m;

  std::vector<double> r(n, 0.0);
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    const double w = st.half_weights[e];
    const float* ze = cal.z.data() + e * n;
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const long ib = wt.x[x + wt.off - d[0]];
        r[x] += w * (static_cast<double>(ze[x]) - ze[ib]);
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off - d[1]] * m, ya = y * m;
        const long xoff = wt.off - d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x, ib = yb + wt.x[x + xoff];
          r[i] += w * (static_cast<double>(ze[i]) - ze[ib]);
        }
      }
    }
  }
  if (!g.is_zero())
    for (long i = 0; i < n; ++i) r[i] += g.values[i] * hn;
  return r;
}

struct Certificates {
  double el_residual = 0.0;
  double dual_gap = 0.0;
  double layering = 0.0;
  double dual_value = 0.0;
};

Certificates certify(const PeriodicProfile& u, const Calibration& cal, const ForcingField& g,
                     double primal_energy) {
  const PairStencil& st = *cal.stencil;
  const TorusGrid& t = u.torus;
  const long n = t.cell_count();
  Certificates c;

  for (double v : residual_field(cal, g)) c.el_residual = std::max(c.el_residual, std::abs(v));

  const std::vector<double> shifts = edge_shifts(st, u.p);
  WrapTables wt(t.m, max_abs_offset(st));
  const long m = t.m;

  std::vector<double> dual_terms;
  dual_terms.reserve(st.half_offsets.size());
  double layering = 0.0;
  std::vector<double> interior;  // non-saturated dual entries of one offset
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    const double w = st.half_weights[e];
    const double ce = shifts[e];
    const float* ze = cal.z.data() + e * n;
    // z sums: saturated entries counted exactly, the thin non-saturated band
    // summed permutation-invariantly, so the value ignores cell labeling
    long saturated = 0;
    interior.clear();
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const long j = wt.x[x + wt.off + d[0]];
        const double L = u.u[x] - u.u[j] - ce;
        layering = std::max(layering, std::abs(std::abs(L) * ze[x] - L) / (1.0 + std::abs(L)));
        if (ze[x] == 1.0f)
          ++saturated;
        else if (ze[x] == -1.0f)
          --saturated;
        else
          interior.push_back(ze[x]);
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off + d[1]] * m, ya = y * m;
        const long xoff = wt.off + d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x, j = yb + wt.x[x + xoff];
          const double L = u.u[i] - u.u[j] - ce;
          layering =
              std::max(layering, std::abs(std::abs(L) * ze[i] - L) / (1.0 + std::abs(L)));
          if (ze[i] == 1.0f)
            ++saturated;
          else if (ze[i] == -1.0f)
            --saturated;
          else
            interior.push_back(ze[i]);
        }
      }
    }
    const double zsum = static_cast<double>(saturated) + accumulate_sorted(interior);
    dual_terms.push_back(-w * zsum * ce);
  }
  c.dual_value = accumulate_sorted(std::move(dual_terms));
  c.dual_gap = primal_energy - c.dual_value;
  c.layering = layering;
  return c;
}

struct PdhgState {
  PeriodicProfile u;
  std::vector<double> ubar;
  Calibration cal;
  std::vector<double> grad;
};

// one preconditioned primal-dual iteration: dual ascent with clamping
// (sigma_e W_e = 1/2), primal descent with the linear forcing term, mean
// projection, over-relaxation 1.0.  The gradient is gathered per cell in a
// fixed offset order so shifted data reproduces shifted iterates bit for bit.
void pdhg_iterate(PdhgState& s, const ForcingField& g, double tau, const WrapTables& wt) {
  const PairStencil& st = *s.cal.stencil;
  const TorusGrid& t = s.u.torus;
  const long n = t.cell_count();
  const long m = t.m;
  const std::vector<double> shifts = edge_shifts(st, s.u.p);

  // pass 1: elementwise dual ascent on every owned pair
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    const double ce = shifts[e];
    float* ze = s.cal.z.data() + e * n;
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const long j = wt.x[x + wt.off + d[0]];
        const double z = ze[x] + 0.5 * (s.ubar[x] - s.ubar[j] - ce);
        ze[x] = static_cast<float>(std::clamp(z, -1.0, 1.0));
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off + d[1]] * m, ya = y * m;
        const long xoff = wt.off + d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x;
          const long j = yb + wt.x[x + xoff];
          const double z = ze[i] + 0.5 * (s.ubar[i] - s.ubar[j] - ce);
          ze[i] = static_cast<float>(std::clamp(z, -1.0, 1.0));
        }
      }
    }
  }

  // pass 2: gradient gather, one fixed-order contribution per offset
  std::fill(s.grad.begin(), s.grad.end(), 0.0);
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    const double w = st.half_weights[e];
    const float* ze = s.cal.z.data() + e * n;
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const long ib = wt.x[x + wt.off - d[0]];
        s.grad[x] += w * (static_cast<double>(ze[x]) - ze[ib]);
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off - d[1]] * m, ya = y * m;
        const long xoff = wt.off - d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x, ib = yb + wt.x[x + xoff];
          s.grad[i] += w * (static_cast<double>(ze[i]) - ze[ib]);
        }
      }
    }
  }

  const double hn = t.cell_volume();
  std::vector<double> unew(n);
  for (long i = 0; i < n; ++i) {
    double gi = s.grad[i];
    if (!g.is_zero()) gi += g.values[i] * hn;
    unew[i] = s.u.u[i] - tau * gi;
  }
  const double mean = accumulate_sorted(std::vector<double>(unew.begin(), unew.end())) / n;
  for (long i = 0; i < n; ++i) unew[i] -= mean;
  for (long i = 0; i < n; ++i) s.ubar[i] = 2.0 * unew[i] - s.u.u[i];
  s.u.u.swap(unew);
}

// z = sign of the affine pair difference; zero-difference pairs start at 0
void init_sign_dual(PdhgState& s, const WrapTables& wt) {
  const PairStencil& st = *s.cal.stencil;
  const TorusGrid& t = s.u.torus;
  const long n = t.cell_count();
  const long m = t.m;
  const std::vector<double> shifts = edge_shifts(st, s.u.p);
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    const double ce = shifts[e];
    float* ze = s.cal.z.data() + e * n;
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const long j = wt.x[x + wt.off + d[0]];
        const double L = s.u.u[x] - s.u.u[j] - ce;
        ze[x] = L > 0 ? 1.0f : (L < 0 ? -1.0f : 0.0f);
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off + d[1]] * m, ya = y * m;
        const long xoff = wt.off + d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x, j = yb + wt.x[x + xoff];
          const double L = s.u.u[i] - s.u.u[j] - ce;
          ze[i] = L > 0 ? 1.0f : (L < 0 ? -1.0f : 0.0f);
        }
      }
    }
  }
}

// Flat pairs (p . d = 0) leave the calibration free; the Euler-Lagrange
// balance there is a linear feasibility problem.  Writing the correction in
// potential form z_e(i) += Phi_i - Phi_j turns it into a nonlocal Laplacian
// system A Phi = -R over the flat offsets, solved by plain CG.  This is a
// warm start only: the primal-dual iteration still certifies the result.
void warm_dual_correction(PdhgState& s, const ForcingField& g, double target,
                          const WrapTables& wt) {
  const PairStencil& st = *s.cal.stencil;
  const TorusGrid& t = s.u.torus;
  const long n = t.cell_count();
  const long m = t.m;

  // full list of flat offsets in fixed order
  std::vector<std::pair<IVec, double>> flat;
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    const IVec& d = st.offsets[i];
    if (s.u.p[0] * d[0] + s.u.p[1] * d[1] == 0) flat.push_back({d, st.weights[i]});
  }
  if (flat.empty()) return;

  auto lap = [&](const std::vector<double>& phi, std::vector<double>& out) {
    for (long i = 0; i < n; ++i) out[i] = 0.0;
    if (t.dim == 1) {
      for (const auto& [d, w] : flat)
        for (long x = 0; x < m; ++x) out[x] += w * (phi[x] - phi[wt.x[x + wt.off + d[0]]]);
    } else {
      for (const auto& [d, w] : flat)
        for (long y = 0; y < m; ++y) {
          const long yb = wt.x[y + wt.off + d[1]] * m, ya = y * m;
          const long xoff = wt.off + d[0];
          for (long x = 0; x < m; ++x)
            out[ya + x] += w * (phi[ya + x] - phi[yb + wt.x[x + xoff]]);
        }
    }
  };
  auto dot_sorted = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> terms(n);
    for (long i = 0; i < n; ++i) terms[i] = a[i] * b[i];
    return accumulate_sorted(std::move(terms));
  };

  std::vector<double> rhs = residual_field(s.cal, g);
  for (double& v : rhs) v = -v;

  std::vector<double> phi(n, 0.0), r = rhs, p = rhs, ap(n);
  double rr = dot_sorted(r, r);
  for (int it = 0; it < 4 * static_cast<int>(std::sqrt(double(n))) + 200; ++it) {
    double rmax = 0.0;
    for (double v : r) rmax = std::max(rmax, std::abs(v));
    if (rmax <= 0.25 * target) break;
    lap(p, ap);
    const double pap = dot_sorted(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (long i = 0; i < n; ++i) phi[i] += alpha * p[i];
    for (long i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    const double rr_new = dot_sorted(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (long i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }

  // fold the potential into the flat half-offsets
  for (std::size_t e = 0; e < st.half_offsets.size(); ++e) {
    const IVec& d = st.half_offsets[e];
    if (s.u.p[0] * d[0] + s.u.p[1] * d[1] != 0) continue;
    float* ze = s.cal.z.data() + e * n;
    if (t.dim == 1) {
      for (long x = 0; x < m; ++x) {
        const double z = ze[x] + (phi[x] - phi[wt.x[x + wt.off + d[0]]]);
        ze[x] = static_cast<float>(std::clamp(z, -1.0, 1.0));
      }
    } else {
      for (long y = 0; y < m; ++y) {
        const long yb = wt.x[y + wt.off + d[1]] * m, ya = y * m;
        const long xoff = wt.off + d[0];
        for (long x = 0; x < m; ++x) {
          const long i = ya + x, j = yb + wt.x[x + xoff];
          const double z = ze[i] + (phi[i] - phi[j]);
          ze[i] = static_cast<float>(std::clamp(z, -1.0, 1.0));
        }
      }
    }
  }
}

// piecewise-constant periodic prolongation from mc to m
std::vector<double> prolong(const std::vector<double>& coarse, int mc, int m, int dim) {
  std::vector<double> fine(dim == 1 ? m : static_cast<long>(m) * m);
  if (dim == 1) {
    for (long x = 0; x < m; ++x) fine[x] = coarse[(x * mc) / m];
  } else {
    for (long y = 0; y < m; ++y)
      for (long x = 0; x < m; ++x)
        fine[y * static_cast<long>(m) + x] = coarse[((y * mc) / m) * mc + (x * mc) / m];
  }
  return fine;
}

CellSolution solve_single_level(const IVec& p, const KernelSpec& kernel, int m, double rcut,
                                const ForcingField& g, const SolveOptions& opts,
                                const std::vector<double>* warm_u) {
  const auto t0 = std::chrono::steady_clock::now();
  auto st = stencil_cache(kernel, m, rcut);
  TorusGrid torus(kernel.dim, m);
  WrapTables wt(m, max_abs_offset(*st));

  PdhgState s;
  s.u = PeriodicProfile(torus, p);
  if (warm_u) {
    s.u.u = *warm_u;
    s.u.recenter();
  }
  s.ubar = s.u.u;
  s.cal.stencil = st;
  s.cal.torus = torus;
  s.cal.p = p;
  s.cal.z.assign(st->half_offsets.size() * torus.cell_count(), 0.0f);
  s.grad.assign(torus.cell_count(), 0.0);
  init_sign_dual(s, wt);

  const PeriodicProfile zero_profile(torus, p);
  const double e0 = cell_energy(zero_profile, *st, g);
  const double tol = opts.tol_factor * std::max(e0, 1e-30);
  const double tau = 1.0 / std::max(st->weight_sum, 1e-300);

  if (!g.is_zero()) warm_dual_correction(s, g, tol, wt);

  SolveReport rep;
  rep.zero_energy = e0;
  rep.tolerance = tol;
  rep.g_lq_norm = g.is_zero() ? 0.0 : g.lq_norm(kernel.dim / (2.0 * kernel.s1));

  PeriodicProfile best = s.u;
  double best_energy = cell_energy(s.u, *st, g);

  long it = 0;
  bool converged = false;
  while (true) {
    const double cur = cell_energy(s.u, *st, g);
    if (cur < best_energy) {
      best_energy = cur;
      best = s.u;
    }
    Certificates c = certify(best, s.cal, g, best_energy);
    rep.checkpoints.push_back({it, best_energy, c.el_residual, c.dual_gap});
    if (opts.log_every > 0)
      std::fprintf(stderr, "[cell m=%d] it=%ld E=%.12g res=%.3e gap=%.3e\n", m, it,
                   best_energy, c.el_residual, c.dual_gap);
    if (std::max(c.el_residual, std::abs(c.dual_gap)) <= tol) {
      rep.el_residual = c.el_residual;
      rep.dual_gap = c.dual_gap;
      rep.layering_defect = c.layering;
      converged = true;
      break;
    }
    if (it >= opts.max_iter) {
      rep.el_residual = c.el_residual;
      rep.dual_gap = c.dual_gap;
      rep.layering_defect = c.layering;
      rep.status = "unconverged";
      break;
    }
    const long burst = std::min(opts.checkpoint_every, opts.max_iter - it);
    for (long b = 0; b < burst; ++b) pdhg_iterate(s, g, tau, wt);
    it += burst;
  }
  rep.iterations = it;
  rep.primal_energy = best_energy;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  (void)converged;

  CellSolution sol;
  sol.u = best;
  sol.z = std::move(s.cal);
  sol.report = std::move(rep);
  return sol;
}

}  // namespace

CellSolution solve_cell_problem(const IVec& p, const KernelSpec& kernel, int m, double rcut,
                                const ForcingField& g, const SolveOptions& opts) {
  kernel.check_parameters();
  if (g.torus.m != m || g.torus.dim != kernel.dim)
    throw ValidationError("solve_cell_problem: forcing grid must match (dim, m)");

  // coarse-to-fine warm start; the fine level still certifies on its own
  if (opts.cascade && m >= 32 && m % 2 == 0 && !g.is_zero()) {
    const int mc = m / 2;
    TorusGrid tc(kernel.dim, mc);
    // block-average restriction of the forcing keeps the zero mean
    std::vector<double> gcv(tc.cell_count(), 0.0);
    const TorusGrid tf(kernel.dim, m);
    for (long i = 0; i < tf.cell_count(); ++i) {
      const IVec k = tf.coords(i);
      const long ci = tc.index(ivec(k[0] / 2, k[1] / 2));
      gcv[ci] += g.values[i] / (kernel.dim == 1 ? 2.0 : 4.0);
    }
    ForcingField gc;
    gc.torus = tc;
    gc.values = std::move(gcv);
    gc.amplitude = g.amplitude;
    for (double v : gc.values) gc.linf = std::max(gc.linf, std::abs(v));
    SolveOptions copts = opts;
    copts.max_iter = std::min<long>(opts.max_iter, 20000);
    CellSolution coarse = solve_cell_problem(p, kernel, mc, rcut, gc, copts);
    const std::vector<double> warm = prolong(coarse.u.u, mc, m, kernel.dim);
    return solve_single_level(p, kernel, m, rcut, g, opts, &warm);
  }
  return solve_single_level(p, kernel, m, rcut, g, opts, nullptr);
}

double el_residual(const Calibration& z, const ForcingField& g) {
  double m = 0.0;
  for (double v : residual_field(z, g)) m = std::max(m, std::abs(v));
  return m;
}

double layering_defect(const PeriodicProfile& u, const Calibration& z) {
  return certify(u, z, ForcingField::zero(u.torus), 0.0).layering;
}

double dual_value(const Calibration& z) {
  return certify(PeriodicProfile(z.torus, z.p), z, ForcingField::zero(z.torus), 0.0).dual_value;
}

double subgradient_check(const PeriodicProfile& u, const PairStencil& st,
                         const ForcingField& g, int trials, std::uint64_t seed) {
  const double base = cell_energy(u, st, g);
  const double scale = std::max(1.0, std::abs(base));
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    PeriodicProfile eta(u.torus, u.p);
    for (double& x : eta.u) x = rng.next_in(-1.0, 1.0);
    eta.recenter();
    for (double sigma : {1e-3, 1e-2, 1e-1}) {
      PeriodicProfile v = u;
      for (long i = 0; i < u.torus.cell_count(); ++i) v.u[i] += sigma * eta.u[i];
      v.recenter();
      const double margin = cell_energy(v, st, g) - base + 1e-10 * scale;
      worst = std::min(worst, margin);
    }
  }
  return worst;
}

}  // namespace nlhomog
