#include "nlhomog/plateau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

namespace nlhomog {

namespace {

// ------------------------------------------------------------------ Dinic

class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int u, int v, std::int64_t cap, std::int64_t rcap) {
    to_.push_back(v);
    nxt_.push_back(head_[u]);
    cap_.push_back(cap);
    head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u);
    nxt_.push_back(head_[v]);
    cap_.push_back(rcap);
    head_[v] = static_cast<int>(to_.size()) - 1;
  }

  std::int64_t run(int s, int t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      it_ = head_;
      std::int64_t f;
      while ((f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) > 0) flow += f;
    }
    return flow;
  }

  // source-side-maximal minimum cut: a node joins the sink side only if it
  // still reaches t in the residual graph
  std::vector<bool> source_side_largest(int t) {
    const int n = static_cast<int>(head_.size());
    std::vector<bool> reaches_t(n, false);
    std::vector<int> stack = {t};
    reaches_t[t] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      // residual capacity of the arc u -> v sits on the partner edge e ^ 1
      for (int e = head_[v]; e != -1; e = nxt_[e]) {
        const int u = to_[e];
        if (!reaches_t[u] && cap_[e ^ 1] > 0) {
          reaches_t[u] = true;
          stack.push_back(u);
        }
      }
    }
    std::vector<bool> source_side(n);
    for (int i = 0; i < n; ++i) source_side[i] = !reaches_t[i];
    return source_side;
  }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = nxt_[e])
        if (cap_[e] > 0 && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          q.push(to_[e]);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t lim) {
    if (u == t) return lim;
    for (int& e = it_[u]; e != -1; e = nxt_[e]) {
      const int v = to_[e];
      if (cap_[e] > 0 && level_[v] == level_[u] + 1) {
        const std::int64_t f = dfs(v, t, std::min(lim, cap_[e]));
        if (f > 0) {
          cap_[e] -= f;
          cap_[e ^ 1] += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<int> head_, to_, nxt_, level_, it_;
  std::vector<std::int64_t> cap_;
};

// --------------------------------------------------- problem decomposition

struct CutProblem {
  std::vector<IVec> free_cells;                  // window order
  std::vector<double> cost0, cost1;              // unary costs per free cell
  std::vector<std::array<long, 2>> pair_idx;     // free-free pairs (indices)
  std::vector<double> pair_w;
  double max_cap = 0.0;
};

CutProblem decompose(const LatticeSet& exterior, const Box& omega, const PairStencil& st,
                     const ForcingField& g, PlateauFunctional fn) {
  const WindowGrid& w = exterior.win;
  if (w.m != st.m || w.dim != st.dim)
    throw ValidationError("plateau: exterior window and stencil grids differ");

  CutProblem p;
  std::vector<long> free_index(w.cell_count(), -1);
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (omega.contains(w.center(k))) {
        free_index[w.index(k)] = static_cast<long>(p.free_cells.size());
        p.free_cells.push_back(k);
      }
    }
  if (p.free_cells.empty()) throw ValidationError("plateau: omega holds no free cells");

  // forcing domain: all of omega for J, the unit-cube cover for F
  std::vector<std::uint8_t> in_forcing(p.free_cells.size(), fn == PlateauFunctional::J);
  if (fn == PlateauFunctional::F) {
    const CubeCover cover = enumerate_unit_cubes(w, omega, 1.0);
    for (std::size_t i = 0; i < p.free_cells.size(); ++i) {
      const DVec c = w.center(p.free_cells[i]);
      bool in = false;
      for (const IVec& k : cover.cubes) {
        const bool inx = c[0] > k[0] && c[0] < k[0] + 1;
        const bool iny = w.dim == 1 || (c[1] > k[1] && c[1] < k[1] + 1);
        if (inx && iny) {
          in = true;
          break;
        }
      }
      in_forcing[i] = in;
    }
  }

  const double hn = w.cell_volume();
  p.cost0.assign(p.free_cells.size(), 0.0);
  p.cost1.assign(p.free_cells.size(), 0.0);
  for (std::size_t i = 0; i < p.free_cells.size(); ++i) {
    const IVec& c = p.free_cells[i];
    Accumulator pay_in, pay_out;
    for (std::size_t j = 0; j < st.offsets.size(); ++j) {
      const IVec& d = st.offsets[j];
      const IVec nb = ivec(c[0] + d[0], c[1] + d[1]);
      const long fi = w.contains(nb) ? free_index[w.index(nb)] : -1;
      if (fi >= 0) {
        // free-free pair, record once per unordered pair
        if (d[0] > 0 || (d[0] == 0 && d[1] > 0)) {
          p.pair_idx.push_back({static_cast<long>(i), fi});
          p.pair_w.push_back(st.weights[j]);
          p.max_cap = std::max(p.max_cap, st.weights[j]);
        }
      } else {
        if (exterior.contains(nb))
          pay_out.add(st.weights[j]);  // disagreement when the free cell is 0
        else
          pay_in.add(st.weights[j]);   // disagreement when the free cell is 1
      }
    }
    p.cost0[i] = pay_out.value();
    p.cost1[i] = pay_in.value();
    if (in_forcing[i] && !g.is_zero()) p.cost1[i] += g.at(c) * hn;
    p.max_cap = std::max({p.max_cap, std::abs(p.cost0[i]), std::abs(p.cost1[i])});
  }
  return p;
}

double evaluate_cut(const CutProblem& p, const std::vector<bool>& x) {
  Accumulator acc;
  for (std::size_t e = 0; e < p.pair_idx.size(); ++e)
    if (x[p.pair_idx[e][0]] != x[p.pair_idx[e][1]]) acc.add(p.pair_w[e]);
  for (std::size_t i = 0; i < p.cost0.size(); ++i) acc.add(x[i] ? p.cost1[i] : p.cost0[i]);
  return acc.value();
}

PlateauResult assemble(const LatticeSet& exterior, const Box& omega, const PairStencil& st,
                       const ForcingField& g, PlateauFunctional fn, const CutProblem& p,
                       const std::vector<bool>& labels, double quantum) {
  PlateauResult r;
  r.minimizer = exterior;
  for (std::size_t i = 0; i < p.free_cells.size(); ++i)
    r.minimizer.set_bit(p.free_cells[i], labels[i]);
  r.minimizer.label = "plateau-minimizer";
  r.free_cells = static_cast<long>(p.free_cells.size());
  r.objective = evaluate_cut(p, labels);
  const EnergyBreakdown b = fn == PlateauFunctional::J
                                ? functional_J(r.minimizer, omega, st, g)
                                : functional_F(r.minimizer, omega, st, g);
  r.optimum = b.total();
  r.rounding_bound = quantum * (p.pair_idx.size() + 2.0 * p.cost0.size());
  const double scale = std::max(1.0, std::abs(r.optimum));
  if (std::abs(r.optimum - r.objective) > 1e-9 * scale)
    throw ValidationError("plateau: cut objective and energy evaluation disagree");
  return r;
}

}  // namespace

PlateauResult solve_plateau(const LatticeSet& exterior, const Box& omega,
                            const PairStencil& st, const ForcingField& g,
                            PlateauFunctional fn) {
  const CutProblem p = decompose(exterior, omega, st, g, fn);
  const long nf = static_cast<long>(p.free_cells.size());

  // integer capacities at 2^32 resolution relative to the largest magnitude
  const double quantum = std::max(p.max_cap, 1e-300) / 4294967296.0;
  const double inv_q = 1.0 / quantum;
  double total_cap = 0.0;
  for (double w : p.pair_w) total_cap += 2.0 * w;
  for (std::size_t i = 0; i < p.cost0.size(); ++i)
    total_cap += std::abs(p.cost0[i]) + std::abs(p.cost1[i]);
  if (total_cap * inv_q > 4.5e18)
    throw ResourceError(
        "plateau: integer capacities overflow; use a smaller window or coarser grid");

  const int S = static_cast<int>(nf), T = static_cast<int>(nf) + 1;
  MaxFlow mf(static_cast<int>(nf) + 2);
  for (std::size_t e = 0; e < p.pair_idx.size(); ++e) {
    const std::int64_t c = llround(p.pair_w[e] * inv_q);
    if (c > 0)
      mf.add_edge(static_cast<int>(p.pair_idx[e][0]), static_cast<int>(p.pair_idx[e][1]), c, c);
  }
  for (long i = 0; i < nf; ++i) {
    // normalize the unary pair (cost0, cost1) to nonnegative caps
    const double base = std::min(p.cost0[i], p.cost1[i]);
    const std::int64_t c_s = llround((p.cost0[i] - base) * inv_q);  // cut when x_i = 0
    const std::int64_t c_t = llround((p.cost1[i] - base) * inv_q);  // cut when x_i = 1
    if (c_s > 0) mf.add_edge(S, static_cast<int>(i), c_s, 0);
    if (c_t > 0) mf.add_edge(static_cast<int>(i), T, c_t, 0);
  }
  mf.run(S, T);
  std::vector<bool> side = mf.source_side_largest(T);
  std::vector<bool> labels(nf);
  for (long i = 0; i < nf; ++i) labels[i] = side[i];
  return assemble(exterior, omega, st, g, fn, p, labels, quantum);
}

PlateauResult brute_force_plateau(const LatticeSet& exterior, const Box& omega,
                                  const PairStencil& st, const ForcingField& g,
                                  PlateauFunctional fn) {
  const CutProblem p = decompose(exterior, omega, st, g, fn);
  const long nf = static_cast<long>(p.free_cells.size());
  if (nf > 20) throw ResourceError("brute_force_plateau: more than 20 free cells");

  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  std::vector<bool> x(nf);
  const std::uint64_t top = 1ull << nf;
  for (std::uint64_t mask = 0; mask < top; ++mask) {
    for (long i = 0; i < nf; ++i) x[i] = (mask >> i) & 1ull;
    const double v = evaluate_cut(p, x);
    if (v < best) {
      best = v;
      best_mask = mask;
    }
    // ties keep the first mask seen, the lexicographically smallest indicator
  }
  std::vector<bool> labels(nf);
  for (long i = 0; i < nf; ++i) labels[i] = (best_mask >> i) & 1ull;
  return assemble(exterior, omega, st, g, fn, p, labels, 0.0);
}

ClassAReport classA_window_check(const LatticeSet& e, const std::vector<Box>& windows,
                                 const PairStencil& st, const ForcingField& g) {
  ClassAReport rep;
  for (const Box& box : windows) {
    const double je = functional_J(e, box, st, g).total();
    const PlateauResult r = solve_plateau(e, box, st, g, PlateauFunctional::J);
    const double gap = je - r.optimum;
    rep.gaps.push_back(gap);
    rep.worst_gap = std::max(rep.worst_gap, gap);
  }
  return rep;
}

}  // namespace nlhomog
