#pragma once

#include <vector>

#include "nlhomog/common.hpp"

namespace nlhomog {

// Periodic discretization of the unit cell Q = (0,1)^n with m cells per axis.
// Cell centers sit at (k + 1/2) h, h = 1/m; all index arithmetic wraps mod m.
struct TorusGrid {
  int dim = 1;
  int m = 8;

  TorusGrid() = default;
  TorusGrid(int dim_, int m_) : dim(dim_), m(m_) {
    if (dim != 1 && dim != 2) throw ValidationError("grid: dim must be 1 or 2");
    if (m < 8) throw ValidationError("grid: m must be at least 8");
  }

  double h() const { return 1.0 / m; }
  double cell_volume() const { return dim == 1 ? h() : h() * h(); }
  long cell_count() const { return dim == 1 ? m : static_cast<long>(m) * m; }

  long wrap1(long k) const {
    long r = k % m;
    return r < 0 ? r + m : r;
  }
  long index(const IVec& k) const {
    return dim == 1 ? wrap1(k[0]) : wrap1(k[1]) * m + wrap1(k[0]);
  }
  IVec coords(long idx) const {
    return dim == 1 ? ivec(idx) : ivec(idx % m, idx / m);
  }
  DVec center(const IVec& k) const {
    return dvec((k[0] + 0.5) * h(), dim == 2 ? (k[1] + 0.5) * h() : 0.0);
  }
};

// Finite, non-periodic index box [lo, hi) per axis on the same lattice.
struct WindowGrid {
  int dim = 1;
  int m = 8;
  IVec lo = ivec(0);
  IVec hi = ivec(8, 1);

  WindowGrid() = default;
  WindowGrid(int dim_, int m_, IVec lo_, IVec hi_) : dim(dim_), m(m_), lo(lo_), hi(hi_) {
    if (dim != 1 && dim != 2) throw ValidationError("window: dim must be 1 or 2");
    if (m < 8) throw ValidationError("window: m must be at least 8");
    if (dim == 1) {
      lo[1] = 0;
      hi[1] = 1;
    }
    for (int a = 0; a < 2; ++a)
      if (hi[a] <= lo[a]) throw ValidationError("window: empty extent");
  }

  // window covering the physical box [a, b) per axis; bounds must be h-aligned
  static WindowGrid from_physical(int dim, int m, DVec a, DVec b);

  double h() const { return 1.0 / m; }
  double cell_volume() const { return dim == 1 ? h() : h() * h(); }
  long nx() const { return hi[0] - lo[0]; }
  long ny() const { return hi[1] - lo[1]; }
  long cell_count() const { return nx() * ny(); }
  bool contains(const IVec& k) const {
    return k[0] >= lo[0] && k[0] < hi[0] && k[1] >= lo[1] && k[1] < hi[1];
  }
  long index(const IVec& k) const { return (k[1] - lo[1]) * nx() + (k[0] - lo[0]); }
  IVec coords(long idx) const {
    return ivec(lo[0] + idx % nx(), lo[1] + idx / nx());
  }
  DVec center(const IVec& k) const {
    return dvec((k[0] + 0.5) * h(), dim == 2 ? (k[1] + 0.5) * h() : 0.0);
  }
  WindowGrid dilated(long cells) const {
    IVec l = lo, u = hi;
    for (int a = 0; a < dim; ++a) {
      l[a] -= cells;
      u[a] += cells;
    }
    return WindowGrid(dim, m, l, u);
  }
};

// Axis-aligned physical box [a, b) per axis; the only domain shape supported.
struct Box {
  DVec a = dvec(0.0);
  DVec b = dvec(1.0, 1.0);
  int dim = 1;

  Box() = default;
  Box(int dim_, DVec a_, DVec b_) : a(a_), b(b_), dim(dim_) {
    if (dim == 1) {
      a[1] = 0.0;
      b[1] = 1.0;
    }
    for (int c = 0; c < dim; ++c)
      if (!(b[c] > a[c])) throw ValidationError("box: empty extent");
  }
  bool contains(const DVec& x) const {
    bool in = x[0] >= a[0] && x[0] < b[0];
    if (dim == 2) in = in && x[1] >= a[1] && x[1] < b[1];
    return in;
  }
  double volume() const { return dim == 1 ? b[0] - a[0] : (b[0] - a[0]) * (b[1] - a[1]); }
};

// Integer translates eps (k + Q) fully contained in a box, at scale eps.
struct CubeCover {
  double epsilon = 1.0;
  std::vector<IVec> cubes;  // each entry k denotes the cube eps(k + Q)
};

// Exact enumeration; eps must be an integer multiple of h or an integer
// divisor multiple situation such that cube faces land on cell boundaries.
CubeCover enumerate_unit_cubes(const WindowGrid& window, const Box& omega, double epsilon);

}  // namespace nlhomog
