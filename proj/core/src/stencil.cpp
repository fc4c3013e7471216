#include "nlhomog/stencil.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace nlhomog {

namespace {

double tent(double u, double h) { return std::max(h - std::abs(u), 0.0); }

// (h - |x - c|)_+ regrouped so that x << c does not cancel x away; the
// singular integration pieces sample x down to ~1e-300
double tent_at(double x, double c, double h) {
  const double v = x < c ? (h - c) + x : (h + c) - x;
  return std::max(v, 0.0);
}

// symmetric Gauss-Legendre on [lo, hi]; boost stores only the nonnegative
// abscissae, with a zero node present for odd point counts
template <int N, typename F>
double gauss_on(F&& f, double lo, double hi) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double hw = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
  double acc = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    if (xs[q] == 0.0)
      acc += ws[q] * f(mid);
    else
      acc += ws[q] * (f(mid - hw * xs[q]) + f(mid + hw * xs[q]));
  }
  return acc * hw;
}

// ---------- 1D weight: piecewise integral with explicit breakpoints ----------

double pair_weight_1d(const KernelSpec& k, double h, long g) {
  const double c = std::abs(g) * h;
  double lo = c - h, hi = c + h;
  lo = std::max(lo, 0.0);
  const double sup = k.support_radius();
  if (std::isfinite(sup)) hi = std::min(hi, sup);
  if (hi <= lo) return 0.0;

  std::vector<double> pts = {lo, hi, c};
  for (double b : k.breakpoints())
    if (b > lo && b < hi) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  boost::math::quadrature::tanh_sinh<double> ts;
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    if (pts[i] < 0.25 * h && std::abs(g) == 1) {
      // the tent rises linearly from the kernel singularity: fuse one power
      auto f = [&](double t) { return k.eval_scaled(t, 1.0) * (tent_at(t, c, h) / t); };
      w += ts.integrate(f, pts[i], pts[i + 1], 1e-11);
    } else {
      auto f = [&](double t) { return k.eval(t) * tent_at(t, c, h); };
      w += ts.integrate(f, pts[i], pts[i + 1], 1e-11);
    }
  }
  return w;
}

// ---------- 2D weight: radial outer integral, angular inner integral ----------
//
// W = int_0^inf K(r) G(r) dr with G(r) = r * int tent(r cos - a h) tent(r sin - b h) dtheta,
// where the angular integral runs over angles whose point lies inside the
// tent support rectangle.  The angular integrand is piecewise smooth between
// angles where the circle crosses one of the six lattice lines bounding or
// splitting the rectangle, so those crossings are located explicitly.

struct ClassRect {
  double x0, xm, x1;  // ah-h, ah, ah+h
  double y0, ym, y1;  // bh-h, bh, bh+h
  double h;
};

// angular integral of the tent product at radius r, without the kernel
// factor and without the r Jacobian
double angular_tent_mass(const ClassRect& rc, double r) {
  if (r <= 0.0) return 0.0;

  // candidate breakpoints in theta: crossings with x = const and y = const lines
  double crit[32];
  int nc = 0;
  auto add = [&](double th) { crit[nc++] = th; };
  add(0.0);
  add(2.0 * M_PI);
  const double xs[3] = {rc.x0, rc.xm, rc.x1};
  const double ys[3] = {rc.y0, rc.ym, rc.y1};
  for (double x : xs) {
    if (std::abs(x) <= r) {
      double a = std::acos(std::clamp(x / r, -1.0, 1.0));
      add(a);
      add(2.0 * M_PI - a);
    }
  }
  for (double y : ys) {
    if (std::abs(y) <= r) {
      double a = std::asin(std::clamp(y / r, -1.0, 1.0));
      if (a < 0) a += 2.0 * M_PI;
      add(a);
      double b = M_PI - std::asin(std::clamp(y / r, -1.0, 1.0));
      add(b);
    }
  }
  std::sort(crit, crit + nc);

  double total = 0.0;
  for (int i = 0; i + 1 < nc; ++i) {
    const double t0 = crit[i], t1 = crit[i + 1];
    if (t1 - t0 < 1e-15) continue;
    const double tm = 0.5 * (t0 + t1);
    const double px = r * std::cos(tm), py = r * std::sin(tm);
    if (!(px > rc.x0 && px < rc.x1 && py > rc.y0 && py < rc.y1)) continue;
    auto f = [&](double th) {
      const double x = r * std::cos(th), y = r * std::sin(th);
      return tent_at(x, rc.xm, rc.h) * tent_at(y, rc.ym, rc.h);
    };
    total += gauss_on<10>(f, t0, t1);
  }
  return total;
}

double pair_weight_2d(const KernelSpec& k, double h, long a, long b) {
  ClassRect rc;
  rc.h = h;
  rc.xm = a * h;
  rc.x0 = rc.xm - h;
  rc.x1 = rc.xm + h;
  rc.ym = b * h;
  rc.y0 = rc.ym - h;
  rc.y1 = rc.ym + h;

  // radial range of the support rectangle
  const double rmin_x = rc.x0 > 0 ? rc.x0 : (rc.x1 < 0 ? -rc.x1 : 0.0);
  const double rmin_y = rc.y0 > 0 ? rc.y0 : (rc.y1 < 0 ? -rc.y1 : 0.0);
  double rmin = std::hypot(rmin_x, rmin_y);
  double rmax = 0.0;
  for (double x : {rc.x0, rc.x1})
    for (double y : {rc.y0, rc.y1}) rmax = std::max(rmax, std::hypot(x, y));

  const double sup = k.support_radius();
  if (std::isfinite(sup)) rmax = std::min(rmax, sup);
  if (rmax <= rmin) return 0.0;

  // radial breakpoints: lattice point distances, line tangency radii,
  // kernel breakpoints
  std::vector<double> pts;
  pts.push_back(rmin);
  pts.push_back(rmax);
  for (double x : {rc.x0, rc.xm, rc.x1})
    for (double y : {rc.y0, rc.ym, rc.y1}) pts.push_back(std::hypot(x, y));
  for (double x : {rc.x0, rc.xm, rc.x1}) pts.push_back(std::abs(x));
  for (double y : {rc.y0, rc.ym, rc.y1}) pts.push_back(std::abs(y));
  for (double bp : k.breakpoints()) pts.push_back(bp);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(),
                           [&](double r) { return r < rmin || r > rmax; }),
            pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-15; }),
            pts.end());

  boost::math::quadrature::tanh_sinh<double> ts;
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double r0 = pts[i], r1 = pts[i + 1];
    if (r1 - r0 < 1e-16) continue;
    if (r0 < 1e-3 * h && a <= 1 && b <= 1) {
      // piece touching the kernel singularity; the angular mass vanishes at
      // least linearly there, so fuse the Jacobian and one extra power
      auto f = [&](double r) {
        return k.eval_scaled(r, 2.0) * (angular_tent_mass(rc, r) / r);
      };
      w += ts.integrate(f, r0, r1, 1e-11);
    } else {
      auto f = [&](double r) { return k.eval(r) * angular_tent_mass(rc, r) * r; };
      w += gauss_on<15>(f, r0, r1);
    }
  }
  return w;
}

}  // namespace

double midpoint_weight(const KernelSpec& k, int m, const IVec& d) {
  const double h = 1.0 / m;
  const double r = norm(d) * h;
  if (r <= 0.0) return 0.0;
  double kr;
  try {
    kr = k.eval(r);
  } catch (const std::domain_error&) {
    return 0.0;
  }
  const double cell = k.dim == 1 ? h : h * h;  // h^n
  return cell * cell * kr;                     // h^{2n} K(|d| h)
}

double pair_weight(const KernelSpec& k, int m, const IVec& d) {
  const double h = 1.0 / m;
  if (k.dim == 1) return pair_weight_1d(k, h, std::abs(d[0]));
  return pair_weight_2d(k, h, std::abs(d[0]), std::abs(d[1]));
}

double default_rcut(const KernelSpec& k) {
  const double sup = k.support_radius();
  if (std::isfinite(sup)) return sup;
  const double target = 1e-4 * first_moment(k);
  double lo = k.delta, hi = k.delta;
  while (tail_mass(k, hi) > target) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail_mass(k, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

PairStencil build_stencil(const KernelSpec& k, int m, double rcut) {
  k.check_parameters();
  const double h = 1.0 / m;
  if (!(rcut >= 2.0 * h))
    throw ValidationError("stencil: rcut below two cell widths is degenerate");
  if (!(rcut >= k.delta))
    throw ValidationError("stencil: rcut must cover the kernel near field (rcut >= delta)");

  PairStencil st;
  st.dim = k.dim;
  st.m = m;
  st.rcut = rcut;
  st.kernel = k;

  // offsets reach one tent width past rcut so that every interaction within
  // rcut is carried at full weight; weights vanishing there are pruned below
  const double sqn = std::sqrt(static_cast<double>(k.dim));
  const long dmax = static_cast<long>(std::floor(rcut / h + sqn + 1.0));
  const double approx = k.dim == 1 ? 2.0 * dmax : M_PI * static_cast<double>(dmax) * dmax;
  if (approx > 1e7) {
    std::ostringstream os;
    os << "stencil: ~" << static_cast<long long>(approx)
       << " offsets exceed the desk-scale guard of 1e7";
    throw ResourceError(os.str());
  }

  // weights per symmetry class (a >= b >= 0)
  std::map<std::pair<long, long>, double> cls;
  auto class_weight = [&](long d0, long d1) {
    long a = std::abs(d0), b = std::abs(d1);
    if (a < b) std::swap(a, b);
    auto it = cls.find({a, b});
    if (it != cls.end()) return it->second;
    const double w = pair_weight(k, m, ivec(a, b));
    cls[{a, b}] = w;
    return w;
  };

  // retained: tent support must intersect the ball of radius rcut
  const double reach = rcut / h + sqn;
  const double reach2 = reach * reach + 1e-12;
  std::vector<std::pair<IVec, double>> full;
  if (k.dim == 1) {
    for (long d = -dmax; d <= dmax; ++d) {
      if (d == 0) continue;
      if (static_cast<double>(d) * d > reach2) continue;
      const double w = class_weight(d, 0);
      if (w > 0.0) full.push_back({ivec(d), w});
    }
  } else {
    for (long dy = -dmax; dy <= dmax; ++dy)
      for (long dx = -dmax; dx <= dmax; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy > reach2) continue;
        const double w = class_weight(dx, dy);
        if (w > 0.0) full.push_back({ivec(dx, dy), w});
      }
  }

  std::sort(full.begin(), full.end(), [](const auto& u, const auto& v) {
    return std::tie(u.first[0], u.first[1]) < std::tie(v.first[0], v.first[1]);
  });

  Accumulator wsum, wsq;
  for (const auto& [d, w] : full) {
    st.offsets.push_back(d);
    st.weights.push_back(w);
    wsum.add(w);
    wsq.add(w * w);
    const bool positive = d[0] > 0 || (d[0] == 0 && d[1] > 0);
    if (positive) {
      st.half_offsets.push_back(d);
      st.half_weights.push_back(w);
    }
  }
  st.weight_sum = wsum.value();
  st.weight_sq_sum = wsq.value();

  // interactions within rcut are carried at full weight; the neglected mass
  // is at most the kernel tail beyond rcut
  st.tail_bound = tail_mass(k, rcut);
  return st;
}

namespace {

std::uint64_t table_hash(const std::vector<double>& r, const std::vector<double>& v) {
  std::uint64_t hsh = 1469598103934665603ull;
  auto mix = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    hsh = (hsh ^ bits) * 1099511628211ull;
  };
  for (double x : r) mix(x);
  for (double x : v) mix(x);
  return hsh;
}

}  // namespace

std::shared_ptr<const PairStencil> stencil_cache(const KernelSpec& k, int m, double rcut) {
  using Key = std::tuple<int, int, double, double, double, std::uint64_t, int, double>;
  static std::map<Key, std::shared_ptr<const PairStencil>> cache;
  static std::mutex mu;
  Key key{static_cast<int>(k.kind), k.dim, k.s1, k.s2, k.delta,
          table_hash(k.table_r, k.table_v), m, rcut};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto st = std::make_shared<PairStencil>(build_stencil(k, m, rcut));
  cache[key] = st;
  return st;
}

}  // namespace nlhomog
