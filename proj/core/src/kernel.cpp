#include "nlhomog/kernel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace nlhomog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int dim) {
  // |S^{n-1}|: 2 points for n=1, circle length for n=2.
  return dim == 1 ? 2.0 : 2.0 * M_PI;
}

// integral over the unit sphere of |omega . e|; used by the directional moment.
double sphere_abs_cos(int dim) { return dim == 1 ? 2.0 : 4.0; }

}  // namespace

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::K1: return "K1";
    case KernelKind::K2: return "K2";
    case KernelKind::K3: return "K3";
    case KernelKind::TabulatedRadial: return "tabulated-radial";
  }
  return "?";
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "K1") return KernelKind::K1;
  if (s == "K2") return KernelKind::K2;
  if (s == "K3") return KernelKind::K3;
  if (s == "tabulated" || s == "tabulated-radial") return KernelKind::TabulatedRadial;
  throw ValidationError("unknown kernel kind: " + s);
}

void KernelSpec::check_parameters() const {
  if (dim != 1 && dim != 2) throw ValidationError("kernel: dim must be 1 or 2");
  if (!(s1 > 0.0 && s1 < 0.5)) throw ValidationError("kernel: s1 must lie in (0, 1/2)");
  if (!(s2 > 0.5 && s2 < 1.0)) throw ValidationError("kernel: s2 must lie in (1/2, 1)");
  if (!(delta > 0.0)) throw ValidationError("kernel: delta must be positive");
  if (!(kappa1 <= kappa2)) throw ValidationError("kernel: kappa1 must not exceed kappa2");
  if (!(kappa3 > 0.0)) throw ValidationError("kernel: kappa3 must be positive");
  if (kind == KernelKind::TabulatedRadial) {
    if (table_r.size() < 2 || table_r.size() != table_v.size())
      throw ValidationError("kernel: tabulated kernel needs at least two (r, value) rows");
    for (std::size_t i = 0; i < table_r.size(); ++i) {
      if (table_r[i] <= 0.0) throw ValidationError("kernel: tabulated radii must be positive");
      if (i > 0 && table_r[i] <= table_r[i - 1])
        throw ValidationError("kernel: tabulated radii must be strictly increasing");
    }
  }
}

double KernelSpec::eval(double r) const {
  if (!(r > 0.0)) throw std::domain_error("kernel evaluated at nonpositive distance");
  const double n = dim;
  switch (kind) {
    case KernelKind::K1:
      return r < std::sqrt(n) ? std::pow(r, -n - 2.0 * s1) : 0.0;
    case KernelKind::K2:
      return r < delta ? std::pow(r, -n - 2.0 * s1) : std::exp(-r);
    case KernelKind::K3:
      return r < delta ? std::pow(r, -n - 2.0 * s1) : std::pow(r, -n - 2.0 * s2);
    case KernelKind::TabulatedRadial: {
      if (r < table_r.front() || r > table_r.back())
        throw std::domain_error("tabulated kernel: radius outside table, extrapolation forbidden");
      auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
      std::size_t hi = std::min<std::size_t>(table_r.size() - 1, it - table_r.begin());
      if (hi == 0) hi = 1;
      std::size_t lo = hi - 1;
      const double v0 = table_v[lo], v1 = table_v[hi];
      if (v0 <= 0.0 || v1 <= 0.0) {
        // log-log interpolation needs positive samples; fall back to linear
        const double w = (r - table_r[lo]) / (table_r[hi] - table_r[lo]);
        return (1.0 - w) * v0 + w * v1;
      }
      const double lw = (std::log(r) - std::log(table_r[lo])) /
                        (std::log(table_r[hi]) - std::log(table_r[lo]));
      return std::exp((1.0 - lw) * std::log(v0) + lw * std::log(v1));
    }
  }
  return 0.0;
}

double KernelSpec::eval_scaled(double r, double p) const {
  if (!(r > 0.0)) throw std::domain_error("kernel evaluated at nonpositive distance");
  const double n = dim;
  switch (kind) {
    case KernelKind::K1:
      return r < std::sqrt(n) ? std::pow(r, p - n - 2.0 * s1) : 0.0;
    case KernelKind::K2:
      return r < delta ? std::pow(r, p - n - 2.0 * s1) : std::exp(-r) * std::pow(r, p);
    case KernelKind::K3:
      return r < delta ? std::pow(r, p - n - 2.0 * s1) : std::pow(r, p - n - 2.0 * s2);
    case KernelKind::TabulatedRadial:
      return eval(r) * std::pow(r, p);
  }
  return 0.0;
}

double KernelSpec::support_radius() const {
  switch (kind) {
    case KernelKind::K1: return std::sqrt(static_cast<double>(dim));
    case KernelKind::TabulatedRadial: return table_r.back();
    default: return kInf;
  }
}

std::vector<double> KernelSpec::breakpoints() const {
  switch (kind) {
    case KernelKind::K1: return {std::sqrt(static_cast<double>(dim))};
    case KernelKind::K2:
    case KernelKind::K3: return {delta};
    case KernelKind::TabulatedRadial: return table_r;
  }
  return {};
}

KernelSpec KernelSpec::k1(int dim, double s, double delta_decl) {
  KernelSpec k;
  k.kind = KernelKind::K1;
  k.dim = dim;
  k.s1 = s;
  k.s2 = 0.75;
  const double sqn = std::sqrt(static_cast<double>(dim));
  k.delta = delta_decl > 0.0 ? delta_decl : sqn;
  k.kappa1 = 1.0;
  // upper envelope must cover r in (1, sqrt n) where the min switches branch
  k.kappa2 = std::pow(static_cast<double>(dim), k.s2 - k.s1);
  k.kappa3 = std::pow(sqn, -static_cast<double>(dim) - 2.0 * s);
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::k2(int dim, double s, double delta) {
  KernelSpec k;
  k.kind = KernelKind::K2;
  k.dim = dim;
  k.s1 = s;
  k.s2 = 0.75;
  k.delta = delta;
  k.kappa1 = 1.0;
  k.kappa2 = 1.0;  // callers typically validate and tighten via measured ratios
  k.kappa3 = 1e-6;
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::k3(int dim, double s, double S, double delta) {
  KernelSpec k;
  k.kind = KernelKind::K3;
  k.dim = dim;
  k.s1 = s;
  k.s2 = S;
  k.delta = delta;
  k.kappa1 = 1.0;
  // for delta <= r < 1 the display value r^{-n-2S} exceeds r^{-n-2s1} by r^{2s1-2S}
  k.kappa2 = delta < 1.0 ? std::pow(delta, 2.0 * (s - S)) : 1.0;
  const double sqn = std::sqrt(static_cast<double>(dim));
  k.kappa3 = sqn >= delta ? std::pow(sqn, -static_cast<double>(dim) - 2.0 * S)
                          : std::pow(sqn, -static_cast<double>(dim) - 2.0 * s);
  k.check_parameters();
  return k;
}

KernelSpec KernelSpec::tabulated(int dim, std::vector<double> r, std::vector<double> v,
                                 double s1, double s2, double delta) {
  KernelSpec k;
  k.kind = KernelKind::TabulatedRadial;
  k.dim = dim;
  k.s1 = s1;
  k.s2 = s2;
  k.delta = delta;
  k.table_r = std::move(r);
  k.table_v = std::move(v);
  k.check_parameters();
  return k;
}

namespace {

// piecewise radial integral of f(r) over (0, +inf), splitting at the kernel's
// breakpoints; endpoint singularities and infinite tails get dedicated rules.
double radial_integral(const KernelSpec& k, const std::function<double(double)>& f,
                       double lo, double rel_tol) {
  std::vector<double> cuts = k.breakpoints();
  const double sup = k.support_radius();
  std::vector<double> pts;
  pts.push_back(lo);
  for (double c : cuts)
    if (c > lo && (std::isfinite(sup) ? c <= sup : true)) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double total = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += ts.integrate(f, pts[i], pts[i + 1], rel_tol);

  const double last = pts.back();
  if (std::isfinite(sup)) {
    if (sup > last) total += ts.integrate(f, last, sup, rel_tol);
  } else {
    boost::math::quadrature::exp_sinh<double> es;
    auto shifted = [&](double t) { return f(last + t); };
    total += es.integrate(shifted, rel_tol);
  }
  return total;
}

}  // namespace

double first_moment(const KernelSpec& k, double rel_tol) {
  const double n = k.dim;
  auto f = [&](double r) { return k.eval_scaled(r, n); };
  double val = sphere_area(k.dim) * radial_integral(k, f, 0.0, rel_tol);
  if (!std::isfinite(val)) throw ValidationError("kernel first moment did not converge");
  return val;
}

double tail_mass(const KernelSpec& k, double rcut, double rel_tol) {
  if (rcut <= 0.0) throw std::domain_error("tail_mass: cutoff must be positive");
  const double sup = k.support_radius();
  if (std::isfinite(sup) && rcut >= sup) return 0.0;
  const double n = k.dim;
  auto f = [&](double r) { return k.eval_scaled(r, n - 1.0); };
  return sphere_area(k.dim) * radial_integral(k, f, rcut, rel_tol);
}

double directional_first_moment(const KernelSpec& k, double rel_tol) {
  const double n = k.dim;
  auto f = [&](double r) { return k.eval_scaled(r, n); };
  return sphere_abs_cos(k.dim) * radial_integral(k, f, 0.0, rel_tol);
}

ValidationReport validate_assumptions(const KernelSpec& k, int sample_count) {
  if (sample_count < 100) throw ValidationError("validate_assumptions: need at least 100 samples");
  k.check_parameters();

  ValidationReport rep;
  const double n = k.dim;
  const double sqn = std::sqrt(n);
  const double sup = k.support_radius();

  double r_lo = 1e-9 * std::min(1.0, k.delta);
  double r_hi = std::isfinite(sup) ? sup : std::max({sqn, 4.0 * k.delta, 2.0}) * 64.0;
  if (k.kind == KernelKind::TabulatedRadial) {
    r_lo = k.table_r.front();
    r_hi = k.table_r.back();
  }

  auto update = [](ValidationClause& c, double r, double margin) {
    if (margin < c.worst_margin || (c.pass && margin < 0.0)) {
      c.worst_radius = r;
      c.worst_margin = std::min(margin, c.worst_margin);
    }
    if (margin < 0.0) c.pass = false;
  };

  const double tol = 1e-12;
  const double lstep = std::log(r_hi / r_lo) / (sample_count - 1);
  std::vector<double> samples;
  samples.reserve(sample_count + k.table_r.size());
  for (int i = 0; i < sample_count; ++i) samples.push_back(r_lo * std::exp(lstep * i));
  // tabulated kernels: the nodes themselves are the natural witnesses
  for (double r : k.table_r) samples.push_back(r);
  double measured_inf = kInf;
  for (double r : samples) {
    double val;
    try {
      val = k.eval(r);
    } catch (const std::domain_error&) {
      continue;
    }
    update(rep.nonnegative, r, val);
    const double env_lo = r < k.delta ? k.kappa1 * std::pow(r, -n - 2.0 * k.s1) : 0.0;
    const double env_hi =
        k.kappa2 * std::min(std::pow(r, -n - 2.0 * k.s1), std::pow(r, -n - 2.0 * k.s2));
    if (r < k.delta) update(rep.lower_envelope, r, (val - env_lo) + tol * env_lo);
    update(rep.upper_envelope, r, (env_hi - val) + tol * env_hi);
    if (r <= sqn) measured_inf = std::min(measured_inf, val);
  }
  // the infimum over (0, sqrt n] sits at the right end for decreasing kernels;
  // sample the endpoint explicitly
  try {
    measured_inf = std::min(measured_inf, k.eval(sqn * (1.0 - 1e-12)));
  } catch (const std::domain_error&) {
  }
  rep.measured_infimum = measured_inf;
  update(rep.cube_infimum, sqn, (measured_inf - k.kappa3) + tol * k.kappa3);

  try {
    rep.first_moment_value = first_moment(k);
    rep.moment_finite = std::isfinite(rep.first_moment_value);
  } catch (...) {
    rep.moment_finite = false;
  }
  return rep;
}

}  // namespace nlhomog
