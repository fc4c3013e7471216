#include "nlhomog/forcing.hpp"

#include <cmath>

namespace nlhomog {

namespace {

void recenter(ForcingField& f) {
  std::vector<double> v = f.values;
  const double mean = accumulate_sorted(v) / f.torus.cell_count();
  double linf = 0.0;
  for (double& x : f.values) {
    x -= mean;
    linf = std::max(linf, std::abs(x));
  }
  f.linf = linf;
}

}  // namespace

double ForcingField::lq_norm(double q) const {
  std::vector<double> terms;
  terms.reserve(values.size());
  for (double v : values) terms.push_back(std::pow(std::abs(v), q) * torus.cell_volume());
  return std::pow(accumulate_sorted(std::move(terms)), 1.0 / q);
}

ForcingField ForcingField::zero(const TorusGrid& t) {
  ForcingField f;
  f.torus = t;
  f.values.assign(t.cell_count(), 0.0);
  f.linf = 0.0;
  f.amplitude = 0.0;
  return f;
}

ForcingField ForcingField::cosine(const TorusGrid& t, double amplitude) {
  ForcingField f;
  f.torus = t;
  f.values.resize(t.cell_count());
  for (long i = 0; i < t.cell_count(); ++i) {
    const IVec k = t.coords(i);
    const DVec c = t.center(k);
    double v = amplitude * std::cos(2.0 * M_PI * c[0]);
    if (t.dim == 2) v *= std::cos(2.0 * M_PI * c[1]);
    f.values[i] = v;
  }
  f.amplitude = amplitude;
  recenter(f);
  return f;
}

ForcingField ForcingField::tabulated(const TorusGrid& t, std::vector<double> cell_values) {
  if (static_cast<long>(cell_values.size()) != t.cell_count())
    throw ValidationError("forcing: tabulated value count does not match the torus");
  ForcingField f;
  f.torus = t;
  f.values = std::move(cell_values);
  const double mean =
      accumulate_sorted(std::vector<double>(f.values.begin(), f.values.end())) / t.cell_count();
  if (std::abs(mean) > 1e-12)
    throw ValidationError("forcing: tabulated field mean exceeds 1e-12 before re-centering");
  f.amplitude = 0.0;
  recenter(f);
  f.amplitude = f.linf;
  return f;
}

}  // namespace nlhomog
