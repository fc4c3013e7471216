#include "nlhomog/profile.hpp"

#include <cmath>

namespace nlhomog {

double PeriodicProfile::mean() const {
  return accumulate_sorted(std::vector<double>(u.begin(), u.end())) / torus.cell_count();
}

void PeriodicProfile::recenter() {
  const double m = mean();
  for (double& x : u) x -= m;
}

void PeriodicProfile::check_mean_zero(double tol) const {
  double scale = 1.0;
  for (double x : u) scale = std::max(scale, std::abs(x));
  if (std::abs(mean()) > tol * scale)
    throw ValidationError("profile: field is not mean-zero");
}

}  // namespace nlhomog
