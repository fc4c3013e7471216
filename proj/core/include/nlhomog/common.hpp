#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlhomog {

// Vectors are stored with two components in both dimensions; 1D code keeps
// the second component at zero so dot products and norms need no branching.
using IVec = std::array<long, 2>;
using DVec = std::array<double, 2>;

inline double dot(const DVec& a, const DVec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double dot(const DVec& a, const IVec& b) {
  return a[0] * static_cast<double>(b[0]) + a[1] * static_cast<double>(b[1]);
}
inline double norm(const DVec& a) { return std::sqrt(dot(a, a)); }
inline double norm(const IVec& a) {
  return std::sqrt(static_cast<double>(a[0]) * a[0] + static_cast<double>(a[1]) * a[1]);
}
inline IVec ivec(long x, long y = 0) { return IVec{x, y}; }
inline DVec dvec(double x, double y = 0.0) { return DVec{x, y}; }
inline DVec to_dvec(const IVec& a) { return DVec{static_cast<double>(a[0]), static_cast<double>(a[1])}; }

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Fixed-order compensated sum (Neumaier). Deterministic for a fixed order.
class Accumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double accumulate_fixed(const std::vector<double>& v) {
  Accumulator a;
  for (double x : v) a.add(x);
  return a.value();
}

// Sum invariant under permutations of the input: values are sorted before the
// compensated pass. Used where bit-identical results must survive index
// relabelings (e.g. translated forcing fields).
inline double accumulate_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return accumulate_fixed(v);
}

// splitmix64; raw bits are mapped to doubles directly so streams do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
  long next_index(long n) { return static_cast<long>(next_u64() % static_cast<std::uint64_t>(n)); }
  bool next_bool() { return (next_u64() & 1ull) != 0; }

 private:
  std::uint64_t state_;
};

inline double sqr(double x) { return x * x; }

}  // namespace nlhomog
