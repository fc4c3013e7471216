#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

// Rule defining set membership for every cell outside the stored window.
enum class ExteriorRule { Empty, Full, Halfspace, PeriodicTorus };

// Binary set indicator on a window, one bit per cell, plus a deterministic
// exterior extension.  Halfspace membership is x . p > t (strict), matching
// the level-set convention; `flipped` tracks complements of that rule.
struct LatticeSet {
  WindowGrid win;
  ExteriorRule rule = ExteriorRule::Empty;
  DVec hs_p = dvec(1.0);
  double hs_t = 0.0;
  bool hs_flipped = false;  // complemented halfspace: x . p <= t
  std::shared_ptr<const std::vector<std::uint8_t>> torus_pattern;  // m^n cells
  bool torus_flipped = false;
  std::string label;

  std::vector<std::uint64_t> bits;  // row-major, (nx+63)/64 words per row

  LatticeSet() = default;
  explicit LatticeSet(const WindowGrid& w, ExteriorRule r = ExteriorRule::Empty);

  long words_per_row() const { return (win.nx() + 63) / 64; }

  bool bit(const IVec& k) const {
    const long idx = win.index(k);
    return (bits[(idx >> 6)] >> (idx & 63)) & 1ull;
  }
  void set_bit(const IVec& k, bool v) {
    const long idx = win.index(k);
    if (v)
      bits[idx >> 6] |= 1ull << (idx & 63);
    else
      bits[idx >> 6] &= ~(1ull << (idx & 63));
  }

  // membership for any cell: window bit when inside, exterior rule otherwise
  bool contains(const IVec& k) const;

  LatticeSet complement() const;
  long popcount() const;           // cells set inside the window
  double window_volume() const { return popcount() * win.cell_volume(); }

  static LatticeSet empty(const WindowGrid& w);
  static LatticeSet full(const WindowGrid& w);
  // indicator {x . p > t}; rule continues the same halfspace outside
  static LatticeSet halfspace(const WindowGrid& w, DVec p, double t);
  static LatticeSet ball(const WindowGrid& w, DVec center, double radius);
  static LatticeSet box_set(const WindowGrid& w, const Box& b);
  static LatticeSet from_torus_pattern(const WindowGrid& w, int m,
                                       std::shared_ptr<const std::vector<std::uint8_t>> pattern);
  static LatticeSet random(const WindowGrid& w, Rng& rng, double fill,
                           ExteriorRule rule = ExteriorRule::Empty);
};

// Dense bit raster of a LatticeSet (or mask) over an arbitrary frame, with
// guard words so shifted row reads never branch.
class BitImage {
 public:
  BitImage() = default;
  explicit BitImage(const WindowGrid& frame, long guard_words = 8);

  const WindowGrid& frame() const { return frame_; }
  long rows() const { return frame_.ny(); }
  long row_words() const { return nw_; }

  std::uint64_t* row(long y) { return data_.data() + y * stride_ + guard_; }
  const std::uint64_t* row(long y) const { return data_.data() + y * stride_ + guard_; }

  bool get(const IVec& k) const {
    const long x = k[0] - frame_.lo[0], y = k[1] - frame_.lo[1];
    return (row(y)[x >> 6] >> (x & 63)) & 1ull;
  }
  void set(const IVec& k) {
    const long x = k[0] - frame_.lo[0], y = k[1] - frame_.lo[1];
    row(y)[x >> 6] |= 1ull << (x & 63);
  }

  void fill_from(const LatticeSet& s);        // evaluates bits + exterior rule
  void fill_box_mask(const Box& b);           // cell centers inside the box
  void fill_complement_of(const BitImage& o); // frame complement, tail masked
  void and_with(const BitImage& o);
  void recompute_spans();

  // number of cells i with a_i = 1 and b_{i+d} = 1 (same frame required)
  static long count_pairs(const BitImage& a, const BitImage& b, const IVec& d);

  long popcount() const;

 private:
  WindowGrid frame_;
  long nw_ = 0, stride_ = 0, guard_ = 4;
  std::vector<std::uint64_t> data_;
  std::vector<long> span_lo_, span_hi_;  // per-row first/last nonzero word
  void mask_tail();
};

}  // namespace nlhomog
