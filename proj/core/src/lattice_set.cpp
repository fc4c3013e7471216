#include "nlhomog/lattice_set.hpp"

#include <bit>
#include <cmath>

namespace nlhomog {

LatticeSet::LatticeSet(const WindowGrid& w, ExteriorRule r) : win(w), rule(r) {
  bits.assign((w.cell_count() + 63) / 64 + 1, 0ull);
}

bool LatticeSet::contains(const IVec& k) const {
  if (win.contains(k)) return bit(k);
  switch (rule) {
    case ExteriorRule::Empty: return false;
    case ExteriorRule::Full: return true;
    case ExteriorRule::Halfspace: {
      const DVec c = win.center(k);
      const bool in = dot(hs_p, c) > hs_t;
      return hs_flipped ? !in : in;
    }
    case ExteriorRule::PeriodicTorus: {
      const int m = win.m;
      long x = k[0] % m;
      if (x < 0) x += m;
      long y = k[1] % m;
      if (y < 0) y += m;
      const long idx = win.dim == 1 ? x : y * m + x;
      const bool in = (*torus_pattern)[idx] != 0;
      return torus_flipped ? !in : in;
    }
  }
  return false;
}

LatticeSet LatticeSet::complement() const {
  LatticeSet c = *this;
  const long n = win.cell_count();
  for (std::size_t i = 0; i < c.bits.size(); ++i) c.bits[i] = ~bits[i];
  // clear bits beyond the window
  const long tail = n & 63;
  if (tail) c.bits[n >> 6] &= (1ull << tail) - 1ull;
  for (std::size_t i = (n + 63) / 64; i < c.bits.size(); ++i) c.bits[i] = 0ull;
  switch (rule) {
    case ExteriorRule::Empty: c.rule = ExteriorRule::Full; break;
    case ExteriorRule::Full: c.rule = ExteriorRule::Empty; break;
    case ExteriorRule::Halfspace: c.hs_flipped = !hs_flipped; break;
    case ExteriorRule::PeriodicTorus: c.torus_flipped = !torus_flipped; break;
  }
  if (!label.empty()) c.label = label + "^c";
  return c;
}

long LatticeSet::popcount() const {
  long n = 0;
  for (std::uint64_t w : bits) n += std::popcount(w);
  return n;
}

LatticeSet LatticeSet::empty(const WindowGrid& w) { return LatticeSet(w, ExteriorRule::Empty); }

LatticeSet LatticeSet::full(const WindowGrid& w) {
  LatticeSet s(w, ExteriorRule::Full);
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) s.set_bit(ivec(x, y), true);
  s.label = "full";
  return s;
}

LatticeSet LatticeSet::halfspace(const WindowGrid& w, DVec p, double t) {
  LatticeSet s(w, ExteriorRule::Halfspace);
  s.hs_p = p;
  s.hs_t = t;
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (dot(p, w.center(k)) > t) s.set_bit(k, true);
    }
  s.label = "halfspace";
  return s;
}

LatticeSet LatticeSet::ball(const WindowGrid& w, DVec center, double radius) {
  LatticeSet s(w, ExteriorRule::Empty);
  const double r2 = radius * radius;
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      const DVec c = w.center(k);
      const double dx = c[0] - center[0], dy = w.dim == 2 ? c[1] - center[1] : 0.0;
      if (dx * dx + dy * dy < r2) s.set_bit(k, true);
    }
  s.label = "ball";
  return s;
}

LatticeSet LatticeSet::box_set(const WindowGrid& w, const Box& b) {
  LatticeSet s(w, ExteriorRule::Empty);
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (b.contains(w.center(k))) s.set_bit(k, true);
    }
  s.label = "box";
  return s;
}

LatticeSet LatticeSet::from_torus_pattern(
    const WindowGrid& w, int m, std::shared_ptr<const std::vector<std::uint8_t>> pattern) {
  if (m != w.m) throw ValidationError("from_torus_pattern: grid spacing mismatch");
  LatticeSet s(w, ExteriorRule::PeriodicTorus);
  s.torus_pattern = pattern;
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x) {
      long px = x % m;
      if (px < 0) px += m;
      long py = y % m;
      if (py < 0) py += m;
      const long idx = w.dim == 1 ? px : py * m + px;
      if ((*pattern)[idx]) s.set_bit(ivec(x, y), true);
    }
  s.label = "periodic";
  return s;
}

LatticeSet LatticeSet::random(const WindowGrid& w, Rng& rng, double fill, ExteriorRule rule) {
  LatticeSet s(w, rule);
  for (long y = w.lo[1]; y < w.hi[1]; ++y)
    for (long x = w.lo[0]; x < w.hi[0]; ++x)
      if (rng.next_unit() < fill) s.set_bit(ivec(x, y), true);
  s.label = "random";
  return s;
}

// ---------------------------------------------------------------- BitImage

BitImage::BitImage(const WindowGrid& frame, long guard_words)
    : frame_(frame), guard_(guard_words) {
  nw_ = (frame.nx() + 63) / 64;
  stride_ = nw_ + 2 * guard_;
  data_.assign(static_cast<std::size_t>(stride_) * frame.ny(), 0ull);
  span_lo_.assign(frame.ny(), 0);
  span_hi_.assign(frame.ny(), -1);
}

void BitImage::mask_tail() {
  const long tail = frame_.nx() & 63;
  if (!tail) return;
  const std::uint64_t mask = (1ull << tail) - 1ull;
  for (long y = 0; y < rows(); ++y) row(y)[nw_ - 1] &= mask;
}

void BitImage::recompute_spans() {
  for (long y = 0; y < rows(); ++y) {
    const std::uint64_t* r = row(y);
    long lo = 0, hi = nw_ - 1;
    while (lo < nw_ && r[lo] == 0) ++lo;
    while (hi >= lo && r[hi] == 0) --hi;
    span_lo_[y] = lo;
    span_hi_[y] = hi;
  }
}

void BitImage::fill_from(const LatticeSet& s) {
  for (long y = frame_.lo[1]; y < frame_.hi[1]; ++y) {
    std::uint64_t* r = row(y - frame_.lo[1]);
    for (long x = frame_.lo[0]; x < frame_.hi[0]; ++x) {
      const IVec k = ivec(x, y);
      if (s.contains(k)) r[(x - frame_.lo[0]) >> 6] |= 1ull << ((x - frame_.lo[0]) & 63);
    }
  }
  mask_tail();
  recompute_spans();
}

void BitImage::fill_box_mask(const Box& b) {
  for (long y = frame_.lo[1]; y < frame_.hi[1]; ++y) {
    std::uint64_t* r = row(y - frame_.lo[1]);
    for (long x = frame_.lo[0]; x < frame_.hi[0]; ++x)
      if (b.contains(frame_.center(ivec(x, y))))
        r[(x - frame_.lo[0]) >> 6] |= 1ull << ((x - frame_.lo[0]) & 63);
  }
  mask_tail();
  recompute_spans();
}

void BitImage::fill_complement_of(const BitImage& o) {
  for (long y = 0; y < rows(); ++y) {
    std::uint64_t* r = row(y);
    const std::uint64_t* s = o.row(y);
    for (long w = 0; w < nw_; ++w) r[w] = ~s[w];
  }
  mask_tail();
  recompute_spans();
}

void BitImage::and_with(const BitImage& o) {
  for (long y = 0; y < rows(); ++y) {
    std::uint64_t* r = row(y);
    const std::uint64_t* s = o.row(y);
    for (long w = 0; w < nw_; ++w) r[w] &= s[w];
  }
  recompute_spans();
}

long BitImage::popcount() const {
  long n = 0;
  for (long y = 0; y < rows(); ++y) {
    const std::uint64_t* r = row(y);
    for (long w = 0; w < nw_; ++w) n += std::popcount(r[w]);
  }
  return n;
}

long BitImage::count_pairs(const BitImage& a, const BitImage& b, const IVec& d) {
  const long dx = d[0], dy = d[1];
  const long ny = a.rows(), nw = a.nw_;
  (void)nw;
  const long y0 = std::max<long>(0, -dy), y1 = std::min(ny, ny - dy);
  const long q = dx >> 6;              // floor division by 64
  const long s = dx - (q << 6);        // in [0, 64)
  long count = 0;
  for (long y = y0; y < y1; ++y) {
    const long alo = a.span_lo_[y], ahi = a.span_hi_[y];
    if (ahi < alo) continue;
    const long yb = y + dy;
    const long blo = b.span_lo_[yb], bhi = b.span_hi_[yb];
    if (bhi < blo) continue;
    // overlap of a's span with b's span pulled back by dx
    const long wlo = std::max(alo, blo - q - 1);
    const long whi = std::min(ahi, bhi - q);
    const std::uint64_t* ra = a.row(y);
    const std::uint64_t* rb = b.row(yb);
    if (s == 0) {
      for (long w = wlo; w <= whi; ++w) count += std::popcount(ra[w] & rb[w + q]);
    } else {
      for (long w = wlo; w <= whi; ++w) {
        const std::uint64_t bb = (rb[w + q] >> s) | (rb[w + q + 1] << (64 - s));
        count += std::popcount(ra[w] & bb);
      }
    }
  }
  return count;
}

}  // namespace nlhomog
