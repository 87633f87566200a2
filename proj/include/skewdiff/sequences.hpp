#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "common.hpp"
#include "tail_family.hpp"

namespace skewdiff {

// Doubly infinite positive sequence: explicit values on [window_lo, window_hi],
// closed-form tails beyond. The inner tail covers indices toward the
// accumulation point at 0 (k -> +inf on the negative side, k -> -inf on the
// positive side); the outer tail covers the opposite direction. Tail families
// are evaluated at |k|.
struct SequenceSpec {
  Side side = Side::negative;
  Index window_lo = -1;
  Index window_hi = 1;
  std::vector<double> values;  // values[k - window_lo]
  TailFamily inner_tail;
  TailFamily outer_tail;

  bool in_window(Index k) const { return k >= window_lo && k <= window_hi; }

  bool in_inner_tail(Index k) const {
    return side == Side::negative ? k > window_hi : k < window_lo;
  }

  double at(Index k) const {
    if (in_window(k)) return values[static_cast<size_t>(k - window_lo)];
    const Index n = std::llabs(k);
    return in_inner_tail(k) ? inner_tail.value(n) : outer_tail.value(n);
  }

  // Window edge adjacent to the accumulation point.
  Index inner_edge() const { return side == Side::negative ? window_hi : window_lo; }
  Index outer_edge() const { return side == Side::negative ? window_lo : window_hi; }

  double inner_limit() const { return inner_tail.limit(); }
  double outer_limit() const { return outer_tail.limit(); }
};

// Breakpoint positions l_k (negative side, l_k < l_{k+1} < 0) or r_k
// (positive side, 0 < r_k < r_{k+1}). Explicit window values are signed
// positions; tail families give magnitudes |position| at |k|.
struct PartitionSpec {
  Side side = Side::negative;
  Index window_lo = -1;
  Index window_hi = 1;
  std::vector<double> positions;  // signed, ascending in k
  TailFamily inner_tail;
  TailFamily outer_tail;

  bool in_window(Index k) const { return k >= window_lo && k <= window_hi; }

  bool in_inner_tail(Index k) const {
    return side == Side::negative ? k > window_hi : k < window_lo;
  }

  double at(Index k) const {
    if (in_window(k)) return positions[static_cast<size_t>(k - window_lo)];
    const Index n = std::llabs(k);
    const double mag = in_inner_tail(k) ? inner_tail.value(n) : outer_tail.value(n);
    return side == Side::negative ? -mag : mag;
  }

  double spacing(Index k) const { return at(k + 1) - at(k); }

  Index inner_edge() const { return side == Side::negative ? window_hi : window_lo; }
  Index outer_edge() const { return side == Side::negative ? window_lo : window_hi; }

  // Innermost explicit breakpoint magnitude (closest to 0 in the window).
  double inner_edge_magnitude() const { return std::abs(at(inner_edge())); }
  double outer_edge_magnitude() const { return std::abs(at(outer_edge())); }

  struct Location {
    Index k = 0;
    bool at_breakpoint = false;  // true: x == position(k); false: position(k) < x < position(k+1)
  };

  // Locate x strictly inside this side's half line (x < 0 for the negative
  // side, x > 0 for the positive side).
  Location locate(double x) const {
    const double front = positions.front();
    const double back = positions.back();
    Index k;
    if (x >= front && x <= back) {
      // Window region: binary search over explicit positions.
      auto it = std::upper_bound(positions.begin(), positions.end(), x);
      k = window_lo + static_cast<Index>(it - positions.begin()) - 1;
    } else {
      const double mag = std::abs(x);
      const bool inner = (side == Side::negative) ? (x > back) : (x < front);
      const TailFamily& fam = inner ? inner_tail : outer_tail;
      Index n = fam.index_for_magnitude(mag);
      // Map |k| back to a signed index in the proper region.
      auto signed_index = [&](Index nn) {
        if (side == Side::negative) return inner ? nn : -nn;
        return inner ? -nn : nn;
      };
      // Seed, then walk until the bracket position(k) <= x < position(k+1) holds.
      k = signed_index(n);
      if (inner) {
        if (side == Side::negative && k <= window_hi) k = window_hi;
        if (side == Side::positive && k >= window_lo) k = window_lo - 1;
      } else {
        if (side == Side::negative && k >= window_lo) k = window_lo - 1;
        if (side == Side::positive && k <= window_hi) k = window_hi;
      }
      for (int guard = 0; guard < 256; ++guard) {
        const double pk = at(k);
        const double pk1 = at(k + 1);
        if (pk <= x && x < pk1) break;
        k += (x >= pk1) ? +1 : -1;
      }
    }
    const double pk = at(k);
    if (x == pk) return {k, true};
    const double pk1 = at(k + 1);
    if (x == pk1) return {k + 1, true};
    return {k, false};
  }
};

}  // namespace skewdiff
