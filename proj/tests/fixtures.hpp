#pragma once

// Shared test media. Magnitude conventions: breakpoints use power-law windows
// matched to their tail families at the window edges, so every fixture passes
// validation by construction.

#include <functional>
#include <vector>

#include "skewdiff/config.hpp"
#include "skewdiff/layered.hpp"
#include "skewdiff/rng.hpp"

namespace fixtures {

using namespace skewdiff;

// Breakpoints at -2, -1.5, -1.25, -0.75, -0.5 (mirrored on the right) with
// |position| = 1/|k| toward 0 and |k| outward.
inline PartitionSpec unit_partition(Side s) {
  PartitionSpec p;
  p.side = s;
  p.window_lo = -2;
  p.window_hi = 2;
  if (s == Side::negative) {
    p.positions = {-2.0, -1.5, -1.25, -0.75, -0.5};
  } else {
    p.positions = {0.5, 0.75, 1.25, 1.5, 2.0};
  }
  p.inner_tail = TailFamily::power(1.0, -1.0);
  p.outer_tail = TailFamily::power(1.0, 1.0);
  return p;
}

inline SequenceSpec constant_density(Side s, double level) {
  SequenceSpec d;
  d.side = s;
  d.window_lo = -1;
  d.window_hi = 1;
  d.values = {level, level, level};
  d.inner_tail = TailFamily::constant(level);
  d.outer_tail = TailFamily::constant(level);
  return d;
}

// Unskewed medium: constant density 1 everywhere.
inline SkewConfig brownian() {
  SkewConfig cfg;
  cfg.name = "brownian";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.pos_partition = unit_partition(Side::positive);
  cfg.neg_density = constant_density(Side::negative, 1.0);
  cfg.pos_density = constant_density(Side::positive, 1.0);
  return cfg;
}

// Single effective interface at 0 with upward weight a: density (1-a)/a on
// the left, 1 on the right.
inline SkewConfig skew(double a) {
  SkewConfig cfg;
  cfg.name = "skew";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.pos_partition = unit_partition(Side::positive);
  cfg.neg_density = constant_density(Side::negative, (1.0 - a) / a);
  cfg.pos_density = constant_density(Side::positive, 1.0);
  return cfg;
}

// Left density |l_k|^(delta-1) = k^(1-delta) toward 0, Brownian right side.
// delta = 0.5 breaks the value-variation condition; delta = 1.5 keeps it but
// breaks the reciprocal one.
inline SkewConfig bessel(double delta) {
  SkewConfig cfg;
  cfg.name = "bessel";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.pos_partition = unit_partition(Side::positive);
  SequenceSpec d;
  d.side = Side::negative;
  d.window_lo = -1;
  d.window_hi = 1;
  d.values = {1.0, 1.0, 1.0};
  d.inner_tail = TailFamily::power(1.0, 1.0 - delta);
  d.outer_tail = TailFamily::constant(1.0);
  cfg.neg_density = d;
  cfg.pos_density = constant_density(Side::positive, 1.0);
  return cfg;
}

// Exploding right boundary: breakpoints creep out harmonically while the
// density doubles per layer, so the scale stays bounded above and paths
// escape in finite time. Left side is Brownian.
inline SkewConfig counterexample() {
  SkewConfig cfg;
  cfg.name = "counterexample";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.neg_density = constant_density(Side::negative, 1.0);
  PartitionSpec p;
  p.side = Side::positive;
  p.window_lo = -2;
  p.window_hi = 2;
  p.positions = {0.5, 0.7, 1.0, 1.25, 1.5};
  p.inner_tail = TailFamily::power(1.0, -1.0);
  p.outer_tail = TailFamily::harmonic(1.0);
  cfg.pos_partition = p;
  SequenceSpec d;
  d.side = Side::positive;
  d.window_lo = -2;
  d.window_hi = 2;
  d.values = {1.0, 1.0, 1.0, 2.0, 4.0};
  d.inner_tail = TailFamily::constant(1.0);
  d.outer_tail = TailFamily::geometric(1.0, 2.0);
  cfg.pos_density = d;
  return cfg;
}

// Density halves with each layer outward: positive recurrent with an
// explicitly normalizable invariant law.
inline SkewConfig geometric_decay() {
  SkewConfig cfg;
  cfg.name = "geometric-decay";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.pos_partition = unit_partition(Side::positive);
  SequenceSpec dn;
  dn.side = Side::negative;
  dn.window_lo = -1;
  dn.window_hi = 1;
  dn.values = {0.5, 1.0, 1.0};
  dn.inner_tail = TailFamily::constant(1.0);
  dn.outer_tail = TailFamily::geometric(1.0, 0.5);
  cfg.neg_density = dn;
  SequenceSpec dp;
  dp.side = Side::positive;
  dp.window_lo = -1;
  dp.window_hi = 1;
  dp.values = {1.0, 1.0, 0.5};
  dp.inner_tail = TailFamily::constant(1.0);
  dp.outer_tail = TailFamily::geometric(1.0, 0.5);
  cfg.pos_density = dp;
  return cfg;
}

// Layered medium with diffusivity ~ |k|^-4 outward: bounded layer-coordinate
// range, recurrent and positive recurrent.
inline LayerConfig layered() {
  LayerConfig layer;
  layer.name = "layered";
  layer.alpha = 0.5;
  layer.neg_partition = unit_partition(Side::negative);
  layer.pos_partition = unit_partition(Side::positive);
  SequenceSpec dn;
  dn.side = Side::negative;
  dn.window_lo = -1;
  dn.window_hi = 1;
  dn.values = {1.0, 1.0, 1.0};
  dn.inner_tail = TailFamily::constant(1.0);
  dn.outer_tail = TailFamily::power(1.0, -4.0);
  layer.neg_diffusivity = dn;
  SequenceSpec dp = dn;
  dp.side = Side::positive;
  layer.pos_diffusivity = dp;
  return layer;
}

struct Rand {
  CounterRng rng;
  explicit Rand(uint64_t seed, uint64_t stream = 0) : rng(seed, stream, 7) {}
  double uni(double a, double b) { return a + (b - a) * rng.uniform(); }
  int pick(int n) { return static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n)); }
};

inline TailFamily random_density_tail(Rand& r) {
  const double c = r.uni(0.3, 3.0);
  switch (r.pick(4)) {
    case 0:
      return TailFamily::constant(c);
    case 1: {
      const double p = r.uni(0.2, 1.5) * (r.pick(2) ? 1.0 : -1.0);
      return TailFamily::power(c, p);
    }
    case 2: {
      const double ratio = r.pick(2) ? r.uni(1.05, 2.0) : r.uni(0.5, 0.95);
      return TailFamily::geometric(c, ratio);
    }
    default:
      return TailFamily::harmonic(c);
  }
}

// Arbitrary valid medium: power-law breakpoints, free density tails.
inline SkewConfig random_config(uint64_t seed) {
  Rand r(seed);
  for (int attempt = 0; attempt < 200; ++attempt) {
    SkewConfig cfg;
    cfg.name = "random";
    auto make_part = [&](Side s) {
      const double b = r.uni(0.2, 1.0);
      TailFamily fi = TailFamily::power(b, -r.uni(0.5, 2.0));
      TailFamily fo = TailFamily::power(2.0 * b, r.uni(0.5, 1.5));
      PartitionSpec p;
      p.side = s;
      p.window_lo = -2;
      p.window_hi = 2;
      const double mid = 0.5 * (fo.value(1) + fi.value(1));
      if (s == Side::negative) {
        p.positions = {-fo.value(2), -fo.value(1), -mid, -fi.value(1), -fi.value(2)};
      } else {
        p.positions = {fi.value(2), fi.value(1), mid, fo.value(1), fo.value(2)};
      }
      p.inner_tail = fi;
      p.outer_tail = fo;
      return p;
    };
    auto make_den = [&](Side s) {
      TailFamily ti = random_density_tail(r);
      TailFamily to = random_density_tail(r);
      SequenceSpec d;
      d.side = s;
      d.window_lo = -1;
      d.window_hi = 1;
      const double v0 = r.uni(0.3, 3.0);
      if (s == Side::negative) {
        d.values = {to.value(1), v0, ti.value(1)};
      } else {
        d.values = {ti.value(1), v0, to.value(1)};
      }
      d.inner_tail = ti;
      d.outer_tail = to;
      return d;
    };
    cfg.neg_partition = make_part(Side::negative);
    cfg.pos_partition = make_part(Side::positive);
    cfg.neg_density = make_den(Side::negative);
    cfg.pos_density = make_den(Side::positive);
    if (validate(cfg).valid()) return cfg;
  }
  throw std::runtime_error("random_config: no valid draw");
}

// Random medium guaranteed to carry a scale function: densities generated
// from interface weight windows, so the variation conditions hold exactly.
inline SkewConfig random_scale_config(uint64_t seed) {
  Rand r(seed, 1);
  AlphaWindow an, ap;
  an.lo = -2;
  ap.lo = -2;
  for (int i = 0; i < 5; ++i) {
    an.values.push_back(r.uni(0.15, 0.85));
    ap.values.push_back(r.uni(0.15, 0.85));
  }
  const DensityPair dp = gammas_from_alphas(an, ap, r.uni(0.3, 3.0), r.uni(0.3, 3.0));
  SkewConfig cfg;
  cfg.name = "random-scale";
  cfg.neg_partition = unit_partition(Side::negative);
  cfg.pos_partition = unit_partition(Side::positive);
  cfg.neg_density = dp.neg;
  cfg.pos_density = dp.pos;
  return cfg;
}

}  // namespace fixtures
