#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "classifier.hpp"
#include "common.hpp"
#include "config.hpp"
#include "piecewise_linear.hpp"
#include "series.hpp"

namespace skewdiff {

struct ScaleBuildOptions {
  double radius = 4096.0;              // tabulate breakpoints out to +-radius
  Index max_segments_per_side = Index(1) << 20;
  SeriesPolicy policy;
};

namespace detail {

// Explosion functional tail series toward the outer boundary of one side:
//   T_l = (spacing_l)^2 / 2 + (mass between the interval and 0) / density * spacing_l
// summed over intervals from 0 outward. Divergence means the boundary is
// inaccessible in finite time.
inline SeriesVerdict explosion_functional_series(const SkewConfig& cfg, Side s,
                                                 const SeriesPolicy& pol) {
  const auto refs = side_refs(cfg, s);
  const PartitionSpec& p = *refs.part;
  const SequenceSpec& d = *refs.den;
  const auto level = constant_level(d.inner_tail);
  if (!level) {
    return {SeriesStatus::Inconclusive, 0.0, 0.0, 0, "inner-density-not-constant"};
  }

  double head = 0.0;
  double mass = 0.0;  // running mass between the current interval and 0
  Index ledge;
  std::function<double(Index)> term;
  if (s == Side::positive) {
    const Index k_in = std::min(p.window_lo, d.window_lo) - 1;
    const double edge = p.at(k_in + 1);
    head = 0.5 * edge * edge;  // exact telescoped inner contribution
    mass = *level * edge;
    ledge = std::max(p.window_hi, d.window_hi);
    for (Index l = k_in + 1; l < ledge; ++l) {
      const double sp = p.spacing(l);
      const double g = d.at(l + 1);
      head += 0.5 * sp * sp + mass / g * sp;
      mass += g * sp;
    }
    term = [&cfg, &p, &d, mass, ledge](Index depth) mutable {
      const Index l = ledge + depth;
      const double sp = p.spacing(l);
      const double g = d.at(l + 1);
      const double t = 0.5 * sp * sp + mass / g * sp;
      mass += g * sp;
      return t;
    };
  } else {
    const Index k_in = std::max(p.window_hi, d.window_hi) + 1;
    const double edge = -p.at(k_in);
    head = 0.5 * edge * edge;
    mass = *level * edge;
    ledge = std::min(p.window_lo, d.window_lo);
    for (Index k = k_in - 1; k >= ledge; --k) {
      const double sp = p.spacing(k);
      const double g = d.at(k + 1);
      head += 0.5 * sp * sp + mass / g * sp;
      mass += g * sp;
    }
    term = [&cfg, &p, &d, mass, ledge](Index depth) mutable {
      const Index k = ledge - 1 - depth;
      const double sp = p.spacing(k);
      const double g = d.at(k + 1);
      const double t = 0.5 * sp * sp + mass / g * sp;
      mass += g * sp;
      return t;
    };
  }

  const TermAsym sp_a = p.outer_tail.delta_asym();
  const TermAsym g_a = d.outer_tail.value_asym();
  const TermAsym weight = g_a.mul(sp_a);
  std::optional<TermAsym> shape;
  const SeriesStatus ws = classify_asym(weight);
  if (ws != SeriesStatus::Inconclusive) {
    const TermAsym mass_shape =
        (ws == SeriesStatus::Converges) ? TermAsym::constant() : weight.partial_sum();
    shape = TermAsym::dominant(sp_a.mul(sp_a), sp_a.mul(g_a.reciprocal()).mul(mass_shape));
  }
  SeriesVerdict v = evaluate_tail_series(term, shape, pol);
  v.partial_sum += head;
  return v;
}

}  // namespace detail

// Piecewise-linear scale function: h(0) = 0, slope alpha*gamma/gamma_{k+1}
// on (l_k, l_{k+1}) and (1-alpha)*gammabar/gammabar_{k+1} on (r_k, r_{k+1}),
// with alpha the effective skewness at the accumulation point. h(X) is a
// local martingale; h'(0) (symmetric) is 1/2.
class ScaleFunction {
 public:
  const PiecewiseLinearMap& map() const { return map_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double gammabar() const { return gammabar_; }

  double h(double x) const { return map_.eval(x); }
  double h_inverse(double y) const {
    if (h_limit_neg && y <= *h_limit_neg) {
      throw RangeError("ordinate at or below h(-inf) = " + std::to_string(*h_limit_neg));
    }
    if (h_limit_pos && y >= *h_limit_pos) {
      throw RangeError("ordinate at or above h(+inf) = " + std::to_string(*h_limit_pos));
    }
    return map_.inverse(y);
  }
  double h_prime(double x) const { return map_.slope_at(x); }
  // h' read in the transformed coordinate y = h(x); piecewise constant.
  double sigma_tilde(double y) const { return map_.slope_at_value(y); }

  // Feller explosion functional, exact on the tabulated breakpoint range.
  double phi(double x) const {
    if (x == 0.0) return 0.0;
    double total = 0.0;
    if (x > 0.0) {
      const double hx = map_.eval(x);
      map_.for_each_segment(0.0, x, [&](double a, double b, double s, double ha) {
        const double d = b - a;
        total += d * (hx - ha) / s - 0.5 * d * d;
      });
    } else {
      const double hx = map_.eval(x);
      map_.for_each_segment(x, 0.0, [&](double a, double b, double s, double ha) {
        const double d = b - a;
        total += d * (ha - hx) / s + 0.5 * d * d;
      });
    }
    return total;
  }

  // One-sided scale limits; empty when the scale range is unbounded on that side.
  std::optional<double> h_limit_neg, h_limit_pos;
  SeriesVerdict h_series_neg, h_series_pos;      // slope-length outer series
  SeriesVerdict phi_series_neg, phi_series_pos;  // explosion functional series
  double table_min() const { return map_.nodes().front(); }
  double table_max() const { return map_.nodes().back(); }

 private:
  friend ScaleFunction build_scale(const SkewConfig&, const ScaleBuildOptions&);
  PiecewiseLinearMap map_;
  double alpha_ = 0.5, gamma_ = 1.0, gammabar_ = 1.0;
};

inline ScaleFunction build_scale(const SkewConfig& cfg, const ScaleBuildOptions& opt = {}) {
  if (!check_S1(cfg).converges()) {
    throw PreconditionError("scale function does not exist as bounded-variation derivative");
  }
  if (!check_S0(cfg).converges()) {
    throw PreconditionError("scale construction requires the summable-variation condition");
  }
  const double g = cfg.gamma_limit(), gb = cfg.gammabar_limit();
  if (!(g > 0.0) || !std::isfinite(g) || !(gb > 0.0) || !std::isfinite(gb)) {
    throw PreconditionError("scale construction requires positive finite density limits");
  }
  ScaleFunction sf;
  sf.gamma_ = g;
  sf.gammabar_ = gb;
  sf.alpha_ = gb / (gb + g);
  const double alpha = sf.alpha_;

  // Negative side nodes, built from the innermost constant-slope region outward.
  std::vector<double> nx, nh;  // descending positions
  {
    const PartitionSpec& p = cfg.neg_partition;
    const SequenceSpec& d = cfg.neg_density;
    Index k = std::max(p.window_hi, d.window_hi) + 1;
    double x = p.at(k);
    double hv = alpha * x;  // slope is exactly alpha on (x, 0)
    nx.push_back(x);
    nh.push_back(hv);
    Index count = 0;
    while (count < opt.max_segments_per_side) {
      --k;
      const double xn = p.at(k);
      const double slope = alpha * g / d.at(k + 1);
      const double next = hv - slope * (x - xn);
      if (!std::isfinite(next) || std::abs(next) > 1e300) break;
      hv = next;
      nx.push_back(xn);
      nh.push_back(hv);
      x = xn;
      ++count;
      if (x <= -opt.radius) break;
      // Saturation: further increments are below representable resolution.
      if (slope * (x - p.at(k - 1)) < 1e-18 * std::max(1.0, std::abs(hv))) break;
    }
  }
  // Positive side nodes, ascending positions.
  std::vector<double> px, ph;
  {
    const PartitionSpec& p = cfg.pos_partition;
    const SequenceSpec& d = cfg.pos_density;
    Index k = std::min(p.window_lo, d.window_lo);
    double x = p.at(k);
    double hv = (1.0 - alpha) * x;  // slope exactly 1 - alpha on (0, x)
    px.push_back(x);
    ph.push_back(hv);
    Index count = 0;
    while (count < opt.max_segments_per_side) {
      const double xn = p.at(k + 1);
      const double slope = (1.0 - alpha) * gb / d.at(k + 1);
      const double next = hv + slope * (xn - x);
      if (!std::isfinite(next) || std::abs(next) > 1e300) break;
      hv = next;
      px.push_back(xn);
      ph.push_back(hv);
      x = xn;
      ++k;
      ++count;
      if (x >= opt.radius) break;
      if (slope * (p.at(k + 1) - x) < 1e-18 * std::max(1.0, std::abs(hv))) break;
    }
  }

  std::vector<double> xs, ys;
  xs.reserve(nx.size() + px.size() + 1);
  ys.reserve(xs.capacity());
  for (size_t i = nx.size(); i-- > 0;) {
    xs.push_back(nx[i]);
    ys.push_back(nh[i]);
  }
  xs.push_back(0.0);
  ys.push_back(0.0);
  for (size_t i = 0; i < px.size(); ++i) {
    xs.push_back(px[i]);
    ys.push_back(ph[i]);
  }
  std::vector<double> slopes(xs.size() - 1);
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    slopes[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  }
  const double slope_below = slopes.front();
  const double slope_above = slopes.back();
  sf.map_ = PiecewiseLinearMap(std::move(xs), std::move(ys), std::move(slopes), slope_below,
                               slope_above);

  // Scale range: h(0) - h(-inf) = alpha*gamma * sum spacing/density over the
  // left line (and mirrored on the right).
  sf.h_series_neg = detail::side_line_sum(cfg, Side::negative, false, opt.policy);
  sf.h_series_pos = detail::side_line_sum(cfg, Side::positive, false, opt.policy);
  if (sf.h_series_neg.converges()) {
    sf.h_limit_neg = -alpha * g * sf.h_series_neg.value_or_bound();
  }
  if (sf.h_series_pos.converges()) {
    sf.h_limit_pos = (1.0 - alpha) * gb * sf.h_series_pos.value_or_bound();
  }
  sf.phi_series_neg = detail::explosion_functional_series(cfg, Side::negative, opt.policy);
  sf.phi_series_pos = detail::explosion_functional_series(cfg, Side::positive, opt.policy);
  return sf;
}

// P_x(hit a before b) for a <= x <= b; the complement is the probability of
// reaching b first.
inline double hitting_prob_down(const ScaleFunction& sf, double x, double a, double b) {
  if (!(a < b)) throw DomainError("hitting interval requires a < b");
  if (!(x >= a && x <= b)) throw DomainError("start point outside [a, b]");
  return (sf.h(b) - sf.h(x)) / (sf.h(b) - sf.h(a));
}

inline double hitting_prob_up(const ScaleFunction& sf, double x, double a, double b) {
  return 1.0 - hitting_prob_down(sf, x, a, b);
}

// E_x[first exit time of (a, b)] by exact piecewise-quadratic integration of
// the Green function against the speed density 2/h'.
inline double mean_exit_time(const ScaleFunction& sf, double x, double a, double b) {
  if (!(a < b)) throw DomainError("exit interval requires a < b");
  if (!(x >= a && x <= b)) throw DomainError("start point outside [a, b]");
  if (x == a || x == b) return 0.0;
  const double ha = sf.h(a), hb = sf.h(b), hx = sf.h(x);
  double left = 0.0;  // integral of (h(y)-h(a)) * 2/h' over (a, x)
  sf.map().for_each_segment(a, x, [&](double p, double q, double s, double hp) {
    const double d = q - p;
    left += ((hp - ha) * d + 0.5 * s * d * d) * 2.0 / s;
  });
  double right = 0.0;  // integral of (h(b)-h(y)) * 2/h' over (x, b)
  sf.map().for_each_segment(x, b, [&](double p, double q, double s, double hp) {
    const double d = q - p;
    right += ((hb - hp) * d - 0.5 * s * d * d) * 2.0 / s;
  });
  return (left * (hb - hx) + right * (hx - ha)) / (hb - ha);
}

// Normalized invariant law for positive-recurrent configurations: piecewise
// linear CDF over the breakpoint structure with closed tails.
struct InvariantDistribution {
  double total_mass = 0.0;
  std::vector<double> xs;   // ascending node positions
  std::vector<double> cum;  // mass of (-inf, xs[i]]
  double tail_residual = 0.0;  // combined unassigned outer mass bound

  double cdf(double x) const {
    if (x <= xs.front()) return std::clamp(cum.front() / total_mass, 0.0, 1.0);
    if (x >= xs.back()) return std::clamp(cum.back() / total_mass, 0.0, 1.0);
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const size_t i = static_cast<size_t>(it - xs.begin()) - 1;
    const double f = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return std::clamp((cum[i] + f * (cum[i + 1] - cum[i])) / total_mass, 0.0, 1.0);
  }

  double quantile(double u) const {
    const double target = std::clamp(u, 0.0, 1.0) * total_mass;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    if (it == cum.begin()) return xs.front();
    if (it == cum.end()) return xs.back();
    const size_t i = static_cast<size_t>(it - cum.begin()) - 1;
    const double denom = cum[i + 1] - cum[i];
    const double f = denom > 0.0 ? (target - cum[i]) / denom : 0.0;
    return xs[i] + f * (xs[i + 1] - xs[i]);
  }
};

// Builds the invariant distribution when the density has finite total mass.
// Throws PreconditionError when the mass series does not converge.
inline InvariantDistribution build_invariant(const SkewConfig& cfg,
                                             const ClassifyOptions& opt = {}) {
  const TwoSidedVerdict mass = check_positive_recurrent(cfg, opt);
  if (!mass.combined.converges()) {
    throw PreconditionError("invariant measure has infinite mass");
  }
  const double M = mass.combined.value_or_bound();
  const double eps = 1e-13 * M;

  // Boundaries listed from 0 outward plus the mass of each segment between
  // consecutive boundaries; the first segment is the exact inner closure
  // (accumulation region collapsed into one constant-density piece).
  struct SideTable {
    std::vector<double> bounds;  // |position| of boundaries, from the inner edge outward
    std::vector<double> masses;  // masses[i] spans (bounds[i], bounds[i+1]); masses[0] = inner
    double residual = 0.0;       // estimated mass beyond bounds.back()
  };
  const auto collect = [&](Side s) {
    const auto refs = detail::side_refs(cfg, s);
    const PartitionSpec& p = *refs.part;
    const SequenceSpec& d = *refs.den;
    const auto level = detail::constant_level(d.inner_tail);
    if (!level) throw PreconditionError("inner density tail not constant");
    SideTable t;
    const int dir = (s == Side::positive) ? +1 : -1;
    Index k = (s == Side::positive) ? std::min(p.window_lo, d.window_lo) - 1
                                    : std::max(p.window_hi, d.window_hi) + 1;
    // Inner closure segment (0, first boundary).
    double b0 = std::abs(p.at(s == Side::positive ? k + 1 : k));
    t.bounds.push_back(0.0);
    t.bounds.push_back(b0);
    t.masses.push_back(*level * b0);
    double prev_m = t.masses.back();
    for (Index guard = 0; guard < 2000000; ++guard) {
      const Index seg = (s == Side::positive) ? k + 1 + guard : k - 1 - guard;
      const double sp = std::abs(p.spacing(seg));
      const double g = d.at(seg + 1);
      const double m = g * sp;
      t.bounds.push_back(t.bounds.back() + sp);
      t.masses.push_back(m);
      const Index outer_edge = (s == Side::positive) ? std::max(p.window_hi, d.window_hi)
                                                     : std::min(p.window_lo, d.window_lo);
      const bool past_window = (s == Side::positive) ? seg > outer_edge + 4 : seg < outer_edge - 4;
      if (past_window && m < eps) {
        const double r = std::min(prev_m > 0.0 ? m / prev_m : 0.0, 0.99);
        t.residual = m * r / (1.0 - r);
        break;
      }
      prev_m = m;
    }
    return t;
  };

  const SideTable left = collect(Side::negative);
  const SideTable right = collect(Side::positive);

  InvariantDistribution inv;
  inv.total_mass = M;
  inv.tail_residual = left.residual + right.residual;
  double acc = left.residual;
  // Left side outermost-first: boundary magnitudes map to negative positions.
  for (size_t i = left.bounds.size(); i-- > 0;) {
    inv.xs.push_back(-left.bounds[i]);
    inv.cum.push_back(acc);
    if (i > 0) acc += left.masses[i - 1];
  }
  // inv now ends at x = 0 with acc = left mass (+ residual).
  inv.cum.back() = acc;
  for (size_t i = 1; i < right.bounds.size(); ++i) {
    acc += right.masses[i - 1];
    inv.xs.push_back(right.bounds[i]);
    inv.cum.push_back(acc);
  }
  return inv;
}

}  // namespace skewdiff
