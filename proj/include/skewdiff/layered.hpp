#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "common.hpp"
#include "config.hpp"
#include "piecewise_linear.hpp"
#include "rng.hpp"
#include "scale.hpp"
#include "simulate.hpp"

namespace skewdiff {

// Piecewise-constant coefficient over the layer structure of one side:
// explicit values on an index window, constants beyond it. The value at
// index j belongs to the same interval as the density carrying index j.
struct CoeffSeq {
  Side side = Side::negative;
  Index window_lo = -1;
  Index window_hi = 1;
  std::vector<double> values;
  double inner = 0.0;  // level toward the accumulation point
  double outer = 0.0;  // level toward the far boundary

  static CoeffSeq constant(Side s, double v) {
    return {s, -1, 1, {v, v, v}, v, v};
  }

  double at(Index j) const {
    if (j >= window_lo && j <= window_hi) return values[static_cast<size_t>(j - window_lo)];
    const bool inner_region = (side == Side::negative) ? j > window_hi : j < window_lo;
    return inner_region ? inner : outer;
  }
};

struct CoeffTable {
  CoeffSeq neg, pos;

  static CoeffTable constant(double v) {
    return {CoeffSeq::constant(Side::negative, v), CoeffSeq::constant(Side::positive, v)};
  }
};

// Layered medium: a breakpoint structure shared with the transversal process
// plus per-layer diffusivities. The diffusivity stored at index j is the one
// of the interval whose derived density carries index j (so the value on
// (l_k, l_{k+1}) sits at index k+1 on the negative side, and likewise with
// r_k on the positive side).
struct LayerConfig {
  std::string name;
  PartitionSpec neg_partition, pos_partition;
  SequenceSpec neg_diffusivity;  // D levels, negative side
  SequenceSpec pos_diffusivity;  // D levels, positive side
  double alpha = 0.5;            // transversal skew weight at 0
  CoeffTable sigma2 = CoeffTable::constant(1.0);  // longitudinal volatility
  CoeffTable beta2 = CoeffTable::constant(0.0);   // longitudinal drift
};

namespace detail {

// sqrt of a closed-form tail, rescaled: c * sqrt(f(n)). Stays inside the
// representable families except for harmonic partial sums.
inline TailFamily sqrt_family_scaled(const TailFamily& f, double c) {
  switch (f.kind) {
    case TailKind::constant:
      return TailFamily::constant(c * std::sqrt(f.scale));
    case TailKind::power:
      return TailFamily::power(c * std::sqrt(f.scale), 0.5 * f.exponent);
    case TailKind::geometric:
      return TailFamily::geometric(c * std::sqrt(f.scale), std::sqrt(f.ratio));
    case TailKind::harmonic_partial_sum:
      throw DomainError("diffusivity tails must be constant, power, or geometric");
  }
  throw DomainError("unknown tail kind");
}

inline SequenceSpec derived_density(const SequenceSpec& diff, double c) {
  SequenceSpec out;
  out.side = diff.side;
  out.window_lo = diff.window_lo;
  out.window_hi = diff.window_hi;
  out.values.reserve(diff.values.size());
  for (double v : diff.values) out.values.push_back(c * std::sqrt(v));
  out.inner_tail = sqrt_family_scaled(diff.inner_tail, c);
  out.outer_tail = sqrt_family_scaled(diff.outer_tail, c);
  return out;
}

// Piecewise-linear map over the breakpoint structure, value 0 at 0, with a
// caller-supplied slope per interval (interval (l_k, l_{k+1}) / (r_k, r_{k+1})
// is addressed by its density index k+1). The accumulation region collapses
// into a single segment, exact because the inner slope is constant there.
template <typename SlopeFn>
inline PiecewiseLinearMap build_breakpoint_map(const SkewConfig& cfg, SlopeFn&& slope,
                                               double radius, Index max_segments) {
  std::vector<double> nx, nh;  // negative side, descending positions
  {
    const PartitionSpec& p = cfg.neg_partition;
    const SequenceSpec& d = cfg.neg_density;
    Index k = std::max(p.window_hi, d.window_hi) + 1;
    double x = p.at(k);
    double hv = slope(Side::negative, k + 1) * x;
    nx.push_back(x);
    nh.push_back(hv);
    Index count = 0;
    while (count < max_segments) {
      --k;
      const double xn = p.at(k);
      const double s = slope(Side::negative, k + 1);
      const double next = hv - s * (x - xn);
      if (!std::isfinite(next) || std::abs(next) > 1e300) break;
      hv = next;
      nx.push_back(xn);
      nh.push_back(hv);
      x = xn;
      ++count;
      if (x <= -radius) break;
      if (s * (x - p.at(k - 1)) < 1e-18 * std::max(1.0, std::abs(hv))) break;
    }
  }
  std::vector<double> px, ph;  // positive side, ascending positions
  {
    const PartitionSpec& p = cfg.pos_partition;
    const SequenceSpec& d = cfg.pos_density;
    Index k = std::min(p.window_lo, d.window_lo);
    double x = p.at(k);
    double hv = slope(Side::positive, k) * x;
    px.push_back(x);
    ph.push_back(hv);
    Index count = 0;
    while (count < max_segments) {
      const double xn = p.at(k + 1);
      const double s = slope(Side::positive, k + 1);
      const double next = hv + s * (xn - x);
      if (!std::isfinite(next) || std::abs(next) > 1e300) break;
      hv = next;
      px.push_back(xn);
      ph.push_back(hv);
      x = xn;
      ++k;
      ++count;
      if (x >= radius) break;
      if (s * (p.at(k + 1) - x) < 1e-18 * std::max(1.0, std::abs(hv))) break;
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
  return PiecewiseLinearMap(std::move(xs), std::move(ys), std::move(slopes), slopes.front(),
                            slopes.back());
}

}  // namespace detail

inline ValidationReport validate_layer(const LayerConfig& layer) {
  ValidationReport rep;
  if (layer.neg_partition.side != Side::negative || layer.neg_diffusivity.side != Side::negative ||
      layer.pos_partition.side != Side::positive || layer.pos_diffusivity.side != Side::positive ||
      layer.sigma2.neg.side != Side::negative || layer.sigma2.pos.side != Side::positive ||
      layer.beta2.neg.side != Side::negative || layer.beta2.pos.side != Side::positive) {
    rep.issues.push_back("side tags do not match field roles");
    return rep;
  }
  if (!(layer.alpha > 0.0) || !(layer.alpha < 1.0)) {
    rep.issues.push_back("skew weight must lie in (0,1)");
  }
  detail::check_partition(layer.neg_partition, "l", rep);
  detail::check_partition(layer.pos_partition, "r", rep);
  detail::check_sequence(layer.neg_diffusivity, "D", rep);
  detail::check_sequence(layer.pos_diffusivity, "Dbar", rep);
  for (const auto* t : {&layer.neg_diffusivity.inner_tail, &layer.neg_diffusivity.outer_tail,
                        &layer.pos_diffusivity.inner_tail, &layer.pos_diffusivity.outer_tail}) {
    if (t->kind == TailKind::harmonic_partial_sum) {
      rep.issues.push_back("diffusivity tails must be constant, power, or geometric");
    }
  }
  const double D = layer.neg_diffusivity.inner_limit();
  const double Db = layer.pos_diffusivity.inner_limit();
  if (!(D > 0.0) || !std::isfinite(D) || !(Db > 0.0) || !std::isfinite(Db)) {
    rep.issues.push_back("diffusivity limits at the accumulation point must be positive finite");
  }
  for (const CoeffSeq* c : {&layer.sigma2.neg, &layer.sigma2.pos}) {
    for (double v : c->values) {
      if (!(v > 0.0)) rep.issues.push_back("sigma2 must be strictly positive");
    }
    if (!(c->inner > 0.0) || !(c->outer > 0.0)) {
      rep.issues.push_back("sigma2 must be strictly positive");
    }
    if (c->values.size() != static_cast<size_t>(c->window_hi - c->window_lo + 1)) {
      rep.issues.push_back("coefficient value count does not match window");
    }
  }
  for (const CoeffSeq* c : {&layer.beta2.neg, &layer.beta2.pos}) {
    if (c->values.size() != static_cast<size_t>(c->window_hi - c->window_lo + 1)) {
      rep.issues.push_back("coefficient value count does not match window");
    }
  }
  return rep;
}

// The transversal driving medium: density gamma_{k+1} = c * sqrt(D level on
// (l_k, l_{k+1})) with c = alpha / sqrt(D limit), mirrored on the right with
// 1 - alpha.
inline SkewConfig layered_base_config(const LayerConfig& layer) {
  const double D = layer.neg_diffusivity.inner_limit();
  const double Db = layer.pos_diffusivity.inner_limit();
  if (!(D > 0.0) || !std::isfinite(D) || !(Db > 0.0) || !std::isfinite(Db)) {
    throw PreconditionError("diffusivity limits at the accumulation point must be positive finite");
  }
  const double c = layer.alpha / std::sqrt(D);
  const double cb = (1.0 - layer.alpha) / std::sqrt(Db);
  SkewConfig cfg;
  cfg.name = layer.name.empty() ? "layered-transversal" : layer.name + "-transversal";
  cfg.neg_partition = layer.neg_partition;
  cfg.pos_partition = layer.pos_partition;
  cfg.neg_density = detail::derived_density(layer.neg_diffusivity, c);
  cfg.pos_density = detail::derived_density(layer.pos_diffusivity, cb);
  return cfg;
}

// Coefficient value at a base (pre-map) coordinate z.
inline double coeff_at_base(const LayerConfig& layer, const CoeffTable& tab, double z) {
  if (z == 0.0) return 0.5 * (tab.neg.inner + tab.pos.inner);
  if (z < 0.0) {
    const auto loc = layer.neg_partition.locate(z);
    return tab.neg.at(loc.k + 1);
  }
  const auto loc = layer.pos_partition.locate(z);
  return tab.pos.at(loc.k + 1);
}

// Fully built layered system: the driving skew medium, its scale function,
// the layer-coordinate map and the scale of the mapped process.
struct LayeredSystem {
  LayerConfig layer;
  SkewConfig z_config;
  ScaleFunction z_scale;
  PiecewiseLinearMap psi;   // layer-coordinate map, psi(0) = 0
  PiecewiseLinearMap hbar;  // scale of the mapped process, on the psi range
  double c_alpha = 0.5, cbar_alpha = 0.5;
  double D = 1.0, Dbar = 1.0;
  SeriesVerdict range_series_neg, range_series_pos;  // psi increment sums per side
  std::optional<double> psi_lo, psi_hi;              // finite range endpoints

  // Transversal volatility field in layered coordinates (right-continuous).
  double sigma1(double x) const { return psi.slope_at_value(x); }

  double x_of(double z) const { return psi.eval(z); }

  double z_of(double x) const {
    if (psi_lo && x <= *psi_lo) {
      throw RangeError("layered coordinate at or below the range infimum");
    }
    if (psi_hi && x >= *psi_hi) {
      throw RangeError("layered coordinate at or above the range supremum");
    }
    return psi.inverse(x);
  }
};

struct LayeredBuildOptions {
  ScaleBuildOptions scale;
  ClassifyOptions classify;
};

inline LayeredSystem build_layered(const LayerConfig& layer, const LayeredBuildOptions& opt = {}) {
  const ValidationReport val = validate_layer(layer);
  if (!val.valid()) {
    throw DomainError("invalid layer configuration:\n" + val.to_string());
  }
  LayeredSystem sys;
  sys.layer = layer;
  sys.z_config = layered_base_config(layer);
  sys.D = layer.neg_diffusivity.inner_limit();
  sys.Dbar = layer.pos_diffusivity.inner_limit();
  sys.c_alpha = layer.alpha / std::sqrt(sys.D);
  sys.cbar_alpha = (1.0 - layer.alpha) / std::sqrt(sys.Dbar);

  const SeriesVerdict s0 = check_S0(sys.z_config);
  const SeriesVerdict s1 = check_S1(sys.z_config);
  if (!s0.converges() || !s1.converges()) {
    std::ostringstream os;
    os << "layered construction needs summable density variation on values and reciprocals"
       << " (values: " << series_status_name(s0.status)
       << ", reciprocals: " << series_status_name(s1.status) << ")";
    throw PreconditionError(os.str());
  }
  const TwoSidedVerdict cons = check_conservative(sys.z_config, opt.classify);
  if (detail::holds_if_diverges(cons.neg, cons.pos) != TriState::yes) {
    std::ostringstream os;
    os << "layered construction needs an inaccessible boundary on both sides"
       << " (left " << series_status_name(cons.neg.status) << " rule " << cons.neg.rule
       << ", right " << series_status_name(cons.pos.status) << " rule " << cons.pos.rule << ")";
    throw PreconditionError(os.str());
  }

  sys.z_scale = build_scale(sys.z_config, opt.scale);

  // psi slope on an interval is exactly the derived density level there.
  sys.psi = detail::build_breakpoint_map(
      sys.z_config,
      [&](Side s, Index j) {
        return s == Side::negative ? sys.z_config.gamma(j) : sys.z_config.gammabar(j);
      },
      opt.scale.radius, opt.scale.max_segments_per_side);

  // Scale of the mapped process: slope 1 / (derived density)^2 on the psi
  // image of each interval, anchored at 0.
  {
    const auto& zx = sys.psi.nodes();
    const auto& zy = sys.psi.values();
    const auto& zs = sys.psi.slopes();
    std::vector<double> hx(zy), hy(zy.size(), 0.0), hs(zs.size());
    for (size_t i = 0; i < zs.size(); ++i) hs[i] = 1.0 / (zs[i] * zs[i]);
    const size_t i0 = static_cast<size_t>(
        std::lower_bound(zx.begin(), zx.end(), 0.0) - zx.begin());
    for (size_t i = i0; i + 1 < hx.size(); ++i) hy[i + 1] = hy[i] + hs[i] * (hx[i + 1] - hx[i]);
    for (size_t i = i0; i-- > 0;) hy[i] = hy[i + 1] - hs[i] * (hx[i + 1] - hx[i]);
    sys.hbar = PiecewiseLinearMap(std::move(hx), std::move(hy), std::move(hs),
                                  1.0 / (sys.psi.slope_below() * sys.psi.slope_below()),
                                  1.0 / (sys.psi.slope_above() * sys.psi.slope_above()));
  }

  sys.range_series_neg = detail::side_line_sum(sys.z_config, Side::negative, true,
                                               opt.classify.policy);
  sys.range_series_pos = detail::side_line_sum(sys.z_config, Side::positive, true,
                                               opt.classify.policy);
  if (sys.range_series_neg.converges()) sys.psi_lo = -sys.range_series_neg.value_or_bound();
  if (sys.range_series_pos.converges()) sys.psi_hi = sys.range_series_pos.value_or_bound();
  return sys;
}

struct LayeredReport {
  TriState recurrent = TriState::unknown;
  TriState positive_recurrent = TriState::unknown;
  TwoSidedVerdict recurrence_series;  // psi-increment / diffusivity sums; divergence = recurrent
  TwoSidedVerdict range_series;       // psi increment sums; convergence = bounded range
  std::optional<double> psi_lo, psi_hi;
  std::optional<double> range_length;  // invariant law is uniform over this range
  std::vector<std::string> notes;
};

inline LayeredReport classify_layered(const LayerConfig& layer,
                                      const LayeredBuildOptions& opt = {}) {
  const LayeredSystem sys = build_layered(layer, opt);
  LayeredReport rep;
  // sum (psi(l_{k+1}) - psi(l_k)) / D_k is proportional to the spacing /
  // derived-density sum of the driving medium, term by term.
  rep.recurrence_series.neg =
      detail::side_line_sum(sys.z_config, Side::negative, false, opt.classify.policy);
  rep.recurrence_series.pos =
      detail::side_line_sum(sys.z_config, Side::positive, false, opt.classify.policy);
  rep.recurrence_series.combined =
      SeriesVerdict::both(rep.recurrence_series.neg, rep.recurrence_series.pos);
  rep.recurrent =
      detail::holds_if_diverges(rep.recurrence_series.neg, rep.recurrence_series.pos);

  rep.range_series.neg = sys.range_series_neg;
  rep.range_series.pos = sys.range_series_pos;
  rep.range_series.combined = SeriesVerdict::both(sys.range_series_neg, sys.range_series_pos);
  rep.psi_lo = sys.psi_lo;
  rep.psi_hi = sys.psi_hi;
  if (rep.recurrent == TriState::no) {
    rep.positive_recurrent = TriState::no;
    rep.notes.push_back("positive recurrence ruled out: not recurrent");
  } else if (rep.recurrent == TriState::yes) {
    rep.positive_recurrent = detail::holds_if_converges(rep.range_series.combined);
    if (rep.positive_recurrent == TriState::yes && sys.psi_lo && sys.psi_hi) {
      rep.range_length = *sys.psi_hi - *sys.psi_lo;
    }
  } else {
    rep.notes.push_back("recurrence undecided; positive recurrence left unknown");
  }
  return rep;
}

// Hitting probability of b before a for the mapped process started at x, all
// in layered coordinates, read off the mapped scale function.
inline double layered_hitting_up(const LayeredSystem& sys, double x, double a, double b) {
  if (!(a < b)) throw DomainError("hitting interval requires a < b");
  if (!(x >= a && x <= b)) throw DomainError("start point outside [a, b]");
  const double ha = sys.hbar.eval(a), hb = sys.hbar.eval(b), hx = sys.hbar.eval(x);
  return (hx - ha) / (hb - ha);
}

inline MCEstimate layered_mc_hitting(const LayeredSystem& sys, double x, double a, double b,
                                     Index n_paths, uint64_t seed, Scheme scheme,
                                     double dt = 1e-3, int threads = 1) {
  MCEstimate m = mc_hitting(sys.z_config, sys.z_scale, sys.z_of(x), sys.z_of(a), sys.z_of(b),
                            n_paths, seed, scheme, dt, threads);
  m.analytic_target = layered_hitting_up(sys, x, a, b);
  return m;
}

struct JointEnsemble {
  SimPlan plan;
  double y0 = 0.0;
  std::vector<double> times;               // recorded grid, starting at 0
  std::vector<std::vector<double>> x;      // layered transversal coordinate per path
  std::vector<std::vector<double>> y;      // longitudinal coordinate per path
  std::vector<uint8_t> censored;
};

// Joint transversal / longitudinal simulation: the transversal path is the
// driving skew process mapped through psi; the longitudinal coordinate
// integrates its volatility and drift coefficients along the path with an
// independent noise stream per path.
inline JointEnsemble simulate_xy(const LayeredSystem& sys, const SimPlan& plan, double y0) {
  ensure_simulatable(sys.z_config, plan);
  Simulator sim(sys.z_config, sys.z_scale, plan);
  JointEnsemble ens;
  ens.plan = plan;
  ens.y0 = y0;
  const Index n_steps = static_cast<Index>(std::llround(plan.horizon / plan.dt));
  for (Index s = 0; s <= n_steps; s += plan.sample_stride) {
    ens.times.push_back(static_cast<double>(s) * plan.dt);
  }
  ens.x.assign(static_cast<size_t>(plan.n_paths), {});
  ens.y.assign(static_cast<size_t>(plan.n_paths), {});
  ens.censored.assign(static_cast<size_t>(plan.n_paths), 0);
  const double sdt = std::sqrt(plan.dt);
  parallel_for_paths(plan.n_paths, plan.threads, [&](Index i) {
    auto& xv = ens.x[static_cast<size_t>(i)];
    auto& yv = ens.y[static_cast<size_t>(i)];
    xv.reserve(ens.times.size());
    yv.reserve(ens.times.size());
    xv.push_back(sys.x_of(plan.x0));
    yv.push_back(y0);
    CounterRng ry(plan.seed, static_cast<uint64_t>(i), 1);
    double z_prev = plan.x0;
    double yy = y0;
    const auto out = sim.run_path(i, [&](Index step, double, double z) {
      // Coefficients frozen at the step's starting layer.
      const double s2 = coeff_at_base(sys.layer, sys.layer.sigma2, z_prev);
      const double b2 = coeff_at_base(sys.layer, sys.layer.beta2, z_prev);
      yy += s2 * sdt * ry.gaussian() + b2 * plan.dt;
      z_prev = z;
      if (step % plan.sample_stride == 0) {
        xv.push_back(sys.x_of(z));
        yv.push_back(yy);
      }
    });
    ens.censored[static_cast<size_t>(i)] = out.censored ? 1 : 0;
  });
  return ens;
}

struct DispersionRow {
  double t = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
};

// Longitudinal ensemble moments per recorded time, over uncensored paths.
inline std::vector<DispersionRow> dispersion_stats(const JointEnsemble& ens) {
  std::vector<DispersionRow> rows;
  if (ens.times.empty()) return rows;
  const size_t nt = ens.times.size();
  rows.resize(nt);
  for (size_t j = 0; j < nt; ++j) {
    double mean = 0.0, m2 = 0.0;
    Index n = 0;
    for (size_t i = 0; i < ens.y.size(); ++i) {
      if (ens.censored[i] || ens.y[i].size() <= j) continue;
      ++n;
      const double v = ens.y[i][j];
      const double d = v - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (v - mean);
    }
    DispersionRow& r = rows[j];
    r.t = ens.times[j];
    r.mean = mean;
    if (n > 1) {
      r.var = m2 / static_cast<double>(n - 1);
      r.se_mean = std::sqrt(r.var / static_cast<double>(n));
      // Fourth central moment for the variance error bar.
      double m4 = 0.0;
      for (size_t i = 0; i < ens.y.size(); ++i) {
        if (ens.censored[i] || ens.y[i].size() <= j) continue;
        const double d = ens.y[i][j] - mean;
        m4 += d * d * d * d;
      }
      m4 /= static_cast<double>(n);
      const double nn = static_cast<double>(n);
      const double v2 = r.var * r.var;
      const double se2 = (m4 - (nn - 3.0) / (nn - 1.0) * v2) / nn;
      r.se_var = se2 > 0.0 ? std::sqrt(se2) : 0.0;
    }
  }
  return rows;
}

// Average of a piecewise-constant coefficient against the uniform law on the
// (bounded) layered state space. Exact on the covered breakpoint range with
// the outer remainders weighted by the constant outer levels.
inline double uniform_average(const LayeredSystem& sys, const CoeffTable& coeff) {
  if (!sys.psi_lo || !sys.psi_hi) {
    throw PreconditionError("uniform average needs a bounded layered state space");
  }
  const double total = *sys.psi_hi - *sys.psi_lo;
  double acc = 0.0;
  auto side_part = [&](Side s) {
    const auto refs = detail::side_refs(sys.z_config, s);
    const PartitionSpec& p = *refs.part;
    const SequenceSpec& d = *refs.den;
    const CoeffSeq& c = (s == Side::negative) ? coeff.neg : coeff.pos;
    const double side_total =
        (s == Side::negative) ? sys.range_series_neg.value_or_bound()
                              : sys.range_series_pos.value_or_bound();
    double covered = 0.0, part = 0.0;
    if (s == Side::negative) {
      const Index k_in = std::max({p.window_hi, d.window_hi, c.window_hi}) + 1;
      const Index k_out = std::min({p.window_lo, d.window_lo, c.window_lo - 1});
      const double closure = d.at(k_in) * (-p.at(k_in));
      covered += closure;
      part += c.inner * closure;
      for (Index k = k_out; k < k_in; ++k) {
        const double len = d.at(k + 1) * p.spacing(k);
        covered += len;
        part += c.at(k + 1) * len;
      }
    } else {
      const Index k_in = std::min({p.window_lo, d.window_lo, c.window_lo}) - 1;
      const Index k_out = std::max({p.window_hi, d.window_hi, c.window_hi - 1});
      const double closure = d.at(k_in + 1) * p.at(k_in + 1);
      covered += closure;
      part += c.inner * closure;
      for (Index k = k_in + 1; k <= k_out; ++k) {
        const double len = d.at(k + 1) * p.spacing(k);
        covered += len;
        part += c.at(k + 1) * len;
      }
    }
    const double remainder = std::max(side_total - covered, 0.0);
    part += c.outer * remainder;
    acc += part;
  };
  side_part(Side::negative);
  side_part(Side::positive);
  return acc / total;
}

}  // namespace skewdiff
