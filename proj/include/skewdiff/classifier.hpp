#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "series.hpp"

namespace skewdiff {

enum class TriState { yes, no, unknown };

inline const char* tri_state_name(TriState t) {
  switch (t) {
    case TriState::yes: return "true";
    case TriState::no: return "false";
    case TriState::unknown: return "unknown";
  }
  return "?";
}

namespace detail {

// Constant level of an inner density tail when the family is effectively
// constant (the only case compatible with both variation conditions holding).
inline std::optional<double> constant_level(const TailFamily& f) {
  switch (f.kind) {
    case TailKind::constant: return f.scale;
    case TailKind::power:
      if (f.exponent == 0.0) return f.scale;
      return std::nullopt;
    case TailKind::geometric:
      if (f.ratio == 1.0) return f.scale;
      return std::nullopt;
    case TailKind::harmonic_partial_sum: return std::nullopt;
  }
  return std::nullopt;
}

// One-sided density variation sum over the inner half axis:
//   negative side: sum_{k>=0} |g(k+1) - g(k)|
//   positive side: sum_{k<=0} |g(k+1) - g(k)|
// optionally on the reciprocal values. The family tail telescopes exactly
// because every family is monotone in |k|.
inline SeriesVerdict variation_sum(const SequenceSpec& den, bool reciprocal) {
  auto val = [&](Index k) {
    const double g = den.at(k);
    return reciprocal ? 1.0 / g : g;
  };
  double explicit_part = 0.0;
  Index k_edge;  // first index fully inside the inner family region
  if (den.side == Side::negative) {
    k_edge = den.window_hi + 1;
    for (Index k = 0; k < k_edge; ++k) explicit_part += std::abs(val(k + 1) - val(k));
  } else {
    k_edge = den.window_lo;  // tail covers indices <= k_edge - 1... anchor at k_edge
    for (Index k = 0; k >= k_edge; --k) explicit_part += std::abs(val(k + 1) - val(k));
  }
  double limit = den.inner_tail.limit();
  if (reciprocal) limit = (limit == 0.0) ? std::numeric_limits<double>::infinity()
                                         : (std::isinf(limit) ? 0.0 : 1.0 / limit);
  const Index n_edge = std::llabs(k_edge);
  double anchor = den.inner_tail.value(n_edge);
  if (reciprocal) anchor = 1.0 / anchor;
  if (!std::isfinite(limit)) {
    return SeriesVerdict::divergent(explicit_part, "tail:telescoping", n_edge);
  }
  return SeriesVerdict::exact(explicit_part + std::abs(limit - anchor), "tail:telescoping",
                              n_edge);
}

// One-sided skewness deviation sum |2 alpha_k - 1| over the inner half axis.
inline SeriesVerdict alpha_deviation_sum(const SequenceSpec& den) {
  auto term = [&](Index k) {
    const double a = den.at(k + 1), b = den.at(k);
    return std::abs(a - b) / (a + b);
  };
  double explicit_part = 0.0;
  Index k_edge;
  if (den.side == Side::negative) {
    k_edge = den.window_hi + 1;
    for (Index k = 0; k < k_edge; ++k) explicit_part += term(k);
  } else {
    k_edge = den.window_lo;
    for (Index k = 0; k >= k_edge; --k) explicit_part += term(k);
  }
  const Index n_edge = std::llabs(k_edge);
  const double limit = den.inner_tail.limit();
  const double anchor = den.inner_tail.value(n_edge);
  if (limit > 0.0 && std::isfinite(limit)) {
    // |2a-1| = |dg| / (g_{k+1} + g_k) <= |dg| / (2 min); the telescoped
    // increment mass is |limit - anchor|.
    const double floor_val = std::min(limit, anchor);
    const double bound = floor_val > 0.0 ? std::abs(limit - anchor) / (2.0 * floor_val) : 0.0;
    return {SeriesStatus::Converges, explicit_part, bound, n_edge, "tail:alpha-ratio"};
  }
  // Families drifting to 0 or infinity keep |2 alpha - 1| non-summable:
  // power ~ |p|/2k, geometric ~ const, harmonic ~ 1/(2 k log k).
  return SeriesVerdict::divergent(explicit_part, "tail:alpha-ratio", n_edge);
}

struct SideRefs {
  const PartitionSpec* part;
  const SequenceSpec* den;
};

inline SideRefs side_refs(const SkewConfig& cfg, Side s) {
  if (s == Side::negative) return {&cfg.neg_partition, &cfg.neg_density};
  return {&cfg.pos_partition, &cfg.pos_density};
}

// Full-line sum of spacing/density or density*spacing over one side.
// weight_by_density false: sum spacing(k)/den(k+1)  (transience test)
// weight_by_density true:  sum den(k+1)*spacing(k)  (invariant mass)
inline SeriesVerdict side_line_sum(const SkewConfig& cfg, Side s, bool weight_by_density,
                                   const SeriesPolicy& pol) {
  const auto refs = side_refs(cfg, s);
  const PartitionSpec& p = *refs.part;
  const SequenceSpec& d = *refs.den;
  auto term_at = [&](Index k) {
    const double sp = p.spacing(k);
    const double g = d.at(k + 1);
    return weight_by_density ? g * sp : sp / g;
  };

  // Split indices: inner closure beyond k_in, outer tail beyond k_out.
  Index k_in, k_out;
  if (s == Side::negative) {
    k_in = std::max(p.window_hi, d.window_hi) + 1;
    k_out = std::min(p.window_lo, d.window_lo);
  } else {
    k_in = std::min(p.window_lo, d.window_lo) - 1;
    k_out = std::max(p.window_hi, d.window_hi);
  }

  double mid = 0.0;
  if (s == Side::negative) {
    for (Index k = k_out; k < k_in; ++k) mid += term_at(k);
  } else {
    for (Index k = k_in + 1; k < k_out; ++k) mid += term_at(k);
  }

  // Inner closure: spacings toward 0 telescope to the edge magnitude and the
  // density level is constant there (guaranteed by the S0/S1 gate).
  const auto level = constant_level(d.inner_tail);
  if (!level) {
    return {SeriesStatus::Inconclusive, mid, 0.0, 0,
            "inner-density-not-constant"};
  }
  const double edge_mag = (s == Side::negative) ? -p.at(k_in) : p.at(k_in + 1);
  const double inner_part = weight_by_density ? *level * edge_mag : edge_mag / *level;

  // Outer tail: intervals below l(k_out) on the left, above r(k_out) on the
  // right; the first outer interval index differs by one between sides since
  // spacing(k) spans (position k, position k+1).
  const int dir = (s == Side::negative) ? -1 : +1;
  const Index outer_start = (s == Side::negative) ? k_out - 1 : k_out;
  auto term = [&, outer_start, dir](Index depth) { return term_at(outer_start + dir * depth); };
  TermAsym da = p.outer_tail.delta_asym();
  TermAsym ga = d.outer_tail.value_asym();
  TermAsym shape = weight_by_density ? ga.mul(da) : da.mul(ga.reciprocal());
  SeriesVerdict outer = evaluate_tail_series(term, shape, pol);
  outer.partial_sum += mid + inner_part;
  outer.rule += ";inner:exact";
  return outer;
}

// Boundary explosion sum toward +inf or -inf with base index n0:
//   right: sum_{l>=n0} (r_{l+1}-r_l)/gbar_{l+1} * sum_{k=n0}^{l} gbar_{k+1}(r_{k+1}-r_k)
//   left:  mirrored toward -inf with base -n0.
// Diverges-to-infinity means the boundary is inaccessible (conservative side).
inline SeriesVerdict boundary_sum(const SkewConfig& cfg, Side s, Index n0,
                                  const SeriesPolicy& pol) {
  const auto refs = side_refs(cfg, s);
  const PartitionSpec& p = *refs.part;
  const SequenceSpec& d = *refs.den;
  const int dir = (s == Side::positive) ? +1 : -1;
  const Index base = (s == Side::positive) ? n0 : -n0;

  // R1: spacings bounded below infinitely often force divergence, because
  // T_l >= (spacing_l)^2 for l past the base.
  const TailFamily& po = p.outer_tail;
  const bool spaced = (po.kind == TailKind::power && po.exponent >= 1.0) ||
                      (po.kind == TailKind::geometric && po.ratio > 1.0);
  if (spaced) {
    return SeriesVerdict::divergent(0.0, "R1:spacing", 0);
  }

  Index l0 = (s == Side::positive) ? std::max({base, p.window_hi, d.window_hi})
                                   : std::min({base, p.window_lo, d.window_lo});
  // Prefix of the inner weight sum from the base up to (exclusive) l0.
  double weight_prefix = 0.0;
  double head = 0.0;
  {
    double run = 0.0;
    for (Index l = base; l != l0; l += dir) {
      const double sp = std::abs(p.spacing(s == Side::positive ? l : l - 1));
      const double g = d.at(s == Side::positive ? l + 1 : l);
      run += g * sp;
      head += sp / g * run;
    }
    weight_prefix = run;
  }

  // Sequentially evaluated terms from l0 outward.
  double running = weight_prefix;
  auto term = [&, l0, dir](Index depth) mutable {
    const Index l = l0 + dir * depth;
    const double sp = std::abs(p.spacing(s == Side::positive ? l : l - 1));
    const double g = d.at(s == Side::positive ? l + 1 : l);
    running += g * sp;
    return sp / g * running;
  };

  // R2: symbolic shape of T_l.
  TermAsym sp_a = p.outer_tail.delta_asym();
  TermAsym g_a = d.outer_tail.value_asym();
  TermAsym weight_term = g_a.mul(sp_a);
  std::optional<TermAsym> shape;
  const SeriesStatus weight_status = classify_asym(weight_term);
  if (weight_status == SeriesStatus::Converges) {
    shape = sp_a.mul(g_a.reciprocal());
  } else if (weight_status == SeriesStatus::Diverges) {
    shape = sp_a.mul(g_a.reciprocal()).mul(weight_term.partial_sum());
  }
  SeriesVerdict v = evaluate_tail_series(term, shape, pol);
  v.partial_sum += head;
  return v;
}

inline TriState holds_if_diverges(const SeriesVerdict& a, const SeriesVerdict& b) {
  if (a.converges() || b.converges()) return TriState::no;
  if (a.diverges() && b.diverges()) return TriState::yes;
  return TriState::unknown;
}

inline TriState holds_if_converges(const SeriesVerdict& v) {
  switch (v.status) {
    case SeriesStatus::Converges: return TriState::yes;
    case SeriesStatus::Diverges: return TriState::no;
    default: return TriState::unknown;
  }
}

}  // namespace detail

struct TwoSidedVerdict {
  SeriesVerdict neg;  // left half axis
  SeriesVerdict pos;  // right half axis
  SeriesVerdict combined;
};

struct ClassifyOptions {
  Index n0 = 1;  // base index of the boundary sums; any of {1, 2, 5}
  SeriesPolicy policy;
};

// sum_{k<=0}|gbar_{k+1}-gbar_k| + sum_{k>=0}|g_{k+1}-g_k|: the process is a
// semimartingale iff this converges.
inline SeriesVerdict check_S0(const SkewConfig& cfg) {
  return SeriesVerdict::both(detail::variation_sum(cfg.neg_density, false),
                             detail::variation_sum(cfg.pos_density, false));
}

// Same sums on reciprocal densities: the scale derivative has locally bounded
// variation iff this converges.
inline SeriesVerdict check_S1(const SkewConfig& cfg) {
  return SeriesVerdict::both(detail::variation_sum(cfg.neg_density, true),
                             detail::variation_sum(cfg.pos_density, true));
}

// sum |2 alpha_k - 1| + sum |2 alphabar_k - 1| over the inner half axes.
inline SeriesVerdict check_LGloc(const SkewConfig& cfg) {
  return SeriesVerdict::both(detail::alpha_deviation_sum(cfg.neg_density),
                             detail::alpha_deviation_sum(cfg.pos_density));
}

struct H1Result {
  TriState status = TriState::unknown;
  std::string note;
};

// Sufficient-condition heuristic: positive finite one-sided density limits at
// the accumulation point. Never proves failure.
inline H1Result check_H1(const SkewConfig& cfg) {
  const double g = cfg.gamma_limit(), gb = cfg.gammabar_limit();
  if (std::isfinite(g) && g > 0.0 && std::isfinite(gb) && gb > 0.0) {
    return {TriState::yes, {}};
  }
  if (g == 0.0 || gb == 0.0) {
    return {TriState::unknown,
            "density limits are zero; the sufficient condition does not decide this case"};
  }
  return {TriState::unknown,
          "density limits do not exist finitely and positively; heuristic not applicable"};
}

inline void require_s0_s1(const SkewConfig& cfg) {
  if (!check_S0(cfg).converges() || !check_S1(cfg).converges()) {
    throw PreconditionError("criteria not applicable without S0 and S1");
  }
}

// Boundary inaccessibility sums toward +inf (first) and -inf (second).
// Divergence on both sides means no explosion from any starting point.
inline TwoSidedVerdict check_conservative(const SkewConfig& cfg, const ClassifyOptions& opt = {}) {
  require_s0_s1(cfg);
  TwoSidedVerdict v;
  v.pos = detail::boundary_sum(cfg, Side::positive, opt.n0, opt.policy);
  v.neg = detail::boundary_sum(cfg, Side::negative, opt.n0, opt.policy);
  v.combined = SeriesVerdict::both(v.neg, v.pos);
  return v;
}

// Reciprocal-density spacing sums over each full half line; simultaneous
// divergence is equivalent to recurrence.
inline TwoSidedVerdict check_recurrent(const SkewConfig& cfg, const ClassifyOptions& opt = {}) {
  require_s0_s1(cfg);
  TwoSidedVerdict v;
  v.neg = detail::side_line_sum(cfg, Side::negative, false, opt.policy);
  v.pos = detail::side_line_sum(cfg, Side::positive, false, opt.policy);
  v.combined = SeriesVerdict::both(v.neg, v.pos);
  return v;
}

// Total mass of the invariant measure rho dx; convergence means positive
// recurrence and the verdict's value is the normalizing constant.
inline TwoSidedVerdict check_positive_recurrent(const SkewConfig& cfg,
                                                const ClassifyOptions& opt = {}) {
  const TwoSidedVerdict rec = check_recurrent(cfg, opt);
  if (detail::holds_if_diverges(rec.neg, rec.pos) == TriState::no) {
    throw PreconditionError("not recurrent");
  }
  TwoSidedVerdict v;
  v.neg = detail::side_line_sum(cfg, Side::negative, true, opt.policy);
  v.pos = detail::side_line_sum(cfg, Side::positive, true, opt.policy);
  v.combined = SeriesVerdict::both(v.neg, v.pos);
  return v;
}

struct ClassificationReport {
  SeriesVerdict s0, s1, lgloc;
  H1Result h1;
  TwoSidedVerdict conservative_series;  // Diverges (both sides) = conservative
  TwoSidedVerdict recurrent_series;     // Diverges (both sides) = recurrent
  TwoSidedVerdict positive_recurrent_series;  // Converges = positive recurrent

  TriState semimartingale = TriState::unknown;
  TriState scale_regular = TriState::unknown;  // S1
  TriState lgloc_holds = TriState::unknown;
  TriState conservative = TriState::unknown;
  TriState recurrent = TriState::unknown;
  TriState positive_recurrent = TriState::unknown;

  std::optional<double> effective_alpha;
  std::optional<double> gamma_limit, gammabar_limit;
  std::optional<double> invariant_mass;
  std::vector<std::string> notes;

  bool all_conclusive() const {
    return semimartingale != TriState::unknown && scale_regular != TriState::unknown &&
           lgloc_holds != TriState::unknown && conservative != TriState::unknown &&
           recurrent != TriState::unknown && positive_recurrent != TriState::unknown;
  }
};

inline ClassificationReport classify_all(const SkewConfig& cfg, const ClassifyOptions& opt = {}) {
  ClassificationReport rep;
  rep.s0 = check_S0(cfg);
  rep.s1 = check_S1(cfg);
  rep.lgloc = check_LGloc(cfg);
  rep.h1 = check_H1(cfg);

  auto tri_of = [](const SeriesVerdict& v) {
    switch (v.status) {
      case SeriesStatus::Converges: return TriState::yes;
      case SeriesStatus::Diverges: return TriState::no;
      default: return TriState::unknown;
    }
  };
  rep.semimartingale = tri_of(rep.s0);
  rep.scale_regular = tri_of(rep.s1);
  rep.lgloc_holds = tri_of(rep.lgloc);

  if (rep.s0.converges()) {
    rep.gamma_limit = cfg.gamma_limit();
    rep.gammabar_limit = cfg.gammabar_limit();
  }
  const AlphaReport ar = alphas_from_gammas(cfg);
  rep.effective_alpha = ar.effective_alpha;

  if (rep.s0.converges() && rep.s1.converges()) {
    rep.conservative_series = check_conservative(cfg, opt);
    rep.conservative = detail::holds_if_diverges(rep.conservative_series.neg,
                                                 rep.conservative_series.pos);
    rep.recurrent_series = check_recurrent(cfg, opt);
    rep.recurrent =
        detail::holds_if_diverges(rep.recurrent_series.neg, rep.recurrent_series.pos);
    if (rep.recurrent == TriState::yes) {
      rep.positive_recurrent_series = check_positive_recurrent(cfg, opt);
      rep.positive_recurrent = detail::holds_if_converges(rep.positive_recurrent_series.combined);
      if (rep.positive_recurrent == TriState::yes) {
        rep.invariant_mass = rep.positive_recurrent_series.combined.value_or_bound();
      }
    } else if (rep.recurrent == TriState::no) {
      rep.positive_recurrent = TriState::no;
      rep.notes.push_back("positive recurrence ruled out: not recurrent");
    }
  } else {
    rep.notes.push_back(
        "conservativeness/recurrence criteria need both variation conditions; left unknown");
  }

  // Implication chain sanity: positive recurrent => recurrent => conservative.
  if (rep.positive_recurrent == TriState::yes && rep.recurrent != TriState::yes) {
    rep.positive_recurrent = TriState::unknown;
    rep.notes.push_back("implication check failed: positive recurrence without recurrence");
  }
  if (rep.recurrent == TriState::yes && rep.conservative == TriState::no) {
    rep.recurrent = TriState::unknown;
    rep.notes.push_back("implication check failed: recurrence with explosive boundary");
  }
  return rep;
}

}  // namespace skewdiff
