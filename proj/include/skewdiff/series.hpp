#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "common.hpp"
#include "tail_family.hpp"

namespace skewdiff {

enum class SeriesStatus { Converges, Diverges, Inconclusive };

inline const char* series_status_name(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Converges: return "Converges";
    case SeriesStatus::Diverges: return "Diverges";
    case SeriesStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct SeriesVerdict {
  SeriesStatus status = SeriesStatus::Inconclusive;
  double partial_sum = 0.0;   // accumulated value (includes exact tail closures)
  double tail_bound = 0.0;    // remainder bound, meaningful when Converges
  Index k_max_used = 0;
  std::string rule;           // symbolic rule id or "numeric-heuristic"

  bool conclusive() const { return status != SeriesStatus::Inconclusive; }
  bool converges() const { return status == SeriesStatus::Converges; }
  bool diverges() const { return status == SeriesStatus::Diverges; }
  double value_or_bound() const { return partial_sum + tail_bound; }

  static SeriesVerdict exact(double value, const std::string& rule_id, Index kmax = 0) {
    return {SeriesStatus::Converges, value, 0.0, kmax, rule_id};
  }
  static SeriesVerdict divergent(double partial, const std::string& rule_id, Index kmax = 0) {
    return {SeriesStatus::Diverges, partial, 0.0, kmax, rule_id};
  }

  // Combine independent one-sided verdicts into a two-sided one: the total
  // converges iff both parts converge.
  static SeriesVerdict both(const SeriesVerdict& a, const SeriesVerdict& b) {
    SeriesVerdict out;
    out.partial_sum = a.partial_sum + b.partial_sum;
    out.tail_bound = a.tail_bound + b.tail_bound;
    out.k_max_used = std::max(a.k_max_used, b.k_max_used);
    out.rule = a.rule == b.rule ? a.rule : a.rule + ";" + b.rule;
    if (a.diverges() || b.diverges()) {
      out.status = SeriesStatus::Diverges;
    } else if (a.converges() && b.converges()) {
      out.status = SeriesStatus::Converges;
    } else {
      out.status = SeriesStatus::Inconclusive;
    }
    return out;
  }
};

struct SeriesPolicy {
  double tol_tail = tol::tail;
  double divergence_level = tol::series_divergence;
  Index k_start = Index(1) << 10;   // first numeric checkpoint
  Index k_stop = Index(1) << 20;    // last checkpoint (doubling in between)
};

// Sums a nonnegative tail series t(0), t(1), ... (depth-indexed) whose
// asymptotic shape is known symbolically. The term callable is invoked with
// strictly increasing depths, so stateful (cumulative) lambdas are safe.
//
// Symbolic rules:
//   tail:zero        terms vanish identically beyond some depth
//   tail:geometric   geo < 1 converges with ratio bound; geo > 1 diverges
//   tail:polynomial  geo = 1, poly < -1 converges with integral bound; poly > -1 diverges
//   tail:log         geo = 1, poly = -1: logp <= -2 converges, logp >= -1 diverges
// Without a usable shape, falls back to partial-sum doubling heuristics.
inline SeriesVerdict evaluate_tail_series(const std::function<double(Index)>& term,
                                          std::optional<TermAsym> asym,
                                          const SeriesPolicy& pol = {}) {
  SeriesVerdict v;
  double sum = 0.0;
  Index d = 0;
  double last = 0.0;
  auto advance_to = [&](Index stop) {
    for (; d < stop; ++d) {
      last = term(d);
      sum += last;
      if (sum > 1e300) break;
    }
  };

  if (asym && asym->zero) {
    // Zero shape means the terms are exactly 0 beyond bounded depth; sum a
    // short prefix to pick up any transient part.
    advance_to(64);
    v = SeriesVerdict::exact(sum, "tail:zero", d);
    return v;
  }

  if (asym && (asym->geo < 1.0 - 1e-12 || asym->geo > 1.0 + 1e-12)) {
    if (asym->geo > 1.0) {
      advance_to(64);
      return SeriesVerdict::divergent(sum, "tail:geometric", d);
    }
    // Ratio test bound: advance until the local geometric envelope
    // q_d = geo * ((d+1)/d)^poly * (log ratio adj) drops below q* < 1.
    const double q_star = 0.5 * (1.0 + asym->geo);
    Index min_depth = 64;
    while (true) {
      advance_to(min_depth);
      const double dd = static_cast<double>(std::max<Index>(d, 2));
      double q = asym->geo * std::pow((dd + 1.0) / dd, asym->poly);
      if (asym->logp > 0) q *= std::pow(std::log(dd + 1.0) / std::log(dd), asym->logp);
      if (q <= q_star || min_depth >= pol.k_stop) {
        if (q > q_star) break;  // could not certify; fall through to heuristic
        v = {SeriesStatus::Converges, sum, std::abs(last) * q_star / (1.0 - q_star), d,
             "tail:geometric"};
        return v;
      }
      min_depth *= 2;
    }
  } else if (asym) {
    // geo == 1 up to tolerance: polynomial / logarithmic scale.
    if (asym->poly < -1.0 - 1e-9) {
      Index depth = 1024;
      advance_to(depth);
      const double p1 = -asym->poly - 1.0;
      double bound = std::abs(last) * static_cast<double>(d) / p1;
      if (asym->logp > 0) {
        bound *= 1.0 + 2.0 * asym->logp / (p1 * std::log(static_cast<double>(d)));
      }
      bound *= 1.05;  // slack for lower-order corrections of the integral bound
      v = {SeriesStatus::Converges, sum, bound, d, "tail:polynomial"};
      return v;
    }
    if (asym->poly > -1.0 + 1e-9) {
      advance_to(64);
      return SeriesVerdict::divergent(sum, "tail:polynomial", d);
    }
    // poly == -1: decided by the log power.
    if (asym->logp >= -1) {
      advance_to(64);
      return SeriesVerdict::divergent(sum, "tail:log", d);
    }
    Index depth = 4096;
    advance_to(depth);
    const double dd = static_cast<double>(d);
    const double m = static_cast<double>(-asym->logp);
    double bound = std::abs(last) * dd * std::log(dd) / (m - 1.0) * 1.05;
    v = {SeriesStatus::Converges, sum, bound, d, "tail:log"};
    return v;
  }

  // Numeric heuristic: partial sums at doubling checkpoints.
  double prev_sum = sum;
  double prev_gap = -1.0;
  advance_to(pol.k_start);
  prev_gap = sum - prev_sum;
  prev_sum = sum;
  bool growing = true;
  double gap_ratio_max = 0.0;
  for (Index stop = pol.k_start * 2; stop <= pol.k_stop; stop *= 2) {
    advance_to(stop);
    const double gap = sum - prev_sum;
    if (gap > 1e-3 * std::max(prev_gap, 0.0) && prev_gap > 0.0) {
      gap_ratio_max = std::max(gap_ratio_max, gap / prev_gap);
    }
    growing = growing && gap > 0.0;
    prev_gap = gap;
    prev_sum = sum;
    if (sum > 1e300) return SeriesVerdict::divergent(sum, "numeric-heuristic", d);
  }
  if (sum > pol.divergence_level && growing) {
    return SeriesVerdict::divergent(sum, "numeric-heuristic", d);
  }
  // Shrinking-gap extrapolation: if checkpoint gaps decay geometrically the
  // remainder is bounded by gap * r / (1 - r).
  if (prev_gap >= 0.0 && gap_ratio_max < 0.9) {
    const double est_tail = prev_gap * gap_ratio_max / (1.0 - gap_ratio_max);
    if (est_tail + prev_gap < pol.tol_tail) {
      return {SeriesStatus::Converges, sum, est_tail + prev_gap, d, "numeric-heuristic"};
    }
  }
  return {SeriesStatus::Inconclusive, sum, 0.0, d, "numeric-heuristic"};
}

// Classification of a shape alone (no summation): does sum t(d) converge?
// Returns Inconclusive when the shape sits on a boundary the rules do not
// decide.
inline SeriesStatus classify_asym(const TermAsym& a) {
  if (a.zero) return SeriesStatus::Converges;
  if (a.geo < 1.0 - 1e-12) return SeriesStatus::Converges;
  if (a.geo > 1.0 + 1e-12) return SeriesStatus::Diverges;
  if (a.poly < -1.0 - 1e-9) return SeriesStatus::Converges;
  if (a.poly > -1.0 + 1e-9) return SeriesStatus::Diverges;
  if (a.logp <= -2) return SeriesStatus::Converges;
  if (a.logp >= -1) return SeriesStatus::Diverges;
  return SeriesStatus::Inconclusive;
}

}  // namespace skewdiff
