#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "common.hpp"

namespace skewdiff {

// Asymptotic shape of a nonnegative term sequence t(d) for depth d -> infinity:
//   t(d) ~ const * geo^d * d^poly * (log d)^logp.
// `zero` marks an identically vanishing tail.
struct TermAsym {
  double geo = 1.0;
  double poly = 0.0;
  int logp = 0;
  bool zero = false;

  static TermAsym zero_tail() { return {1.0, 0.0, 0, true}; }
  static TermAsym constant() { return {1.0, 0.0, 0, false}; }

  TermAsym mul(const TermAsym& o) const {
    if (zero || o.zero) return zero_tail();
    return {geo * o.geo, poly + o.poly, logp + o.logp, false};
  }
  TermAsym reciprocal() const {
    return {1.0 / geo, -poly, -logp, false};
  }
  // Asymptotics of the partial sums S_d = sum_{j<=d} t(j) when the series
  // diverges; for convergent series the partial sums are asymptotically constant.
  TermAsym partial_sum() const {
    if (zero) return constant();
    if (geo > 1.0) return *this;
    if (geo < 1.0) return constant();
    if (poly > -1.0) return {1.0, poly + 1.0, logp, false};
    if (poly == -1.0 && logp >= 0) return {1.0, 0.0, logp + 1, false};
    return constant();
  }
  // Dominant of two term shapes (for sums of two comparable tails).
  static TermAsym dominant(const TermAsym& a, const TermAsym& b) {
    if (a.zero) return b;
    if (b.zero) return a;
    if (a.geo != b.geo) return a.geo > b.geo ? a : b;
    if (a.poly != b.poly) return a.poly > b.poly ? a : b;
    return a.logp >= b.logp ? a : b;
  }
};

enum class TailKind { constant, power, geometric, harmonic_partial_sum };

inline const char* tail_kind_name(TailKind k) {
  switch (k) {
    case TailKind::constant: return "constant";
    case TailKind::power: return "power";
    case TailKind::geometric: return "geometric";
    case TailKind::harmonic_partial_sum: return "harmonic_partial_sum";
  }
  return "?";
}

namespace detail {

// H_n = sum_{j=1}^n 1/j, asymptotic expansion beyond n = 64.
inline double harmonic_number(double n) {
  if (n <= 0) return 0.0;
  if (n <= 64) {
    double s = 0.0;
    for (long long j = 1; j <= static_cast<long long>(n); ++j) s += 1.0 / static_cast<double>(j);
    return s;
  }
  constexpr double euler_gamma = 0.57721566490153286060651209;
  const double inv = 1.0 / n;
  return std::log(n) + euler_gamma + 0.5 * inv - inv * inv / 12.0 + inv * inv * inv * inv / 120.0;
}

}  // namespace detail

// Closed-form tail of a sequence, evaluated at the absolute index n = |k|.
//   constant:             value
//   power:                scale * n^exponent
//   geometric:            scale * ratio^n
//   harmonic_partial_sum: scale * sum_{j=1}^{n} 1/j
struct TailFamily {
  TailKind kind = TailKind::constant;
  double scale = 1.0;     // constant value for kind == constant
  double exponent = 0.0;  // power only
  double ratio = 1.0;     // geometric only

  static TailFamily constant(double v) { return {TailKind::constant, v, 0.0, 1.0}; }
  static TailFamily power(double c, double p) { return {TailKind::power, c, p, 1.0}; }
  static TailFamily geometric(double c, double a) { return {TailKind::geometric, c, 0.0, a}; }
  static TailFamily harmonic(double c) { return {TailKind::harmonic_partial_sum, c, 0.0, 1.0}; }

  double value(Index abs_k) const {
    const double n = static_cast<double>(abs_k);
    switch (kind) {
      case TailKind::constant: return scale;
      case TailKind::power: return scale * std::pow(n, exponent);
      case TailKind::geometric: return scale * std::pow(ratio, n);
      case TailKind::harmonic_partial_sum: return scale * detail::harmonic_number(n);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  // Limit as |k| -> infinity; may be 0 or +infinity.
  double limit() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
      case TailKind::constant: return scale;
      case TailKind::power:
        if (exponent > 0) return inf;
        if (exponent < 0) return 0.0;
        return scale;
      case TailKind::geometric:
        if (ratio > 1) return inf;
        if (ratio < 1) return 0.0;
        return scale;
      case TailKind::harmonic_partial_sum: return inf;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  bool limit_finite() const { return std::isfinite(limit()); }

  TermAsym value_asym() const {
    switch (kind) {
      case TailKind::constant: return TermAsym::constant();
      case TailKind::power:
        if (exponent == 0.0) return TermAsym::constant();
        return {1.0, exponent, 0, false};
      case TailKind::geometric:
        if (ratio == 1.0) return TermAsym::constant();
        return {ratio, 0.0, 0, false};
      case TailKind::harmonic_partial_sum: return {1.0, 0.0, 1, false};
    }
    return TermAsym::constant();
  }

  // Shape of the increments |f(n+1) - f(n)|.
  TermAsym delta_asym() const {
    switch (kind) {
      case TailKind::constant: return TermAsym::zero_tail();
      case TailKind::power:
        if (exponent == 0.0) return TermAsym::zero_tail();
        return {1.0, exponent - 1.0, 0, false};
      case TailKind::geometric:
        if (ratio == 1.0) return TermAsym::zero_tail();
        return {ratio, 0.0, 0, false};
      case TailKind::harmonic_partial_sum: return {1.0, -1.0, 0, false};
    }
    return TermAsym::zero_tail();
  }

  // Families are monotone in n for n >= 1; increasing or decreasing?
  bool increasing() const {
    switch (kind) {
      case TailKind::constant: return false;
      case TailKind::power: return exponent > 0;
      case TailKind::geometric: return ratio > 1;
      case TailKind::harmonic_partial_sum: return true;
    }
    return false;
  }

  // Smallest index n >= 1 whose value reaches magnitude m, assuming the family
  // is used for breakpoint magnitudes. Result is clamped to [1, cap].
  Index index_for_magnitude(double m, Index cap = (Index(1) << 60)) const {
    double est = 1.0;
    switch (kind) {
      case TailKind::constant:
        throw DomainError("constant tail has no magnitude inverse");
      case TailKind::power:
        est = std::pow(m / scale, 1.0 / exponent);
        break;
      case TailKind::geometric:
        est = std::log(m / scale) / std::log(ratio);
        break;
      case TailKind::harmonic_partial_sum: {
        constexpr double euler_gamma = 0.57721566490153286060651209;
        est = std::exp(m / scale - euler_gamma);
        break;
      }
    }
    if (!std::isfinite(est)) est = static_cast<double>(cap);
    est = std::clamp(est, 1.0, static_cast<double>(cap));
    return static_cast<Index>(est);
  }

  // Parameter sanity: strictly positive values at all indices >= 1.
  std::string check() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) return "tail scale must be positive and finite";
    if (kind == TailKind::geometric && (!(ratio > 0.0) || !std::isfinite(ratio)))
      return "geometric ratio must be positive and finite";
    if (kind == TailKind::power && !std::isfinite(exponent)) return "power exponent must be finite";
    return {};
  }

  bool operator==(const TailFamily&) const = default;
};

}  // namespace skewdiff
