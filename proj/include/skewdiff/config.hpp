#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "sequences.hpp"
#include "tail_family.hpp"

namespace skewdiff {

// Full description of the countably skewed medium: breakpoints l_k < 0 < r_k
// accumulating at 0 and piecewise-constant density levels gamma_k (left) and
// gammabar_k (right). The density on (l_k, l_{k+1}) is gamma_{k+1}; on
// (r_k, r_{k+1}) it is gammabar_{k+1}.
struct SkewConfig {
  std::string name;
  PartitionSpec neg_partition;  // (l_k)
  PartitionSpec pos_partition;  // (r_k)
  SequenceSpec neg_density;     // (gamma_k)
  SequenceSpec pos_density;     // (gammabar_k)

  double l(Index k) const { return neg_partition.at(k); }
  double r(Index k) const { return pos_partition.at(k); }
  double gamma(Index k) const { return neg_density.at(k); }
  double gammabar(Index k) const { return pos_density.at(k); }

  // Density limits at the accumulation point (k -> +inf for gamma,
  // k -> -inf for gammabar); may be 0 or +inf.
  double gamma_limit() const { return neg_density.inner_limit(); }
  double gammabar_limit() const { return pos_density.inner_limit(); }

  bool limits_finite_positive() const {
    const double g = gamma_limit(), gb = gammabar_limit();
    return std::isfinite(g) && g > 0.0 && std::isfinite(gb) && gb > 0.0;
  }
};

struct ValidationReport {
  std::vector<std::string> issues;
  std::vector<std::string> warnings;
  bool valid() const { return issues.empty(); }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& s : issues) os << "error: " << s << "\n";
    for (const auto& s : warnings) os << "warning: " << s << "\n";
    return os.str();
  }
};

namespace detail {

inline bool rel_close(double a, double b, double rtol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rtol * std::max(scale, 1e-300);
}

inline void check_sequence(const SequenceSpec& s, const std::string& label,
                           ValidationReport& rep) {
  if (s.window_lo > -1 || s.window_hi < 1) {
    rep.issues.push_back(label + ": window must span at least [-1, 1]");
    return;
  }
  if (s.values.size() != static_cast<size_t>(s.window_hi - s.window_lo + 1)) {
    rep.issues.push_back(label + ": explicit value count does not match window");
    return;
  }
  for (Index k = s.window_lo; k <= s.window_hi; ++k) {
    const double v = s.values[static_cast<size_t>(k - s.window_lo)];
    if (!(v > 0.0) || !std::isfinite(v)) {
      rep.issues.push_back(label + ": positivity violated at k=" + std::to_string(k));
    }
  }
  for (const TailFamily* f : {&s.inner_tail, &s.outer_tail}) {
    const std::string msg = f->check();
    if (!msg.empty()) rep.issues.push_back(label + ": " + msg);
  }
  if (!rep.issues.empty()) return;
  // Tail families must continue the window smoothly at the edges.
  auto edge_check = [&](Index k, const TailFamily& fam, const char* which) {
    const double expl = s.values[static_cast<size_t>(k - s.window_lo)];
    const double fml = fam.value(std::llabs(k));
    if (!rel_close(expl, fml, tol::window_tail_agreement)) {
      std::ostringstream os;
      os << label << ": " << which << " tail disagrees with window edge at k=" << k
         << " (explicit " << expl << ", family " << fml << ")";
      rep.issues.push_back(os.str());
    }
  };
  if (s.side == Side::negative) {
    edge_check(s.window_hi, s.inner_tail, "inner");
    edge_check(s.window_lo, s.outer_tail, "outer");
  } else {
    edge_check(s.window_lo, s.inner_tail, "inner");
    edge_check(s.window_hi, s.outer_tail, "outer");
  }
}

inline void check_partition(const PartitionSpec& p, const std::string& label,
                            ValidationReport& rep) {
  if (p.window_lo > -1 || p.window_hi < 1) {
    rep.issues.push_back(label + ": window must span at least [-1, 1]");
    return;
  }
  if (p.positions.size() != static_cast<size_t>(p.window_hi - p.window_lo + 1)) {
    rep.issues.push_back(label + ": explicit position count does not match window");
    return;
  }
  const double sign = (p.side == Side::negative) ? -1.0 : 1.0;
  for (Index k = p.window_lo; k <= p.window_hi; ++k) {
    const double v = p.positions[static_cast<size_t>(k - p.window_lo)];
    if (!std::isfinite(v) || !(sign * v > 0.0)) {
      rep.issues.push_back(label + ": position at k=" + std::to_string(k) +
                           " must be " + (sign < 0 ? "negative" : "positive"));
    }
  }
  for (const TailFamily* f : {&p.inner_tail, &p.outer_tail}) {
    const std::string msg = f->check();
    if (!msg.empty()) rep.issues.push_back(label + ": " + msg);
  }
  if (!rep.issues.empty()) return;
  auto edge_check = [&](Index k, const TailFamily& fam, const char* which) {
    const double expl = std::abs(p.positions[static_cast<size_t>(k - p.window_lo)]);
    const double fml = fam.value(std::llabs(k));
    if (!rel_close(expl, fml, tol::window_tail_agreement)) {
      std::ostringstream os;
      os << label << ": " << which << " tail disagrees with window edge at k=" << k
         << " (explicit magnitude " << expl << ", family " << fml << ")";
      rep.issues.push_back(os.str());
    }
  };
  if (p.side == Side::negative) {
    edge_check(p.window_hi, p.inner_tail, "inner");
    edge_check(p.window_lo, p.outer_tail, "outer");
  } else {
    edge_check(p.window_lo, p.inner_tail, "inner");
    edge_check(p.window_hi, p.outer_tail, "outer");
  }
  if (!rep.issues.empty()) return;
  // Accumulation only at 0: inner magnitudes vanish, outer ones are unbounded.
  if (p.inner_tail.limit() != 0.0) {
    rep.issues.push_back(label + ": inner tail magnitudes must tend to 0");
  }
  if (std::isfinite(p.outer_tail.limit())) {
    rep.issues.push_back(label + ": outer tail positions must be unbounded");
  }
  // Strict monotonicity across the window and a probe set into both tails.
  Index probe_lo = p.window_lo - 1000;
  Index probe_hi = p.window_hi + 1000;
  double prev = p.at(probe_lo);
  for (Index k = probe_lo + 1; k <= probe_hi; ++k) {
    const double cur = p.at(k);
    if (!(cur > prev)) {
      rep.issues.push_back(label + ": positions not strictly increasing at k=" +
                           std::to_string(k));
      break;
    }
    prev = cur;
  }
}

}  // namespace detail

// Local integrability of the step density near 0: the inner-tail series
// sum gamma_{k+1} * (l_{k+1} - l_k) must converge (mirrored on the right).
// Decided from the tail family asymptotics.
inline bool inner_mass_summable(const TailFamily& density_inner,
                                const TailFamily& position_inner,
                                bool* conclusive) {
  *conclusive = true;
  const TermAsym t = density_inner.value_asym().mul(position_inner.delta_asym());
  if (t.zero) return true;
  if (t.geo < 1.0) return true;
  if (t.geo > 1.0) return false;
  if (t.poly < -1.0) return true;
  if (t.poly > -1.0) return false;
  if (t.logp <= -2) return true;
  if (t.logp >= 0) return false;
  *conclusive = false;
  return false;
}

inline ValidationReport validate(const SkewConfig& cfg) {
  ValidationReport rep;
  if (cfg.neg_partition.side != Side::negative || cfg.neg_density.side != Side::negative ||
      cfg.pos_partition.side != Side::positive || cfg.pos_density.side != Side::positive) {
    rep.issues.push_back("side tags do not match field roles");
    return rep;
  }
  detail::check_partition(cfg.neg_partition, "l", rep);
  detail::check_partition(cfg.pos_partition, "r", rep);
  detail::check_sequence(cfg.neg_density, "gamma", rep);
  detail::check_sequence(cfg.pos_density, "gammabar", rep);
  if (!rep.valid()) return rep;
  bool ok = true, conclusive = true;
  ok = inner_mass_summable(cfg.neg_density.inner_tail, cfg.neg_partition.inner_tail, &conclusive);
  if (!conclusive) {
    rep.warnings.push_back("gamma: local integrability near 0 not decided symbolically");
  } else if (!ok) {
    rep.issues.push_back("gamma: density is not locally integrable near 0");
  }
  ok = inner_mass_summable(cfg.pos_density.inner_tail, cfg.pos_partition.inner_tail, &conclusive);
  if (!conclusive) {
    rep.warnings.push_back("gammabar: local integrability near 0 not decided symbolically");
  } else if (!ok) {
    rep.issues.push_back("gammabar: density is not locally integrable near 0");
  }
  return rep;
}

// Piecewise-constant density with the symmetric convention at breakpoints:
// interval interiors take the interval level, breakpoints the midpoint
// average, and 0 the average of the two one-sided limits.
inline double rho_eval(const SkewConfig& cfg, double x) {
  if (x == 0.0) {
    const double g = cfg.gamma_limit(), gb = cfg.gammabar_limit();
    if (!std::isfinite(g) || !std::isfinite(gb)) {
      throw DomainError("density at 0 undefined: one-sided limits do not exist finitely");
    }
    return 0.5 * (g + gb);
  }
  if (x < 0.0) {
    const auto loc = cfg.neg_partition.locate(x);
    if (loc.at_breakpoint) return 0.5 * (cfg.gamma(loc.k + 1) + cfg.gamma(loc.k));
    return cfg.gamma(loc.k + 1);
  }
  const auto loc = cfg.pos_partition.locate(x);
  if (loc.at_breakpoint) return 0.5 * (cfg.gammabar(loc.k + 1) + cfg.gammabar(loc.k));
  return cfg.gammabar(loc.k + 1);
}

// Identifies a density breakpoint: l_k, r_k, or the accumulation point 0.
struct BreakpointRef {
  enum class Kind { neg_l, pos_r, origin } kind = Kind::origin;
  Index k = 0;

  static BreakpointRef at_l(Index k) { return {Kind::neg_l, k}; }
  static BreakpointRef at_r(Index k) { return {Kind::pos_r, k}; }
  static BreakpointRef at_origin() { return {Kind::origin, 0}; }
};

// Factor converting the symmetric semimartingale local time at a breakpoint
// into its Revuz-normalized counterpart.
inline double revuz_factor(const SkewConfig& cfg, const BreakpointRef& bp) {
  double denom;
  switch (bp.kind) {
    case BreakpointRef::Kind::neg_l:
      denom = cfg.gamma(bp.k + 1) + cfg.gamma(bp.k);
      break;
    case BreakpointRef::Kind::pos_r:
      denom = cfg.gammabar(bp.k + 1) + cfg.gammabar(bp.k);
      break;
    case BreakpointRef::Kind::origin: {
      const double g = cfg.gamma_limit(), gb = cfg.gammabar_limit();
      if (!std::isfinite(g) || !std::isfinite(gb)) {
        throw DomainError("Revuz factor at 0 undefined: density limits do not exist finitely");
      }
      denom = g + gb;
      break;
    }
    default:
      denom = 0.0;
  }
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw DomainError("degenerate breakpoint: density sum vanishes");
  }
  return 2.0 / denom;
}

// Window of skewness parameters alpha_j in (0,1), j in [lo, lo + values.size()).
// Indices outside the window are treated as unskewed (alpha = 1/2).
struct AlphaWindow {
  Index lo = 0;
  std::vector<double> values;

  Index hi() const { return lo + static_cast<Index>(values.size()) - 1; }
  double at(Index j) const {
    if (j < lo || j > hi()) return 0.5;
    return values[static_cast<size_t>(j - lo)];
  }
};

// Builds the density sequence generated by a window of skewness parameters:
//   gamma_k = prod_{j=k}^{-1} (1 - alpha_j)/alpha_j * gamma0   (k <= -1)
//   gamma_k = prod_{j=0}^{k-1} alpha_j/(1 - alpha_j) * gamma0  (k >= 1)
// Constant tails are exact because out-of-window parameters are 1/2.
inline SequenceSpec density_from_alpha_window(const AlphaWindow& aw, double gamma0, Side side) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw DomainError("base density level must be positive");
  }
  for (double a : aw.values) {
    if (!(a > 0.0) || !(a < 1.0)) {
      throw DomainError("skewness parameter outside (0,1)");
    }
  }
  Index lo = std::min<Index>(aw.lo, -1);
  Index hi = std::max<Index>(aw.hi() + 1, 1);
  SequenceSpec out;
  out.side = side;
  out.window_lo = lo;
  out.window_hi = hi;
  out.values.assign(static_cast<size_t>(hi - lo + 1), gamma0);
  auto set = [&](Index k, double v) { out.values[static_cast<size_t>(k - lo)] = v; };
  double acc = gamma0;
  for (Index k = -1; k >= lo; --k) {
    acc *= (1.0 - aw.at(k)) / aw.at(k);
    set(k, acc);
  }
  acc = gamma0;
  for (Index k = 1; k <= hi; ++k) {
    acc *= aw.at(k - 1) / (1.0 - aw.at(k - 1));
    set(k, acc);
  }
  const double lo_val = out.values.front();
  const double hi_val = out.values.back();
  if (side == Side::negative) {
    out.inner_tail = TailFamily::constant(hi_val);
    out.outer_tail = TailFamily::constant(lo_val);
  } else {
    out.inner_tail = TailFamily::constant(lo_val);
    out.outer_tail = TailFamily::constant(hi_val);
  }
  return out;
}

struct DensityPair {
  SequenceSpec neg;  // gamma, negative side
  SequenceSpec pos;  // gammabar, positive side
};

inline DensityPair gammas_from_alphas(const AlphaWindow& alphas_neg,
                                      const AlphaWindow& alphas_pos, double gamma0,
                                      double gammabar0) {
  return {density_from_alpha_window(alphas_neg, gamma0, Side::negative),
          density_from_alpha_window(alphas_pos, gammabar0, Side::positive)};
}

inline double alpha_at(const SkewConfig& cfg, Side side, Index k) {
  if (side == Side::negative) {
    const double a = cfg.gamma(k + 1), b = cfg.gamma(k);
    return a / (a + b);
  }
  const double a = cfg.gammabar(k + 1), b = cfg.gammabar(k);
  return a / (a + b);
}

struct AlphaReport {
  Index neg_lo = 0;                   // alpha_k for k in [neg_lo, neg_lo + alpha_neg.size())
  std::vector<double> alpha_neg;      // at breakpoints l_k
  Index pos_lo = 0;
  std::vector<double> alpha_pos;      // at breakpoints r_k
  std::optional<double> effective_alpha;  // skew at the accumulation point
  std::string note;
};

inline AlphaReport alphas_from_gammas(const SkewConfig& cfg) {
  AlphaReport rep;
  rep.neg_lo = cfg.neg_density.window_lo - 1;
  for (Index k = rep.neg_lo; k <= cfg.neg_density.window_hi + 1; ++k) {
    rep.alpha_neg.push_back(alpha_at(cfg, Side::negative, k));
  }
  rep.pos_lo = cfg.pos_density.window_lo - 1;
  for (Index k = rep.pos_lo; k <= cfg.pos_density.window_hi + 1; ++k) {
    rep.alpha_pos.push_back(alpha_at(cfg, Side::positive, k));
  }
  const double g = cfg.gamma_limit(), gb = cfg.gammabar_limit();
  if (std::isfinite(g) && std::isfinite(gb)) {
    if (g == 0.0 && gb == 0.0) {
      rep.effective_alpha = 0.5;
    } else {
      rep.effective_alpha = gb / (gb + g);
    }
  } else if (std::isfinite(g) != std::isfinite(gb)) {
    // One side blows up: all mass pushes toward the finite side.
    rep.effective_alpha = std::isfinite(gb) ? 0.0 : 1.0;
  } else {
    rep.note = "effective alpha undefined: both density limits are infinite";
  }
  return rep;
}

}  // namespace skewdiff
