#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "classifier.hpp"
#include "common.hpp"
#include "config.hpp"
#include "rng.hpp"
#include "scale.hpp"

namespace skewdiff {

enum class Scheme { euler_transformed, exact_skew };

inline const char* scheme_name(Scheme s) {
  return s == Scheme::euler_transformed ? "euler_transformed" : "exact_skew";
}

enum class RecordMode { endpoints_only, full_path, functionals };

struct SimPlan {
  Scheme scheme = Scheme::euler_transformed;
  double x0 = 0.0;
  double horizon = 1.0;
  double dt = 1e-3;
  Index n_paths = 1;
  uint64_t seed = 0;
  double x_max = 0.0;        // censor radius; 0 selects 1e3 * (1 + |x0|)
  double eps_cluster = 0.0;  // interface merge radius; 0 selects a config default
  RecordMode record = RecordMode::endpoints_only;
  int threads = 1;
  Index sample_stride = 1;
  double t_burnin = 0.0;
  bool allow_explosive = false;
};

inline void validate_plan(const SimPlan& p) {
  if (!(p.dt > 0.0)) throw DomainError("dt must be positive");
  if (p.n_paths < 1) throw DomainError("n_paths must be at least 1");
  if (!(p.horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  if (p.x_max != 0.0 && !(p.x_max > std::abs(p.x0))) {
    throw DomainError("censor radius must exceed |x0|");
  }
  if (p.sample_stride < 1) throw DomainError("sample stride must be at least 1");
}

struct MCEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  Index n_effective = 0;
  std::optional<double> analytic_target;
};

// Sequential (path-ordered) moment accumulation: deterministic for any
// thread count because per-path values are reduced in index order.
inline MCEstimate mean_and_se(const std::vector<double>& v) {
  MCEstimate e;
  e.n_effective = static_cast<Index>(v.size());
  if (v.empty()) return e;
  double mean = 0.0, m2 = 0.0;
  Index n = 0;
  for (double x : v) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  e.estimate = mean;
  if (n > 1) e.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return e;
}

template <typename Fn>
inline void parallel_for_paths(Index n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  const int workers = static_cast<int>(std::min<Index>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      constexpr Index chunk = 32;
      while (true) {
        Index i = next.fetch_add(chunk);
        if (i >= n) break;
        const Index end = std::min(n, i + chunk);
        for (; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Single-interface transition: exact draw of the skewed Brownian position
// after time dt when the only interface in reach is z with right-transmission
// probability beta. Sampled by bisection on the closed-form CDF.
inline double exact_skew_step(double x, double z, double beta, double dt, CounterRng& rng) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("transmission parameter outside (0,1)");
  double m = x - z;
  bool mirrored = false;
  if (m < 0.0) {
    m = -m;
    beta = 1.0 - beta;
    mirrored = true;
  }
  const double s = std::sqrt(dt);
  auto norm_cdf = [](double t) { return 0.5 * std::erfc(-t * 0.7071067811865475244); };
  const double F0 = (2.0 - 2.0 * beta) * norm_cdf(-m / s);  // mass of (-inf, 0)
  auto cdf = [&](double y) {
    if (y < 0.0) return (2.0 - 2.0 * beta) * norm_cdf((y - m) / s);
    return F0 + (norm_cdf((y - m) / s) - norm_cdf(-m / s)) +
           (2.0 * beta - 1.0) * (norm_cdf((y + m) / s) - norm_cdf(m / s));
  };
  const double u = rng.uniform();
  double lo = m - 10.0 * s, hi = m + 10.0 * s;
  while (cdf(lo) > u) lo -= 8.0 * s;
  while (cdf(hi) < u) hi += 8.0 * s;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * s; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  const double y = 0.5 * (lo + hi);
  return mirrored ? z - y : z + y;
}

// Skew interfaces kept explicitly by the exact scheme: positions with their
// right-transmission probabilities. Interfaces closer to 0 than the cluster
// radius are merged into the effective one at 0.
struct InterfaceTable {
  std::vector<double> pos;
  std::vector<double> beta;
  double cluster_residual = 0.0;  // skew mass |2a-1| discarded by merging
};

namespace detail {

inline InterfaceTable build_interfaces(const SkewConfig& cfg, double alpha_eff,
                                       double eps_cluster, double x_max) {
  InterfaceTable tab;
  double residual = 0.0;
  constexpr Index cap = 200000;
  auto push_side = [&](Side s) {
    const PartitionSpec& p = s == Side::negative ? cfg.neg_partition : cfg.pos_partition;
    const SequenceSpec& d = s == Side::negative ? cfg.neg_density : cfg.pos_density;
    const int to_inner = inner_direction(s);
    // Walk from the outer probe limit inward; collect both directions from the
    // window edges.
    Index k_start = (s == Side::negative) ? p.window_lo : p.window_hi;
    // Outward sweep.
    for (Index k = k_start, n = 0; n < cap; k -= to_inner, ++n) {
      const double x = p.at(k);
      if (std::abs(x) > x_max) break;
      const double b = alpha_at(cfg, s, k);
      if (std::abs(2.0 * b - 1.0) > 1e-15) {
        tab.pos.push_back(x);
        tab.beta.push_back(b);
      }
    }
    // Inward sweep down to the cluster radius.
    for (Index k = k_start + to_inner, n = 0; n < cap; k += to_inner, ++n) {
      const double x = p.at(k);
      const double b = alpha_at(cfg, s, k);
      if (std::abs(x) <= eps_cluster) {
        // Merged into the effective interface at 0; everything further in
        // lies in the constant-density region or the window remainder.
        residual += std::abs(2.0 * b - 1.0);
        if (d.in_inner_tail(k) && std::abs(2.0 * b - 1.0) <= 1e-15) break;
        continue;
      }
      if (std::abs(2.0 * b - 1.0) > 1e-15) {
        tab.pos.push_back(x);
        tab.beta.push_back(b);
      }
      if (d.in_inner_tail(k) && p.in_inner_tail(k)) {
        // Constant density region: all further interfaces are unskewed.
        break;
      }
    }
  };
  push_side(Side::negative);
  push_side(Side::positive);
  if (std::abs(2.0 * alpha_eff - 1.0) > 1e-15) {
    tab.pos.push_back(0.0);
    tab.beta.push_back(alpha_eff);
  }
  // Sort jointly by position.
  std::vector<size_t> idx(tab.pos.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return tab.pos[a] < tab.pos[b]; });
  InterfaceTable out;
  out.cluster_residual = residual;
  out.pos.reserve(idx.size());
  out.beta.reserve(idx.size());
  for (size_t i : idx) {
    out.pos.push_back(tab.pos[i]);
    out.beta.push_back(tab.beta[i]);
  }
  return out;
}

}  // namespace detail

// Refuses to simulate configurations with accessible boundaries unless the
// caller acknowledges censoring.
inline void ensure_simulatable(const SkewConfig& cfg, const SimPlan& plan) {
  if (plan.allow_explosive) return;
  TwoSidedVerdict cons;
  try {
    cons = check_conservative(cfg);
  } catch (const PreconditionError&) {
    return;  // cannot assess; scale construction will fail first if degenerate
  }
  if (detail::holds_if_diverges(cons.neg, cons.pos) == TriState::no) {
    std::ostringstream os;
    os << "explosive configuration (boundary series: left " << series_status_name(cons.neg.status)
       << " rule " << cons.neg.rule << ", right " << series_status_name(cons.pos.status)
       << " rule " << cons.pos.rule << "); pass allow_explosive to censor";
    throw PreconditionError(os.str());
  }
}

// Path engine shared by both discretizations. Immutable after construction;
// all per-path state lives on the caller's stack.
class Simulator {
 public:
  Simulator(const SkewConfig& cfg, const ScaleFunction& sf, const SimPlan& plan)
      : cfg_(&cfg), sf_(&sf), plan_(plan) {
    validate_plan(plan);
    x_max_ = plan.x_max > 0.0 ? plan.x_max : 1e3 * (1.0 + std::abs(plan.x0));
    const double inner_mag = std::min(cfg.neg_partition.inner_edge_magnitude(),
                                      cfg.pos_partition.inner_edge_magnitude());
    eps_cluster_ = plan.eps_cluster > 0.0 ? plan.eps_cluster : 0.5 * inner_mag;
    if (!(eps_cluster_ < inner_mag)) {
      throw DomainError("cluster radius must stay below the innermost window breakpoint");
    }
    if (plan.scheme == Scheme::exact_skew) {
      const auto ar = alphas_from_gammas(cfg);
      if (!ar.effective_alpha) {
        throw PreconditionError("exact scheme needs an effective skew parameter at 0");
      }
      double a = *ar.effective_alpha;
      a = std::clamp(a, 1e-12, 1.0 - 1e-12);
      interfaces_ = detail::build_interfaces(cfg, a, eps_cluster_, x_max_);
    }
    y_lo_ = sf.h(-x_max_);
    y_hi_ = sf.h(x_max_);
  }

  struct State {
    double x = 0.0;
    double y = 0.0;  // transformed coordinate, kept in sync by the Euler scheme
  };

  struct StepInfo {
    double vol = 1.0;      // diffusion coefficient in bridge space over this step
    bool bridgeable = true;  // Gaussian transition, eligible for crossing tests
  };

  State init() const {
    State s;
    s.x = plan_.x0;
    s.y = sf_->h(plan_.x0);
    return s;
  }

  StepInfo advance(State& s, CounterRng& rng) const {
    if (plan_.scheme == Scheme::euler_transformed) {
      StepInfo info;
      info.vol = sf_->sigma_tilde(s.y);
      s.y += info.vol * std::sqrt(plan_.dt) * rng.gaussian();
      s.x = sf_->map().inverse(s.y);
      return info;
    }
    StepInfo info = advance_skew(s, rng, plan_.dt, 0);
    s.y = sf_->h(s.x);
    return info;
  }

  // Bridge-space coordinate of a state / of a fixed level.
  double bridge_pos(const State& s) const {
    return plan_.scheme == Scheme::euler_transformed ? s.y : s.x;
  }
  double bridge_of(double x) const {
    return plan_.scheme == Scheme::euler_transformed ? sf_->h(x) : x;
  }

  bool censored(const State& s) const { return s.y <= y_lo_ || s.y >= y_hi_; }

  double x_max() const { return x_max_; }
  double eps_cluster() const { return eps_cluster_; }
  double cluster_residual() const { return interfaces_.cluster_residual; }
  const SimPlan& plan() const { return plan_; }
  const ScaleFunction& scale() const { return *sf_; }
  const SkewConfig& config() const { return *cfg_; }
  const InterfaceTable& interfaces() const { return interfaces_; }

  struct Outcome {
    double terminal = 0.0;
    bool censored = false;
    double censor_time = 0.0;
  };

  // Runs one path over the plan horizon, visiting (step, t, x) after every
  // dt step. The visitor is not called for censored tail segments.
  template <typename Visitor>
  Outcome run_path(Index path_id, Visitor&& vis) const {
    CounterRng rng(plan_.seed, static_cast<uint64_t>(path_id), 0);
    State s = init();
    const Index n_steps = static_cast<Index>(std::llround(plan_.horizon / plan_.dt));
    Outcome out;
    for (Index i = 0; i < n_steps; ++i) {
      advance(s, rng);
      const double t = static_cast<double>(i + 1) * plan_.dt;
      if (censored(s)) {
        out.censored = true;
        out.censor_time = t;
        out.terminal = s.x;
        return out;
      }
      vis(i + 1, t, s.x);
    }
    out.terminal = s.x;
    return out;
  }

 private:
  StepInfo advance_skew(State& s, CounterRng& rng, double dt, int depth) const {
    const double w = 5.0 * std::sqrt(dt);
    const auto& pos = interfaces_.pos;
    const auto lo = std::lower_bound(pos.begin(), pos.end(), s.x - w);
    const auto hi = std::upper_bound(pos.begin(), pos.end(), s.x + w);
    const auto count = hi - lo;
    if (count == 0) {
      s.x += std::sqrt(dt) * rng.gaussian();
      return {1.0, true};
    }
    if (count == 1) {
      const size_t i = static_cast<size_t>(lo - pos.begin());
      s.x = exact_skew_step(s.x, pos[i], interfaces_.beta[i], dt, rng);
      return {1.0, false};
    }
    if (depth < 10) {
      advance_skew(s, rng, 0.5 * dt, depth + 1);
      advance_skew(s, rng, 0.5 * dt, depth + 1);
      return {1.0, false};
    }
    // Cluster too dense even at the floor step: one local transformed step.
    double y = sf_->h(s.x);
    const double vol = sf_->sigma_tilde(y);
    y += vol * std::sqrt(dt) * rng.gaussian();
    s.x = sf_->map().inverse(y);
    return {vol, false};
  }

  const SkewConfig* cfg_;
  const ScaleFunction* sf_;
  SimPlan plan_;
  InterfaceTable interfaces_;
  double x_max_ = 0.0, eps_cluster_ = 0.0;
  double y_lo_ = 0.0, y_hi_ = 0.0;
};

struct PathEnsemble {
  SimPlan plan;
  double x_max = 0.0;
  double eps_cluster = 0.0;
  double cluster_residual = 0.0;
  std::vector<double> terminal;
  std::vector<uint8_t> censored;
  std::vector<double> censor_time;  // 0 when uncensored
  Index samples_per_path = 0;       // full_path mode
  std::vector<std::vector<double>> paths;  // x at recorded strides, full_path mode
  std::string run_log;

  double censored_fraction() const {
    if (terminal.empty()) return 0.0;
    double c = 0.0;
    for (uint8_t f : censored) c += f;
    return c / static_cast<double>(terminal.size());
  }
};

inline PathEnsemble simulate_path(const SkewConfig& cfg, const ScaleFunction& sf,
                                  const SimPlan& plan) {
  ensure_simulatable(cfg, plan);
  Simulator sim(cfg, sf, plan);
  PathEnsemble ens;
  ens.plan = plan;
  ens.x_max = sim.x_max();
  ens.eps_cluster = sim.eps_cluster();
  ens.cluster_residual = sim.cluster_residual();
  ens.terminal.resize(static_cast<size_t>(plan.n_paths));
  ens.censored.assign(static_cast<size_t>(plan.n_paths), 0);
  ens.censor_time.assign(static_cast<size_t>(plan.n_paths), 0.0);
  const bool full = plan.record == RecordMode::full_path;
  const Index n_steps = static_cast<Index>(std::llround(plan.horizon / plan.dt));
  const Index n_rec = full ? n_steps / plan.sample_stride : 0;
  if (full) {
    ens.samples_per_path = n_rec + 1;
    ens.paths.assign(static_cast<size_t>(plan.n_paths), {});
  }
  parallel_for_paths(plan.n_paths, plan.threads, [&](Index i) {
    std::vector<double>* rec = nullptr;
    if (full) {
      auto& v = ens.paths[static_cast<size_t>(i)];
      v.reserve(static_cast<size_t>(n_rec + 1));
      v.push_back(plan.x0);
      rec = &v;
    }
    const auto out = sim.run_path(i, [&](Index step, double, double x) {
      if (rec && step % plan.sample_stride == 0) rec->push_back(x);
    });
    ens.terminal[static_cast<size_t>(i)] = out.terminal;
    ens.censored[static_cast<size_t>(i)] = out.censored ? 1 : 0;
    ens.censor_time[static_cast<size_t>(i)] = out.censor_time;
  });
  std::ostringstream log;
  log << "scheme=" << scheme_name(plan.scheme) << " dt=" << plan.dt << " x_max=" << ens.x_max
      << " eps_cluster=" << ens.eps_cluster
      << " cluster_residual_bound=" << ens.cluster_residual;
  ens.run_log = log.str();
  return ens;
}

// First-passage loop shared by the hitting and exit estimators. Returns the
// exit side (+1 for b, -1 for a) and the crossing time; 0 when the path was
// censored or ran past the step cap.
namespace detail {

struct ExitRecord {
  int side = 0;
  double time = 0.0;
};

inline ExitRecord first_exit(const Simulator& sim, Index path_id, double a, double b,
                             double t_cap) {
  CounterRng rng(sim.plan().seed, static_cast<uint64_t>(path_id), 0);
  Simulator::State s = sim.init();
  const double A = sim.bridge_of(a), B = sim.bridge_of(b);
  const double dt = sim.plan().dt;
  const Index cap = static_cast<Index>(std::llround(t_cap / dt));
  double prev = sim.bridge_pos(s);
  for (Index i = 0; i < cap; ++i) {
    const auto info = sim.advance(s, rng);
    const double cur = sim.bridge_pos(s);
    const double t = static_cast<double>(i + 1) * dt;
    if (cur <= A || cur >= B) {
      const double bound = cur <= A ? A : B;
      const double frac = (bound - prev) / (cur - prev);
      return {cur <= A ? -1 : +1, t - dt + frac * dt};
    }
    if (info.bridgeable) {
      // Brownian bridge crossing probabilities within the step.
      const double v2dt = info.vol * info.vol * dt;
      const double pa = std::exp(-2.0 * (prev - A) * (cur - A) / v2dt);
      if (rng.uniform() < pa) return {-1, t - 0.5 * dt};
      const double pb = std::exp(-2.0 * (B - prev) * (B - cur) / v2dt);
      if (rng.uniform() < pb) return {+1, t - 0.5 * dt};
    }
    if (sim.censored(s)) return {0, t};
    prev = cur;
  }
  return {0, t_cap};
}

}  // namespace detail

inline MCEstimate mc_hitting(const SkewConfig& cfg, const ScaleFunction& sf, double x, double a,
                             double b, Index n_paths, uint64_t seed, Scheme scheme,
                             double dt = 1e-3, int threads = 1) {
  if (!(a < b)) throw DomainError("hitting interval requires a < b");
  MCEstimate est;
  est.analytic_target = hitting_prob_up(sf, std::clamp(x, a, b), a, b);
  if (x >= b || x <= a) {
    est.estimate = x >= b ? 1.0 : 0.0;
    est.std_error = 0.0;
    est.n_effective = n_paths;
    return est;
  }
  SimPlan plan;
  plan.scheme = scheme;
  plan.x0 = x;
  plan.dt = dt;
  plan.n_paths = n_paths;
  plan.seed = seed;
  plan.threads = threads;
  ensure_simulatable(cfg, plan);
  Simulator sim(cfg, sf, plan);
  const double t_cap = 1e4 * std::max(1.0, (b - a) * (b - a));
  std::vector<double> hit(static_cast<size_t>(n_paths), -1.0);
  parallel_for_paths(n_paths, threads, [&](Index i) {
    const auto r = detail::first_exit(sim, i, a, b, t_cap);
    if (r.side != 0) hit[static_cast<size_t>(i)] = r.side > 0 ? 1.0 : 0.0;
  });
  std::vector<double> vals;
  vals.reserve(hit.size());
  for (double h : hit) {
    if (h >= 0.0) vals.push_back(h);
  }
  MCEstimate m = mean_and_se(vals);
  m.analytic_target = est.analytic_target;
  const double p = m.estimate;
  if (m.n_effective > 0) {
    m.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(m.n_effective));
  }
  return m;
}

inline MCEstimate mc_exit_time(const SkewConfig& cfg, const ScaleFunction& sf, double x, double a,
                               double b, Index n_paths, uint64_t seed,
                               Scheme scheme = Scheme::exact_skew, double dt = 1e-3,
                               int threads = 1) {
  if (!(a < b)) throw DomainError("exit interval requires a < b");
  MCEstimate est;
  est.analytic_target = mean_exit_time(sf, std::clamp(x, a, b), a, b);
  if (x <= a || x >= b) {
    est.n_effective = n_paths;
    return est;
  }
  SimPlan plan;
  plan.scheme = scheme;
  plan.x0 = x;
  plan.dt = dt;
  plan.n_paths = n_paths;
  plan.seed = seed;
  plan.threads = threads;
  ensure_simulatable(cfg, plan);
  Simulator sim(cfg, sf, plan);
  const double t_cap = 1e4 * std::max(1.0, (b - a) * (b - a));
  std::vector<double> times(static_cast<size_t>(n_paths), -1.0);
  parallel_for_paths(n_paths, threads, [&](Index i) {
    const auto r = detail::first_exit(sim, i, a, b, t_cap);
    if (r.side != 0) times[static_cast<size_t>(i)] = r.time;
  });
  std::vector<double> vals;
  vals.reserve(times.size());
  for (double t : times) {
    if (t >= 0.0) vals.push_back(t);
  }
  MCEstimate m = mean_and_se(vals);
  m.analytic_target = est.analytic_target;
  return m;
}

// Recorded path at uniform sample spacing.
struct Path {
  double dt_sample = 0.0;
  std::vector<double> xs;  // includes the initial point
};

// (1 / 2 eps) * dt * #{samples with |x - a| < eps}: consistent estimator of
// the symmetric local time at a over the recorded horizon.
inline double local_time_estimate(const Path& path, double a, double eps) {
  if (!(eps > 0.0)) throw DomainError("window radius must be positive");
  Index count = 0;
  for (size_t i = 1; i < path.xs.size(); ++i) {
    if (std::abs(path.xs[i] - a) < eps) ++count;
  }
  return path.dt_sample * static_cast<double>(count) / (2.0 * eps);
}

inline double quadratic_variation(const Path& path) {
  double qv = 0.0;
  for (size_t i = 1; i < path.xs.size(); ++i) {
    const double d = path.xs[i] - path.xs[i - 1];
    qv += d * d;
  }
  return qv;
}

// Streaming per-path functional driver: runs the plan and reduces a scalar
// functional of each full path without retaining trajectories.
template <typename Fn>
inline MCEstimate mc_path_functional(const SkewConfig& cfg, const ScaleFunction& sf,
                                     const SimPlan& plan, Fn&& functional) {
  ensure_simulatable(cfg, plan);
  Simulator sim(cfg, sf, plan);
  std::vector<double> vals(static_cast<size_t>(plan.n_paths), 0.0);
  std::vector<uint8_t> ok(static_cast<size_t>(plan.n_paths), 0);
  parallel_for_paths(plan.n_paths, plan.threads, [&](Index i) {
    thread_local Path buf;
    buf.dt_sample = plan.dt * static_cast<double>(plan.sample_stride);
    buf.xs.clear();
    buf.xs.push_back(plan.x0);
    const auto out = sim.run_path(i, [&](Index step, double, double x) {
      if (step % plan.sample_stride == 0) buf.xs.push_back(x);
    });
    if (!out.censored) {
      vals[static_cast<size_t>(i)] = functional(buf);
      ok[static_cast<size_t>(i)] = 1;
    }
  });
  std::vector<double> kept;
  kept.reserve(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) {
    if (ok[i]) kept.push_back(vals[i]);
  }
  return mean_and_se(kept);
}

inline MCEstimate mc_quadratic_variation(const SkewConfig& cfg, const ScaleFunction& sf,
                                         const SimPlan& plan) {
  return mc_path_functional(cfg, sf, plan,
                            [](const Path& p) { return quadratic_variation(p); });
}

inline MCEstimate mc_local_time(const SkewConfig& cfg, const ScaleFunction& sf,
                                const SimPlan& plan, double a, double eps) {
  return mc_path_functional(cfg, sf, plan,
                            [&](const Path& p) { return local_time_estimate(p, a, eps); });
}

// Sample mean of h(X_T): a direct check that the transformed process is a
// martingale under either scheme.
inline MCEstimate mc_terminal_scale_mean(const SkewConfig& cfg, const ScaleFunction& sf,
                                         const SimPlan& plan) {
  PathEnsemble ens = simulate_path(cfg, sf, plan);
  std::vector<double> vals;
  vals.reserve(ens.terminal.size());
  for (size_t i = 0; i < ens.terminal.size(); ++i) {
    if (!ens.censored[i]) vals.push_back(sf.h(ens.terminal[i]));
  }
  MCEstimate m = mean_and_se(vals);
  m.analytic_target = sf.h(plan.x0);
  return m;
}

struct OccupationHistogram {
  double lo = 0.0, hi = 0.0;
  std::vector<double> weight;  // time fraction per bin (normalized over recorded time)
  double outside = 0.0;        // fraction outside [lo, hi)
  std::optional<double> tv_distance;
};

// Time-average occupation over [t_burnin, T], accumulated sequentially over
// paths. When an invariant distribution is supplied, reports the total
// variation distance on the bin partition.
inline OccupationHistogram occupation_histogram(const SkewConfig& cfg, const ScaleFunction& sf,
                                                const SimPlan& plan, double lo, double hi,
                                                Index nbins, const InvariantDistribution* inv) {
  if (!(lo < hi) || nbins < 1) throw DomainError("histogram range/bins invalid");
  ensure_simulatable(cfg, plan);
  Simulator sim(cfg, sf, plan);
  OccupationHistogram h;
  h.lo = lo;
  h.hi = hi;
  h.weight.assign(static_cast<size_t>(nbins), 0.0);
  double total = 0.0, outside = 0.0;
  const double width = (hi - lo) / static_cast<double>(nbins);
  for (Index i = 0; i < plan.n_paths; ++i) {
    sim.run_path(i, [&](Index, double t, double x) {
      if (t < plan.t_burnin) return;
      total += 1.0;
      if (x < lo || x >= hi) {
        outside += 1.0;
        return;
      }
      const auto bin = static_cast<size_t>((x - lo) / width);
      h.weight[std::min(bin, static_cast<size_t>(nbins - 1))] += 1.0;
    });
  }
  if (total > 0.0) {
    for (auto& w : h.weight) w /= total;
    h.outside = outside / total;
  }
  if (inv) {
    double tv = 0.0;
    double inv_outside = 1.0;
    for (Index b = 0; b < nbins; ++b) {
      const double a0 = lo + width * static_cast<double>(b);
      const double a1 = a0 + width;
      const double p = inv->cdf(a1) - inv->cdf(a0);
      inv_outside -= p;
      tv += std::abs(h.weight[static_cast<size_t>(b)] - p);
    }
    tv += std::abs(h.outside - std::max(inv_outside, 0.0));
    h.tv_distance = 0.5 * tv;
  }
  return h;
}

}  // namespace skewdiff
