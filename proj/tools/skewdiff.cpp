// Command line front end: classification, scale-function queries, path
// simulation and Monte Carlo estimators for skew diffusions with interfaces
// accumulating at a point, plus the layered transversal/longitudinal model.
//
// Exit codes: 0 success (all verdicts conclusive), 1 validation/usage error,
// 2 inconclusive verdicts, 3 no scale function, 4 explosive configuration
// refused without --allow-explosive.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "skewdiff/classifier.hpp"
#include "skewdiff/config.hpp"
#include "skewdiff/io.hpp"
#include "skewdiff/layered.hpp"
#include "skewdiff/scale.hpp"
#include "skewdiff/simulate.hpp"

namespace {

using namespace skewdiff;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitNoScale = 3;
constexpr int kExitExplosive = 4;

namespace fs = std::filesystem;

struct CommonOut {
  std::string out_dir = ".";
};

SkewConfig load_and_validate(const std::string& path) {
  SkewConfig cfg = load_config(path);
  const ValidationReport rep = validate(cfg);
  if (!rep.valid()) {
    throw DomainError("invalid configuration " + path + ":\n" + rep.to_string());
  }
  return cfg;
}

void emit_manifest(const std::string& out_dir, const std::string& command,
                   const std::vector<std::string>& configs, uint64_t seed, int threads,
                   const std::vector<std::string>& overrides) {
  RunManifest m;
  m.command = command;
  m.config_paths = configs;
  m.overrides = overrides;
  m.seed = seed;
  m.threads = threads;
  m.output_dir = out_dir;
  write_manifest(out_dir, m);
}

Scheme parse_scheme(const std::string& s) {
  if (s == "euler") return Scheme::euler_transformed;
  if (s == "exact") return Scheme::exact_skew;
  throw DomainError("scheme must be 'euler' or 'exact'");
}

int run_classify(const std::string& config_path, Index n0, Index kmax,
                 const std::string& out_dir) {
  SkewConfig cfg = load_and_validate(config_path);
  ClassifyOptions opt;
  opt.n0 = n0;
  if (kmax > 0) opt.policy.k_stop = kmax;
  const ClassificationReport rep = classify_all(cfg, opt);
  fs::create_directories(out_dir);
  save_json((fs::path(out_dir) / "report.json").string(), report_to_json(rep));
  emit_manifest(out_dir, "classify", {config_path}, 0, 1,
                {"n0=" + std::to_string(n0), "kmax=" + std::to_string(kmax)});
  std::cout << "semimartingale=" << tri_state_name(rep.semimartingale)
            << " scale_regular=" << tri_state_name(rep.scale_regular)
            << " lgloc=" << tri_state_name(rep.lgloc_holds)
            << " conservative=" << tri_state_name(rep.conservative)
            << " recurrent=" << tri_state_name(rep.recurrent)
            << " positive_recurrent=" << tri_state_name(rep.positive_recurrent) << "\n";
  return rep.all_conclusive() ? kExitOk : kExitInconclusive;
}

int run_scale(const std::string& config_path, const std::string& out_dir,
              const std::vector<double>& table_args, const std::vector<double>& eval_xs,
              const std::vector<double>& hitting_args, const std::vector<double>& phi_xs,
              const std::vector<double>& exit_args, bool invariant) {
  SkewConfig cfg = load_and_validate(config_path);
  ScaleFunction sf;
  try {
    sf = build_scale(cfg);
  } catch (const PreconditionError& e) {
    std::cerr << "no scale function: " << e.what() << "\n";
    return kExitNoScale;
  }
  fs::create_directories(out_dir);
  if (!table_args.empty()) {
    if (table_args.size() != 3) throw DomainError("--table needs lo hi n");
    write_scale_csv((fs::path(out_dir) / "scale.csv").string(), sf, table_args[0],
                    table_args[1], static_cast<Index>(table_args[2]));
  }
  if (!eval_xs.empty()) {
    std::ofstream out((fs::path(out_dir) / "scale_eval.csv").string());
    out << "x,h,h_prime\n";
    for (double x : eval_xs) {
      out << fmt_real(x) << ',' << fmt_real(sf.h(x)) << ',' << fmt_real(sf.h_prime(x)) << "\n";
    }
  }
  if (!hitting_args.empty()) {
    if (hitting_args.size() % 3 != 0) throw DomainError("--hitting needs x a b triples");
    std::ofstream out((fs::path(out_dir) / "hitting.csv").string());
    out << "x,a,b,prob_up,prob_down\n";
    for (size_t i = 0; i < hitting_args.size(); i += 3) {
      const double x = hitting_args[i], a = hitting_args[i + 1], b = hitting_args[i + 2];
      const double up = hitting_prob_up(sf, x, a, b);
      out << fmt_real(x) << ',' << fmt_real(a) << ',' << fmt_real(b) << ',' << fmt_real(up)
          << ',' << fmt_real(1.0 - up) << "\n";
      std::cout << "hitting x=" << x << " (" << a << "," << b << ") up=" << up << "\n";
    }
  }
  if (!phi_xs.empty()) {
    std::ofstream out((fs::path(out_dir) / "phi.csv").string());
    out << "x,phi\n";
    for (double x : phi_xs) {
      out << fmt_real(x) << ',' << fmt_real(sf.phi(x)) << "\n";
    }
  }
  if (!exit_args.empty()) {
    if (exit_args.size() % 3 != 0) throw DomainError("--exit needs x a b triples");
    std::ofstream out((fs::path(out_dir) / "exit.csv").string());
    out << "x,a,b,mean_exit\n";
    for (size_t i = 0; i < exit_args.size(); i += 3) {
      const double x = exit_args[i], a = exit_args[i + 1], b = exit_args[i + 2];
      const double t = mean_exit_time(sf, x, a, b);
      out << fmt_real(x) << ',' << fmt_real(a) << ',' << fmt_real(b) << ',' << fmt_real(t)
          << "\n";
      std::cout << "exit x=" << x << " (" << a << "," << b << ") mean=" << t << "\n";
    }
  }
  if (invariant) {
    try {
      const InvariantDistribution inv = build_invariant(cfg);
      write_cdf_csv((fs::path(out_dir) / "invariant_cdf.csv").string(), inv);
      std::cout << "invariant mass=" << inv.total_mass << "\n";
    } catch (const PreconditionError& e) {
      std::cout << "invariant: " << e.what() << "\n";
    }
  }
  emit_manifest(out_dir, "scale", {config_path}, 0, 1, {});
  return kExitOk;
}

json estimate_to_json(const MCEstimate& m) {
  json j{{"estimate", m.estimate}, {"std_error", m.std_error}, {"n_effective", m.n_effective}};
  if (m.analytic_target) j["analytic_target"] = *m.analytic_target;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skew diffusion classification and simulation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";

  // classify
  auto* c_classify = app.add_subcommand("classify", "series-criteria classification");
  Index n0 = 1, kmax = 0;
  c_classify->add_option("config", config_path, "configuration file")->required();
  c_classify->add_option("--n0", n0, "base index of boundary sums")
      ->check(CLI::IsMember({1, 2, 5}));
  c_classify->add_option("--kmax", kmax, "numeric series depth cap");
  c_classify->add_option("--out", out_dir, "output directory");

  // scale
  auto* c_scale = app.add_subcommand("scale", "scale-function queries");
  std::vector<double> table_args, eval_xs, hitting_args, phi_xs, exit_args;
  bool want_invariant = false;
  c_scale->add_option("config", config_path, "configuration file")->required();
  c_scale->add_option("--table", table_args, "scale table: lo hi n")->expected(3);
  c_scale->add_option("--eval", eval_xs, "evaluate h at points");
  c_scale->add_option("--hitting", hitting_args, "hitting query triples x a b");
  c_scale->add_option("--phi", phi_xs, "explosion functional at points");
  c_scale->add_option("--exit", exit_args, "mean exit triples x a b");
  c_scale->add_flag("--invariant", want_invariant, "emit the invariant distribution CDF");
  c_scale->add_option("--out", out_dir, "output directory");

  // shared simulation flags
  std::string scheme_name_opt = "euler";
  double x0 = 0.0, horizon = 1.0, dt = 1e-3, x_max = 0.0;
  Index n_paths = 1000, stride = 1;
  uint64_t seed = 0;
  int threads = 1;
  bool allow_explosive = false;
  auto add_plan_flags = [&](CLI::App* cmd, bool need_seed = true) {
    cmd->add_option("--scheme", scheme_name_opt, "euler or exact");
    cmd->add_option("--x0", x0, "initial position");
    cmd->add_option("--t", horizon, "time horizon");
    cmd->add_option("--dt", dt, "time step");
    cmd->add_option("--paths", n_paths, "number of paths");
    auto* s = cmd->add_option("--seed", seed, "random seed");
    if (need_seed) s->required();
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--x-max", x_max, "censor radius");
    cmd->add_option("--stride", stride, "record every n-th step");
    cmd->add_flag("--allow-explosive", allow_explosive, "censor instead of refusing");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* c_sim = app.add_subcommand("simulate", "path simulation");
  c_sim->add_option("config", config_path, "configuration file")->required();
  add_plan_flags(c_sim);
  bool full_record = false;
  c_sim->add_flag("--full", full_record, "record full trajectories");

  auto* c_mc = app.add_subcommand("mc", "Monte Carlo estimators");
  c_mc->require_subcommand(1);
  double q_x = 0.0, q_a = -1.0, q_b = 1.0, lt_a = 0.0, lt_eps = 0.02;
  double occ_lo = -2.0, occ_hi = 2.0, burnin = 0.0;
  Index occ_bins = 40;

  auto* c_hit = c_mc->add_subcommand("hit", "hitting probability");
  c_hit->add_option("config", config_path)->required();
  c_hit->add_option("--x", q_x);
  c_hit->add_option("--a", q_a);
  c_hit->add_option("--b", q_b);
  add_plan_flags(c_hit);

  auto* c_exit = c_mc->add_subcommand("exit", "mean exit time");
  c_exit->add_option("config", config_path)->required();
  c_exit->add_option("--x", q_x);
  c_exit->add_option("--a", q_a);
  c_exit->add_option("--b", q_b);
  add_plan_flags(c_exit);

  auto* c_occ = c_mc->add_subcommand("occupation", "occupation histogram");
  c_occ->add_option("config", config_path)->required();
  c_occ->add_option("--lo", occ_lo);
  c_occ->add_option("--hi", occ_hi);
  c_occ->add_option("--bins", occ_bins);
  c_occ->add_option("--burnin", burnin);
  add_plan_flags(c_occ);

  auto* c_lt = c_mc->add_subcommand("localtime", "local time at a level");
  c_lt->add_option("config", config_path)->required();
  c_lt->add_option("--a", lt_a);
  c_lt->add_option("--eps", lt_eps);
  add_plan_flags(c_lt);

  auto* c_qv = c_mc->add_subcommand("qv", "quadratic variation");
  c_qv->add_option("config", config_path)->required();
  add_plan_flags(c_qv);

  auto* c_lay = app.add_subcommand("layered", "layered-media model");
  c_lay->require_subcommand(1);
  double y0 = 0.0;
  auto* c_lcls = c_lay->add_subcommand("classify", "layered recurrence classification");
  c_lcls->add_option("layers", config_path, "layer configuration file")->required();
  c_lcls->add_option("--out", out_dir, "output directory");
  auto* c_lsim = c_lay->add_subcommand("simulate", "joint transversal/longitudinal paths");
  c_lsim->add_option("layers", config_path)->required();
  c_lsim->add_option("--y0", y0, "initial longitudinal position");
  add_plan_flags(c_lsim);
  auto* c_ldis = c_lay->add_subcommand("dispersion", "longitudinal moments over time");
  c_ldis->add_option("layers", config_path)->required();
  c_ldis->add_option("--y0", y0, "initial longitudinal position");
  add_plan_flags(c_ldis);

  CLI11_PARSE(app, argc, argv);

  try {
    auto make_plan = [&]() {
      SimPlan plan;
      plan.scheme = parse_scheme(scheme_name_opt);
      plan.x0 = x0;
      plan.horizon = horizon;
      plan.dt = dt;
      plan.n_paths = n_paths;
      plan.seed = seed;
      plan.x_max = x_max;
      plan.threads = threads;
      plan.sample_stride = stride;
      plan.t_burnin = burnin;
      plan.allow_explosive = allow_explosive;
      return plan;
    };

    if (c_classify->parsed()) {
      return run_classify(config_path, n0, kmax, out_dir);
    }
    if (c_scale->parsed()) {
      return run_scale(config_path, out_dir, table_args, eval_xs, hitting_args, phi_xs,
                       exit_args, want_invariant);
    }
    if (c_sim->parsed()) {
      SkewConfig cfg = load_and_validate(config_path);
      ScaleFunction sf;
      try {
        sf = build_scale(cfg);
      } catch (const PreconditionError& e) {
        std::cerr << "no scale function: " << e.what() << "\n";
        return kExitNoScale;
      }
      SimPlan plan = make_plan();
      plan.record = full_record ? RecordMode::full_path : RecordMode::endpoints_only;
      PathEnsemble ens;
      try {
        ens = simulate_path(cfg, sf, plan);
      } catch (const PreconditionError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitExplosive;
      }
      fs::create_directories(out_dir);
      write_paths_csv((fs::path(out_dir) / "paths.csv").string(), ens);
      emit_manifest(out_dir, "simulate", {config_path}, seed, threads,
                    {"scheme=" + scheme_name_opt, "dt=" + fmt_real(dt),
                     "t=" + fmt_real(horizon), "paths=" + std::to_string(n_paths)});
      std::cout << "paths=" << n_paths << " censored_fraction=" << ens.censored_fraction()
                << "\n";
      return kExitOk;
    }
    if (c_mc->parsed()) {
      SkewConfig cfg = load_and_validate(config_path);
      ScaleFunction sf;
      try {
        sf = build_scale(cfg);
      } catch (const PreconditionError& e) {
        std::cerr << "no scale function: " << e.what() << "\n";
        return kExitNoScale;
      }
      const SimPlan plan = make_plan();
      MCEstimate est;
      std::string what;
      try {
        if (c_hit->parsed()) {
          what = "mc-hit";
          est = mc_hitting(cfg, sf, q_x, q_a, q_b, n_paths, seed,
                           parse_scheme(scheme_name_opt), dt, threads);
        } else if (c_exit->parsed()) {
          what = "mc-exit";
          est = mc_exit_time(cfg, sf, q_x, q_a, q_b, n_paths, seed,
                             parse_scheme(scheme_name_opt), dt, threads);
        } else if (c_lt->parsed()) {
          what = "mc-localtime";
          SimPlan p = plan;
          p.record = RecordMode::functionals;
          est = mc_local_time(cfg, sf, p, lt_a, lt_eps);
        } else if (c_qv->parsed()) {
          what = "mc-qv";
          SimPlan p = plan;
          p.record = RecordMode::functionals;
          est = mc_quadratic_variation(cfg, sf, p);
        } else if (c_occ->parsed()) {
          what = "mc-occupation";
          const InvariantDistribution* invp = nullptr;
          InvariantDistribution inv;
          try {
            inv = build_invariant(cfg);
            invp = &inv;
          } catch (const PreconditionError&) {
            std::cout << "no target available (infinite mass)\n";
          }
          const OccupationHistogram h =
              occupation_histogram(cfg, sf, plan, occ_lo, occ_hi, occ_bins, invp);
          fs::create_directories(out_dir);
          std::ofstream out((fs::path(out_dir) / "occupation.csv").string());
          out << "bin_lo,bin_hi,weight\n";
          const double w = (occ_hi - occ_lo) / static_cast<double>(occ_bins);
          for (Index b = 0; b < occ_bins; ++b) {
            out << fmt_real(occ_lo + w * static_cast<double>(b)) << ','
                << fmt_real(occ_lo + w * static_cast<double>(b + 1)) << ','
                << fmt_real(h.weight[static_cast<size_t>(b)]) << "\n";
          }
          json j{{"outside", h.outside}};
          if (h.tv_distance) j["tv_distance"] = *h.tv_distance;
          save_json((fs::path(out_dir) / "occupation.json").string(), j);
          emit_manifest(out_dir, "mc-occupation", {config_path}, seed, threads, {});
          if (h.tv_distance) std::cout << "tv_distance=" << *h.tv_distance << "\n";
          return kExitOk;
        }
      } catch (const PreconditionError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitExplosive;
      }
      fs::create_directories(out_dir);
      save_json((fs::path(out_dir) / "estimate.json").string(), estimate_to_json(est));
      emit_manifest(out_dir, what, {config_path}, seed, threads, {});
      std::cout << what << " estimate=" << est.estimate << " se=" << est.std_error;
      if (est.analytic_target) std::cout << " target=" << *est.analytic_target;
      std::cout << "\n";
      return kExitOk;
    }
    if (c_lay->parsed()) {
      LayerConfig layer = load_layers(config_path);
      const ValidationReport vrep = validate_layer(layer);
      if (!vrep.valid()) {
        std::cerr << "invalid layer configuration:\n" << vrep.to_string();
        return kExitValidation;
      }
      if (c_lcls->parsed()) {
        const LayeredReport rep = classify_layered(layer);
        fs::create_directories(out_dir);
        save_json((fs::path(out_dir) / "layered_report.json").string(),
                  layered_report_to_json(rep));
        emit_manifest(out_dir, "layered-classify", {config_path}, 0, 1, {});
        std::cout << "recurrent=" << tri_state_name(rep.recurrent)
                  << " positive_recurrent=" << tri_state_name(rep.positive_recurrent) << "\n";
        return (rep.recurrent != TriState::unknown &&
                rep.positive_recurrent != TriState::unknown)
                   ? kExitOk
                   : kExitInconclusive;
      }
      const LayeredSystem sys = build_layered(layer);
      SimPlan plan = make_plan();
      JointEnsemble ens;
      try {
        ens = simulate_xy(sys, plan, y0);
      } catch (const PreconditionError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitExplosive;
      }
      fs::create_directories(out_dir);
      if (c_lsim->parsed()) {
        std::ofstream out((fs::path(out_dir) / "joint_paths.csv").string());
        out << "path_id,t,x,y,censored\n";
        for (size_t i = 0; i < ens.x.size(); ++i) {
          for (size_t s = 0; s < ens.x[i].size(); ++s) {
            out << i << ',' << fmt_real(ens.times[s]) << ',' << fmt_real(ens.x[i][s]) << ','
                << fmt_real(ens.y[i][s]) << ',' << (ens.censored[i] ? 1 : 0) << "\n";
          }
        }
        emit_manifest(out_dir, "layered-simulate", {config_path}, seed, threads, {});
      } else {
        write_dispersion_csv((fs::path(out_dir) / "dispersion.csv").string(),
                             dispersion_stats(ens));
        emit_manifest(out_dir, "layered-dispersion", {config_path}, seed, threads, {});
      }
      return kExitOk;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SkewdiffError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
