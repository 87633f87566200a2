#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "classifier.hpp"
#include "common.hpp"
#include "config.hpp"
#include "layered.hpp"
#include "scale.hpp"
#include "simulate.hpp"

namespace skewdiff {

using nlohmann::json;

// Full round-trip formatting for reals in CSV output.
inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline json tail_to_json(const TailFamily& f) {
  json params;
  switch (f.kind) {
    case TailKind::constant:
      params = {{"value", f.scale}};
      break;
    case TailKind::power:
      params = {{"scale", f.scale}, {"exponent", f.exponent}};
      break;
    case TailKind::geometric:
      params = {{"scale", f.scale}, {"ratio", f.ratio}};
      break;
    case TailKind::harmonic_partial_sum:
      params = {{"scale", f.scale}};
      break;
  }
  return {{"kind", tail_kind_name(f.kind)}, {"params", params}};
}

inline TailFamily tail_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("params")) {
    throw DomainError(where + ": tail must be an object with kind and params");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  auto get = [&](const char* key) {
    if (!p.contains(key)) {
      throw DomainError(where + ": tail kind '" + kind + "' needs parameter '" + key + "'");
    }
    return p.at(key).get<double>();
  };
  if (kind == "constant") return TailFamily::constant(get("value"));
  if (kind == "power") return TailFamily::power(get("scale"), get("exponent"));
  if (kind == "geometric") return TailFamily::geometric(get("scale"), get("ratio"));
  if (kind == "harmonic_partial_sum") return TailFamily::harmonic(get("scale"));
  throw DomainError(where + ": unknown tail kind '" + kind + "'");
}

inline json window_to_json(Index lo, Index hi, const std::vector<double>& vals,
                           const TailFamily& inner, const TailFamily& outer) {
  return {{"window_lo", lo},
          {"window_hi", hi},
          {"values", vals},
          {"inner_tail", tail_to_json(inner)},
          {"outer_tail", tail_to_json(outer)}};
}

struct WindowData {
  Index lo = 0, hi = 0;
  std::vector<double> values;
  TailFamily inner, outer;
};

inline WindowData window_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected an object");
  for (const char* key : {"window_lo", "window_hi", "values", "inner_tail", "outer_tail"}) {
    if (!j.contains(key)) throw DomainError(where + ": missing field '" + key + "'");
  }
  WindowData w;
  w.lo = j.at("window_lo").get<Index>();
  w.hi = j.at("window_hi").get<Index>();
  w.values = j.at("values").get<std::vector<double>>();
  w.inner = tail_from_json(j.at("inner_tail"), where + ".inner_tail");
  w.outer = tail_from_json(j.at("outer_tail"), where + ".outer_tail");
  return w;
}

inline SequenceSpec sequence_from_json(const json& j, Side s, const std::string& where) {
  const WindowData w = window_from_json(j, where);
  SequenceSpec out;
  out.side = s;
  out.window_lo = w.lo;
  out.window_hi = w.hi;
  out.values = w.values;
  out.inner_tail = w.inner;
  out.outer_tail = w.outer;
  return out;
}

inline PartitionSpec partition_from_json(const json& j, Side s, const std::string& where) {
  const WindowData w = window_from_json(j, where);
  PartitionSpec out;
  out.side = s;
  out.window_lo = w.lo;
  out.window_hi = w.hi;
  out.positions = w.values;
  out.inner_tail = w.inner;
  out.outer_tail = w.outer;
  return out;
}

inline json coeff_to_json(const CoeffSeq& c) {
  return {{"window_lo", c.window_lo},
          {"window_hi", c.window_hi},
          {"values", c.values},
          {"inner", c.inner},
          {"outer", c.outer}};
}

inline CoeffSeq coeff_from_json(const json& j, Side s, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected an object");
  for (const char* key : {"window_lo", "window_hi", "values", "inner", "outer"}) {
    if (!j.contains(key)) throw DomainError(where + ": missing field '" + key + "'");
  }
  CoeffSeq c;
  c.side = s;
  c.window_lo = j.at("window_lo").get<Index>();
  c.window_hi = j.at("window_hi").get<Index>();
  c.values = j.at("values").get<std::vector<double>>();
  c.inner = j.at("inner").get<double>();
  c.outer = j.at("outer").get<double>();
  return c;
}

}  // namespace detail

inline json config_to_json(const SkewConfig& cfg) {
  return {{"schema", kConfigSchema},
          {"name", cfg.name},
          {"negative",
           {{"breakpoints",
             detail::window_to_json(cfg.neg_partition.window_lo, cfg.neg_partition.window_hi,
                                    cfg.neg_partition.positions, cfg.neg_partition.inner_tail,
                                    cfg.neg_partition.outer_tail)},
            {"gammas",
             detail::window_to_json(cfg.neg_density.window_lo, cfg.neg_density.window_hi,
                                    cfg.neg_density.values, cfg.neg_density.inner_tail,
                                    cfg.neg_density.outer_tail)}}},
          {"positive",
           {{"breakpoints",
             detail::window_to_json(cfg.pos_partition.window_lo, cfg.pos_partition.window_hi,
                                    cfg.pos_partition.positions, cfg.pos_partition.inner_tail,
                                    cfg.pos_partition.outer_tail)},
            {"gammas",
             detail::window_to_json(cfg.pos_density.window_lo, cfg.pos_density.window_hi,
                                    cfg.pos_density.values, cfg.pos_density.inner_tail,
                                    cfg.pos_density.outer_tail)}}}};
}

inline SkewConfig config_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kConfigSchema) {
    throw DomainError(std::string("config: schema must be \"") + kConfigSchema + "\"");
  }
  for (const char* key : {"negative", "positive"}) {
    if (!j.contains(key)) throw DomainError(std::string("config: missing side '") + key + "'");
  }
  SkewConfig cfg;
  cfg.name = j.value("name", std::string{});
  const json& n = j.at("negative");
  const json& p = j.at("positive");
  for (const auto& [side_json, label] : {std::pair<const json*, const char*>{&n, "negative"},
                                         {&p, "positive"}}) {
    for (const char* key : {"breakpoints", "gammas"}) {
      if (!side_json->contains(key)) {
        throw DomainError(std::string("config: missing '") + label + "." + key + "'");
      }
    }
  }
  cfg.neg_partition =
      detail::partition_from_json(n.at("breakpoints"), Side::negative, "negative.breakpoints");
  cfg.neg_density = detail::sequence_from_json(n.at("gammas"), Side::negative, "negative.gammas");
  cfg.pos_partition =
      detail::partition_from_json(p.at("breakpoints"), Side::positive, "positive.breakpoints");
  cfg.pos_density = detail::sequence_from_json(p.at("gammas"), Side::positive, "positive.gammas");
  return cfg;
}

inline json layers_to_json(const LayerConfig& layer) {
  return {{"schema", kLayersSchema},
          {"name", layer.name},
          {"alpha", layer.alpha},
          {"partition",
           {{"negative",
             detail::window_to_json(layer.neg_partition.window_lo, layer.neg_partition.window_hi,
                                    layer.neg_partition.positions, layer.neg_partition.inner_tail,
                                    layer.neg_partition.outer_tail)},
            {"positive",
             detail::window_to_json(layer.pos_partition.window_lo, layer.pos_partition.window_hi,
                                    layer.pos_partition.positions, layer.pos_partition.inner_tail,
                                    layer.pos_partition.outer_tail)}}},
          {"D", detail::window_to_json(layer.neg_diffusivity.window_lo,
                                       layer.neg_diffusivity.window_hi,
                                       layer.neg_diffusivity.values,
                                       layer.neg_diffusivity.inner_tail,
                                       layer.neg_diffusivity.outer_tail)},
          {"Dbar", detail::window_to_json(layer.pos_diffusivity.window_lo,
                                          layer.pos_diffusivity.window_hi,
                                          layer.pos_diffusivity.values,
                                          layer.pos_diffusivity.inner_tail,
                                          layer.pos_diffusivity.outer_tail)},
          {"sigma2_table",
           {{"negative", detail::coeff_to_json(layer.sigma2.neg)},
            {"positive", detail::coeff_to_json(layer.sigma2.pos)}}},
          {"beta2_table",
           {{"negative", detail::coeff_to_json(layer.beta2.neg)},
            {"positive", detail::coeff_to_json(layer.beta2.pos)}}}};
}

inline LayerConfig layers_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("layers: expected a JSON object");
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kLayersSchema) {
    throw DomainError(std::string("layers: schema must be \"") + kLayersSchema + "\"");
  }
  for (const char* key : {"alpha", "partition", "D", "Dbar"}) {
    if (!j.contains(key)) throw DomainError(std::string("layers: missing field '") + key + "'");
  }
  LayerConfig layer;
  layer.name = j.value("name", std::string{});
  layer.alpha = j.at("alpha").get<double>();
  const json& part = j.at("partition");
  for (const char* key : {"negative", "positive"}) {
    if (!part.contains(key)) {
      throw DomainError(std::string("layers: missing 'partition.") + key + "'");
    }
  }
  layer.neg_partition =
      detail::partition_from_json(part.at("negative"), Side::negative, "partition.negative");
  layer.pos_partition =
      detail::partition_from_json(part.at("positive"), Side::positive, "partition.positive");
  layer.neg_diffusivity = detail::sequence_from_json(j.at("D"), Side::negative, "D");
  layer.pos_diffusivity = detail::sequence_from_json(j.at("Dbar"), Side::positive, "Dbar");
  if (j.contains("sigma2_table")) {
    const json& s = j.at("sigma2_table");
    layer.sigma2.neg = detail::coeff_from_json(s.at("negative"), Side::negative,
                                               "sigma2_table.negative");
    layer.sigma2.pos = detail::coeff_from_json(s.at("positive"), Side::positive,
                                               "sigma2_table.positive");
  }
  if (j.contains("beta2_table")) {
    const json& b = j.at("beta2_table");
    layer.beta2.neg = detail::coeff_from_json(b.at("negative"), Side::negative,
                                              "beta2_table.negative");
    layer.beta2.pos = detail::coeff_from_json(b.at("positive"), Side::positive,
                                              "beta2_table.positive");
  }
  return layer;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("parse error in " + path + ": " + e.what());
  }
}

inline SkewConfig load_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

inline LayerConfig load_layers(const std::string& path) {
  return layers_from_json(load_json_file(path));
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// Report serialization: one record per condition plus the aggregate verdicts.
inline json report_to_json(const ClassificationReport& rep) {
  auto record = [](const char* condition, const SeriesVerdict& v) {
    return json{{"condition", condition},
                {"status", series_status_name(v.status)},
                {"value", v.partial_sum},
                {"error_bound", v.tail_bound},
                {"k_max", v.k_max_used},
                {"rule", v.rule}};
  };
  json records = json::array();
  records.push_back(record("S0", rep.s0));
  records.push_back(record("S1", rep.s1));
  records.push_back(record("LGloc", rep.lgloc));
  records.push_back(record("boundary_right", rep.conservative_series.pos));
  records.push_back(record("boundary_left", rep.conservative_series.neg));
  records.push_back(record("recurrence_right", rep.recurrent_series.pos));
  records.push_back(record("recurrence_left", rep.recurrent_series.neg));
  records.push_back(record("invariant_mass", rep.positive_recurrent_series.combined));

  json out{{"schema", kReportSchema},
           {"records", records},
           {"verdicts",
            {{"semimartingale", tri_state_name(rep.semimartingale)},
             {"scale_regular", tri_state_name(rep.scale_regular)},
             {"lgloc", tri_state_name(rep.lgloc_holds)},
             {"h1", tri_state_name(rep.h1.status)},
             {"conservative", tri_state_name(rep.conservative)},
             {"recurrent", tri_state_name(rep.recurrent)},
             {"positive_recurrent", tri_state_name(rep.positive_recurrent)}}},
           {"notes", rep.notes}};
  if (!rep.h1.note.empty()) out["notes"].push_back(rep.h1.note);
  if (rep.effective_alpha) out["effective_alpha"] = *rep.effective_alpha;
  if (rep.gamma_limit) out["gamma_limit"] = *rep.gamma_limit;
  if (rep.gammabar_limit) out["gammabar_limit"] = *rep.gammabar_limit;
  if (rep.invariant_mass) out["invariant_mass"] = *rep.invariant_mass;
  return out;
}

inline json layered_report_to_json(const LayeredReport& rep) {
  auto record = [](const char* condition, const SeriesVerdict& v) {
    return json{{"condition", condition},
                {"status", series_status_name(v.status)},
                {"value", v.partial_sum},
                {"error_bound", v.tail_bound},
                {"k_max", v.k_max_used},
                {"rule", v.rule}};
  };
  json records = json::array();
  records.push_back(record("recurrence_left", rep.recurrence_series.neg));
  records.push_back(record("recurrence_right", rep.recurrence_series.pos));
  records.push_back(record("range_left", rep.range_series.neg));
  records.push_back(record("range_right", rep.range_series.pos));
  json out{{"schema", kReportSchema},
           {"records", records},
           {"verdicts",
            {{"recurrent", tri_state_name(rep.recurrent)},
             {"positive_recurrent", tri_state_name(rep.positive_recurrent)}}},
           {"notes", rep.notes}};
  if (rep.psi_lo) out["range_lo"] = *rep.psi_lo;
  if (rep.psi_hi) out["range_hi"] = *rep.psi_hi;
  if (rep.range_length) out["range_length"] = *rep.range_length;
  return out;
}

// CSV emitters. Column layouts are part of the external contract.

inline void write_paths_csv(const std::string& path, const PathEnsemble& ens) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << "path_id,t,x,censored\n";
  const double dt_sample = ens.plan.dt * static_cast<double>(ens.plan.sample_stride);
  for (size_t i = 0; i < ens.terminal.size(); ++i) {
    const bool cen = ens.censored[i] != 0;
    if (!ens.paths.empty() && !ens.paths[i].empty()) {
      for (size_t s = 0; s < ens.paths[i].size(); ++s) {
        out << i << ',' << fmt_real(dt_sample * static_cast<double>(s)) << ','
            << fmt_real(ens.paths[i][s]) << ',' << (cen ? 1 : 0) << "\n";
      }
    } else {
      const double t = cen ? ens.censor_time[i] : ens.plan.horizon;
      out << i << ',' << fmt_real(t) << ',' << fmt_real(ens.terminal[i]) << ','
          << (cen ? 1 : 0) << "\n";
    }
  }
}

inline void write_scale_csv(const std::string& path, const ScaleFunction& sf, double lo,
                            double hi, Index n) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << "x,h,h_prime\n";
  for (Index i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    out << fmt_real(x) << ',' << fmt_real(sf.h(x)) << ',' << fmt_real(sf.h_prime(x)) << "\n";
  }
}

inline void write_cdf_csv(const std::string& path, const InvariantDistribution& inv) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << "x,cdf\n";
  for (size_t i = 0; i < inv.xs.size(); ++i) {
    out << fmt_real(inv.xs[i]) << ',' << fmt_real(inv.cum[i] / inv.total_mass) << "\n";
  }
}

inline void write_dispersion_csv(const std::string& path,
                                 const std::vector<DispersionRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write file: " + path);
  out << "t,mean,var,se_mean,se_var\n";
  for (const auto& r : rows) {
    out << fmt_real(r.t) << ',' << fmt_real(r.mean) << ',' << fmt_real(r.var) << ','
        << fmt_real(r.se_mean) << ',' << fmt_real(r.se_var) << "\n";
  }
}

// Reconstructable record of a run, written alongside every output.
struct RunManifest {
  std::string command;
  std::vector<std::string> config_paths;
  std::vector<std::string> overrides;
  uint64_t seed = 0;
  int threads = 1;
  std::string output_dir;
};

inline json manifest_to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config_paths", m.config_paths},
          {"overrides", m.overrides},
          {"seed", m.seed},
          {"threads", m.threads},
          {"output_dir", m.output_dir},
          {"tool_version", kVersion},
          {"schema_versions",
           {{"config", kConfigSchema}, {"report", kReportSchema}, {"layers", kLayersSchema}}}};
}

inline void write_manifest(const std::string& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  save_json((std::filesystem::path(dir) / "manifest.json").string(), manifest_to_json(m));
}

}  // namespace skewdiff
