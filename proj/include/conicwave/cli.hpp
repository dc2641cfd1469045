#pragma once

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "conicwave/config.hpp"
#include "conicwave/csv.hpp"
#include "conicwave/error.hpp"
#include "conicwave/flow.hpp"
#include "conicwave/length_spectrum.hpp"
#include "conicwave/manifest.hpp"
#include "conicwave/oracle.hpp"
#include "conicwave/spectrum.hpp"
#include "conicwave/trace.hpp"

namespace conicwave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitVerify = 3;

inline constexpr const char* kCacheEnv = "CONICWAVE_CACHE_DIR";

namespace detail {

struct FlowArgs {
  int component = 0;
  double x = kPi / 2;
  double y = 0.0;
  double heading = kPi;  // from the outward radial direction; π heads to the cone point
  double length = kTwoPi;
  double ds = 0.01;
  std::optional<double> exit_offset;  // φ turn applied at each cone point; stop there when unset
};

struct Paths {
  std::string eigs, trace, lengths, report, config;
};

inline std::string alpha_storage(const ConicModel& m) { return m.alpha_param().is_exact() ? "exact" : "decimal"; }

inline unsigned threads_of(const RunConfig& cfg) { return cfg.threads == 0 ? default_threads() : cfg.threads; }

inline void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ValidationError("--out is required");
}

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  const ConicModel model = ConicModel::build(cfg.model_spec());
  const EigenTable t = cfg.cache_dir.empty() ? build_table(model, cfg.cutoff(), threads_of(cfg))
                                             : cached_table(model, cfg.cutoff(), cfg.cache_dir, threads_of(cfg));
  write_with_manifest(cfg.out, table_csv(t), "spectrum", model.descriptor(),
                      {{"alpha_storage", alpha_storage(model)},
                       {"lambda_max", format_double(cfg.lambda_max)},
                       {"cutoff", format_double(t.cutoff)},
                       {"area", format_double(t.area)},
                       {"entries", std::to_string(t.entries.size())}},
                      cfg);
  out << "spectrum: " << t.entries.size() << " entries, total multiplicity " << t.total_multiplicity() << " -> "
      << cfg.out << "\n";
  return kExitOk;
}

inline int cmd_lengths(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  const ConicModel model = ConicModel::build(cfg.model_spec());
  const LengthSets sets = length_sets(model, cfg.horizon);
  write_with_manifest(cfg.out, csv::lengths(sets), "lengths", model.descriptor(),
                      {{"alpha_storage", alpha_storage(model)}, {"horizon", format_double(cfg.horizon)}}, cfg);
  out << "lengths: " << sets.dif.size() << " in Dif, " << sets.geo.size() << " in Geo -> " << cfg.out << "\n";
  return kExitOk;
}

inline int cmd_flow(const RunConfig& cfg, const FlowArgs& a, std::ostream& out) {
  require_out(cfg);
  const ConicModel model = ConicModel::build(cfg.model_spec());
  if (!(a.ds > 0.0)) throw ValidationError("--ds must be positive");
  if (!(a.length > 0.0)) throw ValidationError("--length must be positive");
  std::vector<csv::FlowRow> rows;
  BCospherePoint p = a.x == 0.0 ? diffractive_outgoing(model, a.component, a.y)
                                : make_point(model, a.component, a.x, a.y, a.heading);
  double base = 0.0;
  int arrivals = 0;
  while (base < a.length) {
    FlowOptions opts;
    for (double s = std::ceil(base / a.ds - 1e-9) * a.ds; s <= a.length + 1e-12; s += a.ds)
      opts.sample_lengths.push_back(s - base);
    const FlowResult r = flow_interior(model, p, a.length - base, opts);
    for (const auto& [s, q] : r.samples) rows.push_back({base + s, q, SegmentKind::Interior});
    base += r.length;
    if (r.event != FlowEvent::ConeArrival) break;
    ++arrivals;
    rows.push_back({base, r.end, SegmentKind::BoundaryTransit});
    if (!a.exit_offset || base >= a.length) break;
    p = diffractive_outgoing(model, r.end.component, r.end.y + *a.exit_offset);
    rows.push_back({base, p, SegmentKind::BoundaryTransit});
  }
  write_with_manifest(cfg.out, csv::flow(rows), "flow", model.descriptor(), {}, cfg);
  out << "flow: " << rows.size() << " rows, " << arrivals << " cone arrivals -> " << cfg.out << "\n";
  return kExitOk;
}

inline EigenTable load_table(const std::string& path) {
  if (path.empty()) throw ValidationError("--eigs is required");
  const KeyValueDoc m = read_manifest(path);
  EigenTable t;
  t.descriptor = manifest_field(m, "model_key", path);
  t.cutoff = io::parse_double(manifest_field(m, "cutoff", path));
  t.area = io::parse_double(manifest_field(m, "area", path));
  t.entries = read_table_csv(path);
  return t;
}

inline int cmd_trace(const RunConfig& cfg, const Paths& paths, std::ostream& out) {
  require_out(cfg);
  const EigenTable t = load_table(paths.eigs);
  RunConfig checked = cfg;
  checked.lambda_max = t.cutoff * t.cutoff;
  checked.validate();
  if (cfg.dt > cfg.eps_min / 4.0 * (1.0 + 1e-12)) throw ValidationError("dt must not exceed eps_min/4");
  const auto eps = eps_ladder(cfg.eps_min, cfg.eps_max, cfg.eps_count);
  const auto grid = uniform_grid(cfg.tmax, cfg.dt);
  const TraceSamples s = smoothed_wave_trace(t, grid, eps, threads_of(checked));
  write_with_manifest(cfg.out, csv::trace(s), "trace", t.descriptor,
                      {{"eigs", std::filesystem::path(paths.eigs).filename().string()},
                       {"eigs_checksum", io::checksum_text(io::read_file(paths.eigs))},
                       {"cutoff", format_double(t.cutoff)}},
                      checked);
  out << "trace: " << grid.size() << " times x " << eps.size() << " eps -> " << cfg.out << "\n";
  return kExitOk;
}

inline ScanParams scan_params(const RunConfig& cfg, double horizon) {
  ScanParams p;
  p.t_min = cfg.t_min;
  p.horizon = horizon;
  p.window = cfg.window;
  p.threshold = cfg.threshold;
  p.match_tol = cfg.match_tol;
  return p;
}

inline std::string yes_no(bool b) { return b ? "pass" : "fail"; }

inline int cmd_scan(const RunConfig& cfg, const Paths& paths, std::ostream& out) {
  require_out(cfg);
  if (paths.trace.empty() || paths.lengths.empty()) throw ValidationError("--trace and --lengths are required");
  const KeyValueDoc tm = read_manifest(paths.trace);
  const KeyValueDoc lm = read_manifest(paths.lengths);
  const std::string tk = manifest_field(tm, "model_key", paths.trace);
  const std::string lk = manifest_field(lm, "model_key", paths.lengths);
  if (tk != lk) throw ValidationError("model mismatch: trace is for '" + tk + "' but lengths are for '" + lk + "'");
  const TraceSamples s = csv::read_trace(paths.trace);
  const LengthSets sets = csv::read_lengths(paths.lengths);
  const double horizon = std::min(io::parse_double(manifest_field(lm, "horizon", paths.lengths)),
                                  s.t.empty() ? 0.0 : s.t.back());
  const SingularityReport rep = singularity_report(s, sets, scan_params(cfg, horizon));
  write_with_manifest(cfg.out, csv::report(rep), "scan", tk,
                      {{"insufficient_data", rep.insufficient_data ? "true" : "false"},
                       {"no_singularity_off_dif", rep.no_singularity_off_dif ? "true" : "false"},
                       {"bounded_off_geo", rep.bounded_off_geo ? "true" : "false"},
                       {"origin_matches", rep.origin_matches ? "true" : "false"},
                       {"origin_exponent", format_double(rep.origin_exponent)},
                       {"all_dif_detected", rep.all_dif_detected ? "true" : "false"}},
                      cfg);
  out << "scan: " << rep.entries.size() << " rows -> " << cfg.out << "\n";
  return kExitOk;
}

inline int cmd_report(const Paths& paths, std::ostream& out) {
  if (paths.report.empty()) throw ValidationError("--report is required");
  const KeyValueDoc m = read_manifest(paths.report);
  const auto rows = io::read_csv(paths.report, {"t0", "exponent", "residual", "class", "nearest_length", "distance"});
  auto flag = [&](const char* key) { return manifest_field(m, key, paths.report) == "true"; };
  out << "model: " << manifest_field(m, "model_key", paths.report) << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%12s %10s %10s  %-17s %14s %10s\n", "t0", "exponent", "residual", "class",
                "nearest", "distance");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%12.6f %10.4f %10.4f  %-17s %14s %10.2e\n", io::parse_double(r[0]),
                  io::parse_double(r[1]), io::parse_double(r[2]), r[3].c_str(),
                  r[4].empty() ? "-" : r[4].substr(0, 14).c_str(), io::parse_double(r[5]));
    out << line;
  }
  out << "\n";
  if (flag("insufficient_data")) {
    out << "insufficient data: no verdicts\n";
    return kExitOk;
  }
  out << "singular times lie in Dif:        " << yes_no(flag("no_singularity_off_dif")) << "\n";
  out << "exponent <= 1 + slack off Geo:    " << yes_no(flag("bounded_off_geo")) << "\n";
  out << "exponent at t = 0 matches 2:      " << yes_no(flag("origin_matches")) << " (a(0) = "
      << manifest_field(m, "origin_exponent", paths.report) << ")\n";
  out << "every element of Dif detected:    " << yes_no(flag("all_dif_detected")) << "\n";
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const ConicModel model = ConicModel::build(cfg.model_spec());
  int failures = 0;
  auto row = [&](const std::string& name, bool ok, const std::string& detail) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-4s %-44s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    out << buf;
    if (!ok) ++failures;
  };
  if (model.kind() == ModelKind::Spindle) {
    const EigenTable t = spindle_modes(model.alpha_param(), 60.0, threads_of(cfg));
    for (int m = 0; m <= 2; ++m) {
      const auto shot = oracle::shoot_radial_eigen(model, m, 20);
      std::vector<double> closed;
      for (const auto& e : t.entries)
        if (e.m == m && e.lambda > 0.0) closed.push_back(e.lambda);
      std::sort(closed.begin(), closed.end());
      double worst = 0.0;
      bool enough = closed.size() >= shot.size();
      for (std::size_t j = 0; enough && j < shot.size(); ++j)
        worst = std::max(worst, std::abs(shot[j] - closed[j]) / closed[j]);
      row("shooting vs closed form, m = " + std::to_string(m), enough && worst <= 1e-6,
          "max rel err " + format_double(worst));
    }
    const double horizon = std::min(cfg.horizon, 30.0);
    const auto sets = length_sets(model, horizon);
    const auto hits = oracle::distinct_lengths(oracle::closure_search(model, horizon));
    const auto dif = lengths_of(sets.dif);
    bool match = hits.size() == dif.size();
    for (std::size_t i = 0; match && i < dif.size(); ++i) match = std::abs(hits[i] - dif[i]) <= 1e-6;
    row("closure search reproduces Dif", match,
        std::to_string(hits.size()) + " oracle lengths, " + std::to_string(dif.size()) + " in Dif");
    bool subset = true;
    for (double g : lengths_of(sets.geo))
      subset = subset && std::find(dif.begin(), dif.end(), g) != dif.end();
    row("Geo is a subset of Dif", subset, "");
    const double tau = 1e-3;
    const EigenTable big = spindle_modes(model.alpha_param(), 450.0, threads_of(cfg));
    const double heat = heat_trace(big, tau) * tau;
    row("heat coefficient tau * trace -> alpha", std::abs(heat - model.alpha()) <= 0.02 * model.alpha(),
        "tau * trace = " + format_double(heat));
    const auto w = weyl_fit(big);
    row("Weyl slope", w.deviation <= 0.02, "slope " + format_double(w.slope) + " target " + format_double(w.target));
  } else {
    const EigenTable t = flat_cone_modes(model.alpha_param(), model.rim_radius(), model.rim_condition(), 450.0,
                                         threads_of(cfg));
    row("Bessel interlacing across table", check_interlacing(t), std::to_string(t.entries.size()) + " entries");
    const auto w = weyl_fit(t);
    row("Weyl slope", w.deviation <= 0.03, "slope " + format_double(w.slope) + " target " + format_double(w.target));
    bool half = true;
    for (int k = 1; k <= 100; ++k) half = half && std::abs(bessel::zero(0.5, k) - k * kPi) <= 1e-12 * k * kPi;
    row("half-integer order zeros are k*pi", half, "");
  }
  out << (failures == 0 ? "all checks passed\n" : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? kExitOk : kExitVerify;
}

}  // namespace detail

/// Entry point for the command-line tool; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Wave-trace laboratory for surfaces with conic singularities"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig flags;
  detail::Paths paths;
  detail::FlowArgs flow_args;
  double flow_exit = 0.0;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> binds;
  auto bind = [&](CLI::App* sub, const std::string& name, auto RunConfig::*field, const std::string& desc) {
    CLI::Option* o = sub->add_option(name, flags.*field, desc);
    binds.emplace_back(o, [&flags, field](RunConfig& c) { c.*field = flags.*field; });
  };

  app.add_option("--config", paths.config, "config file (key = value with [section] headers)");
  bind(&app, "--threads", &RunConfig::threads, "worker threads (default: hardware parallelism)");

  auto model_opts = [&](CLI::App* sub) {
    bind(sub, "--model", &RunConfig::model, "spindle or flatcone");
    bind(sub, "--alpha", &RunConfig::alpha, "cone parameter, p/q or decimal");
    bind(sub, "--rim-radius", &RunConfig::rim_radius, "flat cone rim radius");
    bind(sub, "--bc", &RunConfig::bc, "flat cone rim condition: dirichlet or neumann");
  };
  auto out_opt = [&](CLI::App* sub) { bind(sub, "--out", &RunConfig::out, "output CSV path"); };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue table");
  model_opts(spectrum);
  bind(spectrum, "--lambda-max", &RunConfig::lambda_max, "largest eigenvalue kept");
  bind(spectrum, "--cache-dir", &RunConfig::cache_dir, "binary table cache directory");
  out_opt(spectrum);

  auto* lengths = app.add_subcommand("lengths", "closed geodesic lengths (Dif and Geo)");
  model_opts(lengths);
  bind(lengths, "--horizon", &RunConfig::horizon, "largest length");
  out_opt(lengths);

  auto* flow = app.add_subcommand("flow", "sample one geodesic as CSV");
  model_opts(flow);
  flow->add_option("--component", flow_args.component, "chart / cone point index");
  flow->add_option("--x", flow_args.x, "distance to the cone point");
  flow->add_option("--y", flow_args.y, "angle phi");
  flow->add_option("--heading", flow_args.heading, "direction measured from the outward radial");
  flow->add_option("--length", flow_args.length, "length to travel");
  flow->add_option("--ds", flow_args.ds, "sampling step");
  auto* exit_opt = flow->add_option("--exit-offset", flow_exit, "phi turn at each cone point (default: stop)");
  out_opt(flow);

  auto* trace = app.add_subcommand("trace", "smoothed wave trace");
  trace->add_option("--eigs", paths.eigs, "eigenvalue CSV from 'spectrum'");
  bind(trace, "--tmax", &RunConfig::tmax, "largest time");
  bind(trace, "--dt", &RunConfig::dt, "time step (at most eps-min/4)");
  bind(trace, "--eps-min", &RunConfig::eps_min, "smallest smoothing width");
  bind(trace, "--eps-max", &RunConfig::eps_max, "largest smoothing width");
  bind(trace, "--eps-count", &RunConfig::eps_count, "number of widths");
  out_opt(trace);

  auto* scan = app.add_subcommand("scan", "singularity scan of a trace against Dif and Geo");
  scan->add_option("--trace", paths.trace, "trace CSV");
  scan->add_option("--lengths", paths.lengths, "lengths CSV");
  bind(scan, "--window", &RunConfig::window, "half-width of the peak window");
  bind(scan, "--threshold", &RunConfig::threshold, "detection exponent");
  bind(scan, "--match-tol", &RunConfig::match_tol, "distance accepted as a match");
  bind(scan, "--t-min", &RunConfig::t_min, "scan start");
  out_opt(scan);

  auto* verify = app.add_subcommand("verify", "oracle suite");
  model_opts(verify);
  bind(verify, "--horizon", &RunConfig::horizon, "length horizon for the closure check");

  auto* report = app.add_subcommand("report", "summary of a scan");
  report->add_option("--report", paths.report, "report CSV from 'scan'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    RunConfig cfg;
    if (!paths.config.empty()) cfg = RunConfig::parse(io::read_file(paths.config));
    if (const char* env = std::getenv(kCacheEnv); env && *env) cfg.cache_dir = env;
    for (auto& [opt, apply] : binds)
      if (opt->count() > 0) apply(cfg);
    cfg.validate(false);
    if (exit_opt->count() > 0) flow_args.exit_offset = flow_exit;

    if (*spectrum) return detail::cmd_spectrum(cfg, out);
    if (*lengths) return detail::cmd_lengths(cfg, out);
    if (*flow) return detail::cmd_flow(cfg, flow_args, out);
    if (*trace) return detail::cmd_trace(cfg, paths, out);
    if (*scan) return detail::cmd_scan(cfg, paths, out);
    if (*verify) return detail::cmd_verify(cfg, out);
    if (*report) return detail::cmd_report(paths, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitValidation;
}

}  // namespace conicwave::cli
