// commands.cpp - the run drivers behind the CLI subcommands
#include "eit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "eit/csv.hpp"
#include "eit/holeburn.hpp"
#include "eit/lineshape.hpp"
#include "eit/susceptibility.hpp"
#include "eit/transmission.hpp"

namespace fs = std::filesystem;

namespace eit {

namespace {

std::string fmt(double v) { return csv::format(v); }

std::ofstream open_text(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  return os;
}

bool lorentz_like(const BroadeningProfile& b) {
  return (b.kind() == ProfileKind::Lorentzian || b.is_point_mass()) && b.center() == 0.0;
}

// A spectrum plus its zero-coupling companion, routed through the closed form
// whenever both profiles are Lorentzian; the companion sets the transmission
// baseline and the residual-visibility reference.
struct SpectrumPair {
  SusceptibilitySpectrum with;
  SusceptibilitySpectrum without;
  bool closed_form = false;
  bool has_companion = false;
  double baseline = 0.0;  // uncoupled line-center absorption
};

bool closed_form_eligible(const BroadeningProfile& optical, const BroadeningProfile& spin,
                          bool force_numeric) {
  return !force_numeric && lorentz_like(optical) && lorentz_like(spin);
}

SpectrumPair compute_pair(const DetuningGrid& grid, const RateParams& p,
                          const BroadeningProfile& optical, const BroadeningProfile& spin,
                          const QuadratureConfig& q, bool force_numeric, int jobs,
                          bool want_companion = true) {
  SpectrumPair out;
  out.closed_form = closed_form_eligible(optical, spin, force_numeric);
  // The zero-coupling companion is singular when nothing damps the spin axis;
  // skip it then (no residual-visibility reference, closed-form baseline only).
  const bool companion_ok = want_companion && (p.gamma21 > 0.0 || spin.fwhm() > 0.0);
  if (out.closed_form) {
    RateParams pc = p;
    pc.sigma_opt = optical.fwhm();
    pc.sigma_spin = spin.fwhm();
    out.with = closed_form_spectrum(grid, pc);
    out.baseline = 2.0 / (pc.gamma31 + pc.sigma_opt);
    if (companion_ok) {
      RateParams pc0 = pc;
      pc0.omega = 0.0;
      out.without = closed_form_spectrum(grid, pc0);
      out.has_companion = true;
    }
  } else {
    out.with = integrate_susceptibility(grid, p, optical, spin, q, jobs);
    if (companion_ok) {
      RateParams p0 = p;
      p0.omega = 0.0;
      out.without = integrate_susceptibility(grid, p0, optical, spin, q, jobs);
      double peak = 0.0;
      for (const Complex& c : out.without.chi) peak = std::max(peak, c.imag());
      if (!(peak > 0.0))
        throw DegenerateBaseline("uncoupled spectrum shows no absorption on this grid");
      out.baseline = peak;
      out.has_companion = true;
    }
  }
  return out;
}

std::optional<double> try_residual_visibility(const SpectrumPair& sp) {
  if (!sp.has_companion) return std::nullopt;
  try {
    // Depth cancels in the log ratio; 1 is an arbitrary positive stand-in.
    TransmissionTrace with = transmission_from_spectrum(sp.with, 1.0, sp.baseline);
    TransmissionTrace without = transmission_from_spectrum(sp.without, 1.0, sp.baseline);
    return visibility_residual(with, without).value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct MetricsOutcome {
  EitMetrics m;
  std::optional<DipExtraction> dip;
  std::vector<std::string> notes;
};

MetricsOutcome measure_curve(const AbsorptionCurve& curve, const RateParams& p,
                             double depth_threshold) {
  MetricsOutcome out;
  out.m.omega = p.omega;
  out.m.sigma_opt = p.sigma_opt;
  out.m.sigma_spin = p.sigma_spin;
  if (p.sigma_opt > 0.0) out.m.regime = classify_regime(p);

  try {
    DipExtraction d = extract_fwhm_dip(curve, depth_threshold);
    out.dip = d;
    out.m.width = d.width;
    out.m.dip_position = d.dip_position;
  } catch (const Error& e) {
    out.notes.push_back(std::string("dip: ") + e.what());
  }
  try {
    out.m.visibility_contrast = contrast_over_feature(curve);
  } catch (const Error& e) {
    out.notes.push_back(std::string("contrast: ") + e.what());
  }
  PeakSet peaks = find_absorption_peaks(curve);
  if (peaks.separation) out.m.peak_separation = peaks.separation;
  return out;
}

void write_metrics_csv(const fs::path& path, const EitMetrics& m) {
  std::ofstream os = open_text(path);
  os << metrics_csv_header() << "\n" << metrics_csv_row(m) << "\n";
}

// Strictly bracketed local maximum of alpha closest to delta = 0; the
// signature of background classes that stay two-photon resonant inside the
// transparency window.
std::optional<std::pair<double, double>> bump_near_zero(const AbsorptionCurve& c,
                                                        double halfwin) {
  std::optional<std::pair<double, double>> best;
  for (size_t i = 1; i + 1 < c.alpha.size(); ++i) {
    if (std::fabs(c.delta[i]) > halfwin) continue;
    if (c.alpha[i] > c.alpha[i - 1] && c.alpha[i] > c.alpha[i + 1]) {
      if (!best || std::fabs(c.delta[i]) < std::fabs(best->first))
        best = {c.delta[i], c.alpha[i]};
    }
  }
  return best;
}

void plot_header(std::ofstream& os) {
  os << "set datafile separator \",\"\n"
     << "set key autotitle columnhead\n"
     << "set term pngcairo size 1000,700\n";
}

}  // namespace

fs::path prepare_run_dir(const RunConfig& cfg, const std::string& raw_config,
                         const std::string& out_override) {
  fs::path dir = out_override.empty()
                     ? fs::path(cfg.output_dir) / (to_string(cfg.mode) + "-" + config_hash(raw_config))
                     : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
  return dir;
}

void cmd_spectrum(const RunConfig& cfg, const fs::path& dir, int jobs, std::ostream& log) {
  BroadeningProfile optical = cfg.optical.build();
  BroadeningProfile spin = cfg.spin.build();
  RateParams p = cfg.rates;
  if (cfg.optical.kind == ProfileKind::Tabulated) p.sigma_opt = optical.fwhm();
  if (cfg.spin.kind == ProfileKind::Tabulated) p.sigma_spin = spin.fwhm();

  SpectrumPair sp = compute_pair(cfg.grid, p, optical, spin, cfg.quad, cfg.force_numeric, jobs);
  write_spectrum_csv((dir / "spectrum.csv").string(), sp.with);
  log << (sp.closed_form ? "closed-form path" : "numeric path") << ", "
      << sp.with.delta.size() << " grid points, " << sp.with.total_evaluations
      << " kernel evaluations\n";

  AbsorptionCurve curve = absorption_curve(sp.with);
  MetricsOutcome mo = measure_curve(curve, sp.with.params, cfg.depth_threshold);
  mo.m.visibility_residual = try_residual_visibility(sp);
  write_metrics_csv(dir / "metrics.csv", mo.m);

  if (cfg.optical_depth > 0.0) {
    if (!(sp.baseline > 0.0))
      throw DegenerateBaseline(
          "transmission outputs need a baseline; with gamma21 = sigma_spin = 0 the uncoupled "
          "line is undefined");
    write_trace_csv((dir / "transmission.csv").string(),
                    transmission_from_spectrum(sp.with, cfg.optical_depth, sp.baseline));
    if (sp.has_companion)
      write_trace_csv((dir / "transmission_uncoupled.csv").string(),
                      transmission_from_spectrum(sp.without, cfg.optical_depth, sp.baseline));
  }

  {
    std::ofstream os = open_text(dir / "run_summary.txt");
    os << "mode = spectrum\n"
       << "path = " << (sp.closed_form ? "closed_form" : "numeric") << "\n"
       << "optical = " << sp.with.optical_profile << "\n"
       << "spin = " << sp.with.spin_profile << "\n"
       << "grid_points = " << sp.with.delta.size() << "\n"
       << "kernel_evaluations = " << sp.with.total_evaluations << "\n"
       << "points_not_converged = " << sp.with.points_not_converged << "\n"
       << "clipped_samples = " << curve.clipped << "\n"
       << "baseline = " << fmt(sp.baseline) << "\n";
    if (mo.dip) {
      os << "dip_width = " << fmt(mo.dip->width) << "\n"
         << "dip_position = " << fmt(mo.dip->dip_position) << "\n"
         << "dip_depth_fraction = " << fmt(mo.dip->depth_fraction) << "\n";
      try {
        os << "dispersion_slope = " << fmt(dispersion_slope(sp.with)) << "\n";
      } catch (const Error& e) {
        os << "dispersion_slope_note = " << e.what() << "\n";
      }
    }
    if (p.sigma_opt > 0.0 && p.omega > 0.0) {
      ClosedFormWidth w = eit_width_closed(p);
      os << "closed_form_width = " << fmt(w.width) << "\n"
         << "closed_form_width_reliable = " << (w.expansion_reliable ? "true" : "false") << "\n"
         << "closed_form_visibility = " << fmt(eit_visibility_closed(p)) << "\n";
    }
    for (const auto& n : mo.notes) os << "note = " << n << "\n";
  }

  {
    std::ofstream os = open_text(dir / "plot.gp");
    plot_header(os);
    os << "set output \"spectrum.png\"\n"
       << "set xlabel \"two-photon detuning\"\n"
       << "plot \"spectrum.csv\" using 1:3 with lines title \"Im chi\", \\\n"
       << "     \"spectrum.csv\" using 1:2 with lines title \"Re chi\"\n";
    if (cfg.optical_depth > 0.0) {
      os << "set output \"transmission.png\"\n"
         << "set yrange [0:1.05]\n"
         << "plot \"transmission.csv\" using 1:2 with lines title \"T (coupled)\"";
      if (sp.has_companion)
        os << ", \\\n     \"transmission_uncoupled.csv\" using 1:2 with lines title \"T (uncoupled)\"";
      os << "\n";
    }
  }
}

void cmd_sweep(const RunConfig& cfg, const fs::path& dir, int jobs, std::ostream& log) {
  const bool width_mode = cfg.mode == RunMode::SweepWidth;
  const int count = cfg.sweep_grid_count > 0 ? cfg.sweep_grid_count : (width_mode ? 481 : 641);
  const double span_widths = cfg.sweep_span_widths > 0.0 ? cfg.sweep_span_widths
                                                         : (width_mode ? 8.0 : 10.0);
  log << "planned runs: " << cfg.planned_runs() << "\n";

  std::ofstream sweep_os = open_text(dir / "sweep.csv");
  sweep_os << "optical_shape,spin_shape,sweep_value," << metrics_csv_header() << ",status\n";

  // Companion closed-form curve over the same abscissa.
  {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    if (width_mode) {
      header = {"sweep_value", "omega",         "width_closed",   "expansion_reliable",
                "width_eit",   "width_at",      "vis_residual_closed", "vis_contrast_closed"};
    } else {
      header = {"sweep_value", "omega", "vis_residual_closed", "vis_contrast_closed"};
    }
    for (double v : cfg.sweep_values) {
      RateParams p = cfg.rates;
      p.omega = width_mode ? v * p.sigma_opt
                           : std::sqrt(v * p.sigma_opt * p.sigma_spin);
      if (width_mode) {
        ClosedFormWidth w = eit_width_closed(p);
        rows.push_back({v, p.omega, w.width, w.expansion_reliable ? 1.0 : 0.0,
                        eit_width_asymptotic(p, Regime::EIT),
                        eit_width_asymptotic(p, Regime::AutlerTownes),
                        eit_visibility_closed(p), eit_contrast_closed(p)});
      } else {
        rows.push_back({v, p.omega, eit_visibility_closed(p), eit_contrast_closed(p)});
      }
    }
    csv::write_file((dir / "analytic.csv").string(), header, rows);
  }

  int done = 0, resolved = 0, unresolved = 0;
  long evaluations = 0;
  for (ProfileKind okind : cfg.optical_shapes) {
    for (ProfileKind skind : cfg.spin_shapes) {
      for (double v : cfg.sweep_values) {
        RateParams p = cfg.rates;
        p.omega = width_mode ? v * p.sigma_opt
                             : std::sqrt(v * p.sigma_opt * p.sigma_spin);
        BroadeningProfile optical = BroadeningProfile::analytic(okind, p.sigma_opt);
        BroadeningProfile spin = BroadeningProfile::analytic(skind, p.sigma_spin);

        std::string status = "ok";
        MetricsOutcome mo;
        const bool companion = closed_form_eligible(optical, spin, cfg.force_numeric);
        // Span follows the expected dip width, but is capped in the split-line
        // regime (just past the dressed peaks at +-Omega/2) so the grid still
        // resolves the sigma_opt-scale peak structure; one retry widens the
        // window when the flanking reference cannot be bracketed.
        double span = std::min(span_widths * eit_width_closed(p).width,
                               0.55 * p.omega + 2.5 * p.sigma_opt);
        for (int attempt = 0;; ++attempt) {
          DetuningGrid grid{-span, span, count};
          SpectrumPair sp =
              compute_pair(grid, p, optical, spin, cfg.quad, cfg.force_numeric, jobs, companion);
          evaluations += sp.with.total_evaluations + sp.without.total_evaluations;
          AbsorptionCurve curve = absorption_curve(sp.with);
          mo = measure_curve(curve, sp.with.params, cfg.depth_threshold);
          mo.m.visibility_residual = try_residual_visibility(sp);
          if (width_mode && !mo.m.width && attempt == 0) {
            span *= 3.0;
            continue;
          }
          if (width_mode && !mo.m.width) status = "not_resolved";
          if (!width_mode && !mo.m.visibility_contrast) status = "empty_window";
          break;
        }

        sweep_os << to_string(okind) << ',' << to_string(skind) << ',' << fmt(v) << ','
                 << metrics_csv_row(mo.m) << ',' << status << "\n";
        sweep_os.flush();
        ++done;
        if (status == "ok") ++resolved; else ++unresolved;
        log << "run " << done << "/" << cfg.planned_runs() << ": optical=" << to_string(okind)
            << " spin=" << to_string(skind) << " value=" << fmt(v);
        if (width_mode)
          log << " width=" << (mo.m.width ? fmt(*mo.m.width) : std::string("-"));
        else
          log << " contrast="
              << (mo.m.visibility_contrast ? fmt(*mo.m.visibility_contrast) : std::string("-"));
        log << " [" << status << "]\n";
      }
    }
  }

  {
    std::ofstream os = open_text(dir / "run_summary.txt");
    os << "mode = " << to_string(cfg.mode) << "\n"
       << "planned_runs = " << cfg.planned_runs() << "\n"
       << "completed_runs = " << done << "\n"
       << "ok = " << resolved << "\n"
       << "flagged = " << unresolved << "\n"
       << "grid_count = " << count << "\n"
       << "span_widths = " << fmt(span_widths) << "\n"
       << "kernel_evaluations = " << evaluations << "\n";
  }

  {
    std::ofstream os = open_text(dir / "plot.gp");
    plot_header(os);
    const int ycol = width_mode ? 7 : 8;  // width / vis_contrast column
    const int acol = width_mode ? 3 : 4;  // matching analytic column
    os << "set output \"sweep.png\"\n"
       << "set logscale x\n";
    if (width_mode) os << "set logscale y\n";
    os << "set xlabel \"" << (width_mode ? "omega / sigma_opt" : "omega^2 / (sigma_opt sigma_spin)")
       << "\"\n"
       << "set ylabel \"" << (width_mode ? "dip FWHM" : "contrast visibility") << "\"\n"
       << "plot \\\n";
    for (ProfileKind okind : cfg.optical_shapes) {
      for (ProfileKind skind : cfg.spin_shapes) {
        os << "  \"sweep.csv\" using (strcol(1) eq \"" << to_string(okind)
           << "\" && strcol(2) eq \"" << to_string(skind) << "\" ? $3 : 1/0):" << ycol
           << " with points title \"" << to_string(okind) << "/" << to_string(skind)
           << "\", \\\n";
      }
    }
    os << "  \"analytic.csv\" using 1:" << acol << " with lines title \"closed form\"\n";
  }
}

void cmd_holeburn(const RunConfig& cfg, const fs::path& dir, int jobs, std::ostream& log) {
  BurnResult burn = run_burn_sequence(cfg.levels, cfg.target_class, cfg.trench_halfwidth,
                                      cfg.feature_fwhm, cfg.burn);
  write_populations_csv((dir / "populations.csv").string(), burn.populations);
  log << "burn: " << burn.populations.class_offset.size() << " classes, stage-1 saturated "
      << burn.report.stage1_saturated << ", leaks " << burn.report.probe_control_leaks << "\n";

  const double kernel = cfg.kernel_fwhm > 0.0 ? cfg.kernel_fwhm : cfg.rates.gamma31;
  BroadeningProfile optical = [&] {
    try {
      return profile_from_populations(burn.populations, cfg.levels, cfg.burn.probe_ground,
                                      kernel, burn.report.probe_frequency, cfg.profile_step);
    } catch (const AllZero& e) {
      throw AllZero(std::string(e.what()) +
                    " (burn sequence left the probe ground empty everywhere; with feature_fwhm = " +
                    fmt(cfg.feature_fwhm) + " stage 3 repumps no classes)");
    }
  }();
  {
    std::ofstream os = open_text(dir / "profile.csv");
    optical.write_csv(os);
  }
  log << "profile: " << optical.table_shifts().size() << " samples, fwhm " << fmt(optical.fwhm())
      << "\n";

  RateParams p = cfg.rates;
  p.sigma_opt = optical.fwhm();
  BroadeningProfile spin = cfg.spin.build();
  SpectrumPair sp = compute_pair(cfg.grid, p, optical, spin, cfg.quad, /*force_numeric=*/true, jobs);
  write_spectrum_csv((dir / "spectrum.csv").string(), sp.with);
  log << "spectrum: " << sp.with.delta.size() << " points, " << sp.with.total_evaluations
      << " kernel evaluations\n";

  AbsorptionCurve curve = absorption_curve(sp.with);
  MetricsOutcome mo = measure_curve(curve, sp.with.params, cfg.depth_threshold);
  mo.m.visibility_residual = try_residual_visibility(sp);
  write_metrics_csv(dir / "metrics.csv", mo.m);

  if (cfg.optical_depth > 0.0) {
    if (!(sp.baseline > 0.0))
      throw DegenerateBaseline(
          "transmission outputs need a baseline; with gamma21 = sigma_spin = 0 the uncoupled "
          "line is undefined");
    write_trace_csv((dir / "transmission.csv").string(),
                    transmission_from_spectrum(sp.with, cfg.optical_depth, sp.baseline));
    if (sp.has_companion)
      write_trace_csv((dir / "transmission_uncoupled.csv").string(),
                      transmission_from_spectrum(sp.without, cfg.optical_depth, sp.baseline));
  }

  const double bump_window = mo.dip ? 0.5 * mo.dip->width
                                    : 0.1 * (cfg.grid.stop - cfg.grid.start);
  auto bump = bump_near_zero(curve, bump_window);

  {
    std::ofstream os = open_text(dir / "run_summary.txt");
    os << "mode = holeburn\n"
       << "classes = " << burn.populations.class_offset.size() << "\n"
       << "class_step = " << fmt(burn.populations.step()) << "\n"
       << "span = [" << fmt(burn.populations.class_offset.front()) << ", "
       << fmt(burn.populations.class_offset.back()) << "]\n"
       << "selection_fields = [" << fmt(burn.report.selection_fields[0]) << ", "
       << fmt(burn.report.selection_fields[1]) << ", " << fmt(burn.report.selection_fields[2])
       << "]\n"
       << "probe_frequency = " << fmt(burn.report.probe_frequency) << "\n"
       << "control_frequency = " << fmt(burn.report.control_frequency) << "\n"
       << "stage1_saturated = " << burn.report.stage1_saturated << "\n"
       << "stage2_saturated = " << burn.report.stage2_saturated << "\n"
       << "probe_control_leaks = " << burn.report.probe_control_leaks << "\n"
       << "profile_fwhm = " << fmt(optical.fwhm()) << "\n"
       << "kernel_fwhm = " << fmt(kernel) << "\n"
       << "baseline = " << fmt(sp.baseline) << "\n"
       << "kernel_evaluations = " << sp.with.total_evaluations << "\n"
       << "points_not_converged = " << sp.with.points_not_converged << "\n";
    if (mo.dip) {
      os << "dip_width = " << fmt(mo.dip->width) << "\n"
         << "dip_position = " << fmt(mo.dip->dip_position) << "\n";
    }
    os << "zero_detuning_bump = " << (bump ? "true" : "false") << "\n";
    if (bump)
      os << "bump_position = " << fmt(bump->first) << "\n"
         << "bump_height = " << fmt(bump->second) << "\n";
    for (const auto& n : mo.notes) os << "note = " << n << "\n";
  }

  {
    std::ofstream os = open_text(dir / "plot.gp");
    plot_header(os);
    os << "set output \"profile.png\"\n"
       << "set xlabel \"optical shift\"\n"
       << "plot \"profile.csv\" using 1:2 with lines title \"burned optical density\"\n"
       << "set output \"spectrum.png\"\n"
       << "set xlabel \"two-photon detuning\"\n"
       << "plot \"spectrum.csv\" using 1:3 with lines title \"Im chi\"\n";
    if (cfg.optical_depth > 0.0) {
      os << "set output \"transmission.png\"\n"
         << "set yrange [0:1.05]\n"
         << "plot \"transmission.csv\" using 1:2 with lines title \"T (coupled)\"";
      if (sp.has_companion)
        os << ", \\\n     \"transmission_uncoupled.csv\" using 1:2 with lines title \"T (uncoupled)\"";
      os << "\n";
    }
  }
}

void cmd_analyze(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  TransmissionTrace trace = read_trace_csv(cfg.input_path, cfg.optical_depth);
  std::vector<double> alpha(trace.transmission.size());
  for (size_t i = 0; i < alpha.size(); ++i)
    alpha[i] = -std::log(trace.transmission[i]);  // reader guarantees T in (0, 1]
  AbsorptionCurve curve = make_absorption_curve(trace.grid, std::move(alpha));

  const bool want_dip = cfg.analysis != "saturated";
  const bool want_sat = cfg.analysis != "dip";

  EitMetrics m;
  std::vector<std::string> notes;
  std::exception_ptr dip_error, sat_error;

  if (want_dip) {
    try {
      DipExtraction d = extract_fwhm_dip(curve, cfg.depth_threshold);
      m.width = d.width;
      m.dip_position = d.dip_position;
    } catch (const Error& e) {
      dip_error = std::current_exception();
      notes.push_back(std::string("dip: ") + e.what());
    }
    try {
      m.visibility_contrast = contrast_over_feature(curve);
    } catch (const Error& e) {
      notes.push_back(std::string("contrast: ") + e.what());
    }
    PeakSet peaks = find_absorption_peaks(curve);
    if (peaks.separation) m.peak_separation = peaks.separation;
    write_metrics_csv(dir / "metrics.csv", m);
  }

  std::optional<SaturatedFit> sat;
  if (want_sat) {
    try {
      sat = fit_saturated_absorption(trace);
      csv::write_file((dir / "saturated.csv").string(),
                      {"optical_depth", "width", "center", "residual_norm"},
                      {{sat->optical_depth, sat->width, sat->center, sat->residual_norm}});
    } catch (const Error& e) {
      sat_error = std::current_exception();
      notes.push_back(std::string("saturated: ") + e.what());
    }
  }

  {
    std::ofstream os = open_text(dir / "run_summary.txt");
    os << "mode = analyze\n"
       << "input = " << cfg.input_path << "\n"
       << "analysis = " << cfg.analysis << "\n"
       << "samples = " << trace.transmission.size() << "\n";
    if (m.width) os << "dip_width = " << fmt(*m.width) << "\n";
    if (m.dip_position) os << "dip_position = " << fmt(*m.dip_position) << "\n";
    if (sat) {
      os << "saturated_optical_depth = " << fmt(sat->optical_depth) << "\n"
         << "saturated_width = " << fmt(sat->width) << "\n"
         << "saturated_center = " << fmt(sat->center) << "\n";
    }
    for (const auto& n : notes) os << "note = " << n << "\n";
  }

  {
    std::ofstream os = open_text(dir / "plot.gp");
    plot_header(os);
    os << "set output \"analyze.png\"\n"
       << "set xlabel \"detuning\"\n"
       << "plot \"" << cfg.input_path << "\" using 1:2 with lines title \"transmission\"\n";
  }

  for (const auto& n : notes) log << "note: " << n << "\n";
  // Success if any requested analysis produced a result.
  if (want_dip && dip_error && (!want_sat || sat_error)) std::rethrow_exception(dip_error);
  if (!want_dip && sat_error) std::rethrow_exception(sat_error);
}

fs::path run_from_config(const std::string& config_path, const std::string& subcommand,
                         const std::string& out_override, int jobs, std::ostream& log) {
  std::ifstream raw_is(config_path, std::ios::binary);
  if (!raw_is) throw IoError("cannot open config '" + config_path + "'");
  std::ostringstream raw_buf;
  raw_buf << raw_is.rdbuf();
  const std::string raw = raw_buf.str();

  RunConfig cfg = load_config(config_path);
  if (!subcommand.empty()) {
    const std::string mode_name = to_string(cfg.mode);
    const bool match = (subcommand == "sweep")
                           ? (cfg.mode == RunMode::SweepWidth || cfg.mode == RunMode::SweepVisibility)
                           : (subcommand == mode_name);
    if (!match)
      throw ValidationError("config mode '" + mode_name + "' does not match subcommand '" +
                            subcommand + "'");
  }
  if (jobs < 1) throw ValidationError("--jobs must be >= 1");

  fs::path dir = prepare_run_dir(cfg, raw, out_override);
  log << "run directory: " << dir.string() << "\n";
  {
    std::ofstream os = open_text(dir / "echo.cfg");
    os << cfg.echo();
  }

  switch (cfg.mode) {
    case RunMode::Spectrum: cmd_spectrum(cfg, dir, jobs, log); break;
    case RunMode::SweepWidth:
    case RunMode::SweepVisibility: cmd_sweep(cfg, dir, jobs, log); break;
    case RunMode::Holeburn: cmd_holeburn(cfg, dir, jobs, log); break;
    case RunMode::Analyze: cmd_analyze(cfg, dir, log); break;
  }
  return dir;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 4;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const InvalidParams*>(&e) ||
      dynamic_cast<const InvalidWidth*>(&e) || dynamic_cast<const InvalidDepth*>(&e) ||
      dynamic_cast<const NonUniformGrid*>(&e) || dynamic_cast<const NegativeDensity*>(&e) ||
      dynamic_cast<const GridMismatch*>(&e) || dynamic_cast<const EmptyWindow*>(&e) ||
      dynamic_cast<const AmbiguousSelection*>(&e))
    return 2;
  if (dynamic_cast<const Error*>(&e)) return 3;
  return 1;
}

}  // namespace eit
