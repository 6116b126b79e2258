// Acceptance gate: ten end-to-end checks of the lineshape engine, printed one
// PASS/FAIL line each.  Tolerances are pinned next to each criterion.  The
// --eit flag must point at the CLI binary (used by the round-trip check).
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eit/commands.hpp"
#include "eit/config.hpp"
#include "eit/csv.hpp"
#include "eit/holeburn.hpp"
#include "eit/integrator.hpp"
#include "eit/lineshape.hpp"
#include "eit/susceptibility.hpp"
#include "eit/transmission.hpp"

namespace fs = std::filesystem;
using eit::BroadeningProfile;
using eit::Complex;
using eit::DetuningGrid;
using eit::ProfileKind;
using eit::QuadratureConfig;
using eit::RateParams;

namespace {

std::string g_eit_binary;

RateParams rates(double omega, double g21, double g31, double so, double ss) {
  RateParams p;
  p.omega = omega;
  p.gamma21 = g21;
  p.gamma31 = g31;
  p.sigma_opt = so;
  p.sigma_spin = ss;
  return p;
}

// Detuning span for a dip measurement: a few closed-form widths, capped so
// strong-drive grids still resolve the split peaks near +-omega/2.
DetuningGrid dip_grid(const RateParams& p, int count, double widths = 8.0) {
  const double w = eit_width_closed(p).width;
  const double span = std::min(widths * w, 0.55 * p.omega + 2.5 * p.sigma_opt);
  return DetuningGrid{-span, span, count};
}

eit::SusceptibilitySpectrum numeric_spectrum(const RateParams& p, ProfileKind ok,
                                             ProfileKind sk, const DetuningGrid& g,
                                             double rel_tol) {
  const auto optical = BroadeningProfile::analytic(ok, p.sigma_opt);
  const auto spin = BroadeningProfile::analytic(sk, p.sigma_spin);
  QuadratureConfig q;
  q.rel_tol = rel_tol;
  return integrate_susceptibility(g, p, optical, spin, q, 1);
}

double numeric_width(const RateParams& p, ProfileKind ok, ProfileKind sk, int count,
                     double rel_tol) {
  const auto s = numeric_spectrum(p, ok, sk, dip_grid(p, count), rel_tol);
  return eit::extract_fwhm_dip(eit::absorption_curve(s)).width;
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// metrics.csv row as optional numeric cells (the trailing regime label and
// empty cells are returned as nullopt).
std::vector<std::optional<double>> parse_metrics_row(const fs::path& csv_path) {
  std::ifstream is(csv_path);
  std::string header, line;
  if (!std::getline(is, header) || !std::getline(is, line))
    throw eit::SchemaError("metrics csv at " + csv_path.string() + " has no data row");
  std::vector<std::optional<double>> out;
  for (const auto& cell : eit::csv::split(line)) {
    try {
      out.push_back(eit::csv::to_double(cell));
    } catch (const eit::Error&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_eit_binary + "\" " + args + " > /dev/null";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Numeric ensemble average reproduces the double-Lorentzian closed form to
//    1e-3 over 50 random parameter sets spanning omega/sigma_opt in
//    [0.01, 100]; a subset re-runs the full nested quadrature.
Outcome criterion_1() {
  constexpr double kTol = 1e-3;
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> logv(-2.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double v = std::pow(10.0, logv(rng));
    RateParams p = rates(v, 1e-5 + 1e-3 * u(rng), 1e-4 + 0.05 * u(rng), 1.0,
                         1e-4 + 0.05 * u(rng));
    const auto optical = BroadeningProfile::analytic(ProfileKind::Lorentzian, 1.0);
    const auto spin = BroadeningProfile::analytic(ProfileKind::Lorentzian, p.sigma_spin);
    QuadratureConfig q;
    q.rel_tol = 1e-7;
    q.collapse_lorentzian_spin = (k % 8 != 0);  // every 8th set: nested path
    if (!q.collapse_lorentzian_spin) q.rel_tol = 1e-6;

    const double w = eit_width_closed(p).width;
    for (double delta : {0.0, 0.5 * w, -0.5 * p.omega, 1.0, -2.0}) {
      const Complex closed = chi_lorentzian_inhomogeneous(delta, p);
      const Complex numeric = chi_inhomogeneous_point(delta, p, optical, spin, q, nullptr);
      worst = std::max(worst, std::abs(numeric - closed) / std::abs(closed));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel deviation %.2e (tol %.0e)", worst, kTol);
  return {worst < kTol, buf};
}

// ---------------------------------------------------------------------------
// 2. Measured dip width matches the closed form to 1% across the crossover,
//    omega/sigma_opt in {0.03, 0.1, 0.3, 1, 3, 10} at gamma31 = 1e-4 sigma_opt.
Outcome criterion_2() {
  constexpr double kTol = 0.01;
  double worst = 0.0;
  for (double v : {0.03, 0.1, 0.3, 1.0, 3.0, 10.0}) {
    const RateParams p = rates(v, 0.0, 1e-4, 1.0, 0.0);
    const double measured = numeric_width(p, ProfileKind::Lorentzian,
                                          ProfileKind::Lorentzian, 1201, 1e-7);
    const double want = eit_width_closed(p).width;
    worst = std::max(worst, std::fabs(measured / want - 1.0));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max width deviation %.2e (tol %.0e)", worst, kTol);
  return {worst < kTol, buf};
}

// ---------------------------------------------------------------------------
// 3. The closed width approaches both asymptotes to 5%: omega^2/sigma_opt +
//    sigma_spin at omega = 0.01 sigma_opt, omega - (sigma_opt+sigma_spin)/2
//    at omega = 100 sigma_opt.
Outcome criterion_3() {
  constexpr double kTol = 0.05;
  const RateParams lo = rates(0.01, 0.0, 0.0, 1.0, 1e-6);
  const double dev_lo = std::fabs(eit_width_closed(lo).width /
                                      eit_width_asymptotic(lo, eit::Regime::EIT) -
                                  1.0);
  const RateParams hi = rates(100.0, 0.0, 0.0, 1.0, 1e-6);
  const double dev_hi =
      std::fabs(eit_width_closed(hi).width /
                    eit_width_asymptotic(hi, eit::Regime::AutlerTownes) -
                1.0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "weak-drive dev %.2e, strong-drive dev %.2e (tol %.0e)",
                dev_lo, dev_hi, kTol);
  return {dev_lo < kTol && dev_hi < kTol, buf};
}

// ---------------------------------------------------------------------------
// 4. Transmission-level residual visibility matches omega^2/(omega^2 +
//    sigma_opt*sigma_spin) to 1% whenever the homogeneous rates stay below
//    1e-3 of the widths, including the exact half point omega^2 = so*ss.
Outcome criterion_4() {
  constexpr double kTol = 0.01;
  const double so = 1.0, ss = 0.01;
  double worst = 0.0;
  double at_half = -1.0;
  for (double g31 : {1e-4, 1e-3}) {
    for (double omega : {0.05, 0.1, 0.3}) {
      RateParams p = rates(omega, 0.0, g31, so, ss);
      const auto grid = dip_grid(p, 2001);
      const auto with = transmission_from_spectrum(
          numeric_spectrum(p, ProfileKind::Lorentzian, ProfileKind::Lorentzian, grid, 1e-7),
          1.0);
      RateParams bare = p;
      bare.omega = 0.0;
      const auto without = transmission_from_spectrum(
          numeric_spectrum(bare, ProfileKind::Lorentzian, ProfileKind::Lorentzian, grid,
                           1e-7),
          1.0);
      const double v = eit::visibility_residual(with, without).value;
      const double want = eit_visibility_closed(p);
      worst = std::max(worst, std::fabs(v - want));
      if (g31 == 1e-4 && omega == 0.1) at_half = v;  // omega^2 == so*ss here
    }
  }
  const double half_dev = std::fabs(at_half - 0.5);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max visibility deviation %.2e, value at product point %.4f (tol %.0e)",
                worst, at_half, kTol);
  return {worst < kTol && half_dev < kTol, buf};
}

// ---------------------------------------------------------------------------
// 5. Width-vs-drive power laws for spin widths 1e-4..1e-2 of the optical
//    width: quadratic rise (slope 2.0 +- 0.1 after subtracting the additive
//    spin floor), linear splitting at strong drive (slope 1.0 +- 0.05), the
//    floor itself within 25% of sigma_spin, and Gaussian/flat-top optical
//    profiles within 10% of the Lorentzian prediction in the EIT regime.
Outcome criterion_5() {
  constexpr double kSlope2Tol = 0.1;
  constexpr double kSlope1Tol = 0.05;
  constexpr double kFloorTol = 0.25;
  constexpr double kShapeTol = 0.10;
  const double g31 = 1e-6;

  std::ostringstream detail;
  bool pass = true;

  // Quadratic-rise windows per curve: confined to drives where the dip is
  // deep enough (>30% of the flank) that extraction bias, amplified by the
  // floor subtraction, stays negligible, yet weak enough to sit below the
  // crossover bend.
  const std::array<std::vector<double>, 3> rise = {
      std::vector<double>{0.03, 0.05, 0.1, 0.2},
      std::vector<double>{0.03, 0.05, 0.1, 0.2},
      std::vector<double>{0.1, 0.14, 0.2, 0.28}};
  const std::vector<double> split = {10.0, 20.0, 30.0};
  const std::array<double, 3> spins = {1e-4, 1e-3, 1e-2};
  const std::array<double, 3> floor_omega = {0.003, 0.01, 0.03};

  for (size_t ci = 0; ci < spins.size(); ++ci) {
    const double ss = spins[ci];

    std::vector<double> w_rise;
    for (double v : rise[ci])
      w_rise.push_back(numeric_width(rates(v, 0.0, g31, 1.0, ss),
                                     ProfileKind::Lorentzian, ProfileKind::Lorentzian,
                                     961, 1e-7));
    std::vector<double> excess;
    for (double w : w_rise) excess.push_back(w - ss);
    const double s2 = fit_log_slope(rise[ci], excess);

    std::vector<double> w_split;
    for (double v : split)
      w_split.push_back(numeric_width(rates(v, 0.0, g31, 1.0, ss),
                                      ProfileKind::Lorentzian, ProfileKind::Lorentzian,
                                      961, 1e-7));
    const double s1 = fit_log_slope(split, w_split);

    const double w_floor =
        numeric_width(rates(floor_omega[ci], 0.0, g31, 1.0, ss), ProfileKind::Lorentzian,
                      ProfileKind::Lorentzian, 961, 1e-7);
    const double floor_ratio = w_floor / ss;

    const bool ok = std::fabs(s2 - 2.0) < kSlope2Tol && std::fabs(s1 - 1.0) < kSlope1Tol &&
                    std::fabs(floor_ratio - 1.0) < kFloorTol;
    pass = pass && ok;
    detail << "ss=" << ss << ": slope2 " << std::round(s2 * 1000) / 1000 << ", slope1 "
           << std::round(s1 * 1000) / 1000 << ", floor/ss "
           << std::round(floor_ratio * 100) / 100 << "; ";
  }

  // Shape insensitivity: in the shape-limited EIT window (dip excess well
  // above the spin floor) the measured width over Gaussian and flat-top
  // optical profiles must track the Lorentzian closed form.  Closer to the
  // floor the spin smearing (~ sigma_spin*sigma_opt^2/(2 Omega^2) wide in
  // shift space) genuinely distorts hard-edged profiles, so the comparison
  // uses the smallest spin width of the sweep.
  double shape_worst = 0.0;
  for (ProfileKind ok : {ProfileKind::Gaussian, ProfileKind::FlatTop}) {
    for (double v : {0.05, 0.1}) {
      const RateParams p = rates(v, 0.0, g31, 1.0, 1e-4);
      const double w = numeric_width(p, ok, ProfileKind::Lorentzian, 961, 1e-6);
      const double dev = std::fabs(w / eit_width_closed(p).width - 1.0);
      detail << to_string(ok)[0] << "@" << v << " dev " << std::round(dev * 1000) / 1000
             << "; ";
      shape_worst = std::max(shape_worst, dev);
    }
  }
  pass = pass && shape_worst < kShapeTol;
  detail << "shape dev " << std::round(shape_worst * 1000) / 1000;
  return {pass, detail.str()};
}

// Contrast visibility (max-min)/(max+min) over the dip's own feature window
// at drive abscissa x = omega^2/(sigma_opt*sigma_spin).
double contrast_at(double x, ProfileKind ok, ProfileKind sk, double rel_tol, int count) {
  const double so = 1.0, ss = 0.1;
  RateParams p = rates(std::sqrt(x * so * ss), 0.0, 1e-4, so, ss);
  const auto g = dip_grid(p, count);
  const auto s = numeric_spectrum(p, ok, sk, g, rel_tol);
  return eit::contrast_over_feature(eit::absorption_curve(s));
}

// ---------------------------------------------------------------------------
// 6. The contrast-visibility half point lies at abscissa 0.3..3 for every
//    optical x spin shape combination, and bounded-tail spin profiles beat
//    the Lorentzian's visibility at abscissa 0.1.
Outcome criterion_6() {
  const std::array<ProfileKind, 3> kinds = {ProfileKind::Lorentzian, ProfileKind::Gaussian,
                                            ProfileKind::FlatTop};
  bool pass = true;
  std::ostringstream detail;
  for (ProfileKind ok : kinds) {
    for (ProfileKind sk : kinds) {
      const double lo = contrast_at(0.3, ok, sk, 1e-4, 641);
      const double hi = contrast_at(3.0, ok, sk, 1e-4, 641);
      const bool crosses = lo < 0.5 && hi > 0.5;
      pass = pass && crosses;
      if (!crosses)
        detail << to_string(ok) << "/" << to_string(sk) << " V(0.3)=" << lo
               << " V(3)=" << hi << " no half crossing in band; ";
    }
  }
  const double v_lor = contrast_at(0.1, ProfileKind::Lorentzian, ProfileKind::Lorentzian,
                                   1e-5, 1025);
  const double v_gss = contrast_at(0.1, ProfileKind::Lorentzian, ProfileKind::Gaussian,
                                   1e-5, 1025);
  const double v_top = contrast_at(0.1, ProfileKind::Lorentzian, ProfileKind::FlatTop,
                                   1e-5, 1025);
  const bool tails = v_gss > v_lor && v_top > v_lor;
  pass = pass && tails;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "half crossing in [0.3, 3] for 9 shape pairs; V(0.1): lor %.3f gss %.3f top %.3f",
                v_lor, v_gss, v_top);
  return {pass, detail.str() + buf};
}

// ---------------------------------------------------------------------------
// 7. Strong-drive absorption doublet: peaks at +-omega/2 and separation omega
//    to 1% for omega/sigma_opt in {2, 5, 20}.
Outcome criterion_7() {
  constexpr double kTol = 0.01;
  double worst = 0.0;
  for (double v : {2.0, 5.0, 20.0}) {
    const RateParams p = rates(v, 0.0, 1e-4, 1.0, 0.0);
    const double span = 0.55 * v + 2.5;
    const auto s = numeric_spectrum(p, ProfileKind::Lorentzian, ProfileKind::Lorentzian,
                                    DetuningGrid{-span, span, 1601}, 1e-7);
    const auto peaks = eit::find_absorption_peaks(eit::absorption_curve(s));
    if (peaks.positions.size() != 2 || !peaks.separation) {
      return {false, "no resolved doublet at omega/sigma_opt " + std::to_string(v)};
    }
    worst = std::max(worst, std::fabs(peaks.positions[0] / (-0.5 * v) - 1.0));
    worst = std::max(worst, std::fabs(peaks.positions[1] / (0.5 * v) - 1.0));
    worst = std::max(worst, std::fabs(*peaks.separation / v - 1.0));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max peak/separation deviation %.2e (tol %.0e)", worst,
                kTol);
  return {worst < kTol, buf};
}

// ---------------------------------------------------------------------------
// 8. Dispersion slope at the transparency point equals 4/omega^2 to 1%,
//    checked on the closed form and once through the numeric integrator.
Outcome criterion_8() {
  constexpr double kTol = 0.01;
  double worst = 0.0;
  for (double v : {0.1, 0.3}) {
    const RateParams p = rates(v, 0.0, 0.0, 1.0, 0.0);
    const double w = eit_width_closed(p).width;
    const DetuningGrid g{-4.0 * w, 4.0 * w, 801};  // spacing = w/100
    const auto s = eit::closed_form_spectrum(g, p);
    worst = std::max(worst, std::fabs(eit::dispersion_slope(s) * v * v / 4.0 - 1.0));
  }
  {
    const RateParams p = rates(0.3, 0.0, 1e-4, 1.0, 0.0);
    const double w = eit_width_closed(p).width;
    const auto s = numeric_spectrum(p, ProfileKind::Lorentzian, ProfileKind::Lorentzian,
                                    DetuningGrid{-4.0 * w, 4.0 * w, 801}, 1e-8);
    worst = std::max(worst, std::fabs(eit::dispersion_slope(s) * 0.09 / 4.0 - 1.0));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max slope deviation %.2e (tol %.0e)", worst, kTol);
  return {worst < kTol, buf};
}

// ---------------------------------------------------------------------------
// 9. Hole-burned state preparation: exact population conservation, a trench
//    profile with the line-center feature, and increased absorption at zero
//    detuning in the resulting spectrum.
Outcome criterion_9() {
  constexpr double kConsTol = 1e-12;
  eit::LevelStructure ls;
  ls.ground_offsets = {0.0, 10.2, 27.5};
  ls.excited_offsets = {0.0, 4.6, 9.4};
  for (auto& row : ls.strengths) row = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  ls.background_fwhm = 5000.0;

  const double trench = 1.0, feature = 0.2;
  const auto burn = eit::run_burn_sequence(ls, 0.0, trench, feature);

  double cons = 0.0;
  for (const auto& occ : burn.populations.occupancy)
    cons = std::max(cons, std::fabs(occ[0] + occ[1] + occ[2] - 1.0));

  const auto prof = eit::profile_from_populations(burn.populations, ls, 1, 0.02,
                                                  burn.report.probe_frequency);
  const bool trench_ok = prof.density(0.0) > 10.0 * prof.density(0.45) &&
                         prof.density(3.0) > prof.density(0.45);

  RateParams p = rates(0.5, 1e-3, 0.02, prof.fwhm(), 0.02);
  const auto spin = BroadeningProfile::analytic(ProfileKind::Lorentzian, 0.02);
  QuadratureConfig q;
  q.rel_tol = 1e-6;
  const auto s =
      integrate_susceptibility(DetuningGrid{-1.5, 1.5, 301}, p, prof, spin, q, 1);

  // Interior absorption maximum near zero detuning, standing above its
  // adjacent minima inside the trench.  Other hyperfine transitions of
  // neighboring classes may shelve parts of the trench (audited as leaks),
  // so the comparison uses the flanking minima, not fixed far offsets.
  int imax = -1;
  for (int i = 1; i + 1 < 301; ++i) {
    if (std::fabs(s.delta[i]) > 0.2) continue;
    if (imax < 0 || s.chi[i].imag() > s.chi[imax].imag()) imax = i;
  }
  double lmin = 1e300, rmin = 1e300;
  for (int i = 0; i < 301; ++i) {
    if (s.delta[i] >= -0.5 && i < imax) lmin = std::min(lmin, s.chi[i].imag());
    if (s.delta[i] <= 0.5 && i > imax) rmin = std::min(rmin, s.chi[i].imag());
  }
  const double bump = imax < 0 ? 0.0 : s.chi[imax].imag();
  const bool bump_ok = imax > 0 && bump > 3.0 * lmin && bump > 3.0 * rmin;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "conservation %.1e (tol %.0e), trench/feature profile %s, zero-detuning bump at %.3f (%s)",
                cons, kConsTol, trench_ok ? "ok" : "BAD", s.delta[imax],
                bump_ok ? "ok" : "absent");
  return {cons < kConsTol && trench_ok && bump_ok, buf};
}

// ---------------------------------------------------------------------------
// 10. CLI round trip: a spectrum run re-analyzed from its own transmission
//     trace reproduces width, contrast, dip position and peak separation to
//     1e-6, and repeated runs emit byte-identical CSV files.
Outcome criterion_10() {
  constexpr double kTol = 1e-6;
  if (g_eit_binary.empty()) return {false, "missing --eit <binary> argument"};

  const fs::path work = fs::temp_directory_path() / "eit_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path cfg = work / "spectrum.cfg";
  {
    std::ofstream os(cfg);
    os << "mode = spectrum\nomega = 0.5\ngamma31 = 0.01\nsigma_opt = 1\n"
          "sigma_spin = 0.01\noptical_depth = 2\n"
          "grid_start = -2\ngrid_stop = 2\ngrid_count = 1601\n";
  }
  const fs::path run1 = work / "run1", run2 = work / "run2";
  if (run_cli("spectrum --config " + cfg.string() + " --out " + run1.string()) != 0)
    return {false, "spectrum run failed"};
  if (run_cli("spectrum --config " + cfg.string() + " --out " + run2.string()) != 0)
    return {false, "spectrum rerun failed"};

  for (const char* name :
       {"spectrum.csv", "metrics.csv", "transmission.csv", "transmission_uncoupled.csv"}) {
    if (read_bytes(run1 / name) != read_bytes(run2 / name) ||
        read_bytes(run1 / name).empty())
      return {false, std::string("rerun not byte-identical for ") + name};
  }

  const fs::path acfg = work / "analyze.cfg";
  {
    std::ofstream os(acfg);
    os << "mode = analyze\ninput = " << (run1 / "transmission.csv").string()
       << "\nanalysis = dip\noptical_depth = 2\n";
  }
  const fs::path run3 = work / "run3";
  if (run_cli("analyze --config " + acfg.string() + " --out " + run3.string()) != 0)
    return {false, "analyze run failed"};

  const auto direct = parse_metrics_row(run1 / "metrics.csv");
  const auto redone = parse_metrics_row(run3 / "metrics.csv");
  // columns: omega, sigma_opt, sigma_spin, width, vis_contrast, vis_residual,
  // dip_pos, peak_sep, regime
  double worst = 0.0;
  for (size_t col : {3u, 4u, 6u, 7u}) {
    if (col >= direct.size() || col >= redone.size() || !direct[col] || !redone[col])
      return {false, "metric column " + std::to_string(col) + " missing from round trip"};
    const double a = *direct[col], b = *redone[col];
    worst = std::max(worst, std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-9}));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "CSV reruns byte-identical; max metric round-trip deviation %.2e (tol %.0e)",
                worst, kTol);
  return {worst < kTol, buf};
}

}  // namespace

int main(int argc, char** argv) {
  long only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--eit" && i + 1 < argc) g_eit_binary = argv[++i];
    else if (arg == "--only" && i + 1 < argc) only = std::strtol(argv[++i], nullptr, 10);
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "ensemble average matches the closed form", criterion_1},
      {2, "dip width tracks the closed form across the crossover", criterion_2},
      {3, "closed width reaches both asymptotes", criterion_3},
      {4, "residual visibility follows the drive/product law", criterion_4},
      {5, "width power laws, spin floor, and shape insensitivity", criterion_5},
      {6, "contrast half point and bounded-tail ordering", criterion_6},
      {7, "doublet peaks at half the drive strength", criterion_7},
      {8, "dispersion slope is 4 over drive squared", criterion_8},
      {9, "hole burning conserves population and shows the feature", criterion_9},
      {10, "CLI round trip is stable and deterministic", criterion_10},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d: %s [%s] (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
