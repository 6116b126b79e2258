// Metric-extraction tests on synthetic and closed-form curves.
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "eit/lineshape.hpp"
#include "eit/susceptibility.hpp"

using eit::AbsorptionCurve;
using eit::DetuningGrid;
using eit::RateParams;

namespace {

RateParams make(double omega, double so, double ss) {
  RateParams p;
  p.omega = omega;
  p.sigma_opt = so;
  p.sigma_spin = ss;
  return p;
}

AbsorptionCurve synth(const DetuningGrid& g, double (*f)(double)) {
  std::vector<double> alpha;
  for (double d : g.points()) alpha.push_back(f(d));
  return eit::make_absorption_curve(g, std::move(alpha));
}

AbsorptionCurve closed_curve(const RateParams& p, double span, int n) {
  DetuningGrid g{-span, span, n};
  return eit::absorption_curve(eit::closed_form_spectrum(g, p));
}

}  // namespace

TEST_CASE("synthetic inverted Lorentzian dip is measured to sub-percent accuracy") {
  // background 1, depth 0.6, half-width 0.25 -> fwhm 0.5, center 0.1
  auto f = +[](double d) {
    const double u = d - 0.1;
    return 1.0 - 0.6 * 0.0625 / (u * u + 0.0625);
  };
  const auto c = synth(DetuningGrid{-4.0, 4.0, 3201}, f);
  const auto dip = eit::extract_fwhm_dip(c);
  CHECK(dip.width == doctest::Approx(0.5).epsilon(5e-3));
  CHECK(dip.dip_position == doctest::Approx(0.1).epsilon(2e-2));
  CHECK(dip.alpha_min == doctest::Approx(0.4).epsilon(1e-3));
  CHECK(dip.depth_fraction == doctest::Approx(0.6).epsilon(2e-2));
}

TEST_CASE("dip width on the closed-form curve matches the analytic expression") {
  for (double v : {0.05, 0.3, 1.0}) {
    const RateParams p = make(v, 1.0, 0.0);
    const double want = eit_width_closed(p).width;
    const auto c = closed_curve(p, std::max(6.0 * v, 12.0 * want), 6001);
    const auto dip = eit::extract_fwhm_dip(c);
    CHECK(dip.width == doctest::Approx(want).epsilon(1e-2));
    CHECK(std::abs(dip.dip_position) < 2.0 * c.grid.spacing());
  }
}

TEST_CASE("featureless curves are rejected") {
  auto flat = +[](double) { return 1.0; };
  CHECK_THROWS_AS(eit::extract_fwhm_dip(synth(DetuningGrid{-1.0, 1.0, 201}, flat)),
                  eit::NoDip);
  auto rising = +[](double d) { return 2.0 + d; };
  CHECK_THROWS_AS(eit::extract_fwhm_dip(synth(DetuningGrid{-1.0, 1.0, 201}, rising)),
                  eit::NoDip);
  // A dip shallower than the 5% default threshold is flagged as unresolved.
  auto shallow = +[](double d) { return 1.0 - 0.01 / (d * d + 0.01) * 0.03; };
  CHECK_THROWS_AS(eit::extract_fwhm_dip(synth(DetuningGrid{-2.0, 2.0, 801}, shallow)),
                  eit::NotResolved);
}

TEST_CASE("visibility contrast handles plain windows and degenerate input") {
  auto f = +[](double d) { return 2.0 + std::cos(d); };
  const auto c = synth(DetuningGrid{-3.14159265, 3.14159265, 1257}, f);
  // max 3 at 0 edge? cos peaks at d=0 -> 3; min 1 at +-pi.
  CHECK(eit::extract_visibility_contrast(c, -3.2, 3.2) ==
        doctest::Approx(0.5).epsilon(1e-4));
  CHECK_THROWS_AS(eit::extract_visibility_contrast(c, 5.0, 6.0), eit::EmptyWindow);
  auto zero = +[](double) { return 0.0; };
  CHECK(eit::extract_visibility_contrast(synth(DetuningGrid{-1.0, 1.0, 101}, zero), -1, 1) ==
        0.0);
}

TEST_CASE("feature-window contrast rejects the far line wings") {
  // Shallow dip on a wide grid: the wings drop below the dip floor, so a
  // full-window contrast would report the wing minimum instead.
  RateParams p = make(0.05, 1.0, 0.01);
  const double want = 0.0025 / (0.0025 + 2.0 * 0.01);  // flanking-peak formula
  const auto c = closed_curve(p, 1.0, 6001);
  CHECK(eit::contrast_over_feature(c) == doctest::Approx(want).epsilon(2e-2));
  CHECK(eit::extract_visibility_contrast(c, -1.0, 1.0) > 2.0 * want);
  // Narrow grid without wings: both agree exactly.
  const auto tight = closed_curve(p, 0.1, 2001);
  CHECK(eit::contrast_over_feature(tight) ==
        doctest::Approx(eit::extract_visibility_contrast(tight, -0.1, 0.1))
            .epsilon(1e-12));
}

TEST_CASE("split absorption peaks sit at half the drive strength") {
  for (double v : {2.0, 8.0, 40.0}) {
    const RateParams p = make(v, 1.0, 0.0);
    const auto c = closed_curve(p, 0.8 * v + 4.0, 4001);
    const auto peaks = eit::find_absorption_peaks(c);
    REQUIRE(peaks.positions.size() == 2);
    REQUIRE(peaks.separation.has_value());
    CHECK(peaks.positions[0] == doctest::Approx(-0.5 * v).epsilon(2e-3));
    CHECK(peaks.positions[1] == doctest::Approx(0.5 * v).epsilon(2e-3));
    CHECK(*peaks.separation == doctest::Approx(v).epsilon(2e-3));
  }
}

TEST_CASE("single-line curve yields one peak and no separation") {
  auto f = +[](double d) { return 1.0 / (d * d + 1.0); };
  const auto peaks = eit::find_absorption_peaks(synth(DetuningGrid{-5.0, 5.0, 501}, f));
  CHECK(peaks.positions.size() == 1);
  CHECK_FALSE(peaks.separation.has_value());
}

TEST_CASE("dispersion slope at the dip follows the inverse-square drive law") {
  for (double v : {0.3, 0.6, 1.2}) {
    RateParams p = make(v, 1.0, 0.0);
    const double w = eit_width_closed(p).width;
    DetuningGrid g{-6.0 * v, 6.0 * v, 1 + 2 * static_cast<int>(6.0 * v / (w / 60.0))};
    const auto s = eit::closed_form_spectrum(g, p);
    CHECK(eit::dispersion_slope(s) == doctest::Approx(4.0 / (v * v)).epsilon(1e-2));
  }
  // Doubling the drive quarters the slope.
  RateParams p1 = make(0.4, 1.0, 0.0), p2 = make(0.8, 1.0, 0.0);
  DetuningGrid g{-3.0, 3.0, 120001};
  const double s1 = eit::dispersion_slope(eit::closed_form_spectrum(g, p1));
  const double s2 = eit::dispersion_slope(eit::closed_form_spectrum(g, p2));
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("dispersion slope refuses grids that undersample the dip") {
  const RateParams p = make(0.05, 1.0, 0.0);  // dip width ~ 2.5e-3
  DetuningGrid g{-1.0, 1.0, 41};              // spacing 0.05 >> dip
  const auto s = eit::closed_form_spectrum(g, p);
  CHECK_THROWS_AS(eit::dispersion_slope(s), eit::GridTooCoarse);
}

TEST_CASE("Lorentzian dip fit recovers its own model to high accuracy") {
  auto f = +[](double d) {
    const double u = d + 0.05;
    return 0.8 - 0.5 * 0.09 / (u * u + 0.09);  // fwhm 0.6, center -0.05
  };
  const auto c = synth(DetuningGrid{-3.0, 3.0, 1501}, f);
  const auto fit = eit::fit_lorentzian_dip(c);
  CHECK(fit.width == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(fit.center == doctest::Approx(-0.05).epsilon(1e-6));
  CHECK(fit.depth == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.background == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fit.residual_norm < 1e-10);
}

TEST_CASE("fit reports a poor residual when the dip is not Lorentzian") {
  auto f = +[](double d) { return 1.0 - 0.7 * std::exp(-d * d / 0.02); };
  const auto c = synth(DetuningGrid{-2.0, 2.0, 2001}, f);
  const auto fit = eit::fit_lorentzian_dip(c);
  CHECK(fit.residual_norm > 1e-3);  // model mismatch must be visible
}

TEST_CASE("extraction is invariant under curve scaling and detuning translation") {
  const RateParams p = make(0.4, 1.0, 0.01);
  const auto base = closed_curve(p, 4.0, 4001);
  const auto dip0 = eit::extract_fwhm_dip(base);

  AbsorptionCurve scaled = base;
  for (double& a : scaled.alpha) a *= 37.0;
  const auto dip1 = eit::extract_fwhm_dip(scaled);
  CHECK(dip1.width == doctest::Approx(dip0.width).epsilon(1e-12));
  CHECK(dip1.depth_fraction == doctest::Approx(dip0.depth_fraction).epsilon(1e-12));

  AbsorptionCurve shifted = base;
  shifted.grid.start += 2.5;
  shifted.grid.stop += 2.5;
  for (double& d : shifted.delta) d += 2.5;
  const auto dip2 = eit::extract_fwhm_dip(shifted);
  CHECK(dip2.width == doctest::Approx(dip0.width).epsilon(1e-12));
  CHECK(dip2.dip_position == doctest::Approx(dip0.dip_position + 2.5).epsilon(1e-9));
}

TEST_CASE("negative absorption samples are clipped and counted") {
  DetuningGrid g{-1.0, 1.0, 5};
  auto c = eit::make_absorption_curve(g, {1.0, -0.2, 0.5, -0.1, 1.0});
  CHECK(c.clipped == 2);
  CHECK(c.alpha[1] == 0.0);
  CHECK(c.alpha[3] == 0.0);
}

TEST_CASE("metrics csv row renders optional fields as empty cells") {
  eit::EitMetrics m;
  m.omega = 1.0;
  m.sigma_opt = 2.0;
  m.sigma_spin = 0.0;
  m.width = 0.5;
  // all other optionals empty
  const auto row = eit::metrics_csv_row(m);
  CHECK(row == "1,2,0,0.5,,,,,");
  m.regime = eit::Regime::EIT;
  m.visibility_contrast = 0.25;
  CHECK(eit::metrics_csv_row(m) == "1,2,0,0.5,0.25,,,,EIT");
  CHECK(eit::metrics_csv_header() ==
        "omega,sigma_opt,sigma_spin,width,vis_contrast,vis_residual,dip_pos,peak_sep,regime");
}
