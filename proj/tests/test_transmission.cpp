// Probe-transmission, visibility and saturated-fit tests.
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "eit/transmission.hpp"

using eit::DetuningGrid;
using eit::RateParams;
using eit::SusceptibilitySpectrum;
using eit::TransmissionTrace;

namespace {

RateParams make(double omega, double so, double ss) {
  RateParams p;
  p.omega = omega;
  p.sigma_opt = so;
  p.sigma_spin = ss;
  return p;
}

SusceptibilitySpectrum closed(const RateParams& p, double span, int n) {
  return eit::closed_form_spectrum(DetuningGrid{-span, span, n}, p);
}

}  // namespace

TEST_CASE("transmission is the exponential of depth-scaled absorption") {
  const RateParams p = make(0.5, 1.0, 0.001);
  const auto s = closed(p, 3.0, 301);
  const double d = 2.5;
  const auto t = transmission_from_spectrum(s, d);
  REQUIRE(t.transmission.size() == s.chi.size());
  const double baseline = 2.0 / (p.gamma31 + p.sigma_opt);
  for (size_t i = 0; i < s.chi.size(); ++i) {
    const double want = std::exp(-d * std::max(s.chi[i].imag(), 0.0) / baseline);
    CHECK(t.transmission[i] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(t.optical_depth == d);
}

TEST_CASE("an explicit baseline overrides the automatic normalizer") {
  const RateParams p = make(0.5, 1.0, 0.0);
  const auto s = closed(p, 2.0, 101);
  const auto a = transmission_from_spectrum(s, 1.0, 4.0);
  const auto b = transmission_from_spectrum(s, 2.0, 8.0);  // same ratio d/baseline
  for (size_t i = 0; i < a.transmission.size(); ++i)
    CHECK(a.transmission[i] == doctest::Approx(b.transmission[i]).epsilon(1e-12));
}

TEST_CASE("weak-absorption limit linearizes to 1 - d*alpha/baseline") {
  const RateParams p = make(0.4, 1.0, 0.0);
  const auto s = closed(p, 2.0, 101);
  const double d = 1e-6;
  const auto t = transmission_from_spectrum(s, d);
  const double baseline = 2.0 / (p.gamma31 + p.sigma_opt);
  for (size_t i = 0; i < t.transmission.size(); ++i) {
    const double lin = 1.0 - d * s.chi[i].imag() / baseline;
    CHECK(t.transmission[i] == doctest::Approx(lin).epsilon(1e-9));
  }
}

TEST_CASE("trace csv round-trips and validates on read") {
  const RateParams p = make(0.6, 1.0, 0.002);
  const auto t = transmission_from_spectrum(closed(p, 2.0, 201), 3.0);
  const auto path =
      (std::filesystem::temp_directory_path() / "eit_trace_roundtrip.csv").string();
  eit::write_trace_csv(path, t);
  const auto u = eit::read_trace_csv(path, 3.0);
  REQUIRE(u.transmission.size() == t.transmission.size());
  for (size_t i = 0; i < t.transmission.size(); ++i) {
    CHECK(u.delta[i] == doctest::Approx(t.delta[i]).epsilon(1e-9));
    CHECK(u.transmission[i] == doctest::Approx(t.transmission[i]).epsilon(1e-8));
  }
  CHECK(u.optical_depth == 3.0);
  std::remove(path.c_str());
}

TEST_CASE("visibility round-trips the closed-form residual value") {
  // Deep EIT with spin broadening: residual absorption at the dip is the
  // closed-form visibility complement.
  RateParams p = make(0.5, 1.0, 0.05);
  const auto with = transmission_from_spectrum(closed(p, 2.0, 2001), 2.0);
  RateParams bare = p;
  bare.omega = 0.0;
  const auto without = transmission_from_spectrum(closed(bare, 2.0, 2001), 2.0);

  const auto v = eit::visibility_residual(with, without);
  CHECK_FALSE(v.clipped);
  const double want = eit_visibility_closed(p);
  CHECK(v.value == doctest::Approx(want).epsilon(1e-3));
  CHECK(v.t_peak_with > v.t_center_without);
}

TEST_CASE("visibility vanishes without coupling and rejects a lossless reference") {
  // Comparing the uncoupled trace against itself: no interior transmission
  // peak exists, the dip probe falls back to line center, V = 0.
  RateParams bare = make(0.0, 1.0, 0.02);
  bare.gamma21 = 1e-3;
  const auto t = transmission_from_spectrum(closed(bare, 2.0, 501), 1.5);
  const auto same = eit::visibility_residual(t, t);
  CHECK(same.value == doctest::Approx(0.0).epsilon(1e-9));

  TransmissionTrace lossless = t;
  for (double& x : lossless.transmission) x = 1.0;
  CHECK_THROWS_AS(eit::visibility_residual(t, lossless), eit::DegenerateBaseline);
}

TEST_CASE("grid mismatch between the two traces is rejected") {
  const RateParams p = make(0.4, 1.0, 0.02);
  const auto a = transmission_from_spectrum(closed(p, 2.0, 501), 1.0);
  const auto b = transmission_from_spectrum(closed(p, 2.0, 401), 1.0);
  CHECK_THROWS_AS(eit::visibility_residual(a, b), eit::GridMismatch);
}

TEST_CASE("saturated fit recovers depth and width from a flat-bottomed line") {
  for (double d : {0.1, 1.0, 6.0}) {
    DetuningGrid g{-12.0, 12.0, 4001};
    TransmissionTrace t;
    t.grid = g;
    t.delta = g.points();
    t.optical_depth = d;
    for (double x : t.delta) {
      const double lor = 1.0 / (1.0 + x * x / 2.25);  // unit peak, fwhm 3
      t.transmission.push_back(std::exp(-d * lor));
    }
    const auto fit = eit::fit_saturated_absorption(t);
    CHECK(fit.optical_depth == doctest::Approx(d).epsilon(2e-2));
    CHECK(fit.width == doctest::Approx(3.0).epsilon(2e-2));
    CHECK(std::abs(fit.center) < 1e-6);
    CHECK(fit.residual_norm < 1e-8);
  }
}

TEST_CASE("saturated fit rejects transparent and under-sampled traces") {
  DetuningGrid g{-5.0, 5.0, 101};
  TransmissionTrace t;
  t.grid = g;
  t.delta = g.points();
  t.optical_depth = 1.0;
  t.transmission.assign(t.delta.size(), 1.0);
  CHECK_THROWS_AS(eit::fit_saturated_absorption(t), eit::FeatureAbsent);

  // A feature spanning fewer than 10 samples is unusable for the fit.
  t.transmission[50] = 0.2;
  t.transmission[49] = t.transmission[51] = 0.5;
  CHECK_THROWS_AS(eit::fit_saturated_absorption(t), eit::FeatureAbsent);
}

TEST_CASE("scan-rate bound scales with width and inverse coherence time") {
  CHECK(eit::max_scan_rate(2.0, 0.5) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(eit::max_scan_rate(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(eit::max_scan_rate(1.0, 0.0), eit::InvalidParams);
}
