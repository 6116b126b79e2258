// Adaptive Gauss-Kronrod integrator tests against known integrals.
#include "doctest.h"

#include <cmath>
#include <complex>

#include "eit/quadrature.hpp"

using eit::quad::integrate;
using eit::quad::Options;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("polynomials up to the Kronrod order are exact in one panel") {
  Options opt;
  auto cubic = [](double x) { return std::complex<double>(x * x * x - 2.0 * x + 1.0, 0.0); };
  const auto r = integrate(cubic, -1.0, 3.0, opt);
  CHECK(r.converged);
  CHECK(r.evaluations == 15);
  // antiderivative x^4/4 - x^2 + x evaluated on [-1, 3]
  CHECK(r.value.real() == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(r.value.imag() == 0.0);
}

TEST_CASE("smooth oscillatory integral converges to the analytic value") {
  Options opt;
  opt.rel_tol = 1e-10;
  auto f = [](double x) { return std::complex<double>(std::sin(x), std::cos(2.0 * x)); };
  const auto r = integrate(f, 0.0, 10.0, opt);
  CHECK(r.converged);
  CHECK(r.value.real() == doctest::Approx(1.0 - std::cos(10.0)).epsilon(1e-10));
  CHECK(r.value.imag() == doctest::Approx(0.5 * std::sin(20.0)).epsilon(1e-10));
}

TEST_CASE("narrow resonance is resolved once its location is seeded") {
  // Lorentzian of half-width 1e-6 inside [-1, 1]: arctan mass ~ pi.
  const double hw = 1e-6;
  auto f = [&](double x) { return std::complex<double>(hw / (x * x + hw * hw), 0.0); };
  Options opt;
  opt.rel_tol = 1e-8;

  const auto seeded = integrate(f, -1.0, 1.0, {-hw, 0.0, hw}, opt);
  CHECK(seeded.converged);
  CHECK(seeded.value.real() ==
        doctest::Approx(2.0 * std::atan(1.0 / hw)).epsilon(1e-8));

  // Without the seed the bisection cascade still gets there, at higher cost.
  const auto blind = integrate(f, -1.0, 1.0, opt);
  CHECK(blind.converged);
  CHECK(blind.value.real() == doctest::Approx(seeded.value.real()).epsilon(1e-7));
  CHECK(blind.evaluations > seeded.evaluations);
}

TEST_CASE("breakpoints outside the domain are ignored") {
  auto f = [](double x) { return std::complex<double>(std::exp(-x * x), 0.0); };
  Options opt;
  opt.rel_tol = 1e-10;
  const auto a = integrate(f, -3.0, 3.0, {-100.0, 100.0, -3.0, 3.0}, opt);
  const auto b = integrate(f, -3.0, 3.0, opt);
  CHECK(a.converged);
  CHECK(a.value.real() == doctest::Approx(b.value.real()).epsilon(1e-12));
}

TEST_CASE("empty and reversed ranges integrate to zero") {
  auto f = [](double x) { return std::complex<double>(x, -x); };
  Options opt;
  const auto r0 = integrate(f, 2.0, 2.0, opt);
  CHECK(r0.converged);
  CHECK(r0.value == std::complex<double>(0.0, 0.0));
  const auto r1 = integrate(f, 3.0, 1.0, opt);
  CHECK(r1.converged);
  CHECK(r1.value == std::complex<double>(0.0, 0.0));
}

TEST_CASE("interval budget failure is reported, not hidden") {
  // The midpoint node lands on the spike, so the error estimate sees it, but
  // the depth and interval caps forbid resolving it.
  const double hw = 1e-6;
  auto f = [&](double x) { return std::complex<double>(hw / (x * x + hw * hw), 0.0); };
  Options opt;
  opt.rel_tol = 1e-10;
  opt.max_intervals = 8;
  opt.max_depth = 2;
  const auto r = integrate(f, -1.0, 1.0, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.error > 0.0);
}

TEST_CASE("error estimate brackets the true error on a hard integrand") {
  // sqrt singularity at the origin (integrable): int_0^1 x^{-1/2} = 2.
  auto f = [](double x) { return std::complex<double>(1.0 / std::sqrt(x + 1e-300), 0.0); };
  Options opt;
  opt.rel_tol = 1e-9;
  const auto r = integrate(f, 0.0, 1.0, opt);
  CHECK(std::abs(r.value.real() - 2.0) < std::max(r.error * 10.0, 1e-8));
}

TEST_CASE("complex-valued kernel integrates both parts consistently") {
  // int_0^inf e^{-x}(cos wx + i sin wx) dx = (1 + iw)/(1 + w^2); truncate at 60.
  const double w = 3.0;
  auto f = [&](double x) { return std::exp(std::complex<double>(-x, w * x)); };
  Options opt;
  opt.rel_tol = 1e-11;
  const auto r = integrate(f, 0.0, 60.0, opt);
  CHECK(r.converged);
  CHECK(r.value.real() == doctest::Approx(1.0 / (1.0 + w * w)).epsilon(1e-9));
  CHECK(r.value.imag() == doctest::Approx(w / (1.0 + w * w)).epsilon(1e-9));
}
