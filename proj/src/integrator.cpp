// integrator.cpp - nested adaptive quadrature of the ensemble susceptibility
#include "eit/integrator.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "eit/csv.hpp"
#include "eit/errors.hpp"
#include "eit/quadrature.hpp"

namespace eit {

void DetuningGrid::validate() const {
  if (!(start < stop)) throw InvalidParams("DetuningGrid: require start < stop");
  if (count < 3) throw InvalidParams("DetuningGrid: require count >= 3");
}

double DetuningGrid::spacing() const { return (stop - start) / (count - 1); }

std::vector<double> DetuningGrid::points() const {
  validate();
  std::vector<double> p(count);
  const double h = spacing();
  for (int i = 0; i < count; ++i) p[i] = start + i * h;
  p.back() = stop;
  return p;
}

std::string to_string(TailMapping m) {
  return m == TailMapping::TangentMap ? "tangent" : "truncate";
}

TailMapping tail_mapping_from_string(const std::string& s) {
  if (s == "tangent" || s == "tangent_map") return TailMapping::TangentMap;
  if (s == "truncate" || s == "truncate_at_n") return TailMapping::TruncateAtN;
  throw ValidationError("unknown tail_mapping '" + s + "' (expected tangent|truncate)");
}

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2))
    throw InvalidParams("QuadratureConfig: rel_tol must lie in (0, 1e-2]");
  if (max_depth < 5) throw InvalidParams("QuadratureConfig: max_depth must be >= 5");
  if (max_intervals < 4) throw InvalidParams("QuadratureConfig: max_intervals must be >= 4");
  if (!(truncate_span > 0.0))
    throw InvalidParams("QuadratureConfig: truncate_span must be > 0");
}

namespace {

// Unguarded kernel: chi(delta2, Delta) with the one-photon factor B
// precomputed.  B = gamma31 - 2i*Delta stays fixed along the inner axis.
inline Complex kernel(double delta2, double g21, double omega2, const Complex& B) {
  const Complex num(4.0 * delta2, 2.0 * g21);
  const Complex den = omega2 + Complex(g21, -2.0 * delta2) * B;
  return num / den;
}

// Integrate density(x)*f(x) over the support of the profile.  Infinite
// supports are handled either by the tangent substitution
// x = c + (fwhm/2) tan t (exactly flattens a Lorentzian of that width) or by
// truncation to a window truncate_span*fwhm wide.
template <class F>
quad::Result profile_average(const BroadeningProfile& prof, F&& f,
                             const std::vector<double>& x_breaks,
                             const quad::Options& opt, TailMapping mapping,
                             double truncate_span) {
  if (prof.has_finite_support()) {
    auto g = [&](double x) { return prof.density(x) * f(x); };
    return quad::integrate(g, prof.support_lo(), prof.support_hi(), x_breaks, opt);
  }
  const double c = prof.center();
  const double hw = 0.5 * prof.fwhm();
  if (mapping == TailMapping::TruncateAtN) {
    const double half = 0.5 * truncate_span * prof.fwhm();
    auto g = [&](double x) { return prof.density(x) * f(x); };
    return quad::integrate(g, c - half, c + half, x_breaks, opt);
  }
  auto g = [&, c, hw](double t) {
    const double ct = std::cos(t);
    const double x = c + hw * std::tan(t);
    return (hw / (ct * ct)) * prof.density(x) * f(x);
  };
  std::vector<double> t_breaks;
  t_breaks.reserve(x_breaks.size());
  for (double x : x_breaks) t_breaks.push_back(std::atan((x - c) / hw));
  constexpr double half_pi = 1.57079632679489661923;
  return quad::integrate(g, -half_pi, half_pi, t_breaks, opt);
}

enum class SpinMode { PointMass, Collapsed, Numeric };

// With the spin axis collapsed the kernel is a single simple pole in the
// optical shift: C/(x - z).  Against a piecewise-linear tabulated density the
// ensemble average then has a closed form per segment (log + linear terms),
// which is both exact for the stored table and far cheaper than adaptive
// refinement across every interpolation kink.
Complex chi_tabulated_pole(double delta, double g21_eff, double spin_center,
                           double omega2, double gamma31,
                           const BroadeningProfile& optical) {
  const double delta2 = delta - spin_center;
  const Complex N(4.0 * delta2, 2.0 * g21_eff);
  const Complex G(g21_eff, -2.0 * delta2);             // g21 - 2i*delta2
  const Complex E = omega2 + G * Complex(gamma31, -2.0 * delta);
  const Complex F = Complex(0.0, 2.0) * G;             // d(den)/d(delta_o)

  const auto& xs = optical.table_shifts();
  const auto& ys = optical.table_densities();
  if (std::abs(F) <= 1e-300 * std::abs(E)) return N / E;  // constant kernel

  const Complex C = N / F;
  const Complex z = -E / F;
  Complex sum(0.0, 0.0);
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    const double h = xs[k + 1] - xs[k];
    const double a = ys[k];
    const double b = (ys[k + 1] - ys[k]) / h;
    const Complex u0 = xs[k] - z;
    const Complex u1 = xs[k + 1] - z;
    // integral of (a + b*(x - x0))/(x - z) over the segment
    sum += (a - b * u0) * std::log(u1 / u0) + b * h;
  }
  return C * sum;
}

std::string describe(const BroadeningProfile& prof) {
  std::ostringstream os;
  switch (prof.kind()) {
    case ProfileKind::Lorentzian: os << "lorentzian"; break;
    case ProfileKind::Gaussian: os << "gaussian"; break;
    case ProfileKind::FlatTop: os << "flat_top"; break;
    case ProfileKind::Tabulated: os << "tabulated"; break;
  }
  os << " fwhm=" << prof.fwhm() << " center=" << prof.center();
  return os.str();
}

void check_preconditions(const RateParams& p, const BroadeningProfile& spin) {
  p.validate();
  if (!(p.gamma31 > 0.0))
    throw InvalidParams("integrate_susceptibility: gamma31 must be > 0");
  // With omega = 0 and no spin-axis damping the kernel is singular at zero
  // two-photon detuning; any one of the three regularizes it.
  if (!(p.gamma21 > 0.0 || spin.fwhm() > 0.0 || p.omega > 0.0))
    throw InvalidParams(
        "integrate_susceptibility: need gamma21 > 0, omega > 0, or a spin profile of nonzero width");
}

}  // namespace

Complex chi_inhomogeneous_point(double delta, const RateParams& p,
                                const BroadeningProfile& optical,
                                const BroadeningProfile& spin,
                                const QuadratureConfig& q, PointReport* report) {
  q.validate();
  check_preconditions(p, spin);

  SpinMode mode = SpinMode::Numeric;
  double g21_eff = p.gamma21;
  double spin_center = 0.0;
  if (spin.is_point_mass()) {
    mode = SpinMode::PointMass;
    spin_center = spin.center();
  } else if (q.collapse_lorentzian_spin && spin.kind() == ProfileKind::Lorentzian) {
    // Residue shortcut: convolving chi with a Lorentzian of FWHM s over the
    // two-photon axis equals chi with gamma21 -> gamma21 + s.
    mode = SpinMode::Collapsed;
    g21_eff = p.gamma21 + spin.fwhm();
    spin_center = spin.center();
  }

  const double omega2 = p.omega * p.omega;
  long kernel_evals = 0;
  int inner_failures = 0;

  quad::Options inner_opt;
  inner_opt.rel_tol = std::max(0.1 * q.rel_tol, 1e-13);
  inner_opt.max_depth = q.max_depth;
  inner_opt.max_intervals = q.max_intervals;
  quad::Options outer_opt;
  outer_opt.rel_tol = q.rel_tol;
  outer_opt.max_depth = q.max_depth;
  outer_opt.max_intervals = q.max_intervals;

  // Value of the spin-averaged kernel at a given optical shift.
  auto spin_averaged = [&](double delta_o) -> Complex {
    const double cap = delta - delta_o;  // one-photon detuning for this class
    const Complex B(p.gamma31, -2.0 * cap);
    if (mode != SpinMode::Numeric) {
      ++kernel_evals;
      return kernel(delta - spin_center, g21_eff, omega2, B);
    }
    const double b2 = std::norm(B);
    const double ds_res = delta - omega2 * cap / b2;  // kernel pole location
    const double wi = p.gamma21 + omega2 * p.gamma31 / b2;
    const std::vector<double> breaks = {ds_res,       ds_res - wi, ds_res + wi,
                                        ds_res - 10 * wi, ds_res + 10 * wi, delta};
    auto f = [&](double delta_s) {
      ++kernel_evals;
      return kernel(delta - delta_s, p.gamma21, omega2, B);
    };
    quad::Result r =
        profile_average(spin, f, breaks, inner_opt, q.tail_mapping, q.truncate_span);
    if (!r.converged) ++inner_failures;
    return r.value;
  };

  Complex value;
  double abs_error = 0.0;
  bool outer_converged = true;

  if (optical.is_point_mass()) {
    value = spin_averaged(optical.center());
  } else if (optical.kind() == ProfileKind::Tabulated && mode != SpinMode::Numeric) {
    value = chi_tabulated_pole(delta, g21_eff, spin_center, omega2, p.gamma31, optical);
    kernel_evals += static_cast<long>(optical.table_shifts().size());
  } else {
    // Seed segment edges at the kernel structures along the optical axis: the
    // one-photon resonance at delta_o = delta (width ~ gamma31) and the
    // displaced pole that carries the transparency notch.  The log-spaced
    // cascade resolves the pole's slowly decaying 1/r tails, which otherwise
    // stall refinement when the pole sits far out in the mapped profile tail.
    const double d2 = delta - spin_center;
    const double denom = g21_eff * g21_eff + 4.0 * d2 * d2;
    std::vector<double> breaks = {delta, delta - p.gamma31, delta + p.gamma31,
                                  delta - 10.0 * p.gamma31, delta + 10.0 * p.gamma31};
    if (denom > 0.0) {
      const double shift = omega2 * d2 / denom;
      const double wo = p.gamma31 + omega2 * g21_eff / denom;
      breaks.push_back(delta - shift);
      for (double m : {1.0, 10.0, 100.0}) {
        breaks.push_back(delta - shift - m * wo);
        breaks.push_back(delta - shift + m * wo);
      }
    }
    quad::Result r = profile_average(optical, spin_averaged, breaks, outer_opt,
                                     q.tail_mapping, q.truncate_span);
    value = r.value;
    abs_error = r.error;
    outer_converged = r.converged;
  }

  if (report) {
    report->converged = outer_converged && inner_failures == 0;
    report->abs_error = abs_error;
    report->evaluations = kernel_evals;
  }
  return value;
}

SusceptibilitySpectrum integrate_susceptibility(const DetuningGrid& grid,
                                                const RateParams& p,
                                                const BroadeningProfile& optical,
                                                const BroadeningProfile& spin,
                                                const QuadratureConfig& q, int jobs) {
  grid.validate();
  q.validate();
  check_preconditions(p, spin);

  SusceptibilitySpectrum s;
  s.grid = grid;
  s.delta = grid.points();
  s.chi.resize(s.delta.size());
  s.reports.resize(s.delta.size());
  s.params = p;
  s.params.sigma_opt = optical.fwhm();
  s.params.sigma_spin = spin.fwhm();
  s.optical_profile = describe(optical);
  s.spin_profile = describe(spin);

  const int n = static_cast<int>(s.delta.size());
  auto work_point = [&](int i) {
    s.chi[i] = chi_inhomogeneous_point(s.delta[i], p, optical, spin, q, &s.reports[i]);
  };

  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) work_point(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          work_point(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(jobs, n);
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (const auto& r : s.reports) {
    s.total_evaluations += r.evaluations;
    if (!r.converged) ++s.points_not_converged;
  }
  if (s.points_not_converged * 100 > n) {
    std::ostringstream os;
    os << "integrate_susceptibility: " << s.points_not_converged << " of " << n
       << " grid points failed to reach rel_tol " << q.rel_tol;
    throw QuadratureNotConverged(os.str());
  }
  return s;
}

SusceptibilitySpectrum closed_form_spectrum(const DetuningGrid& grid, const RateParams& p) {
  grid.validate();
  p.validate();
  const double g21_eff = p.gamma21 + p.sigma_spin;
  if (!(p.gamma31 + p.sigma_opt > 0.0))
    throw InvalidParams("closed_form_spectrum: gamma31 + sigma_opt must be > 0");
  if (!(g21_eff > 0.0 || p.omega > 0.0))
    throw InvalidParams("closed_form_spectrum: need gamma21 + sigma_spin > 0 or omega > 0");

  SusceptibilitySpectrum s;
  s.grid = grid;
  s.delta = grid.points();
  s.chi.resize(s.delta.size());
  s.reports.resize(s.delta.size());
  s.params = p;
  s.optical_profile = "lorentzian fwhm=" + csv::format(p.sigma_opt) + " center=0 (closed form)";
  s.spin_profile = "lorentzian fwhm=" + csv::format(p.sigma_spin) + " center=0 (closed form)";
  for (size_t i = 0; i < s.delta.size(); ++i) {
    s.chi[i] = chi_lorentzian_inhomogeneous(s.delta[i], p);
    s.reports[i].evaluations = 1;
  }
  s.total_evaluations = static_cast<long>(s.delta.size());
  return s;
}

void write_spectrum_csv(const std::string& path, const SusceptibilitySpectrum& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(s.delta.size());
  for (size_t i = 0; i < s.delta.size(); ++i)
    rows.push_back({s.delta[i], s.chi[i].real(), s.chi[i].imag()});
  csv::write_file(path, {"delta", "chi_re", "chi_im"}, rows);
}

SpectrumTable read_spectrum_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path, {"delta", "chi_re", "chi_im"});
  SpectrumTable out;
  out.delta.reserve(t.rows.size());
  out.chi.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    out.delta.push_back(row[0]);
    out.chi.emplace_back(row[1], row[2]);
  }
  return out;
}

}  // namespace eit
