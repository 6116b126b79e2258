// integrator.hpp - numeric ensemble average of the three-level susceptibility
// over optical and spin broadening profiles, sampled on a detuning grid.
#ifndef EIT_INTEGRATOR_HPP
#define EIT_INTEGRATOR_HPP

#include <string>
#include <vector>

#include "eit/params.hpp"
#include "eit/profile.hpp"
#include "eit/susceptibility.hpp"

namespace eit {

struct DetuningGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  void validate() const;           // start < stop, count >= 3
  double spacing() const;
  std::vector<double> points() const;
};

enum class TailMapping { TangentMap, TruncateAtN };

std::string to_string(TailMapping m);
TailMapping tail_mapping_from_string(const std::string& s);

struct QuadratureConfig {
  double rel_tol = 1e-6;             // per-point relative error target
  int max_depth = 30;                // bisection depth cap
  long max_intervals = 20000;        // segment budget per 1-D integral
  TailMapping tail_mapping = TailMapping::TangentMap;
  double truncate_span = 1e4;        // window width in FWHM units (TruncateAtN)
  bool collapse_lorentzian_spin = true;  // residue shortcut for Lorentzian spin

  void validate() const;  // rel_tol in (0, 1e-2], max_depth >= 5
};

struct PointReport {
  bool converged = true;
  double abs_error = 0.0;
  long evaluations = 0;
};

struct SusceptibilitySpectrum {
  DetuningGrid grid;
  std::vector<double> delta;
  std::vector<Complex> chi;
  std::vector<PointReport> reports;
  RateParams params;                  // sigma fields mirror the profile FWHMs
  std::string optical_profile;        // descriptor, e.g. "lorentzian fwhm=100"
  std::string spin_profile;
  long total_evaluations = 0;
  int points_not_converged = 0;
};

// Single-point ensemble average; used by the spectrum driver and tests.
Complex chi_inhomogeneous_point(double delta, const RateParams& p,
                                const BroadeningProfile& optical,
                                const BroadeningProfile& spin,
                                const QuadratureConfig& q, PointReport* report = nullptr);

// Nested adaptive quadrature of P_o(x) P_s(y) chi(delta-y, delta-x) at every
// grid point.  Throws QuadratureNotConverged if more than 1% of points fail
// to reach rel_tol; individual failures are otherwise only flagged.
SusceptibilitySpectrum integrate_susceptibility(const DetuningGrid& grid,
                                                const RateParams& p,
                                                const BroadeningProfile& optical,
                                                const BroadeningProfile& spin,
                                                const QuadratureConfig& q = {},
                                                int jobs = 1);

// Evaluates the Lorentzian-profile closed form on the grid; exact whenever
// both broadening profiles are Lorentzian (a zero FWHM acts as a point mass).
SusceptibilitySpectrum closed_form_spectrum(const DetuningGrid& grid, const RateParams& p);

void write_spectrum_csv(const std::string& path, const SusceptibilitySpectrum& s);

struct SpectrumTable {
  std::vector<double> delta;
  std::vector<Complex> chi;
};
SpectrumTable read_spectrum_csv(const std::string& path);

}  // namespace eit

#endif  // EIT_INTEGRATOR_HPP
