// transmission.hpp - Beer-Lambert probe transmission at a given optical
// depth, residual-definition visibility, and the saturated-absorption fit
// used for strongly absorbing samples.
#ifndef EIT_TRANSMISSION_HPP
#define EIT_TRANSMISSION_HPP

#include <string>
#include <vector>

#include "eit/integrator.hpp"

namespace eit {

struct TransmissionTrace {
  DetuningGrid grid;
  std::vector<double> delta;
  std::vector<double> transmission;  // in (0, 1]
  double optical_depth = 0.0;
};

// T(delta) = exp(-d * alpha(delta)/baseline).  baseline <= 0 selects the
// automatic normalizer 2/(gamma31 + sigma_opt), the uncoupled line-center
// absorption; pass an explicit baseline for composite/tabulated profiles.
TransmissionTrace transmission_from_spectrum(const SusceptibilitySpectrum& s,
                                             double optical_depth,
                                             double baseline = 0.0);

void write_trace_csv(const std::string& path, const TransmissionTrace& t);
TransmissionTrace read_trace_csv(const std::string& path, double optical_depth);

struct VisibilityResult {
  double value = 0.0;
  bool clipped = false;         // true when the raw ratio fell outside [0,1]
  double t_peak_with = 0.0;     // transmission at the dip of the coupled trace
  double t_center_without = 0.0;
};

// V = 1 - ln(T at EIT peak, coupled) / ln(T at line center, uncoupled).
VisibilityResult visibility_residual(const TransmissionTrace& with_coupling,
                                     const TransmissionTrace& without_coupling);

struct SaturatedFit {
  double optical_depth = 0.0;
  double width = 0.0;
  double center = 0.0;
  double residual_norm = 0.0;
};

// Fit T(delta) = exp(-d * L(delta)) with L a unit-peak Lorentzian; recovers
// the depth even when the feature is flat-bottomed.
SaturatedFit fit_saturated_absorption(const TransmissionTrace& t);

// Fastest allowed probe scan: spin inhomogeneous width over the optical
// coherence time.
double max_scan_rate(double sigma_spin, double optical_coherence_time);

}  // namespace eit

#endif  // EIT_TRANSMISSION_HPP
