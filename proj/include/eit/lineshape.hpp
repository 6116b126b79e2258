// lineshape.hpp - model-free metric extraction from absorption curves:
// transparency-dip FWHM, visibilities, split-peak positions, dispersion
// slope, and a Lorentzian dip fit.
#ifndef EIT_LINESHAPE_HPP
#define EIT_LINESHAPE_HPP

#include <optional>
#include <string>
#include <vector>

#include "eit/integrator.hpp"
#include "eit/params.hpp"

namespace eit {

struct AbsorptionCurve {
  DetuningGrid grid;
  std::vector<double> delta;
  std::vector<double> alpha;  // nonnegative absorption values
  int clipped = 0;            // samples whose negative imag was clipped to 0
};

AbsorptionCurve absorption_curve(const SusceptibilitySpectrum& s);
AbsorptionCurve make_absorption_curve(const DetuningGrid& grid, std::vector<double> alpha);

struct DipExtraction {
  double width = 0.0;
  double dip_position = 0.0;
  double alpha_min = 0.0;
  double alpha_ref = 0.0;       // mean of the two flanking levels
  double depth_fraction = 0.0;  // (alpha_ref - alpha_min) / alpha_ref
};

// Model-free FWHM of the transparency dip: deepest bracketed interior
// minimum, flanking reference from the adjacent local maxima, half level
// midway between reference and minimum, linear-interpolated crossings.
// Throws NoDip (no bracketed minimum) or NotResolved (depth below
// depth_threshold of the flanking level, or half level out of reach).
DipExtraction extract_fwhm_dip(const AbsorptionCurve& c, double depth_threshold = 0.05);

// (max - min)/(max + min) over the detuning window [lo, hi].
double extract_visibility_contrast(const AbsorptionCurve& c, double window_lo,
                                   double window_hi);

struct PeakSet {
  std::vector<double> positions;        // ascending, at most 2
  std::optional<double> separation;     // present when two peaks found
};

// Two largest interior local maxima, parabolic sub-grid refinement.
PeakSet find_absorption_peaks(const AbsorptionCurve& c);

// Contrast visibility confined to the feature: the window runs between the
// two flanking absorption maxima (plus one grid step of margin) when a
// doublet brackets the dip, else spans the whole grid.  On wide grids the
// far line wings fall below the dip floor and would otherwise pose as the
// minimum.
double contrast_over_feature(const AbsorptionCurve& c);

// Central-difference slope of the dispersion (real part) at the dip.
// Throws GridTooCoarse when fewer than 5 grid points span the dip width.
double dispersion_slope(const SusceptibilitySpectrum& s);

struct LorentzianDipFit {
  double width = 0.0;
  double depth = 0.0;
  double center = 0.0;
  double background = 0.0;
  double residual_norm = 0.0;
};

// Least-squares fit of background - depth*(w^2/4)/((delta-c)^2 + w^2/4)
// over a window around the dip, seeded from the model-free extraction.
LorentzianDipFit fit_lorentzian_dip(const AbsorptionCurve& c, double depth_threshold = 0.05);

struct EitMetrics {
  double omega = 0.0;
  double sigma_opt = 0.0;
  double sigma_spin = 0.0;
  std::optional<double> width;
  std::optional<double> visibility_contrast;
  std::optional<double> visibility_residual;
  std::optional<double> dip_position;
  std::optional<double> peak_separation;
  std::optional<Regime> regime;  // empty when the drive parameters are unknown
};

std::string metrics_csv_header();
std::string metrics_csv_row(const EitMetrics& m);

}  // namespace eit

#endif  // EIT_LINESHAPE_HPP
