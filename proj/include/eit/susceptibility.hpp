// susceptibility.hpp - closed-form probe susceptibility of the Lambda system
//
// Conventions: the proportionality constant is fixed to 1, so the peak
// absorption of the bare (Omega=0) line is Im chi = 2/gamma31 for the
// homogeneous system and 2/(gamma31+sigma_opt) for the Lorentzian-broadened
// one.  delta is the two-photon detuning, Delta the probe detuning.
#ifndef EIT_SUSCEPTIBILITY_HPP
#define EIT_SUSCEPTIBILITY_HPP

#include <complex>

#include "eit/params.hpp"

namespace eit {

using Complex = std::complex<double>;

// chi(delta, Delta) = (2i*g21 + 4*delta) / (Omega^2 + (g21-2i*delta)(g31-2i*Delta))
Complex chi_homogeneous(double delta, double cap_delta, const RateParams& p);

// Resonant-control susceptibility of the ensemble with Lorentzian optical and
// spin broadening.  Equals chi_homogeneous with gamma21 -> gamma21+sigma_spin
// and gamma31 -> gamma31+sigma_opt, evaluated at Delta = delta.
Complex chi_lorentzian_inhomogeneous(double delta, const RateParams& p);

struct ClosedFormWidth {
  double width = 0.0;
  // False when sigma_spin exceeds half the leading-order width, where the
  // first-order expansion in sigma_spin stops being trustworthy.
  bool expansion_reliable = true;
};

// FWHM of the transparency dip, exact leading term plus first order in
// sigma_spin.  Requires sigma_opt > 0 and omega > 0.
ClosedFormWidth eit_width_closed(const RateParams& p);

// Limiting expressions: Omega^2/sigma_opt + sigma_spin (EIT regime) and
// Omega - (sigma_opt+sigma_spin)/2 (Autler-Townes regime).
double eit_width_asymptotic(const RateParams& p, Regime regime);

// Residual-definition visibility Omega^2 / (Omega^2 + sigma_opt*sigma_spin).
double eit_visibility_closed(const RateParams& p);

// Peak-to-dip contrast (max-min)/(max+min) of the absorption curve:
// Omega^2 / (Omega^2 + 2*sigma_opt*sigma_spin).
double eit_contrast_closed(const RateParams& p);

// Omega < r_lo*sigma_opt -> EIT; Omega > r_hi*sigma_opt -> AutlerTownes.
Regime classify_regime(const RateParams& p, double r_lo = 0.5, double r_hi = 2.0);

struct ClosedFormMetrics {
  double width = 0.0;
  double visibility = 0.0;
  Regime regime = Regime::EIT;
  bool expansion_reliable = true;
};

ClosedFormMetrics closed_form_metrics(const RateParams& p);

}  // namespace eit

#endif  // EIT_SUSCEPTIBILITY_HPP
