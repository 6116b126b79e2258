// susceptibility.cpp - closed-form lineshape expressions
#include "eit/susceptibility.hpp"

#include <cmath>

namespace eit {

Complex chi_homogeneous(double delta, double cap_delta, const RateParams& p) {
  p.validate();
  const Complex i(0.0, 1.0);
  const Complex num = 2.0 * i * p.gamma21 + 4.0 * delta;
  const Complex den = p.omega * p.omega +
                      (p.gamma21 - 2.0 * i * delta) * (p.gamma31 - 2.0 * i * cap_delta);
  if (std::abs(den) == 0.0)
    throw InvalidParams("chi_homogeneous: vanishing denominator (degenerate zero rates)");
  return num / den;
}

Complex chi_lorentzian_inhomogeneous(double delta, const RateParams& p) {
  p.validate();
  RateParams broadened = p;
  broadened.gamma21 = p.gamma21 + p.sigma_spin;
  broadened.gamma31 = p.gamma31 + p.sigma_opt;
  broadened.sigma_opt = 0.0;
  broadened.sigma_spin = 0.0;
  return chi_homogeneous(delta, delta, broadened);
}

ClosedFormWidth eit_width_closed(const RateParams& p) {
  p.validate();
  if (!(p.sigma_opt > 0.0)) throw InvalidParams("eit_width_closed: sigma_opt must be > 0");
  if (!(p.omega > 0.0)) throw InvalidParams("eit_width_closed: omega must be > 0");

  const double root = std::sqrt(p.sigma_opt * p.sigma_opt + 4.0 * p.omega * p.omega);
  const double leading = 0.5 * (root - p.sigma_opt);
  const double correction =
      p.sigma_spin * (p.sigma_opt * p.sigma_opt - p.omega * p.omega) /
      (p.omega * p.omega * root);

  ClosedFormWidth out;
  out.width = leading * (1.0 + correction);
  out.expansion_reliable = p.sigma_spin <= 0.5 * leading;
  return out;
}

double eit_width_asymptotic(const RateParams& p, Regime regime) {
  p.validate();
  switch (regime) {
    case Regime::EIT:
      if (!(p.sigma_opt > 0.0))
        throw InvalidParams("eit_width_asymptotic: sigma_opt must be > 0 in the EIT regime");
      return p.omega * p.omega / p.sigma_opt + p.sigma_spin;
    case Regime::AutlerTownes:
      return p.omega - 0.5 * (p.sigma_opt + p.sigma_spin);
    case Regime::Crossover:
      break;
  }
  throw InvalidParams("eit_width_asymptotic: regime must be EIT or AutlerTownes");
}

double eit_visibility_closed(const RateParams& p) {
  p.validate();
  const double w2 = p.omega * p.omega;
  const double ss = p.sigma_opt * p.sigma_spin;
  if (w2 == 0.0 && ss == 0.0)
    throw Indeterminate("eit_visibility_closed: 0/0 at omega = 0 with sigma_opt*sigma_spin = 0");
  return w2 / (w2 + ss);
}

double eit_contrast_closed(const RateParams& p) {
  p.validate();
  const double w2 = p.omega * p.omega;
  const double ss = p.sigma_opt * p.sigma_spin;
  if (w2 == 0.0 && ss == 0.0)
    throw Indeterminate("eit_contrast_closed: 0/0 at omega = 0 with sigma_opt*sigma_spin = 0");
  return w2 / (w2 + 2.0 * ss);
}

Regime classify_regime(const RateParams& p, double r_lo, double r_hi) {
  p.validate();
  if (!(p.sigma_opt > 0.0)) throw InvalidParams("classify_regime: sigma_opt must be > 0");
  if (!(r_lo > 0.0 && r_hi >= r_lo))
    throw InvalidParams("classify_regime: need 0 < r_lo <= r_hi");
  if (p.omega < r_lo * p.sigma_opt) return Regime::EIT;
  if (p.omega > r_hi * p.sigma_opt) return Regime::AutlerTownes;
  return Regime::Crossover;
}

ClosedFormMetrics closed_form_metrics(const RateParams& p) {
  ClosedFormMetrics m;
  const ClosedFormWidth w = eit_width_closed(p);
  m.width = w.width;
  m.expansion_reliable = w.expansion_reliable;
  m.visibility = eit_visibility_closed(p);
  m.regime = classify_regime(p);
  return m;
}

}  // namespace eit
