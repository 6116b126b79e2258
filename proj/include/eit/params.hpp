// params.hpp - rate constants of the driven Lambda system
#ifndef EIT_PARAMS_HPP
#define EIT_PARAMS_HPP

#include <string>

#include "eit/errors.hpp"

namespace eit {

// All five rates share one frequency unit chosen by the caller (e.g. kHz).
// Widths are FWHM-convention; no hidden 2*pi factors anywhere.
struct RateParams {
  double omega = 0.0;       // coupling Rabi frequency
  double gamma21 = 0.0;     // spin decay/dephasing rate
  double gamma31 = 0.0;     // optical decay/dephasing rate
  double sigma_opt = 0.0;   // optical inhomogeneous FWHM
  double sigma_spin = 0.0;  // spin inhomogeneous FWHM (laser linewidth folded in)

  // Closed-form operations accept gamma21 = gamma31 = 0 (the sigma >> gamma
  // limit); the numeric integrator separately requires gamma31 > 0.
  void validate() const {
    if (!(omega >= 0.0)) throw InvalidParams("omega must be >= 0");
    if (!(gamma21 >= 0.0)) throw InvalidParams("gamma21 must be >= 0");
    if (!(gamma31 >= 0.0)) throw InvalidParams("gamma31 must be >= 0");
    if (!(sigma_opt >= 0.0)) throw InvalidParams("sigma_opt must be >= 0");
    if (!(sigma_spin >= 0.0)) throw InvalidParams("sigma_spin must be >= 0");
  }
};

enum class Regime { EIT, Crossover, AutlerTownes };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::EIT: return "EIT";
    case Regime::Crossover: return "Crossover";
    case Regime::AutlerTownes: return "AutlerTownes";
  }
  return "?";
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "EIT") return Regime::EIT;
  if (s == "Crossover") return Regime::Crossover;
  if (s == "AutlerTownes") return Regime::AutlerTownes;
  throw InvalidParams("unknown regime label: " + s);
}

}  // namespace eit

#endif  // EIT_PARAMS_HPP
