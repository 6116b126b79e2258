// profile.hpp - normalized inhomogeneous broadening densities
#ifndef EIT_PROFILE_HPP
#define EIT_PROFILE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "eit/errors.hpp"

namespace eit {

enum class ProfileKind { Lorentzian, Gaussian, FlatTop, Tabulated };

const char* to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

// A unit-area density over frequency shifts.  Analytic kinds are symmetric
// about `center`; tabulated ones carry their own grid and may be asymmetric
// (hole-burned trench shapes).  fwhm == 0 on an analytic kind marks a point
// mass, which the integrator collapses to a single kernel evaluation.
class BroadeningProfile {
 public:
  static BroadeningProfile analytic(ProfileKind kind, double fwhm, double center = 0.0);
  static BroadeningProfile from_table(const std::vector<double>& shifts,
                                      const std::vector<double>& densities);

  ProfileKind kind() const { return kind_; }
  double fwhm() const { return fwhm_; }
  double center() const { return center_; }
  bool is_point_mass() const { return kind_ != ProfileKind::Tabulated && fwhm_ == 0.0; }

  // Density at shift x; tabulated kinds interpolate linearly and are zero
  // outside their span.  Point masses have no finite density.
  double density(double x) const;

  // Support of the density: exact for FlatTop/Tabulated, the whole line for
  // Lorentzian/Gaussian (has_finite_support() false).
  bool has_finite_support() const;
  double support_lo() const;
  double support_hi() const;

  const std::vector<double>& table_shifts() const { return shifts_; }
  const std::vector<double>& table_densities() const { return densities_; }
  double table_step() const { return table_step_; }

  void write_csv(std::ostream& os) const;
  static BroadeningProfile read_csv(std::istream& is);

 private:
  BroadeningProfile() = default;

  ProfileKind kind_ = ProfileKind::Lorentzian;
  double fwhm_ = 0.0;
  double center_ = 0.0;
  double table_step_ = 0.0;
  std::vector<double> shifts_;
  std::vector<double> densities_;
};

inline BroadeningProfile make_profile(ProfileKind kind, double fwhm, double center = 0.0) {
  return BroadeningProfile::analytic(kind, fwhm, center);
}
inline double profile_density(const BroadeningProfile& p, double x) { return p.density(x); }
inline BroadeningProfile profile_from_table(const std::vector<double>& shifts,
                                            const std::vector<double>& densities) {
  return BroadeningProfile::from_table(shifts, densities);
}

// Half-max crossing width of the dominant feature of a sampled curve, with
// linear interpolation on both flanks.  Returns 0 if no crossing exists.
double numeric_fwhm(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace eit

#endif  // EIT_PROFILE_HPP
