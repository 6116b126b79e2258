// profile.cpp - broadening density implementations
#include "eit/profile.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "eit/csv.hpp"

namespace eit {

namespace {
constexpr double kPi = 3.14159265358979323846;
// FWHM -> Gaussian standard deviation
constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

double trapezoid_area(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0.0;
  for (size_t i = 1; i < x.size(); ++i)
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return area;
}
}  // namespace

const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Lorentzian: return "lorentzian";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::FlatTop: return "flattop";
    case ProfileKind::Tabulated: return "tabulated";
  }
  return "?";
}

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "lorentzian") return ProfileKind::Lorentzian;
  if (s == "gaussian") return ProfileKind::Gaussian;
  if (s == "flattop" || s == "flat_top") return ProfileKind::FlatTop;
  if (s == "tabulated") return ProfileKind::Tabulated;
  throw InvalidWidth("unknown profile kind: " + s);
}

BroadeningProfile BroadeningProfile::analytic(ProfileKind kind, double fwhm, double center) {
  if (kind == ProfileKind::Tabulated)
    throw InvalidWidth("analytic(): use from_table() for tabulated profiles");
  if (!(fwhm >= 0.0) || !std::isfinite(fwhm))
    throw InvalidWidth("profile fwhm must be >= 0");
  if (!std::isfinite(center)) throw InvalidWidth("profile center must be finite");
  BroadeningProfile p;
  p.kind_ = kind;
  p.fwhm_ = fwhm;
  p.center_ = center;
  return p;
}

BroadeningProfile BroadeningProfile::from_table(const std::vector<double>& shifts,
                                                const std::vector<double>& densities) {
  if (shifts.size() < 3) throw NonUniformGrid("tabulated profile needs at least 3 points");
  if (shifts.size() != densities.size())
    throw NonUniformGrid("tabulated profile: shifts and densities differ in length");

  const double step = shifts[1] - shifts[0];
  if (!(step > 0.0)) throw NonUniformGrid("tabulated profile: shifts must be strictly increasing");
  for (size_t i = 1; i < shifts.size(); ++i) {
    const double d = shifts[i] - shifts[i - 1];
    if (std::abs(d - step) > 1e-6 * step)
      throw NonUniformGrid("tabulated profile: non-uniform shift grid");
  }

  double maxd = 0.0;
  for (double d : densities) {
    if (d < 0.0) throw NegativeDensity("tabulated profile: negative density");
    maxd = std::max(maxd, d);
  }
  if (maxd == 0.0) throw AllZero("tabulated profile: all densities zero");

  BroadeningProfile p;
  p.kind_ = ProfileKind::Tabulated;
  p.center_ = 0.0;
  p.table_step_ = step;
  p.shifts_ = shifts;
  p.densities_ = densities;

  const double area = trapezoid_area(p.shifts_, p.densities_);
  for (double& d : p.densities_) d /= area;

  p.fwhm_ = numeric_fwhm(p.shifts_, p.densities_);
  return p;
}

double BroadeningProfile::density(double x) const {
  switch (kind_) {
    case ProfileKind::Lorentzian: {
      const double hw = 0.5 * fwhm_;
      const double dx = x - center_;
      return hw / (kPi * (dx * dx + hw * hw));
    }
    case ProfileKind::Gaussian: {
      const double s = fwhm_ * kFwhmToSigma;
      const double dx = (x - center_) / s;
      return std::exp(-0.5 * dx * dx) / (s * std::sqrt(2.0 * kPi));
    }
    case ProfileKind::FlatTop: {
      return std::abs(x - center_) <= 0.5 * fwhm_ ? 1.0 / fwhm_ : 0.0;
    }
    case ProfileKind::Tabulated: {
      if (x < shifts_.front() || x > shifts_.back()) return 0.0;
      const double pos = (x - shifts_.front()) / table_step_;
      const size_t i = std::min(static_cast<size_t>(pos), shifts_.size() - 2);
      const double frac = (x - shifts_[i]) / table_step_;
      return densities_[i] * (1.0 - frac) + densities_[i + 1] * frac;
    }
  }
  return 0.0;
}

bool BroadeningProfile::has_finite_support() const {
  return kind_ == ProfileKind::FlatTop || kind_ == ProfileKind::Tabulated;
}

double BroadeningProfile::support_lo() const {
  if (kind_ == ProfileKind::Tabulated) return shifts_.front();
  if (kind_ == ProfileKind::FlatTop) return center_ - 0.5 * fwhm_;
  return -std::numeric_limits<double>::infinity();
}

double BroadeningProfile::support_hi() const {
  if (kind_ == ProfileKind::Tabulated) return shifts_.back();
  if (kind_ == ProfileKind::FlatTop) return center_ + 0.5 * fwhm_;
  return std::numeric_limits<double>::infinity();
}

void BroadeningProfile::write_csv(std::ostream& os) const {
  os << "shift,density\n";
  if (kind_ == ProfileKind::Tabulated) {
    for (size_t i = 0; i < shifts_.size(); ++i)
      os << csv::format(shifts_[i]) << ',' << csv::format(densities_[i]) << '\n';
    return;
  }
  // Analytic kinds are sampled over their core for plotting/export.
  const int n = 2001;
  const double span = has_finite_support() ? 1.2 * fwhm_ : 20.0 * fwhm_;
  for (int i = 0; i < n; ++i) {
    const double x = center_ - 0.5 * span + span * i / (n - 1);
    os << csv::format(x) << ',' << csv::format(density(x)) << '\n';
  }
}

BroadeningProfile BroadeningProfile::read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw SchemaError("profile csv: empty stream");
  if (csv::strip(header) != "shift,density")
    throw SchemaError("profile csv: expected header 'shift,density'");
  std::vector<double> xs, ys;
  std::string line;
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::strip(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 2)
      throw SchemaError("profile csv: line " + std::to_string(lineno) + ": expected 2 fields");
    xs.push_back(csv::to_double(fields[0], lineno));
    ys.push_back(csv::to_double(fields[1], lineno));
  }
  return from_table(xs, ys);
}

double numeric_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3 || x.size() != y.size()) return 0.0;
  size_t imax = 0;
  for (size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[imax]) imax = i;
  const double half = 0.5 * y[imax];
  if (!(half > 0.0)) return 0.0;

  double left = x.front();
  for (size_t i = imax; i-- > 0;) {
    if (y[i] < half) {
      const double f = (half - y[i]) / (y[i + 1] - y[i]);
      left = x[i] + f * (x[i + 1] - x[i]);
      break;
    }
  }
  double right = x.back();
  for (size_t i = imax + 1; i < y.size(); ++i) {
    if (y[i] < half) {
      const double f = (y[i - 1] - half) / (y[i - 1] - y[i]);
      right = x[i - 1] + f * (x[i] - x[i - 1]);
      break;
    }
  }
  return right - left;
}

}  // namespace eit
