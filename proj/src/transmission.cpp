// transmission.cpp - Beer-Lambert traces and transmission-level analysis
#include "eit/transmission.hpp"

#include <algorithm>
#include <cmath>

#include "eit/csv.hpp"
#include "eit/errors.hpp"
#include "eit/least_squares.hpp"
#include "eit/profile.hpp"

namespace eit {

TransmissionTrace transmission_from_spectrum(const SusceptibilitySpectrum& s,
                                             double optical_depth, double baseline) {
  if (!(optical_depth > 0.0))
    throw InvalidDepth("transmission_from_spectrum: optical depth must be > 0");
  double b = baseline;
  if (b <= 0.0) b = 2.0 / (s.params.gamma31 + s.params.sigma_opt);
  if (!(b > 0.0))
    throw InvalidParams("transmission_from_spectrum: no valid absorption baseline");

  TransmissionTrace t;
  t.grid = s.grid;
  t.delta = s.delta;
  t.optical_depth = optical_depth;
  t.transmission.reserve(s.chi.size());
  for (const Complex& v : s.chi) {
    const double alpha = std::max(v.imag(), 0.0);
    t.transmission.push_back(std::exp(-optical_depth * alpha / b));
  }
  return t;
}

void write_trace_csv(const std::string& path, const TransmissionTrace& t) {
  std::vector<std::vector<double>> rows;
  rows.reserve(t.delta.size());
  for (size_t i = 0; i < t.delta.size(); ++i)
    rows.push_back({t.delta[i], t.transmission[i]});
  csv::write_file(path, {"delta", "transmission"}, rows);
}

TransmissionTrace read_trace_csv(const std::string& path, double optical_depth) {
  const csv::Table in = csv::read_file(path, {"delta", "transmission"});
  if (in.rows.size() < 3) throw SchemaError("trace CSV: need at least 3 rows");
  TransmissionTrace t;
  t.optical_depth = optical_depth;
  for (const auto& row : in.rows) {
    t.delta.push_back(row[0]);
    const double T = row[1];
    if (!(T > 0.0)) throw ValidationError("trace CSV: transmission must be > 0");
    t.transmission.push_back(std::min(T, 1.0));
  }
  t.grid.start = t.delta.front();
  t.grid.stop = t.delta.back();
  t.grid.count = static_cast<int>(t.delta.size());
  t.grid.validate();
  const double h = t.grid.spacing();
  for (size_t i = 1; i < t.delta.size(); ++i)
    if (std::fabs(t.delta[i] - t.delta[i - 1] - h) > 1e-6 * h)
      throw NonUniformGrid("trace CSV: detuning column must be uniformly spaced");
  return t;
}

namespace {

// Highest interior transmission maximum bracketed by strictly lower samples
// (plateau-aware); -1 when the trace has no such structure.
int bracketed_transmission_peak(const std::vector<double>& T) {
  const int n = static_cast<int>(T.size());
  int best = -1;
  int i = 1;
  while (i <= n - 2) {
    int j = i;
    while (j + 1 <= n - 2 && T[j + 1] == T[i]) ++j;
    if (T[i - 1] < T[i] && T[j + 1] < T[j]) {
      const int k = (i + j) / 2;
      if (best < 0 || T[k] > T[best]) best = k;
    }
    i = j + 1;
  }
  return best;
}

}  // namespace

VisibilityResult visibility_residual(const TransmissionTrace& with_coupling,
                                     const TransmissionTrace& without_coupling) {
  const auto& a = with_coupling;
  const auto& b = without_coupling;
  if (a.grid.count != b.grid.count || a.grid.start != b.grid.start ||
      a.grid.stop != b.grid.stop)
    throw GridMismatch("visibility_residual: traces sampled on different grids");
  if (a.optical_depth != b.optical_depth)
    throw GridMismatch("visibility_residual: traces taken at different optical depths");

  int center = 0;
  for (int i = 1; i < b.grid.count; ++i)
    if (b.transmission[i] < b.transmission[center]) center = i;
  const double t0 = b.transmission[center];
  if (t0 >= 1.0 - 1e-9)
    throw DegenerateBaseline("visibility_residual: uncoupled trace is transparent");

  const int peak = bracketed_transmission_peak(a.transmission);
  const double tp = peak >= 0 ? a.transmission[peak] : a.transmission[center];

  VisibilityResult out;
  out.t_peak_with = tp;
  out.t_center_without = t0;
  if (tp >= 1.0) {
    out.value = 1.0;
    return out;
  }
  const double raw = 1.0 - std::log(tp) / std::log(t0);
  out.value = std::clamp(raw, 0.0, 1.0);
  out.clipped = raw != out.value;
  return out;
}

SaturatedFit fit_saturated_absorption(const TransmissionTrace& t) {
  const int n = static_cast<int>(t.transmission.size());
  if (n < 3) throw FeatureAbsent("fit_saturated_absorption: trace too short");

  int k = 0;
  for (int i = 1; i < n; ++i)
    if (t.transmission[i] < t.transmission[k]) k = i;
  const double depth_raw = 1.0 - t.transmission[k];
  if (depth_raw < 1e-9)
    throw FeatureAbsent("fit_saturated_absorption: no absorption feature in trace");

  int across = 0;
  for (double T : t.transmission)
    if (1.0 - T >= 0.1 * depth_raw) ++across;
  if (across < 10)
    throw FeatureAbsent("fit_saturated_absorption: feature spans fewer than 10 samples");

  std::vector<double> one_minus(t.transmission.size());
  for (size_t i = 0; i < one_minus.size(); ++i) one_minus[i] = 1.0 - t.transmission[i];
  double w0 = numeric_fwhm(t.delta, one_minus);
  if (!(w0 > 0.0)) w0 = 0.25 * (t.delta.back() - t.delta.front());

  auto residuals = [&](const std::vector<double>& p) {
    const double d = p[0], w = p[1], c = p[2];
    const double q = 0.25 * w * w;
    std::vector<double> r(t.delta.size());
    for (size_t i = 0; i < t.delta.size(); ++i) {
      const double dx = t.delta[i] - c;
      r[i] = std::exp(-d * q / (dx * dx + q)) - t.transmission[i];
    }
    return r;
  };
  const std::vector<double> x0 = {-std::log(t.transmission[k]), w0, t.delta[k]};
  const lsq::Result res = lsq::fit(residuals, x0);
  if (!res.converged || !(res.x[0] > 0.0) || !(std::fabs(res.x[1]) > 0.0))
    throw FitDiverged("fit_saturated_absorption: no convergent model");

  SaturatedFit out;
  out.optical_depth = res.x[0];
  out.width = std::fabs(res.x[1]);
  out.center = res.x[2];
  out.residual_norm = res.residual_norm;
  return out;
}

double max_scan_rate(double sigma_spin, double optical_coherence_time) {
  if (!(sigma_spin > 0.0) || !(optical_coherence_time > 0.0))
    throw InvalidParams("max_scan_rate: both arguments must be > 0");
  return sigma_spin / optical_coherence_time;
}

}  // namespace eit
