// lineshape.cpp - dip/peak metric extraction on sampled absorption curves
#include "eit/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eit/csv.hpp"
#include "eit/errors.hpp"
#include "eit/least_squares.hpp"

namespace eit {

AbsorptionCurve absorption_curve(const SusceptibilitySpectrum& s) {
  AbsorptionCurve c;
  c.grid = s.grid;
  c.delta = s.delta;
  c.alpha.reserve(s.chi.size());
  for (const Complex& v : s.chi) {
    if (v.imag() < 0.0) {
      ++c.clipped;
      c.alpha.push_back(0.0);
    } else {
      c.alpha.push_back(v.imag());
    }
  }
  return c;
}

AbsorptionCurve make_absorption_curve(const DetuningGrid& grid, std::vector<double> alpha) {
  grid.validate();
  if (static_cast<int>(alpha.size()) != grid.count)
    throw InvalidParams("make_absorption_curve: alpha length must match grid count");
  AbsorptionCurve c;
  c.grid = grid;
  c.delta = grid.points();
  c.alpha = std::move(alpha);
  for (double& a : c.alpha)
    if (a < 0.0) {
      a = 0.0;
      ++c.clipped;
    }
  return c;
}

namespace {

struct Run {
  int lo, hi;  // inclusive index range of equal values
};

// Bracketed interior extremum runs: equal-valued plateaus count as one
// candidate, bracketed by strictly higher (minima) / lower (maxima) samples.
template <class Cmp>
std::vector<Run> bracketed_runs(const std::vector<double>& a, Cmp outside_higher) {
  std::vector<Run> runs;
  const int n = static_cast<int>(a.size());
  int i = 1;
  while (i <= n - 2) {
    int j = i;
    while (j + 1 <= n - 2 && a[j + 1] == a[i]) ++j;
    if (outside_higher(a[i - 1], a[i]) && outside_higher(a[j + 1], a[j]))
      runs.push_back({i, j});
    i = j + 1;
  }
  return runs;
}

// Sub-grid extremum position via a parabola through three samples.
double refine_extremum(const std::vector<double>& x, const std::vector<double>& a, int k) {
  const int n = static_cast<int>(a.size());
  if (k <= 0 || k >= n - 1) return x[k];
  const double denom = a[k - 1] - 2.0 * a[k] + a[k + 1];
  if (denom == 0.0) return x[k];
  double off = 0.5 * (a[k - 1] - a[k + 1]) / denom;
  off = std::clamp(off, -0.5, 0.5);
  return x[k] + off * (x[k + 1] - x[k]);
}

// Climb uphill from index k in direction step until the curve stops rising.
int climb(const std::vector<double>& a, int k, int step) {
  const int n = static_cast<int>(a.size());
  while (k + step >= 0 && k + step < n && a[k + step] > a[k]) k += step;
  return k;
}

double cross_half_level(const std::vector<double>& x, const std::vector<double>& a,
                        int from, int flank, double h, int step) {
  // March from the dip edge toward the flank; return the interpolated
  // abscissa where the curve first reaches h.
  for (int m = from; m != flank; m += step) {
    const int next = m + step;
    if (a[next] >= h && a[m] < h) {
      const double t = (h - a[m]) / (a[next] - a[m]);
      return x[m] + t * (x[next] - x[m]);
    }
  }
  throw NotResolved("extract_fwhm_dip: half level not reached on one flank");
}

}  // namespace

DipExtraction extract_fwhm_dip(const AbsorptionCurve& c, double depth_threshold) {
  const int n = static_cast<int>(c.alpha.size());
  if (n < 3) throw NoDip("extract_fwhm_dip: need at least 3 samples");

  auto lower = [](double outside, double edge) { return outside > edge; };
  const std::vector<Run> dips = bracketed_runs(c.alpha, lower);
  if (dips.empty()) throw NoDip("extract_fwhm_dip: no bracketed interior minimum");
  const Run* best = &dips.front();
  for (const Run& r : dips)
    if (c.alpha[r.lo] < c.alpha[best->lo]) best = &r;

  const int left_top = climb(c.alpha, best->lo, -1);
  const int right_top = climb(c.alpha, best->hi, +1);
  const double alpha_min = c.alpha[best->lo];
  const double alpha_ref = 0.5 * (c.alpha[left_top] + c.alpha[right_top]);

  DipExtraction d;
  d.alpha_min = alpha_min;
  d.alpha_ref = alpha_ref;
  d.depth_fraction = (alpha_ref - alpha_min) / alpha_ref;
  if (!(d.depth_fraction >= depth_threshold))
    throw NotResolved("extract_fwhm_dip: dip depth below threshold");

  if (best->lo == best->hi) {
    d.dip_position = refine_extremum(c.delta, c.alpha, best->lo);
  } else {
    d.dip_position = 0.5 * (c.delta[best->lo] + c.delta[best->hi]);
  }

  const double h = 0.5 * (alpha_ref + alpha_min);
  const double left = cross_half_level(c.delta, c.alpha, best->lo, left_top, h, -1);
  const double right = cross_half_level(c.delta, c.alpha, best->hi, right_top, h, +1);
  d.width = right - left;
  return d;
}

double extract_visibility_contrast(const AbsorptionCurve& c, double window_lo,
                                   double window_hi) {
  double mx = 0.0, mn = 0.0;
  bool any = false;
  for (size_t i = 0; i < c.delta.size(); ++i) {
    if (c.delta[i] < window_lo || c.delta[i] > window_hi) continue;
    if (!any) {
      mx = mn = c.alpha[i];
      any = true;
    } else {
      mx = std::max(mx, c.alpha[i]);
      mn = std::min(mn, c.alpha[i]);
    }
  }
  if (!any) throw EmptyWindow("extract_visibility_contrast: no samples in window");
  const double denom = mx + mn;
  if (denom == 0.0) return 0.0;
  return (mx - mn) / denom;
}

double contrast_over_feature(const AbsorptionCurve& c) {
  const PeakSet peaks = find_absorption_peaks(c);
  if (peaks.positions.size() == 2) {
    const double margin = c.grid.spacing();
    return extract_visibility_contrast(c, peaks.positions[0] - margin,
                                       peaks.positions[1] + margin);
  }
  return extract_visibility_contrast(c, c.grid.start, c.grid.stop);
}

PeakSet find_absorption_peaks(const AbsorptionCurve& c) {
  PeakSet out;
  if (c.alpha.size() < 3) return out;
  auto higher = [](double outside, double edge) { return outside < edge; };
  std::vector<Run> peaks = bracketed_runs(c.alpha, higher);
  if (peaks.empty()) return out;
  std::sort(peaks.begin(), peaks.end(), [&](const Run& a, const Run& b) {
    return c.alpha[a.lo] > c.alpha[b.lo];
  });
  const size_t keep = std::min<size_t>(2, peaks.size());
  for (size_t i = 0; i < keep; ++i) {
    const Run& r = peaks[i];
    out.positions.push_back(r.lo == r.hi
                                ? refine_extremum(c.delta, c.alpha, r.lo)
                                : 0.5 * (c.delta[r.lo] + c.delta[r.hi]));
  }
  std::sort(out.positions.begin(), out.positions.end());
  if (out.positions.size() == 2)
    out.separation = out.positions[1] - out.positions[0];
  return out;
}

double dispersion_slope(const SusceptibilitySpectrum& s) {
  const AbsorptionCurve c = absorption_curve(s);
  const DipExtraction d = extract_fwhm_dip(c);

  int inside = 0;
  for (double x : s.delta)
    if (std::fabs(x - d.dip_position) <= 0.5 * d.width) ++inside;
  if (inside < 5)
    throw GridTooCoarse("dispersion_slope: fewer than 5 grid points across the dip");

  int k = 0;
  double dist = std::fabs(s.delta[0] - d.dip_position);
  for (int i = 1; i < static_cast<int>(s.delta.size()); ++i) {
    const double e = std::fabs(s.delta[i] - d.dip_position);
    if (e < dist) {
      dist = e;
      k = i;
    }
  }
  if (k == 0 || k == static_cast<int>(s.delta.size()) - 1)
    throw GridTooCoarse("dispersion_slope: dip too close to the grid edge");
  const double h = s.grid.spacing();
  return (s.chi[k + 1].real() - s.chi[k - 1].real()) / (2.0 * h);
}

LorentzianDipFit fit_lorentzian_dip(const AbsorptionCurve& c, double depth_threshold) {
  const DipExtraction d = extract_fwhm_dip(c, depth_threshold);

  std::vector<double> xs, ys;
  for (size_t i = 0; i < c.delta.size(); ++i) {
    if (std::fabs(c.delta[i] - d.dip_position) <= 5.0 * d.width) {
      xs.push_back(c.delta[i]);
      ys.push_back(c.alpha[i]);
    }
  }
  if (xs.size() < 6) {
    xs = c.delta;
    ys = c.alpha;
  }
  if (xs.size() < 5) throw FitDiverged("fit_lorentzian_dip: too few samples");

  auto residuals = [&](const std::vector<double>& p) {
    const double bg = p[0], depth = p[1], w = p[2], ctr = p[3];
    const double q = 0.25 * w * w;
    std::vector<double> r(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      const double dx = xs[i] - ctr;
      r[i] = bg - depth * q / (dx * dx + q) - ys[i];
    }
    return r;
  };
  const std::vector<double> x0 = {d.alpha_ref, d.alpha_ref - d.alpha_min, d.width,
                                  d.dip_position};
  const lsq::Result res = lsq::fit(residuals, x0);
  if (!res.converged || !(std::fabs(res.x[2]) > 0.0) || !(res.x[1] > 0.0))
    throw FitDiverged("fit_lorentzian_dip: no convergent Lorentzian model");

  LorentzianDipFit out;
  out.background = res.x[0];
  out.depth = res.x[1];
  out.width = std::fabs(res.x[2]);
  out.center = res.x[3];
  out.residual_norm = res.residual_norm;
  return out;
}

std::string metrics_csv_header() {
  return "omega,sigma_opt,sigma_spin,width,vis_contrast,vis_residual,dip_pos,peak_sep,regime";
}

std::string metrics_csv_row(const EitMetrics& m) {
  auto cell = [](const std::optional<double>& v) {
    return v ? csv::format(*v) : std::string();
  };
  std::ostringstream os;
  os << csv::format(m.omega) << ',' << csv::format(m.sigma_opt) << ','
     << csv::format(m.sigma_spin) << ',' << cell(m.width) << ','
     << cell(m.visibility_contrast) << ',' << cell(m.visibility_residual) << ','
     << cell(m.dip_position) << ',' << cell(m.peak_separation) << ','
     << (m.regime ? to_string(*m.regime) : "");
  return os.str();
}

}  // namespace eit
