// quadrature.hpp - globally adaptive Gauss-Kronrod 15 for complex integrands
//
// Worst-interval-first refinement over an explicit segment heap.  Callers can
// seed breakpoints where the integrand is known to have narrow structure
// (kernel resonances, profile edges); adaptivity does the rest.
#ifndef EIT_QUADRATURE_HPP
#define EIT_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace eit::quad {

struct Options {
  double rel_tol = 1e-6;
  int max_depth = 30;       // bisection depth cap per initial segment
  long max_intervals = 20000;
};

struct Result {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;        // absolute error estimate
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

// QUADPACK dqk15 nodes and weights (positive half; node 7 is the midpoint).
inline constexpr double kx[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kw[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gw[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  std::complex<double> value;
  double error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment eval_gk15(F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::complex<double> kronrod = kw[7] * f(c);
  std::complex<double> gauss = gw[3] * f(c);
  for (int j = 0; j < 7; ++j) {
    const std::complex<double> lo = f(c - h * kx[j]);
    const std::complex<double> hi = f(c + h * kx[j]);
    kronrod += kw[j] * (lo + hi);
    if (j % 2 == 1) gauss += gw[j / 2] * (lo + hi);
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = h * kronrod;
  s.error = std::abs(h * (kronrod - gauss));
  s.depth = depth;
  return s;
}

}  // namespace detail

template <class F>
Result integrate(F&& f, double a, double b, const std::vector<double>& breakpoints,
                 const Options& opt) {
  Result res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<detail::Segment> heap;
  heap.reserve(256);
  for (size_t i = 1; i < edges.size(); ++i) {
    heap.push_back(detail::eval_gk15(f, edges[i - 1], edges[i], 0));
    res.evaluations += 15;
  }
  std::make_heap(heap.begin(), heap.end());

  auto recompute = [&heap](std::complex<double>& v, double& e) {
    v = {0.0, 0.0};
    e = 0.0;
    for (const auto& s : heap) {
      v += s.value;
      e += s.error;
    }
  };

  std::complex<double> value;
  double error;
  recompute(value, error);

  long splits = 0;
  for (;;) {
    const double scale = std::max(std::abs(value), 1e-300);
    if (error <= opt.rel_tol * scale || error <= 1e-300) {
      res.value = value;
      res.error = error;
      res.converged = true;
      return res;
    }
    if (static_cast<long>(heap.size()) >= opt.max_intervals) break;

    std::pop_heap(heap.begin(), heap.end());
    detail::Segment worst = heap.back();
    heap.pop_back();
    if (worst.depth >= opt.max_depth) {
      // The dominant segment cannot be refined further: give up.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Segment left = detail::eval_gk15(f, worst.a, mid, worst.depth + 1);
    const detail::Segment right = detail::eval_gk15(f, mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    res.evaluations += 30;
    // Incremental totals drift through cancellation; refresh periodically.
    if (++splits % 256 == 0) recompute(value, error);
  }

  recompute(value, error);
  res.value = value;
  res.error = error;
  res.converged = error <= opt.rel_tol * std::max(std::abs(value), 1e-300);
  return res;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt) {
  return integrate(std::forward<F>(f), a, b, {}, opt);
}

}  // namespace eit::quad

#endif  // EIT_QUADRATURE_HPP
