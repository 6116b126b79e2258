// least_squares.hpp - Levenberg-Marquardt for small dense fitting problems
//
// Forward-difference Jacobian, Marquardt diagonal scaling, Gaussian
// elimination on the normal equations.  Intended for <= ~6 parameters.
#ifndef EIT_LEAST_SQUARES_HPP
#define EIT_LEAST_SQUARES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace eit::lsq {

struct Options {
  int max_iter = 200;
  double ftol = 1e-14;   // relative decrease of the squared norm
  double xtol = 1e-12;   // step size relative to parameter magnitude
  double lambda0 = 1e-3;
  double lambda_max = 1e12;
};

struct Result {
  std::vector<double> x;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals)
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Solve A x = b in place; returns false on a (near-)singular pivot.
inline bool solve_dense(std::vector<double>& A, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[pivot * n + col])) pivot = r;
    if (std::fabs(A[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / A[col * n + col];
      for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
    b[r] = s / A[r * n + r];
  }
  return true;
}

}  // namespace detail

// residuals(x) -> vector of residuals; minimizes its squared norm over x.
template <class F>
Result fit(F&& residuals, std::vector<double> x0, const Options& opt = {}) {
  const int n = static_cast<int>(x0.size());
  Result res;
  res.x = std::move(x0);

  std::vector<double> r = residuals(res.x);
  const int m = static_cast<int>(r.size());
  auto sq_norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };
  double S = sq_norm(r);

  std::vector<double> J(static_cast<size_t>(m) * n);
  double lambda = opt.lambda0;

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    // Forward-difference Jacobian about the current point.
    for (int j = 0; j < n; ++j) {
      const double h = std::max(1e-7 * std::fabs(res.x[j]), 1e-9);
      std::vector<double> xp = res.x;
      xp[j] += h;
      const std::vector<double> rp = residuals(xp);
      for (int i = 0; i < m; ++i) J[static_cast<size_t>(i) * n + j] = (rp[i] - r[i]) / h;
    }
    std::vector<double> JtJ(static_cast<size_t>(n) * n, 0.0), Jtr(n, 0.0);
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < n; ++a) {
        Jtr[a] += J[static_cast<size_t>(i) * n + a] * r[i];
        for (int b = a; b < n; ++b)
          JtJ[static_cast<size_t>(a) * n + b] +=
              J[static_cast<size_t>(i) * n + a] * J[static_cast<size_t>(i) * n + b];
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b)
        JtJ[static_cast<size_t>(a) * n + b] = JtJ[static_cast<size_t>(b) * n + a];

    bool stepped = false;
    while (lambda <= opt.lambda_max) {
      std::vector<double> A = JtJ;
      for (int a = 0; a < n; ++a) {
        const double d = JtJ[static_cast<size_t>(a) * n + a];
        A[static_cast<size_t>(a) * n + a] = d + lambda * std::max(d, 1e-30);
      }
      std::vector<double> step(n);
      for (int a = 0; a < n; ++a) step[a] = -Jtr[a];
      if (!detail::solve_dense(A, step, n)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> xt = res.x;
      for (int a = 0; a < n; ++a) xt[a] += step[a];
      const std::vector<double> rt = residuals(xt);
      const double St = sq_norm(rt);
      if (St < S) {
        double step_size = 0.0, x_size = 0.0;
        for (int a = 0; a < n; ++a) {
          step_size += step[a] * step[a];
          x_size += xt[a] * xt[a];
        }
        const bool small_step = std::sqrt(step_size) <= opt.xtol * (std::sqrt(x_size) + opt.xtol);
        const bool small_gain = (S - St) <= opt.ftol * S;
        res.x = xt;
        r = rt;
        S = St;
        lambda = std::max(lambda * 0.25, 1e-12);
        stepped = true;
        if (small_step || small_gain) {
          res.residual_norm = std::sqrt(S);
          res.converged = true;
          return res;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // No downhill step within the damping budget.  A vanishing gradient
      // means we are already at a local minimum; anything else is a failure.
      double g = 0.0;
      for (int a = 0; a < n; ++a) g += Jtr[a] * Jtr[a];
      res.residual_norm = std::sqrt(S);
      res.converged = std::sqrt(g) <= 1e-10 * (1.0 + S);
      return res;
    }
  }
  res.residual_norm = std::sqrt(S);
  res.converged = false;
  return res;
}

}  // namespace eit::lsq

#endif  // EIT_LEAST_SQUARES_HPP
