#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qprob/error.hpp"

namespace qprob {

struct QuadratureOptions {
  double abs_tol = 1e-9;   // distributed over [a, b] in proportion to panel width
  double fail_tol = 1e-8;  // total error estimate above this is a failure
  int max_depth = 30;
};

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  int panels = 0;
};

namespace detail {

struct Gk15 {
  std::array<double, 8> x;   // x[0] = 0, ascending
  std::array<double, 8> wk;  // Kronrod weights
  std::array<double, 4> wg;  // Gauss weights for x[0], x[2], x[4], x[6]
};
const Gk15& gk15();

template <class F>
void gk15_panel(F& f, double a, double b, std::complex<double>& value, double& error) {
  const Gk15& r = gk15();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::complex<double> fc = f(c);
  std::complex<double> k = r.wk[0] * fc;
  std::complex<double> g = r.wg[0] * fc;
  for (int i = 1; i < 8; ++i) {
    std::complex<double> s = f(c - h * r.x[i]) + f(c + h * r.x[i]);
    k += r.wk[i] * s;
    if (i % 2 == 0) g += r.wg[i / 2] * s;
  }
  value = h * k;
  error = std::abs(h * (k - g));
}

template <class F>
void adaptive(F& f, double a, double b, double tol, int depth, const QuadratureOptions& opt,
              QuadratureResult& out) {
  std::complex<double> v;
  double e;
  gk15_panel(f, a, b, v, e);
  if (e <= tol || depth >= opt.max_depth) {
    out.value += v;
    out.error += e;
    ++out.panels;
    return;
  }
  const double m = 0.5 * (a + b);
  adaptive(f, a, m, 0.5 * tol, depth + 1, opt, out);
  adaptive(f, m, b, 0.5 * tol, depth + 1, opt, out);
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of a complex integrand over [a, b].
// The initial partition keeps every panel no wider than pi / (4 * slope), where slope(x) bounds
// the local phase derivative and is sampled at the panel's right end (it must be non-decreasing
// there or already an upper bound).
template <class F, class Slope>
QuadratureResult integrate_panels(F&& f, double a, double b, Slope&& slope,
                                  const QuadratureOptions& opt = {}) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const double span = b - a;
  double x = a;
  while (x < b) {
    double s = std::max(slope(x), 1e-300);
    double w = std::min(M_PI / (4.0 * s), b - x);
    // refine the width using the slope at the tentative right end
    for (int it = 0; it < 4; ++it) {
      double s2 = std::max(slope(x + w), s);
      double w2 = std::min(M_PI / (4.0 * s2), b - x);
      if (w2 >= w) break;
      w = w2;
    }
    double xe = (b - x - w < 1e-12 * span) ? b : x + w;
    detail::adaptive(f, x, xe, opt.abs_tol * (xe - x) / span, 0, opt, out);
    x = xe;
  }
  if (!(out.error <= opt.fail_tol)) {
    throw QuadratureError("quadrature did not converge (error estimate " +
                              std::to_string(out.error) + ")",
                          out.error);
  }
  return out;
}

template <class F>
QuadratureResult integrate_panels(F&& f, double a, double b, double max_slope,
                                  const QuadratureOptions& opt = {}) {
  return integrate_panels(std::forward<F>(f), a, b, [max_slope](double) { return max_slope; }, opt);
}

// Weights of the composite rule with Gregory end corrections (exact for cubics), times step.
std::vector<double> gregory_weights(std::size_t count, double step);

}  // namespace qprob
