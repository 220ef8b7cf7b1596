#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "polystar/error.hpp"

namespace polystar::quad {

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  unsigned max_depth = 25;
};

/// Adaptive Gauss-Kronrod (G15/K31) integral of f over [a, b].
/// Endpoint evaluations are never made, so integrable endpoint
/// singularities are fine. Throws NumericError if the error estimate stays
/// above max(abs_tol, rel_tol * L1) by more than two orders of magnitude,
/// which is how non-integrable integrands show up.
template <class F>
double integrate(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  const double result = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
  const double target = std::max(opts.abs_tol, opts.rel_tol * l1);
  if (!std::isfinite(result) || err > 100.0 * target) {
    throw NumericError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]: error estimate " + std::to_string(err));
  }
  return result;
}

/// Tanh-sinh integral of f over [a, b], for integrands with algebraic
/// endpoint singularities (where Gauss-Kronrod refinement stalls). The
/// integrand receives the abscissa and its distance to the nearer endpoint
/// is never needed. Same failure contract as `integrate`.
template <class F>
double integrate_singular(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double result = rule.integrate(f, a, b, opts.rel_tol, &err, &l1, &levels);
  const double target = std::max(opts.abs_tol, opts.rel_tol * l1);
  if (!std::isfinite(result) || err > 100.0 * target) {
    throw NumericError("tanh-sinh quadrature did not converge on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]: error estimate " + std::to_string(err));
  }
  return result;
}

/// Composite Simpson weights on arbitrary increasing nodes. Consecutive node
/// pairs are integrated with the quadratic through three nodes; when the
/// number of intervals is odd the last interval reuses the quadratic through
/// the final three nodes. Exact for quadratics on any node set.
std::vector<double> simpson_weights(std::span<const double> x);

/// Running integral F(x_i) = int_{x_0}^{x_i} f using the same piecewise
/// quadratics as simpson_weights, so F.back() equals the Simpson total.
std::vector<double> cumulative_simpson(std::span<const double> x, std::span<const double> f);

/// Weights (w0, w1, w2) such that int_{x0+sa}^{x0+sb} q = sum w_k f_k for the
/// quadratic q through (x0, f0), (x0+h1, f1), (x0+h2, f2).
std::array<double, 3> quadratic_segment_weights(double h1, double h2, double sa, double sb);

}  // namespace polystar::quad
