#include "polystar/quadrature.hpp"

#include <array>

namespace polystar::quad {

std::array<double, 3> quadratic_segment_weights(double h1, double h2, double sa, double sb) {
  // q(s) = f0 + c1 s + c2 s^2 with divided differences in local coordinate s.
  const double i1 = sb - sa;
  const double i2 = 0.5 * (sb * sb - sa * sa);
  const double i3 = (sb * sb * sb - sa * sa * sa) / 3.0;
  // c2 = (d2 - d1) / (h2 - h1), d1 = (f1 - f0)/h1, d2 = (f2 - f0)/h2,
  // c1 = d1 - c2 h1. Expand each coefficient as a linear form in (f0, f1, f2).
  const double dh = h2 - h1;
  const std::array<double, 3> d1{-1.0 / h1, 1.0 / h1, 0.0};
  const std::array<double, 3> d2{-1.0 / h2, 0.0, 1.0 / h2};
  std::array<double, 3> w{};
  for (int k = 0; k < 3; ++k) {
    const double c2 = (d2[k] - d1[k]) / dh;
    const double c1 = d1[k] - c2 * h1;
    const double c0 = k == 0 ? 1.0 : 0.0;
    w[k] = c0 * i1 + c1 * i2 + c2 * i3;
  }
  return w;
}

namespace {

// Calls visit(interval_index, base_node, w) for each interval [x_i, x_{i+1}],
// where w are the weights on nodes base..base+2 for that interval.
template <class Visit>
void for_each_interval(std::span<const double> x, Visit&& visit) {
  const std::size_t n = x.size();
  if (n < 2) return;
  if (n == 2) {
    const double h = x[1] - x[0];
    visit(0, 0, std::array<double, 3>{0.5 * h, 0.5 * h, 0.0}, 2);
    return;
  }
  const std::size_t intervals = n - 1;
  for (std::size_t i = 0; i < intervals; ++i) {
    std::size_t base;
    if (i + 1 == intervals && intervals % 2 == 1) {
      base = n - 3;
    } else {
      base = i - (i % 2);
    }
    const double h1 = x[base + 1] - x[base];
    const double h2 = x[base + 2] - x[base];
    const auto w = quadratic_segment_weights(h1, h2, x[i] - x[base], x[i + 1] - x[base]);
    visit(i, base, w, 3);
  }
}

}  // namespace

std::vector<double> simpson_weights(std::span<const double> x) {
  std::vector<double> w(x.size(), 0.0);
  for_each_interval(x, [&](std::size_t, std::size_t base, const std::array<double, 3>& ws,
                           int count) {
    for (int k = 0; k < count; ++k) w[base + k] += ws[k];
  });
  return w;
}

std::vector<double> cumulative_simpson(std::span<const double> x, std::span<const double> f) {
  std::vector<double> out(x.size(), 0.0);
  for_each_interval(x, [&](std::size_t i, std::size_t base, const std::array<double, 3>& ws,
                           int count) {
    double seg = 0.0;
    for (int k = 0; k < count; ++k) seg += ws[k] * f[base + k];
    out[i + 1] = out[i] + seg;
  });
  return out;
}

}  // namespace polystar::quad
