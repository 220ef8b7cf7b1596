#pragma once

#include <memory>
#include <span>
#include <vector>

namespace polystar {

/// Shape-preserving (PCHIP) interpolant on increasing abscissae. Monotone
/// data stay monotone and nonnegative data stay nonnegative. Outside
/// [x.front(), x.back()] the interpolant returns `outside`.
class MonotoneCubic {
 public:
  MonotoneCubic(std::span<const double> x, std::span<const double> y, double outside = 0.0);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double x_min_ = 0.0;
  double x_max_ = 0.0;
  double outside_ = 0.0;
};

/// Samples a MonotoneCubic built from (x, y) at the new abscissae.
std::vector<double> resample_monotone(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> x_new, double outside = 0.0);

}  // namespace polystar
