#include "polystar/interp.hpp"

// Boost 1.74 pchip calls unqualified isnan.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "polystar/error.hpp"

namespace polystar {

struct MonotoneCubic::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y,
                             double outside)
    : outside_(outside) {
  if (x.size() != y.size() || x.size() < 4) {
    throw PreconditionError("monotone interpolation needs matching arrays of at least 4 points");
  }
  x_min_ = x.front();
  x_max_ = x.back();
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  impl_ = std::make_shared<Impl>(Impl{{std::move(xs), std::move(ys)}});
}

double MonotoneCubic::operator()(double x) const {
  if (x < x_min_ || x > x_max_) return outside_;
  return impl_->spline(x);
}

double MonotoneCubic::derivative(double x) const {
  if (x < x_min_ || x > x_max_) return 0.0;
  return impl_->spline.prime(x);
}

std::vector<double> resample_monotone(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> x_new, double outside) {
  const MonotoneCubic f(x, y, outside);
  std::vector<double> out(x_new.size());
  for (std::size_t i = 0; i < x_new.size(); ++i) out[i] = f(x_new[i]);
  return out;
}

}  // namespace polystar
