// Phi(rho) as the value of the velocity-space problem
//   min int (s^2/2 g + Q(g)) dv  over g >= 0 with int g dv = rho,
// solved by projected gradient descent on a radial speed grid. Nothing of
// the closed-form ansatz integrals is used, so agreement with the induced
// equation of state checks the reduction itself.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "polystar/kinetic.hpp"

using namespace polystar::kinetic;
using std::numbers::pi;

namespace {

struct SpeedGrid {
  std::vector<double> s, w;
};

SpeedGrid midpoint_grid(double S, std::size_t n) {
  SpeedGrid g;
  const double ds = S / double(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (double(i) + 0.5) * ds;
    g.s.push_back(s);
    g.w.push_back(4.0 * pi * s * s * ds);
  }
  return g;
}

class VSpaceProblem {
 public:
  VSpaceProblem(const KineticAnsatz& a, double rho) : a_(a), rho_(rho) {}

  double objective(const SpeedGrid& grid, const std::vector<double>& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      sum += grid.w[i] * (0.5 * grid.s[i] * grid.s[i] * g[i] + a_.Q(g[i]));
    return sum;
  }

  // Gradient in the w-weighted inner product: s^2/2 + Q'(g).
  std::vector<double> gradient(const SpeedGrid& grid, const std::vector<double>& g) const {
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      d[i] = 0.5 * grid.s[i] * grid.s[i] + std::pow(g[i] / a_.C, 1.0 / a_.k);
    return d;
  }

  // Weighted projection onto {g >= 0, sum w g = rho}: g = (y - mu)_+.
  std::vector<double> project(const SpeedGrid& grid, const std::vector<double>& y) const {
    const auto mass = [&](double mu) {
      double m = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) m += grid.w[i] * std::max(y[i] - mu, 0.0);
      return m;
    };
    double hi = *std::max_element(y.begin(), y.end());
    double lo = hi - 1.0;
    while (mass(lo) < rho_) lo = hi - 2.0 * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::abs(hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass(mid) > rho_ ? lo : hi) = mid;
    }
    std::vector<double> g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = std::max(y[i] - 0.5 * (lo + hi), 0.0);
    return g;
  }

  double solve(const SpeedGrid& grid, std::vector<double>& g, int max_iter = 40000) const {
    double F = objective(grid, g);
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
      const auto d = gradient(grid, g);
      std::vector<double> trial(g.size());
      double Fn = F, decrease = 0.0;
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> y(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) y[i] = g[i] - step * d[i];
        trial = project(grid, y);
        decrease = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) decrease += grid.w[i] * d[i] * (g[i] - trial[i]);
        Fn = objective(grid, trial);
        if (Fn <= F - 1e-4 * decrease) break;
        step *= 0.5;
      }
      g = trial;
      if (F - Fn <= 1e-15 * std::abs(F)) return Fn;
      F = Fn;
      step *= 2.0;
    }
    return F;
  }

  // Re-solves with the grid fitted to 1.25x the support until it settles.
  double minimum(std::size_t nodes = 800) const {
    double S = 1.0;
    double value = 0.0;
    for (int round = 0; round < 30; ++round) {
      const auto grid = midpoint_grid(S, nodes);
      std::vector<double> g(nodes, rho_ / (4.0 / 3.0 * pi * S * S * S));
      value = solve(grid, g);
      std::size_t last = 0;
      for (std::size_t i = 0; i < nodes; ++i)
        if (g[i] > 0.0) last = i;
      const double support = grid.s[last] + 0.5 * S / double(nodes);
      if (last + 1 == nodes) {
        S *= 2.0;
        continue;
      }
      const double target = 1.25 * support;
      if (std::abs(target - S) < 0.02 * S) break;
      S = target;
    }
    return value;
  }

 private:
  const KineticAnsatz& a_;
  double rho_;
};

std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / double(n - 1));
  return v;
}

}  // namespace

TEST_CASE("velocity-space minimum equals Phi of the induced law") {
  const std::vector<double> rhos{0.05, 0.2, 1.0, 5.0, 20.0};
  for (double k : {0.5, 1.0}) {
    const auto a = KineticAnsatz::polytropic(k, 1.3);
    const auto eos = induced_eos(a);

    std::vector<double> f{0.0};
    for (double v : logspace(1e-10, 1e3, 1200)) f.push_back(v);
    std::vector<double> q(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) q[i] = a.Q(f[i]);
    const auto reduced = phi_from_q(f, q, logspace(1e-4, 1e2, 600), rhos);

    for (std::size_t j = 0; j < rhos.size(); j += 2) {
      CAPTURE(k);
      CAPTURE(rhos[j]);
      const double value = VSpaceProblem(a, rhos[j]).minimum();
      CHECK(value == doctest::Approx(eos.phi(rhos[j])).epsilon(1e-4));
      CHECK(value == doctest::Approx(reduced.phi[j]).epsilon(1e-4));
    }
  }
}

TEST_CASE("the minimizer has the ansatz shape") {
  // k = 1: g(s) = C (lambda - s^2/2)_+, lambda = Phi'(rho).
  const auto a = KineticAnsatz::polytropic(1.0, 1.0);
  const double rho = 1.0;
  const double lambda = induced_eos(a).phi_prime(rho);
  const VSpaceProblem prob(a, rho);
  const double S = 1.25 * std::sqrt(2.0 * lambda);
  const auto grid = midpoint_grid(S, 800);
  std::vector<double> g(grid.s.size(), rho / (4.0 / 3.0 * pi * S * S * S));
  prob.solve(grid, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double exact = std::max(lambda - 0.5 * grid.s[i] * grid.s[i], 0.0);
    worst = std::max(worst, std::abs(g[i] - exact));
  }
  CHECK(worst <= 1e-3 * lambda);
}
