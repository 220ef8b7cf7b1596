#include "polystar/varmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polystar/energetics.hpp"
#include "polystar/error.hpp"
#include "polystar/gravity.hpp"

namespace polystar::varmin {

namespace {

std::vector<double> first_variation(const GridDensity& rho, const Eos& eos) {
  const auto V = gravity::potential_of(rho);
  std::vector<double> g(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) g[i] = eos.phi_prime(rho[i]) + V[i];
  return g;
}

// Weighted Euclidean projection of y onto {rho >= 0, sum w rho = M}.
GridDensity project(const GridPtr& grid, const std::vector<double>& y, double M) {
  const auto w = grid->volume_weights();
  auto mass_at = [&](double mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * std::max(0.0, y[i] - mu);
    return s;
  };
  double total_w = 0.0;
  for (double x : w) total_w += x;
  double lo = *std::min_element(y.begin(), y.end()) - M / total_w;  // mass(lo) >= M
  double hi = *std::max_element(y.begin(), y.end());                // mass(hi) = 0
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_at(mid) >= M ? lo : hi) = mid;
  }
  std::vector<double> v(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) v[i] = std::max(0.0, y[i] - lo);
  return GridDensity(grid, std::move(v)).with_mass(M);
}

double kkt_dev(const GridDensity& rho, const Eos& eos, double tol) {
  return kkt_report(rho, eos, tol).deviation;
}

}  // namespace

GridPtr default_grid(double r_max, std::size_t intervals) {
  return make_grid(RadialGrid::uniform_nodal(r_max, intervals + intervals % 2));
}

GridDensity uniform_ball(const GridPtr& grid, double M, double radius) {
  if (!(M > 0.0) || !(radius > 0.0)) throw DomainError("uniform ball needs M > 0 and radius > 0");
  const auto r = grid->r();
  std::vector<double> v(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= radius * (1.0 + 1e-12)) v[i] = 1.0;
  }
  return GridDensity(grid, std::move(v)).with_mass(M);
}

KktReport kkt_report(const GridDensity& rho, const Eos& eos, double rho_tol) {
  const auto q = first_variation(rho, eos);
  const double rho_max = *std::max_element(rho.values().begin(), rho.values().end());
  const double cut = rho_tol * rho_max;
  std::vector<double> on;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > cut) on.push_back(q[i]);
  }
  KktReport rep;
  rep.support_nodes = on.size();
  if (on.empty()) return rep;
  auto mid = on.begin() + std::ptrdiff_t(on.size() / 2);
  std::nth_element(on.begin(), mid, on.end());
  rep.E0_hat = *mid;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > cut) {
      rep.deviation = std::max(rep.deviation, std::abs(q[i] - rep.E0_hat));
    } else {
      rep.min_slack = std::min(rep.min_slack, q[i] - rep.E0_hat);
    }
  }
  return rep;
}

MinimizeTrace minimize_hr(const Eos& eos, double M, const GridDensity& init,
                          const MinimizeOptions& opts) {
  if (!(M > 0.0)) throw DomainError("minimize_hr: mass must be > 0");
  const GridPtr& grid = init.grid();
  if (grid->kind() != GridKind::nodal) throw PreconditionError("minimize_hr needs a nodal grid");
  if (std::abs(init.mass() - M) > 1e-8 * M) {
    throw PreconditionError("minimize_hr: initial density has mass " +
                            std::to_string(init.mass()) + ", expected " + std::to_string(M));
  }

  GridDensity rho = init.with_mass(M);
  double hr = energetics::reduced_energy(rho, eos);
  double step = opts.initial_step;
  if (!(step > 0.0)) {
    double max_phi2 = 0.0;
    for (double x : rho.values()) {
      if (x > 0.0) max_phi2 = std::max(max_phi2, eos.phi_second(x));
    }
    const double rm = grid->r_max();
    step = 1.0 / (max_phi2 + 4.0 * std::numbers::pi * rm * rm);
  }

  MinimizeTrace trace{{}, rho, false, false, "max_iters"};
  trace.entries.push_back({0, hr, rho.mass(), kkt_dev(rho, eos, opts.support_tol), step});

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const auto g = first_variation(rho, eos);
    bool accepted = false;
    double hr_new = hr;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      std::vector<double> y(rho.size());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = rho[i] - step * g[i];
      GridDensity cand = project(grid, y, M);
      const double h = energetics::reduced_energy(cand, eos);
      if (h <= hr) {
        rho = std::move(cand);
        hr_new = h;
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      trace.stagnated = true;
      trace.status = "stagnated";
      break;
    }
    const double dh = hr - hr_new;
    hr = hr_new;
    trace.entries.push_back({it, hr, rho.mass(), kkt_dev(rho, eos, opts.support_tol), step});
    step *= opts.grow;
    if (dh <= opts.threshold * std::max(1.0, std::abs(hr))) {
      trace.converged = true;
      trace.status = "converged";
      break;
    }
  }
  trace.final_density = rho;
  return trace;
}

}  // namespace polystar::varmin
