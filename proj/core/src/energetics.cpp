#include "polystar/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "polystar/error.hpp"
#include "polystar/gravity.hpp"

namespace polystar::energetics {

namespace {

void require_equal_mass(double m, double m0) {
  if (std::abs(m - m0) > 1e-8 * std::abs(m0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mass mismatch: trial density has M = " << m << ", reference has M = " << m0;
    throw PreconditionError(msg.str());
  }
}

GridDensity on_profile_grid(const GridDensity& rho, const steady::RadialProfile& p) {
  return gravity::on_grid(rho, p.grid);
}

}  // namespace

double internal_energy(const GridDensity& rho, const Eos& eos) {
  const auto w = rho.grid()->volume_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += w[i] * eos.phi(rho[i]);
  if (!std::isfinite(sum)) throw DomainError("int Phi(rho) is not finite");
  return sum;
}

double reduced_energy(const GridDensity& rho, const Eos& eos) {
  return internal_energy(rho, eos) + gravity::potential_energy(rho);
}

double kinetic_energy(const GridDensity& rho, const FlowField& u) {
  if (!rho.grid()->same_as(*u.grid())) throw PreconditionError("density and flow grids differ");
  const auto w = rho.grid()->volume_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += 0.5 * w[i] * u[i] * u[i] * rho[i];
  return sum;
}

double total_energy(const GridDensity& rho, const FlowField& u, const Eos& eos) {
  return reduced_energy(rho, eos) + kinetic_energy(rho, u);
}

double distance_d(const GridDensity& rho_in, const steady::RadialProfile& p) {
  const GridDensity rho = on_profile_grid(rho_in, p);
  require_equal_mass(rho.mass(), p.density().mass());
  const auto w = p.grid->volume_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    // Bregman gap of Phi plus the Euler-Lagrange defect times the
    // perturbation; algebraically the defining integrand, but free of
    // the cancellation between Phi(rho) and Phi(rho0).
    const double r0 = p.rho0[i];
    const double dphi0 = p.eos.phi_prime(r0);
    const double delta = rho[i] - r0;
    const double bregman = p.eos.phi(rho[i]) - p.eos.phi(r0) - dphi0 * delta;
    sum += w[i] * (bregman + (p.V0[i] - p.E0 + dphi0) * delta);
  }
  return sum;
}

StabilityMetric stability_metric(const GridDensity& rho_in, const FlowField& u,
                                 const steady::RadialProfile& p) {
  const GridDensity rho = on_profile_grid(rho_in, p);
  StabilityMetric m;
  m.d_part = distance_d(rho, p);
  m.field_part = gravity::field_norm_sq(rho, p.density(), false) / (8.0 * std::numbers::pi);
  if (u.grid()->same_as(*p.grid)) {
    m.kinetic_part = kinetic_energy(rho, u);
  } else {
    m.kinetic_part = kinetic_energy(rho_in, u);
  }
  m.total = m.d_part + m.field_part + m.kinetic_part;
  return m;
}

double expansion_identity_check(const GridDensity& rho_in, const FlowField& u,
                                const steady::RadialProfile& p) {
  const GridDensity rho = on_profile_grid(rho_in, p);
  const GridDensity rho0 = p.density();
  require_equal_mass(rho.mass(), rho0.mass());
  const FlowField uu = u.grid()->same_as(*p.grid) ? u : FlowField::zero(p.grid);
  const double lhs = total_energy(rho, uu, p.eos) - reduced_energy(rho0, p.eos);
  const StabilityMetric m = stability_metric(rho, uu, p);
  const double rhs = m.d_part - m.field_part + m.kinetic_part;
  return std::abs(lhs - rhs);
}

QuadraticBound quadratic_lower_bound_check(const GridDensity& rho_in,
                                           const steady::RadialProfile& p, double c_bound,
                                           double rho_min) {
  const GridDensity rho = on_profile_grid(rho_in, p);
  QuadraticBound out;
  if (rho_min <= 0.0) {
    out.d = distance_d(rho, p);
  } else {
    require_equal_mass(rho.mass(), p.density().mass());
  }
  const auto w = p.grid->volume_weights();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r0 = p.rho0[i];
    const double delta = rho[i] - r0;
    if (rho_min > 0.0) {
      if (std::min(rho[i], r0) < rho_min) continue;
      const double dphi0 = p.eos.phi_prime(r0);
      out.d += w[i] * (p.eos.phi(rho[i]) - p.eos.phi(r0) - dphi0 * delta +
                       (p.V0[i] - p.E0 + dphi0) * delta);
    }
    out.bound += w[i] * c_bound * delta * delta;
  }
  out.holds = out.d >= out.bound - 1e-10;
  return out;
}

std::vector<GridDensity> trial_states(const steady::RadialProfile& p, std::size_t count,
                                      std::uint64_t seed, const TrialOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto r = p.grid->r();
  const double R = p.R_support;
  const double r_hi = std::min(r.back(), 1.5 * R);
  const double rho_c = *std::max_element(p.rho0.begin(), p.rho0.end());
  const double M = p.density().mass();

  std::vector<GridDensity> out;
  out.reserve(count);
  std::vector<double> b(r.size());
  for (std::size_t t = 0; t < count; ++t) {
    std::fill(b.begin(), b.end(), 0.0);
    for (int j = 0; j < opts.bumps; ++j) {
      const double centre = R * unit(rng);
      const double width = R * (0.05 + 0.25 * unit(rng));
      const double height = 2.0 * unit(rng) - 1.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = (r[i] - centre) / width;
        b[i] += height * std::exp(-0.5 * x * x);
      }
    }
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    const double A = opts.amplitude * (2.0 * unit(rng) - 1.0) / (bmax > 0.0 ? bmax : 1.0);
    const bool exterior = unit(rng) < opts.exterior_fraction && r_hi > R;
    const double ext_centre = R + (r_hi - R) * (0.25 + 0.5 * unit(rng));
    const double ext_width = 0.1 * (r_hi - R);
    const double ext_height = opts.exterior_amplitude * rho_c * unit(rng);

    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      v[i] = std::max(0.0, p.rho0[i] * (1.0 + A * b[i]));
      if (exterior && r[i] > R) {
        const double x = (r[i] - ext_centre) / ext_width;
        v[i] += ext_height * std::exp(-0.5 * x * x);
      }
    }
    out.push_back(GridDensity(p.grid, std::move(v)).with_mass(M));
  }
  return out;
}

}  // namespace polystar::energetics
