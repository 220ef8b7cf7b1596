#pragma once

#include <cstdint>
#include <vector>

#include "polystar/eos.hpp"
#include "polystar/grid.hpp"
#include "polystar/steady.hpp"

namespace polystar::energetics {

/// int Phi(rho) dx. Throws DomainError if the integral is not finite.
double internal_energy(const GridDensity& rho, const Eos& eos);

/// H_r(rho) = int Phi(rho) + E_pot(rho), with E_pot in the field form.
double reduced_energy(const GridDensity& rho, const Eos& eos);

/// 1/2 int u^2 rho dx.
double kinetic_energy(const GridDensity& rho, const FlowField& u);

/// H(rho, u) = H_r(rho) + 1/2 int u^2 rho.
double total_energy(const GridDensity& rho, const FlowField& u, const Eos& eos);

/// d(rho, rho0) = int [Phi(rho) - Phi(rho0) + (V0 - E0)(rho - rho0)].
/// `rho` is resampled onto the profile grid when the grids differ.
/// Throws PreconditionError unless |M(rho) - M| <= 1e-8 M.
double distance_d(const GridDensity& rho, const steady::RadialProfile& profile);

struct StabilityMetric {
  double d_part = 0.0;
  double field_part = 0.0;    ///< (1/8 pi) ||grad V_rho - grad V0||^2
  double kinetic_part = 0.0;  ///< 1/2 int u^2 rho
  double total = 0.0;
};

StabilityMetric stability_metric(const GridDensity& rho, const FlowField& u,
                                 const steady::RadialProfile& profile);

/// |H(rho,u) - H(rho0,0) - (d - field/8pi + kinetic)|. The identity is exact,
/// so the result measures quadrature error only.
double expansion_identity_check(const GridDensity& rho, const FlowField& u,
                                const steady::RadialProfile& profile);

struct QuadraticBound {
  bool holds = false;
  double d = 0.0;      ///< d (or its restriction)
  double bound = 0.0;  ///< c_bound * int (rho - rho0)^2 over the same set
};

/// Checks d >= c_bound ||rho - rho0||^2 - 1e-10. With rho_min > 0 both
/// sides are integrated only where rho and rho0 are at least rho_min (the
/// range on which inf Phi'' is known).
QuadraticBound quadratic_lower_bound_check(const GridDensity& rho,
                                           const steady::RadialProfile& profile, double c_bound,
                                           double rho_min = 0.0);

/// Reproducible trial densities around a profile:
///   rho = rho0 (1 + A b(r)) [+ exterior bump], clipped at 0, renormalized to M,
/// where b is a sum of `bumps` Gaussians with max |b| = 1 and |A| <= amplitude.
struct TrialOptions {
  int bumps = 3;
  double amplitude = 0.5;
  /// Fraction of trials that also receive mass outside the support.
  double exterior_fraction = 0.0;
  double exterior_amplitude = 0.05;  ///< relative to the central density
};

std::vector<GridDensity> trial_states(const steady::RadialProfile& profile, std::size_t count,
                                      std::uint64_t seed, const TrialOptions& opts = {});

}  // namespace polystar::energetics
