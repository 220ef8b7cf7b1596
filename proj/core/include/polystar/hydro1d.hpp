#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "polystar/energetics.hpp"
#include "polystar/eos.hpp"
#include "polystar/grid.hpp"
#include "polystar/steady.hpp"

namespace polystar::hydro1d {

/// spherical: radial Euler-Poisson with monopole self-gravity.
/// slab: Cartesian 1-D Euler without gravity (Riemann-solver test mode).
enum class Geometry { spherical, slab };

/// Cell averages of density and momentum density on a cell grid.
struct HydroState {
  GridPtr grid;
  std::vector<double> rho;
  std::vector<double> mom;  ///< rho u
  double t = 0.0;
  Eos eos;
  Geometry geometry = Geometry::spherical;
  double rho_floor = 0.0;
  double outflow = 0.0;      ///< mass that left through the outer boundary so far
  double floor_added = 0.0;  ///< mass created by the density floor so far

  std::vector<double> velocity() const;
  /// Total mass sum vol_i rho_i (slab: sum dx_i rho_i).
  double mass() const;
  GridDensity density() const { return GridDensity(grid, rho); }
  FlowField flow() const { return FlowField(grid, velocity()); }
};

struct SolverOptions {
  /// Cells with rho <= vacuum_factor * rho_floor are vacuum: they carry no
  /// momentum and are never extrapolated from.
  double vacuum_factor = 10.0;
  bool second_order = true;
};

/// dt = cfl * min dr / (|u| + c_s). Throws PreconditionError on an empty
/// state or cfl outside (0, 1].
double cfl_dt(const HydroState& state, double cfl);

/// One Heun (SSP-RK2) step of the finite-volume scheme. Throws NumericError
/// if a non-finite value appears.
HydroState step(const HydroState& state, double dt, const SolverOptions& opts = {});

/// Static star that the discrete scheme preserves exactly: the enthalpy is
/// marched outward with the face fields of the scheme and the cell size is
/// tuned so that the surface falls on face n_cells / outer_factor. The
/// returned profile lives on the cell grid (rho0 = 0 in vacuum cells).
steady::RadialProfile discrete_equilibrium(const Eos& eos, double kappa, std::size_t n_cells,
                                           double outer_factor = 2.0);

/// Initial state equal to a profile on its cell grid, vacuum at the floor.
HydroState from_profile(const steady::RadialProfile& profile,
                        Geometry geometry = Geometry::spherical);

/// Sum of dr / c_s over the cells inside the support.
double sound_crossing_time(const steady::RadialProfile& profile);

enum class PerturbationKind { none, density_bump, velocity_kick, contraction };

PerturbationKind parse_perturbation(const std::string& name);
std::string to_string(PerturbationKind kind);

struct Perturbed {
  HydroState state;
  energetics::StabilityMetric initial_metric;
};

/// density_bump: rho0 (1 + A exp(-(r - R/2)^2 / (2 (R/10)^2))), renormalized;
/// velocity_kick: u = A r / R inside the support;
/// contraction: lambda^3 rho0(lambda r) with lambda = 1 + A, renormalized.
/// Throws DomainError if the amplitude would make the density negative.
Perturbed perturb(const steady::RadialProfile& profile, PerturbationKind kind, double amplitude);

struct LedgerEntry {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double rho_max = 0.0;
  double rho_min = 0.0;
  double outflow = 0.0;
  double mass_drift = 0.0;    ///< |M(t) + outflow - M(0)| / M(0)
  double energy_drift = 0.0;  ///< |H(t) - H(0)| / |H(0)|
};

struct MetricEntry {
  double t = 0.0;
  energetics::StabilityMetric metric;
};

struct RunOptions {
  double t_end = 1.0;
  double output_interval = 0.1;
  double cfl = 0.4;
  double drift_bound = 1e-3;
  std::size_t max_steps = 10'000'000;
  SolverOptions solver;
};

struct RunResult {
  HydroState final_state;
  std::vector<LedgerEntry> ledger;
  std::vector<MetricEntry> metrics;
  std::size_t steps = 0;
  double mass_drift = 0.0;    ///< max over the ledger
  double energy_drift = 0.0;  ///< max over the ledger
  double max_metric_ratio = 0.0;
  double max_metric = 0.0;
  bool conservation_violated = false;  ///< energy_drift > drift_bound
  bool aborted = false;
  std::string abort_reason;
};

/// Advances to t_end, recording the ledger and the stability metric against
/// `reference` at every output time. Errors inside a step end the run with
/// aborted = true and the last good state.
RunResult run(const HydroState& initial, const steady::RadialProfile& reference,
              const RunOptions& opts);

}  // namespace polystar::hydro1d
