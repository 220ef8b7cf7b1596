#pragma once

#include <functional>
#include <vector>

#include "polystar/eos.hpp"
#include "polystar/grid.hpp"

namespace polystar::steady {

/// Static star: density rho0 and potential V0 sampled on a uniform nodal
/// grid whose node number `interior_cells` sits exactly on the surface.
///
/// Invariants: rho0 = (Phi')^-1((E0 - V0)_+) at every node, rho0
/// non-increasing, V0 non-decreasing, V0 = -M/r outside the support and
/// E0 = -M/R_support.
struct RadialProfile {
  GridPtr grid;
  std::vector<double> rho0;
  std::vector<double> V0;
  double E0 = 0.0;
  double R_support = 0.0;
  double M = 0.0;
  double kappa = 0.0;  ///< central value of z = E0 - V0
  Eos eos;

  GridDensity density() const { return GridDensity(grid, rho0); }
  RadialField potential() const;
  /// z = E0 - V0 at node i.
  double z(std::size_t i) const { return E0 - V0[i]; }
};

struct ShootOptions {
  std::size_t interior_cells = 1024;  ///< grid intervals on [0, R]; rounded up to even
  double outer_factor = 2.0;          ///< R_max / R
  double steps_per_length = 4000.0;   ///< RK4 steps per characteristic length near the centre
  double r_cap_factor = 1e4;          ///< give up beyond this many characteristic lengths
};

/// Right-hand side density g(z) of the radial semilinear Poisson problem
///   z'' + (2/r) z' = -4 pi g(z),  z(0) = kappa,  z'(0) = 0;
/// g must vanish for z <= 0.
using DensityOfZ = std::function<double(double)>;

/// Integrates the semilinear problem outward to the first zero of z and
/// samples the result. `eos` is stored on the profile and supplies g when
/// the overload without `g` is used (g = (Phi')^-1).
/// Throws DomainError for kappa <= 0 and InfiniteRadiusError if z stays
/// positive up to the radius cap.
RadialProfile shoot(const Eos& eos, double kappa, const ShootOptions& opts = {});
RadialProfile shoot_with_source(const Eos& eos, const DensityOfZ& g, double kappa,
                                const ShootOptions& opts = {});

/// Surface radius and mass only (no sampling), for scans.
struct ShootSummary {
  double kappa = 0.0;
  double R = 0.0;
  double M = 0.0;
};
ShootSummary shoot_summary(const Eos& eos, double kappa, const ShootOptions& opts = {});

/// Polytropes only: z_lambda(r) = lambda z(lambda^((n-1)/2) r), giving
/// M_lambda = lambda^((3-n)/2) M and R_lambda = lambda^(-(n-1)/2) R.
RadialProfile scaling_family(const RadialProfile& profile, double lambda);

struct MassScanEntry {
  double kappa = 0.0;
  double mass = 0.0;
  bool ok = false;  ///< false if shooting failed at this kappa
};

struct MassMatch {
  RadialProfile profile;
  std::vector<MassScanEntry> scan;                    ///< empty for polytropes
  std::vector<std::pair<double, double>> brackets;    ///< kappa intervals containing the target
};

/// Finds the star with the prescribed mass. Polytropes use the scaling
/// family; otherwise M(kappa) is scanned on kappa = 2^j and the smallest
/// bracket is refined. |M - M_target| / M_target <= 1e-8 on return.
MassMatch match_mass_detailed(const Eos& eos, double M_target, const ShootOptions& opts = {});
RadialProfile match_mass(const Eos& eos, double M_target, const ShootOptions& opts = {});

struct ResidualReport {
  double support = 0.0;   ///< max |Phi'(rho0) + V0 - E0| where rho0 > 0
  double exterior = 0.0;  ///< max (E0 - V0)_+ where rho0 = 0
  double max() const { return support > exterior ? support : exterior; }
};

ResidualReport euler_lagrange_residual(const RadialProfile& profile);

/// max |p0' + rho0 V0'| over interior support nodes, central differences.
double static_euler_residual(const RadialProfile& profile);

}  // namespace polystar::steady
