#pragma once

#include <vector>

#include "polystar/grid.hpp"

namespace polystar::gravity {

/// Enclosed mass m(r) = 4 pi int_0^r s^2 rho(s) ds at every sample point.
/// On cell grids the value at a cell centre includes the inner part of that
/// cell.
struct MassProfile {
  std::vector<double> m;
  double total = 0.0;
};

MassProfile enclosed_mass(const GridDensity& rho);

/// Induced potential V(r) = -4 pi [ (1/r) int_0^r s^2 rho ds + int_r^inf s rho ds ].
/// Nonpositive, non-decreasing, V -> -M/r beyond the grid.
RadialField potential_of(const GridDensity& rho);

/// Radial field V'(r) = m(r)/r^2, zero at the centre.
RadialField field_of(const GridDensity& rho);

/// Cell grids only: enclosed mass and field at the size()+1 cell faces.
struct FaceField {
  std::vector<double> mass;  ///< m at faces
  std::vector<double> g;     ///< m/r^2 at faces, g[0] = 0
};
FaceField face_field(const GridDensity& rho);

/// || grad V_a - grad V_b ||_2^2 = int_0^inf (V_a' - V_b')^2 4 pi r^2 dr,
/// including the analytic exterior tail 4 pi (M_a - M_b)^2 / R_max.
/// Densities on different grids are resampled onto the grid of `a` (monotone
/// cubic) unless allow_resample is false, in which case PreconditionError.
double field_norm_sq(const GridDensity& a, const GridDensity& b, bool allow_resample = true);

/// The three evaluations of the potential energy:
///   pair      -1/2 int int rho rho/|x-y|  = -int m(r) rho(r) 4 pi r dr
///   potential  1/2 int rho V
///   field     -1/(8 pi) int |grad V|^2
struct PotentialEnergyForms {
  double pair = 0.0;
  double potential = 0.0;
  double field = 0.0;
};
PotentialEnergyForms potential_energy_forms(const GridDensity& rho);

/// Potential energy in the field form (the best conditioned of the three).
double potential_energy(const GridDensity& rho);

/// Returns `rho` on `target` (resampled when the grids differ).
GridDensity on_grid(const GridDensity& rho, const GridPtr& target);

}  // namespace polystar::gravity
