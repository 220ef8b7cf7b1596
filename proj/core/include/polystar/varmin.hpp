#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "polystar/eos.hpp"
#include "polystar/grid.hpp"

namespace polystar::varmin {

struct MinimizeOptions {
  std::size_t max_iters = 20000;
  /// Initial step; <= 0 selects 1/(max Phi''(init) + 4 pi R_max^2).
  double initial_step = 0.0;
  double grow = 1.5;    ///< step factor after an accepted step
  double shrink = 0.5;  ///< step factor per backtrack
  int max_backtracks = 60;
  double mass_tol = 1e-12;   ///< relative
  double threshold = 1e-13;  ///< stop when |Delta H_r| <= threshold * max(1, |H_r|)
  /// Densities below this fraction of the current maximum count as vacuum
  /// in the KKT diagnostic.
  double support_tol = 1e-8;
};

struct TraceEntry {
  std::size_t iter = 0;
  double hr = 0.0;
  double mass = 0.0;
  double kkt_dev = 0.0;
  double step = 0.0;
};

struct MinimizeTrace {
  std::vector<TraceEntry> entries;  ///< entry 0 is the initial state
  GridDensity final_density;
  bool converged = false;   ///< threshold reached
  bool stagnated = false;   ///< backtracking exhausted; final_density is the best iterate
  std::string status;
};

/// Projected gradient descent for H_r over {rho >= 0, int rho = M} on the
/// grid of `init`. The step uses the first variation Phi'(rho) + V_rho and
/// the Euclidean projection (y - mu)_+ with the shift mu set by the mass.
/// Throws DomainError if M <= 0 and PreconditionError if init has the
/// wrong mass or lives on a cell grid.
MinimizeTrace minimize_hr(const Eos& eos, double M, const GridDensity& init,
                          const MinimizeOptions& opts = {});

struct KktReport {
  double E0_hat = 0.0;        ///< median of Phi'(rho) + V over the support
  double deviation = 0.0;     ///< max |Phi'(rho) + V - E0_hat| on the support
  double min_slack = 0.0;     ///< min (Phi'(rho) + V - E0_hat) off the support
  std::size_t support_nodes = 0;
};

/// Support is {rho > rho_tol * max rho}.
KktReport kkt_report(const GridDensity& rho, const Eos& eos, double rho_tol = 1e-8);

/// Constant density of mass M on [0, radius].
GridDensity uniform_ball(const GridPtr& grid, double M, double radius);

/// Uniform nodal grid with `intervals` intervals on [0, r_max].
GridPtr default_grid(double r_max, std::size_t intervals = 512);

}  // namespace polystar::varmin
