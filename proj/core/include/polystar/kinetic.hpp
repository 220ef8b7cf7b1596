#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polystar/eos.hpp"
#include "polystar/grid.hpp"
#include "polystar/steady.hpp"

namespace polystar::kinetic {

/// Isotropic microscopic ansatz f = phi(E), E = s^2/2 + V.
///  - polytropic: phi(E) = C (E0 - E)_+^k, with Casimir integrand
///    Q(f) = k/(k+1) C^(-1/k) f^(1+1/k);
///  - general: any non-increasing phi supported on E < E0 (densities and
///    pressures by quadrature only).
struct KineticAnsatz {
  enum class Kind { polytropic, general };
  Kind kind = Kind::polytropic;
  double k = 1.0;
  double C = 1.0;
  double E0 = 0.0;
  std::function<double(double)> phi_fn;

  static KineticAnsatz polytropic(double k, double C = 1.0, double E0 = 0.0);
  static KineticAnsatz general(std::function<double(double)> phi, double E0);

  double phi(double E) const;
  /// Polytropic only: Q, Q' inverse and the conjugate Q*.
  double Q(double f) const;
  double Q_star(double mu) const;
  /// n = k + 3/2.
  double polytropic_index() const { return k + 1.5; }
};

/// Throws ConfigError unless 0 < k < 3/2 (the range where the reduction to
/// an admissible fluid model holds).
void require_admissible(const KineticAnsatz& a);

/// rho = 2^(5/2) pi int_V^inf phi(E) (E - V)^(1/2) dE. Closed form through
/// the Beta function for the polytropic kind (k >= 0); tanh-sinh quadrature
/// otherwise.
double g_phi(const KineticAnsatz& a, double V);
/// p = 2^(7/2)/3 pi int_V^inf phi(E) (E - V)^(3/2) dE.
double h_phi(const KineticAnsatz& a, double V);
/// Quadrature versions, valid for both kinds (oracles for the closed forms).
double g_phi_quadrature(const KineticAnsatz& a, double V);
double h_phi_quadrature(const KineticAnsatz& a, double V);

/// The fluid equation of state p = h_phi(g_phi^-1(rho)): a polytrope with
/// gamma = 1 + 1/(k + 3/2). Requires an admissible polytropic ansatz.
Eos induced_eos(const KineticAnsatz& a);

/// Sampled convex function h on x >= 0 and its conjugate
/// h*(lambda) = sup_x (lambda x - h(x)).
struct ConjugatePair {
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> lambda;
  std::vector<double> h_star;
  std::vector<double> argmax;  ///< maximizing x for each lambda
};

/// Monotone argmax sweep (the maximizer is non-decreasing in lambda for
/// convex h) refined by the vertex of the local quadratic through the
/// three neighbouring samples. x must be increasing and start at 0;
/// lambda must be increasing. Throws DomainError if h fails the discrete
/// convexity test.
ConjugatePair legendre(std::vector<double> x, std::vector<double> h, std::vector<double> lambda);

struct PhiFromQ {
  std::vector<double> lambda;
  std::vector<double> phi_star;  ///< Phi*(lambda)
  std::vector<double> rho;
  std::vector<double> phi;       ///< Phi(rho) recovered by conjugating back
  double exponent = 0.0;         ///< fitted power of Phi (= 1 + 1/n)
  double index = 0.0;            ///< n
};

/// Phi*(lambda) = 4 pi int_0^sqrt(2 lambda) Q*(lambda - s^2/2) s^2 ds with
/// Q* from `legendre` on (f, Q) and log-log interpolation between
/// samples. Phi is recovered on `rho_grid` and its exponent fitted over the
/// middle half of that grid (in log).
PhiFromQ phi_from_q(const std::vector<double>& f, const std::vector<double>& Q,
                    const std::vector<double>& lambda_grid, const std::vector<double>& rho_grid);

/// Least-squares slope and prefactor of log y against log x.
struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;
};
PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y);

/// Isotropic phase-space density f(r, s) on the radial nodes of a profile.
/// At each radius the speed nodes are s = s_cut sin(theta) with Simpson
/// weights in theta (4 pi s^2 included), followed by zero-valued nodes up
/// to 1.05 s_cut, where s_cut = sqrt(2 (E0 - V0))_+.
struct PhaseSpace {
  GridPtr grid;
  double E0 = 0.0;
  std::vector<double> s_cut;
  std::vector<std::vector<double>> s;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> f;

  /// rho_f(r_i) = int f dv.
  GridDensity density() const;
};

struct LiftOptions {
  std::size_t theta_intervals = 96;  ///< even
  std::size_t tail_nodes = 4;        ///< zero nodes beyond s_cut
  double tolerance = 1e-6;           ///< relative, for int f0 dv = rho0
};

/// f0 = phi(E) with the cutoff E0 of the profile. Throws PreconditionError
/// naming the worst node if int f0 dv differs from rho0.
PhaseSpace lift_minimizer(const steady::RadialProfile& profile, const KineticAnsatz& a,
                          const LiftOptions& opts = {});

/// f = psi(s^2/2 + V0) on the nodes of `base` for an arbitrary psi.
PhaseSpace isotropic_state(const PhaseSpace& base, const steady::RadialProfile& profile,
                           const std::function<double(double)>& psi);

/// H_C(f) = int int Q(f) + 1/2 int int s^2 f + E_pot(rho_f).
double casimir_energy(const PhaseSpace& f, const KineticAnsatz& a);

/// Seeded isotropic trials psi(E) = C' (E0 - E)_+^k' with random C', k'.
std::vector<PhaseSpace> isotropic_trials(const PhaseSpace& base,
                                         const steady::RadialProfile& profile,
                                         const KineticAnsatz& a, std::size_t count,
                                         std::uint64_t seed);

/// max |p0' + rho0 V0'| with p0 = h_phi(V0), differenced at the midpoints
/// of grid intervals with both ends in the support (rho0 averaged there).
/// Second order; vacuum intervals contribute exactly 0.
double tov_residual(const steady::RadialProfile& profile, const KineticAnsatz& a);

}  // namespace polystar::kinetic
