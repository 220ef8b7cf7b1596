#pragma once

#include <functional>
#include <memory>
#include <string>

namespace polystar {

enum class EosKind { polytrope, generalized };

/// Declared growth exponents of a generalized equation of state:
/// P'(tau) ~ tau^(1/n_large) for large tau and ~ tau^(1/n_small) for small tau.
struct GrowthExponents {
  double n_large = 1.0;
  double n_small = 1.0;
};

/// Barotropic equation of state p = P(rho) together with the convex energy
/// density Phi linked to it by P'(rho) = rho Phi''(rho), Phi(0) = Phi'(0) = 0.
///
/// Polytropes P = c rho^gamma use closed forms throughout. A generalized
/// equation of state is given by its derivative P'; Phi', Phi and P are then
/// obtained by adaptive quadrature and Phi'^-1 by a bracketed root find.
///
/// Immutable; safe to share between threads.
class Eos {
 public:
  /// Requires c > 0 and gamma > 1. Whether gamma > 4/3 holds is reported by
  /// validate_assumptions, since sub-critical polytropes are legitimate test
  /// inputs (e.g. to exercise non-compact shooting).
  static Eos polytrope(double c, double gamma);

  /// General barotropic law from its derivative P'(tau) > 0.
  static Eos generalized(std::function<double(double)> pressure_prime,
                         GrowthExponents declared, std::string name = "generalized");

  /// Built-in two-term law P = c1 rho^gamma1 + c2 rho^gamma2, whose small-
  /// and large-density behaviour differ.
  static Eos two_power(double c1, double gamma1, double c2, double gamma2);

  EosKind kind() const { return kind_; }
  bool is_polytrope() const { return kind_ == EosKind::polytrope; }
  const std::string& name() const { return name_; }

  /// Polytropic coefficient and exponent (only meaningful for polytropes).
  double c() const { return c_; }
  double gamma() const { return gamma_; }
  /// Polytropic index n = 1/(gamma - 1).
  double polytropic_index() const { return 1.0 / (gamma_ - 1.0); }
  const GrowthExponents& declared_exponents() const { return declared_; }

  double phi(double rho) const;
  double phi_prime(double rho) const;
  /// Phi''(rho) = P'(rho)/rho.
  double phi_second(double rho) const;
  /// Returns 0 for z <= 0, else the unique rho with Phi'(rho) = z.
  double phi_prime_inv(double z) const;

  double pressure(double rho) const;
  double pressure_prime(double rho) const;
  double sound_speed(double rho) const;

 private:
  Eos() = default;
  void check_density(double rho) const;

  EosKind kind_ = EosKind::polytrope;
  std::string name_;
  double c_ = 0.0;
  double gamma_ = 0.0;
  GrowthExponents declared_{};
  std::function<double(double)> pressure_prime_;
  /// Generalized kind: Phi' at log-spaced densities, so that Phi'(rho)
  /// needs only one short Gauss-Legendre pass from the nearest node below.
  std::shared_ptr<const std::vector<double>> phi_prime_nodes_;
  double phi_prime_direct(double rho) const;
};

/// Log-log power-law fit Phi ~ C rho^exponent over one density window.
struct PowerLawFit {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double exponent = 0.0;  ///< fitted 1 + 1/n
  double constant = 0.0;  ///< fitted C
  double index = 0.0;     ///< n = 1/(exponent - 1)
  bool admissible = false;  ///< 0 < n < 3
};

struct AssumptionReport {
  bool pressure_increasing = false;   ///< P' > 0 on every sample
  bool strictly_convex = false;       ///< discrete second derivative of Phi > 0
  double min_second_derivative = 0.0;
  PowerLawFit large;                  ///< growth bound for large rho
  PowerLawFit small;                  ///< growth bound for small rho
  bool pass() const {
    return pressure_increasing && strictly_convex && large.admissible && small.admissible;
  }
};

struct SampleRange {
  double small_lo = 1e-6;
  double small_hi = 1e-2;
  double large_lo = 1e2;
  double large_hi = 1e6;
  int samples_per_window = 41;
};

/// Checks strict convexity of Phi and fits the small/large density growth
/// exponents. Report only, never throws for a valid Eos.
AssumptionReport validate_assumptions(const Eos& eos, const SampleRange& range = {});

}  // namespace polystar
