#include "polystar/eos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "polystar/error.hpp"
#include "polystar/quadrature.hpp"

namespace polystar {

namespace {

constexpr double kAdmissibleSlack = 1e-6;

// Phi' table for generalized laws: rho_k = 10^(kTableLo + k / kTablePerDecade).
constexpr double kTableLo = -10.0;
constexpr int kTablePerDecade = 24;
constexpr int kTableNodes = 20 * kTablePerDecade + 1;

double table_rho(int k) { return std::pow(10.0, kTableLo + double(k) / kTablePerDecade); }

quad::AdaptiveOptions eos_quadrature() {
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-13;
  return opts;
}

template <class F>
double integrate_or_config_error(F&& f, double a, double b) {
  try {
    return quad::integrate_singular(f, a, b, eos_quadrature());
  } catch (const NumericError& e) {
    throw ConfigError(std::string("P'(tau)/tau is not integrable near 0: ") + e.what());
  }
}

}  // namespace

Eos Eos::polytrope(double c, double gamma) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("polytrope coefficient c must be > 0");
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw DomainError("polytrope exponent gamma must be > 1");
  }
  Eos eos;
  eos.kind_ = EosKind::polytrope;
  eos.c_ = c;
  eos.gamma_ = gamma;
  eos.declared_ = {1.0 / (gamma - 1.0), 1.0 / (gamma - 1.0)};
  std::ostringstream name;
  name << "polytrope(c=" << c << ", gamma=" << gamma << ")";
  eos.name_ = name.str();
  return eos;
}

Eos Eos::generalized(std::function<double(double)> pressure_prime, GrowthExponents declared,
                     std::string name) {
  if (!pressure_prime) throw ConfigError("generalized equation of state needs P'");
  if (!(declared.n_large > 0.0 && declared.n_small > 0.0)) {
    throw ConfigError("declared growth exponents must be positive");
  }
  Eos eos;
  eos.kind_ = EosKind::generalized;
  eos.declared_ = declared;
  eos.pressure_prime_ = std::move(pressure_prime);
  eos.name_ = std::move(name);
  try {
    auto nodes = std::make_shared<std::vector<double>>(kTableNodes);
    (*nodes)[0] = eos.phi_prime_direct(table_rho(0));
    const auto& pp = eos.pressure_prime_;
    for (int k = 1; k < kTableNodes; ++k) {
      (*nodes)[k] = (*nodes)[k - 1] + boost::math::quadrature::gauss<double, 15>::integrate(
                                          [&](double t) { return pp(t) / t; }, table_rho(k - 1),
                                          table_rho(k));
      if (!std::isfinite((*nodes)[k])) throw ConfigError("P'(tau)/tau is not finite");
    }
    eos.phi_prime_nodes_ = std::move(nodes);
  } catch (const ConfigError&) {
    // Left without a table: every call reports the problem itself.
  }
  return eos;
}

Eos Eos::two_power(double c1, double gamma1, double c2, double gamma2) {
  if (!(c1 > 0.0 && c2 > 0.0 && gamma1 > 1.0 && gamma2 > 1.0)) {
    throw DomainError("two_power needs positive coefficients and exponents > 1");
  }
  const double g_lo = std::min(gamma1, gamma2);
  const double g_hi = std::max(gamma1, gamma2);
  std::ostringstream name;
  name << "two_power(c1=" << c1 << ", gamma1=" << gamma1 << ", c2=" << c2
       << ", gamma2=" << gamma2 << ")";
  return generalized(
      [=](double t) {
        return c1 * gamma1 * std::pow(t, gamma1 - 1.0) + c2 * gamma2 * std::pow(t, gamma2 - 1.0);
      },
      {1.0 / (g_hi - 1.0), 1.0 / (g_lo - 1.0)}, name.str());
}

void Eos::check_density(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("density must be nonnegative");
}

double Eos::phi(double rho) const {
  check_density(rho);
  if (rho == 0.0) return 0.0;
  if (is_polytrope()) return c_ / (gamma_ - 1.0) * std::pow(rho, gamma_);
  // int_0^rho int_0^sigma P'(t)/t dt dsigma = int_0^rho (rho - t) P'(t)/t dt,
  // with t = rho u^p (p = declared small-density index) so the integrand
  // stays bounded at u -> 0.
  const double p = declared_.n_small;
  return integrate_or_config_error(
      [&](double u) {
        const double t = rho * std::pow(u, p);
        return (rho - t) * p * pressure_prime_(t) / u;
      },
      0.0, 1.0);
}

double Eos::phi_prime(double rho) const {
  check_density(rho);
  if (rho == 0.0) return 0.0;
  if (is_polytrope()) return c_ * gamma_ / (gamma_ - 1.0) * std::pow(rho, gamma_ - 1.0);
  if (phi_prime_nodes_) {
    const int k = static_cast<int>(std::floor((std::log10(rho) - kTableLo) * kTablePerDecade));
    if (k >= 0 && k < kTableNodes) {
      const double base = table_rho(k);
      if (base > rho) return phi_prime_direct(rho);  // log10 rounding at a node
      return (*phi_prime_nodes_)[k] + boost::math::quadrature::gauss<double, 15>::integrate(
                                          [&](double t) { return pressure_prime_(t) / t; }, base,
                                          rho);
    }
  }
  return phi_prime_direct(rho);
}

double Eos::phi_prime_direct(double rho) const {
  const double p = declared_.n_small;
  return integrate_or_config_error(
      [&](double u) { return p * pressure_prime_(rho * std::pow(u, p)) / u; }, 0.0, 1.0);
}

double Eos::phi_second(double rho) const {
  check_density(rho);
  if (is_polytrope()) return c_ * gamma_ * std::pow(rho, gamma_ - 2.0);
  return pressure_prime_(rho) / rho;
}

double Eos::pressure(double rho) const {
  check_density(rho);
  if (rho == 0.0) return 0.0;
  if (is_polytrope()) return c_ * std::pow(rho, gamma_);
  return integrate_or_config_error([&](double t) { return pressure_prime_(t); }, 0.0, rho);
}

double Eos::pressure_prime(double rho) const {
  check_density(rho);
  if (is_polytrope()) return c_ * gamma_ * std::pow(rho, gamma_ - 1.0);
  return rho == 0.0 ? 0.0 : pressure_prime_(rho);
}

double Eos::sound_speed(double rho) const { return std::sqrt(pressure_prime(rho)); }

double Eos::phi_prime_inv(double z) const {
  if (!(z > 0.0)) return 0.0;
  if (is_polytrope()) {
    return std::pow(z * (gamma_ - 1.0) / (c_ * gamma_), 1.0 / (gamma_ - 1.0));
  }
  if (phi_prime_nodes_) {
    const auto& nodes = *phi_prime_nodes_;
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
    if (it != nodes.begin() && it != nodes.end()) {
      // Bracket from the table, then Newton with the exact Phi'' = P'/rho.
      const int k = static_cast<int>(it - nodes.begin()) - 1;
      const double lo = table_rho(k);
      const double hi = table_rho(k + 1);
      const double w = (z - nodes[k]) / (nodes[k + 1] - nodes[k]);
      const double guess = lo * std::pow(hi / lo, w);
      boost::uintmax_t iters = 60;
      const double rho = boost::math::tools::newton_raphson_iterate(
          [&](double x) { return std::make_pair(phi_prime(x) - z, pressure_prime_(x) / x); },
          guess, lo, hi, 42, iters);
      if (iters < 60) return rho;
    }
  }
  // Bracket by doubling or halving from 1, then TOMS 748 on Phi'(rho) - z.
  double lo = 0.5;
  double hi = 1.0;
  int steps = 0;
  if (phi_prime(hi) >= z) {
    while (phi_prime(lo) >= z) {
      hi = lo;
      lo *= 0.5;
      if (++steps > 2000) throw NumericError("phi_prime_inv: no bracket below 1");
    }
  } else {
    while (phi_prime(hi) < z) {
      lo = hi;
      hi *= 2.0;
      if (++steps > 2000) throw NumericError("phi_prime_inv: no bracket above 1");
    }
  }

  boost::uintmax_t max_iter = 200;
  const auto f = [&](double rho) { return phi_prime(rho) - z; };
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::abs(b); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
  if (max_iter >= 200) {
    std::ostringstream msg;
    msg << "phi_prime_inv did not converge for z = " << z << "; bracket [" << a << ", " << b
        << "]";
    throw NumericError(msg.str());
  }
  return 0.5 * (a + b);
}

namespace {

PowerLawFit fit_power_law(const Eos& eos, double lo, double hi, int samples) {
  PowerLawFit fit;
  fit.rho_lo = lo;
  fit.rho_hi = hi;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < samples; ++i) {
    const double x = llo + (lhi - llo) * i / (samples - 1);
    const double y = std::log(eos.phi(std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = samples;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.constant = std::exp((sy - fit.exponent * sx) / n);
  fit.index = 1.0 / (fit.exponent - 1.0);
  fit.admissible = fit.exponent > 1.0 && fit.index > 0.0 && fit.index < 3.0 - kAdmissibleSlack;
  return fit;
}

}  // namespace

AssumptionReport validate_assumptions(const Eos& eos, const SampleRange& range) {
  AssumptionReport report;
  report.large = fit_power_law(eos, range.large_lo, range.large_hi, range.samples_per_window);
  report.small = fit_power_law(eos, range.small_lo, range.small_hi, range.samples_per_window);

  // Convexity over the full sampled span via divided second differences.
  const int m = 4 * range.samples_per_window;
  const double llo = std::log(range.small_lo);
  const double lhi = std::log(range.large_hi);
  std::vector<double> rho(m), phi(m);
  report.pressure_increasing = true;
  for (int i = 0; i < m; ++i) {
    rho[i] = std::exp(llo + (lhi - llo) * i / (m - 1));
    phi[i] = eos.phi(rho[i]);
    if (!(eos.pressure_prime(rho[i]) > 0.0)) report.pressure_increasing = false;
  }
  report.strictly_convex = true;
  report.min_second_derivative = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < m; ++i) {
    const double s1 = (phi[i] - phi[i - 1]) / (rho[i] - rho[i - 1]);
    const double s2 = (phi[i + 1] - phi[i]) / (rho[i + 1] - rho[i]);
    const double d2 = 2.0 * (s2 - s1) / (rho[i + 1] - rho[i - 1]);
    report.min_second_derivative = std::min(report.min_second_derivative, d2);
    if (!(d2 > 0.0)) report.strictly_convex = false;
  }
  return report;
}

}  // namespace polystar
