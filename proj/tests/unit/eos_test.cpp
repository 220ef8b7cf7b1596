#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "polystar/eos.hpp"
#include "polystar/error.hpp"

using polystar::Eos;

namespace {

std::vector<double> log_samples(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

Eos linear_generalized() {
  return Eos::generalized([](double t) { return 2.0 * t; }, {1.0, 1.0}, "linear");
}

}  // namespace

TEST_CASE("polytrope closed forms") {
  const auto e = Eos::polytrope(1.0, 2.0);
  CHECK(e.phi(0.0) == 0.0);
  CHECK(e.phi(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(e.phi_prime(1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e.phi_prime(0.0) == 0.0);
  CHECK(e.phi_prime_inv(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.phi_prime_inv(0.0) == 0.0);
  CHECK(e.phi_prime_inv(-3.0) == 0.0);
  CHECK(e.pressure(0.0) == 0.0);
  CHECK(e.pressure(0.5) == doctest::Approx(0.25).epsilon(1e-15));

  const auto e53 = Eos::polytrope(1.0, 5.0 / 3.0);
  CHECK(e53.phi_prime(8.0) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(e53.polytropic_index() == doctest::Approx(1.5));
}

TEST_CASE("generalized law reproduces the matching polytrope") {
  const auto g = linear_generalized();
  const auto p = Eos::polytrope(1.0, 2.0);
  CHECK(g.phi(0.5) == doctest::Approx(0.25).epsilon(1e-10));
  for (double rho : log_samples(1e-6, 1e4, 31)) {
    CHECK(g.phi(rho) == doctest::Approx(p.phi(rho)).epsilon(1e-10));
    CHECK(g.phi_prime(rho) == doctest::Approx(p.phi_prime(rho)).epsilon(1e-10));
    CHECK(g.pressure(rho) == doctest::Approx(p.pressure(rho)).epsilon(1e-10));
  }
  CHECK(g.phi_prime_inv(1.0) == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("domain and configuration errors") {
  const auto e = Eos::polytrope(1.0, 2.0);
  CHECK_THROWS_AS(e.phi(-1.0), polystar::DomainError);
  CHECK_THROWS_AS(e.phi_prime(-1e-3), polystar::DomainError);
  CHECK_THROWS_AS(e.pressure(-2.0), polystar::DomainError);
  CHECK_THROWS_AS(Eos::polytrope(0.0, 2.0), polystar::DomainError);
  CHECK_THROWS_AS(Eos::polytrope(1.0, 1.0), polystar::DomainError);
  // P'(tau)/tau = 1/tau is not integrable at 0.
  CHECK_THROWS_AS(
      {
        const auto bad = Eos::generalized([](double) { return 1.0; }, {1.0, 1.0});
        (void)bad.phi(1.0);
      },
      polystar::ConfigError);
}

TEST_CASE("assumption report") {
  const auto r2 = polystar::validate_assumptions(Eos::polytrope(1.0, 2.0));
  CHECK(r2.pass());
  CHECK(r2.large.index == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r2.small.index == doctest::Approx(1.0).epsilon(1e-6));

  const auto r43 = polystar::validate_assumptions(Eos::polytrope(1.0, 4.0 / 3.0));
  CHECK_FALSE(r43.pass());
  CHECK_FALSE(r43.large.admissible);

  const auto r3 = polystar::validate_assumptions(Eos::polytrope(1.0, 3.0));
  CHECK(r3.pass());
  CHECK(r3.small.index == doctest::Approx(0.5).epsilon(1e-6));

  // The subdominant term still bends the default windows; push them apart.
  polystar::SampleRange far;
  far.small_lo = 1e-9;
  far.small_hi = 1e-6;
  far.large_lo = 1e5;
  far.large_hi = 1e8;
  const auto two = polystar::validate_assumptions(Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0), far);
  CHECK(two.pass());
  CHECK(two.large.index == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(two.small.index == doctest::Approx(1.5).epsilon(2e-2));
}

TEST_CASE("property: monotone, consistent, convex, invertible") {
  const std::vector<Eos> laws{Eos::polytrope(1.0, 2.0), Eos::polytrope(0.7, 5.0 / 3.0),
                              Eos::polytrope(2.0, 1.4), Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0),
                              linear_generalized()};
  const auto rho = log_samples(1e-5, 1e3, 41);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, rho.size() - 1);

  for (const auto& e : laws) {
    CAPTURE(e.name());
    for (std::size_t i = 1; i < rho.size(); ++i) CHECK(e.phi_prime(rho[i - 1]) < e.phi_prime(rho[i]));

    for (double r : rho) {
      // P' = rho Phi'' with Phi'' differenced from Phi'.
      const double h = 1e-5 * r;
      const double d2 = (e.phi_prime(r + h) - e.phi_prime(r - h)) / (2.0 * h);
      CHECK(r * d2 == doctest::Approx(e.pressure_prime(r)).epsilon(1e-6));
      CHECK(e.pressure(r) == doctest::Approx(r * e.phi_prime(r) - e.phi(r)).epsilon(1e-9));
      CHECK(e.phi_prime_inv(e.phi_prime(r)) == doctest::Approx(r).epsilon(1e-10));
    }

    for (int t = 0; t < 200; ++t) {
      const double a = rho[pick(rng)];
      const double s = rho[pick(rng)];
      const double gap = e.phi(a) - e.phi(s) - e.phi_prime(s) * (a - s);
      CHECK(gap >= -1e-12 * (1.0 + std::abs(e.phi(a)) + std::abs(e.phi(s))));
    }
    CHECK(e.phi(0.0) == 0.0);
    CHECK(e.phi_prime(0.0) == 0.0);
  }
}
